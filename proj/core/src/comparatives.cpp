#include "chromalign/comparatives.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "chromalign/error.hpp"
#include "chromalign/text.hpp"

namespace chromalign {
namespace {

using nlohmann::ordered_json;

template <typename Fn>
void for_each_json_line(std::istream& in, std::string_view what, Fn&& fn) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
      fn(j);
    } catch (const ordered_json::exception& e) {
      throw FormatError(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw FormatError(std::string(what) + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::vector<LabPoint> parse_points(const ordered_json& j, std::string_view field) {
  if (!j.is_array() || j.empty()) throw FormatError(std::string(field) + ": expected a nonempty array");
  std::vector<LabPoint> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 3) throw FormatError(std::string(field) + ": each point is [L,a,b]");
    LabPoint lab{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
    if (!std::isfinite(lab.L) || !std::isfinite(lab.a) || !std::isfinite(lab.b)) {
      throw FormatError(std::string(field) + ": non-finite coordinate");
    }
    out.push_back(lab);
  }
  return out;
}

ordered_json points_json(std::span<const LabPoint> points) {
  ordered_json out = ordered_json::array();
  for (const auto& p : points) out.push_back({p.L, p.a, p.b});
  return out;
}

double mean_distance(std::span<const LabPoint> points, const LabPoint& to) {
  double sum = 0.0;
  for (const auto& p : points) sum += delta_e(p, to);
  return sum / double(points.size());
}

std::string require_string(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) throw FormatError(std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

std::vector<std::string> require_strings(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw FormatError(std::string("missing array field '") + key + "'");
  return j.at(key).get<std::vector<std::string>>();
}

std::string sequence_id(char prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%06zu", prefix, index + 1);
  return buf;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t count = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos; pos = haystack.find(needle, pos + needle.size())) {
    ++count;
  }
  return count;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string normalize_comparative(std::string_view label) {
  std::string out;
  for (auto piece : split_whitespace(label)) {
    if (!out.empty()) out.push_back(' ');
    out += to_upper_ascii(piece);
  }
  if (out.empty()) throw ArgumentError("empty comparative label");
  return out;
}

std::vector<ComparativeTuple> read_comparatives(std::istream& in) {
  std::vector<ComparativeTuple> out;
  for_each_json_line(in, "comparatives", [&](const ordered_json& j) {
    ComparativeTuple t;
    t.comparative = normalize_comparative(require_string(j, "comparative"));
    if (!j.contains("reference") || !j.contains("target")) throw FormatError("missing reference or target");
    t.reference = parse_points(j.at("reference"), "reference");
    t.target = parse_points(j.at("target"), "target");
    out.push_back(std::move(t));
  });
  return out;
}

std::vector<ComparativeTuple> read_comparatives(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_comparatives(in);
}

void write_comparatives(std::ostream& out, std::span<const ComparativeTuple> tuples) {
  for (const auto& t : tuples) {
    ordered_json j;
    j["comparative"] = t.comparative;
    j["reference"] = points_json(t.reference);
    j["target"] = points_json(t.target);
    out << j.dump() << '\n';
  }
}

std::vector<std::string> comparative_labels(std::span<const ComparativeTuple> tuples) {
  std::set<std::string> labels;
  for (const auto& t : tuples) labels.insert(t.comparative);
  return {labels.begin(), labels.end()};
}

std::vector<RankedComparative> rank_comparatives(const LabPoint& left, const LabPoint& right,
                                                 std::span<const ComparativeTuple> tuples) {
  if (tuples.empty()) throw ArgumentError("match: no comparative tuples");
  std::map<std::string, double> best;
  for (const auto& t : tuples) {
    if (t.reference.empty() || t.target.empty()) {
      throw ArgumentError("match: tuple '" + t.comparative + "' has an empty point set");
    }
    const double cost = mean_distance(t.reference, left) + mean_distance(t.target, right);
    auto [it, inserted] = best.emplace(t.comparative, cost);
    if (!inserted) it->second = std::min(it->second, cost);
  }
  std::vector<RankedComparative> ranking;
  ranking.reserve(best.size());
  for (const auto& [label, cost] : best) ranking.push_back({label, cost});
  std::stable_sort(ranking.begin(), ranking.end(),
                   [](const auto& a, const auto& b) { return a.cost < b.cost; });
  return ranking;
}

MatchedPair match_pair(const ColorPair& left, const ColorPair& right, std::span<const ComparativeTuple> tuples,
                       std::string pair_id) {
  MatchedPair out;
  out.pair_id = std::move(pair_id);
  out.left_id = left.id;
  out.right_id = right.id;
  out.ranking = rank_comparatives(srgb_to_lab(left.color), srgb_to_lab(right.color), tuples);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> sample_index_pairs(std::size_t n, std::size_t count,
                                                                    std::uint64_t seed) {
  const std::size_t total = n < 2 ? 0 : n * (n - 1);
  if (count > total) {
    throw ArgumentError("cannot draw " + std::to_string(count) + " distinct ordered pairs from " +
                        std::to_string(n) + " items");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(count);
  if (2 * count > total) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) out.emplace_back(i, j);
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, out.size() - 1);
      std::swap(out[i], out[pick(rng)]);
    }
    out.resize(count);
    return out;
  }
  std::uniform_int_distribution<std::size_t> item(0, n - 1);
  std::unordered_set<std::size_t> seen;
  while (out.size() < count) {
    const std::size_t i = item(rng);
    const std::size_t j = item(rng);
    if (i == j || !seen.insert(i * n + j).second) continue;
    out.emplace_back(i, j);
  }
  return out;
}

std::vector<MatchedPair> match_pairs(std::span<const ColorPair> pairs,
                                     std::span<const std::pair<std::size_t, std::size_t>> index_pairs,
                                     std::span<const ComparativeTuple> tuples, std::size_t jobs) {
  if (tuples.empty()) throw ArgumentError("match: no comparative tuples");
  for (const auto& [i, j] : index_pairs) {
    if (i >= pairs.size() || j >= pairs.size()) throw ArgumentError("match: pair index out of range");
  }
  std::vector<MatchedPair> out(index_pairs.size());
  auto work = [&](std::size_t k) {
    const auto [i, j] = index_pairs[k];
    out[k] = match_pair(pairs[i], pairs[j], tuples, sequence_id('m', k));
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, index_pairs.size()));
  if (jobs == 1) {
    for (std::size_t k = 0; k < index_pairs.size(); ++k) work(k);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < index_pairs.size(); k = next++) work(k);
    });
  }
  for (auto& t : workers) t.join();
  return out;
}

std::vector<MatchedPair> read_matched(std::istream& in) {
  std::vector<MatchedPair> out;
  for_each_json_line(in, "matched", [&](const ordered_json& j) {
    MatchedPair m;
    m.pair_id = require_string(j, "pair_id");
    m.left_id = require_string(j, "left_id");
    m.right_id = require_string(j, "right_id");
    if (!j.contains("ranking") || !j.at("ranking").is_array() || j.at("ranking").empty()) {
      throw FormatError("ranking: expected a nonempty array");
    }
    for (const auto& r : j.at("ranking")) {
      if (!r.is_array() || r.size() != 2) throw FormatError("ranking: entries are [label, cost]");
      m.ranking.push_back({normalize_comparative(r[0].get<std::string>()), r[1].get<double>()});
    }
    for (std::size_t i = 1; i < m.ranking.size(); ++i) {
      if (m.ranking[i].cost < m.ranking[i - 1].cost) throw FormatError("ranking: costs not ascending");
    }
    if (j.contains("gold") && normalize_comparative(j.at("gold").get<std::string>()) != m.gold()) {
      throw FormatError("gold differs from the first ranked comparative");
    }
    out.push_back(std::move(m));
  });
  return out;
}

std::vector<MatchedPair> read_matched(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_matched(in);
}

void write_matched(std::ostream& out, std::span<const MatchedPair> matched) {
  for (const auto& m : matched) {
    ordered_json j;
    j["pair_id"] = m.pair_id;
    j["left_id"] = m.left_id;
    j["right_id"] = m.right_id;
    j["gold"] = m.gold();
    j["ranking"] = ordered_json::array();
    for (const auto& r : m.ranking) j["ranking"].push_back({r.comparative, r.cost});
    out << j.dump() << '\n';
  }
}

std::string fill_template(std::string_view template_text, std::string_view left, std::string_view comparative,
                          std::string_view right) {
  static constexpr std::string_view kSlots[] = {"{left}", "{comparative}", "{right}"};
  for (auto slot : kSlots) {
    if (count_occurrences(template_text, slot) != 1) {
      throw ArgumentError("template must contain " + std::string(slot) + " exactly once");
    }
  }
  std::string out;
  std::size_t pos = 0;
  while (pos < template_text.size()) {
    bool replaced = false;
    for (std::size_t s = 0; s < 3; ++s) {
      if (template_text.substr(pos).starts_with(kSlots[s])) {
        out += s == 0 ? left : s == 1 ? comparative : right;
        pos += kSlots[s].size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(template_text[pos++]);
  }
  return out;
}

std::vector<PromptSet> build_prompts(std::span<const MatchedPair> matched, std::span<const ColorPair> pairs,
                                     const PromptOptions& options, std::span<const std::string> candidates) {
  if (options.k < 2) throw ArgumentError("prompts: K must be >= 2");
  if (matched.size() < options.k) throw ArgumentError("prompts: fewer matched pairs than K");
  if (options.mask_token.empty()) throw ArgumentError("prompts: empty mask token");
  fill_template(options.template_text, "", "", "");  // validates the placeholders

  std::unordered_map<std::string_view, const ColorPair*> by_id;
  for (const auto& p : pairs) by_id.emplace(p.id, &p);
  auto description = [&](const std::string& id) -> const std::string& {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ValidationError("prompts: matched pair refers to unknown id '" + id + "'");
    return it->second->description;
  };

  std::vector<std::string> vocabulary(candidates.begin(), candidates.end());
  if (vocabulary.empty()) {
    std::set<std::string> seen;
    for (const auto& m : matched) {
      for (const auto& r : m.ranking) seen.insert(r.comparative);
    }
    vocabulary.assign(seen.begin(), seen.end());
  }

  auto query_ok = [&](const MatchedPair& m) {
    const std::string text = to_lower_ascii(description(m.left_id) + " " + description(m.right_id));
    return text.find(to_lower_ascii(m.gold())) == std::string::npos &&
           text.find(to_lower_ascii(options.mask_token)) == std::string::npos;
  };

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> pool(matched.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;

  std::vector<PromptSet> out;
  out.reserve(options.count);
  const std::size_t k = options.k;
  for (std::size_t p = 0; p < options.count; ++p) {
    bool found = false;
    for (std::size_t draw = 0; draw < options.max_draws && !found; ++draw) {
      for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
      }
      for (std::size_t i = k; i-- > 0;) {
        if (query_ok(matched[pool[i]])) {
          std::swap(pool[i], pool[k - 1]);
          found = true;
          break;
        }
      }
    }
    if (!found) {
      throw ValidationError("prompts: no leak-free query after " + std::to_string(options.max_draws) + " draws");
    }

    PromptSet ps;
    ps.prompt_id = sequence_id('p', p);
    for (std::size_t i = 0; i + 1 < k; ++i) {
      const MatchedPair& m = matched[pool[i]];
      ps.shots.push_back(fill_template(options.template_text, description(m.left_id), to_lower_ascii(m.gold()),
                                       description(m.right_id)));
    }
    const MatchedPair& q = matched[pool[k - 1]];
    ps.query = fill_template(options.template_text, description(q.left_id), options.mask_token,
                             description(q.right_id));
    ps.mask_token = options.mask_token;
    ps.gold = q.gold();
    ps.candidates = vocabulary;
    ps.query_pair_id = q.pair_id;
    ps.query_left_id = q.left_id;
    ps.query_right_id = q.right_id;
    out.push_back(std::move(ps));
  }
  return out;
}

std::vector<PromptSet> read_prompts(std::istream& in) {
  std::vector<PromptSet> out;
  for_each_json_line(in, "prompts", [&](const ordered_json& j) {
    PromptSet p;
    p.prompt_id = require_string(j, "prompt_id");
    p.shots = require_strings(j, "shots");
    p.query = require_string(j, "query");
    p.mask_token = require_string(j, "mask_token");
    p.gold = normalize_comparative(require_string(j, "gold"));
    for (const auto& c : require_strings(j, "candidates")) p.candidates.push_back(normalize_comparative(c));
    if (count_occurrences(p.query, p.mask_token) != 1) throw FormatError("query must contain the mask token once");
    if (j.contains("k") && j.at("k").get<std::size_t>() != p.k()) throw FormatError("k disagrees with shot count");
    if (j.contains("query_pair")) {
      const auto& q = j.at("query_pair");
      p.query_pair_id = require_string(q, "pair_id");
      p.query_left_id = require_string(q, "left_id");
      p.query_right_id = require_string(q, "right_id");
    }
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<PromptSet> read_prompts(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_prompts(in);
}

void write_prompts(std::ostream& out, std::span<const PromptSet> prompts) {
  for (const auto& p : prompts) {
    ordered_json j;
    j["prompt_id"] = p.prompt_id;
    j["k"] = p.k();
    j["shots"] = p.shots;
    j["query"] = p.query;
    j["mask_token"] = p.mask_token;
    j["gold"] = p.gold;
    j["candidates"] = p.candidates;
    j["query_pair"] = {{"pair_id", p.query_pair_id}, {"left_id", p.query_left_id}, {"right_id", p.query_right_id}};
    out << j.dump() << '\n';
  }
}

std::vector<PredictionRecord> read_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  for_each_json_line(in, "predictions", [&](const ordered_json& j) {
    PredictionRecord r;
    r.prompt_id = require_string(j, "prompt_id");
    for (const auto& label : require_strings(j, "ranking")) r.ranking.push_back(normalize_comparative(label));
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_predictions(in);
}

void write_predictions(std::ostream& out, std::span<const PredictionRecord> predictions) {
  for (const auto& r : predictions) {
    ordered_json j;
    j["prompt_id"] = r.prompt_id;
    j["ranking"] = r.ranking;
    out << j.dump() << '\n';
  }
}

MrrReport eval_mrr(std::span<const PromptSet> prompts, std::span<const PredictionRecord> predictions,
                   std::span<const CorpusSlice> slices) {
  std::unordered_map<std::string_view, std::size_t> prompt_index;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (!prompt_index.emplace(prompts[i].prompt_id, i).second) {
      throw ValidationError("duplicate prompt_id '" + prompts[i].prompt_id + "' in prompts");
    }
  }

  MrrReport report;
  report.prompts = prompts.size();
  report.per_prompt.resize(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) report.per_prompt[i].prompt_id = prompts[i].prompt_id;

  for (const auto& pred : predictions) {
    const auto it = prompt_index.find(pred.prompt_id);
    if (it == prompt_index.end()) throw ValidationError("prediction for unknown prompt_id '" + pred.prompt_id + "'");
    PromptScore& score = report.per_prompt[it->second];
    if (score.predicted) throw ValidationError("duplicate prompt_id '" + pred.prompt_id + "' in predictions");
    score.predicted = true;

    const PromptSet& prompt = prompts[it->second];
    const std::set<std::string_view> allowed(prompt.candidates.begin(), prompt.candidates.end());
    std::set<std::string_view> seen;
    for (std::size_t r = 0; r < pred.ranking.size(); ++r) {
      const std::string& label = pred.ranking[r];
      if (!seen.insert(label).second) {
        throw ValidationError("prediction '" + pred.prompt_id + "' repeats label '" + label + "'");
      }
      if (!allowed.empty() && !allowed.count(label)) {
        throw ValidationError("prediction '" + pred.prompt_id + "' uses unknown label '" + label + "'");
      }
      if (label == prompt.gold && !score.rank) score.rank = r + 1;
    }
    if (score.rank) score.reciprocal_rank = 1.0 / double(*score.rank);
    else ++report.missing;
    ++report.predicted;
  }
  report.unpredicted = report.prompts - report.predicted;

  double sum = 0.0;
  for (const auto& s : report.per_prompt) sum += s.reciprocal_rank;
  report.mrr = report.prompts > 0 ? sum / double(report.prompts) : 0.0;

  for (const auto& slice : slices) {
    const std::unordered_set<std::string_view> members(slice.member_ids.begin(), slice.member_ids.end());
    SliceMrr sm;
    sm.slice = slice.name;
    double slice_sum = 0.0;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      if (!members.count(prompts[i].query_left_id)) continue;
      ++sm.prompts;
      slice_sum += report.per_prompt[i].reciprocal_rank;
      if (report.per_prompt[i].predicted && !report.per_prompt[i].rank) ++sm.missing;
    }
    if (sm.prompts > 0) sm.mrr = slice_sum / double(sm.prompts);
    report.slices.push_back(std::move(sm));
  }
  return report;
}

std::set<std::string> correct_prompt_ids(const MrrReport& report) {
  std::set<std::string> out;
  for (const auto& s : report.per_prompt) {
    if (s.rank == std::size_t{1}) out.insert(s.prompt_id);
  }
  return out;
}

std::string comparative_graph(std::span<const MatchedPair> matched, std::span<const PromptSet> prompts,
                              const std::set<std::string>& correct_ids, std::span<const ColorPair> pairs) {
  std::unordered_map<std::string_view, const ColorPair*> by_id;
  for (const auto& p : pairs) by_id.emplace(p.id, &p);
  std::set<std::string> nodes;
  for (const auto& m : matched) {
    nodes.insert(m.left_id);
    nodes.insert(m.right_id);
  }

  std::ostringstream dot;
  dot << "digraph comparatives {\n";
  for (const auto& id : nodes) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ValidationError("graph: no colour pair for id '" + id + "'");
    const std::string hex = to_hex(it->second->color);
    dot << "  \"" << dot_escape(id) << "\" [label=\"" << dot_escape(it->second->description) << "\", hexcolor=\""
        << hex << "\", style=filled, fillcolor=\"" << hex << "\"];\n";
  }

  std::set<std::string> used;
  for (const auto& p : prompts) {
    if (!correct_ids.count(p.prompt_id)) continue;
    used.insert(p.prompt_id);
    if (!nodes.count(p.query_left_id) || !nodes.count(p.query_right_id)) {
      throw ValidationError("graph: prompt '" + p.prompt_id + "' refers to a pair outside the matched set");
    }
    dot << "  \"" << dot_escape(p.query_left_id) << "\" -> \"" << dot_escape(p.query_right_id) << "\" [label=\""
        << dot_escape(p.gold) << "\", prompt=\"" << dot_escape(p.prompt_id) << "\"];\n";
  }
  for (const auto& id : correct_ids) {
    if (!used.count(id)) throw ValidationError("graph: correct id '" + id + "' names no prompt");
  }
  dot << "}\n";
  return dot.str();
}

}  // namespace chromalign
