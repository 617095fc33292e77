#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "chromalign/alignment.hpp"
#include "chromalign/comparatives.hpp"
#include "chromalign/data.hpp"
#include "chromalign/error.hpp"
#include "chromalign/kmeans.hpp"
#include "chromalign/scoring.hpp"
#include "chromalign/text.hpp"
#include "manifest.hpp"

namespace chromalign::cli {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kScoresHeader = "id\tconcreteness\tsubjectivity\tcovered_fraction\thas_color_word";

template <typename Fn>
auto read_input(const fs::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Json path_or_null(const std::optional<fs::path>& p) {
  if (!p) return nullptr;
  return p->generic_string();
}

Json paths(const std::vector<fs::path>& ps) {
  Json out = Json::array();
  for (const auto& p : ps) out.push_back(p.generic_string());
  return out;
}

std::vector<ColorPair> load_pairs(const fs::path& path, RunReport& report, std::ostream& log) {
  auto read = read_pairs(path);
  if (!read.errors.empty()) {
    const std::string msg = path.string() + ": " + std::to_string(read.errors.size()) +
                            " malformed rows ignored (first at line " + std::to_string(read.errors.front().line) +
                            ": " + read.errors.front().message + ")";
    report.warn(msg);
    log << "warning: " << msg << '\n';
  }
  return std::move(read.pairs);
}

std::vector<CorpusSlice> load_slices(const std::vector<fs::path>& files) {
  std::vector<CorpusSlice> out;
  std::set<std::string> names;
  for (const auto& f : files) {
    out.push_back(read_input(f, [&] { return read_slice(f); }));
    if (!names.insert(out.back().name).second) {
      throw ValidationError("duplicate slice name '" + out.back().name + "' (" + f.string() + ")");
    }
  }
  return out;
}

struct ScoreRow {
  std::string id;
  std::optional<double> concreteness;
  double subjectivity = 0.0;
  double covered_fraction = 0.0;
  bool has_color_word = false;
};

std::optional<double> parse_number(std::string_view text) {
  std::istringstream in{std::string(text)};
  double v = 0.0;
  if (!(in >> v) || !in.eof()) return std::nullopt;
  return v;
}

std::vector<ScoreRow> read_scores(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kScoresHeader) {
    throw FormatError(path.string() + ": not a scores file (header mismatch)");
  }
  std::vector<ScoreRow> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    auto bad = [&](std::string_view what) {
      return FormatError(path.string() + ":" + std::to_string(lineno) + ": " + std::string(what));
    };
    if (f.size() != 5) throw bad("expected 5 columns");
    ScoreRow r;
    r.id = std::string(f[0]);
    if (f[1] != "NA") {
      r.concreteness = parse_number(f[1]);
      if (!r.concreteness) throw bad("concreteness is not a number");
    }
    const auto s = parse_number(f[2]);
    const auto c = parse_number(f[3]);
    if (!s || !c) throw bad("subjectivity or covered_fraction is not a number");
    if (f[4] != "0" && f[4] != "1") throw bad("has_color_word must be 0 or 1");
    r.subjectivity = *s;
    r.covered_fraction = *c;
    r.has_color_word = f[4] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

struct Rule {
  std::string name;
  std::regex pattern;
};

std::vector<Rule> load_rules(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open rule file " + path.string());
  std::vector<Rule> rules;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line[0] == '#') continue;
    std::string name = "rule" + std::to_string(lineno);
    std::string expr = line;
    if (const auto tab = line.find('\t'); tab != std::string::npos) {
      name = std::string(trim(std::string_view(line).substr(0, tab)));
      expr = line.substr(tab + 1);
    }
    try {
      rules.push_back({name, std::regex(expr, std::regex::ECMAScript | std::regex::icase)});
    } catch (const std::regex_error& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": bad pattern: " + e.what());
    }
  }
  return rules;
}

Json counts_json(const std::map<std::string, std::size_t>& counts) {
  Json out = Json::object();
  for (const auto& [k, v] : counts) out[k] = v;
  return out;
}

std::map<std::string, std::size_t> gold_counts(std::span<const MatchedPair> matched) {
  std::map<std::string, std::size_t> out;
  for (const auto& m : matched) ++out[m.gold()];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void cmd_ingest(const GlobalOptions& global, const IngestOptions& options, std::ostream& log) {
  require_file(options.pairs, "pairs");
  const bool have_rules = options.rules && fs::is_regular_file(*options.rules);

  RunReport report("ingest", global.out, global.seed);
  report.config() = {{"pairs", options.pairs.generic_string()},
                     {"rules", path_or_null(options.rules)},
                     {"max_words", options.max_words}};
  report.add_input("pairs", options.pairs);

  std::vector<Rule> rules;
  if (have_rules) {
    rules = load_rules(*options.rules);
    report.add_input("rules", *options.rules);
  } else {
    const std::string msg = options.rules ? "rule file not found: " + options.rules->string() +
                                                "; applying the word-count filter only"
                                          : "no rule file given; applying the word-count filter only";
    report.warn(msg);
    log << "warning: " << msg << '\n';
  }

  const auto read = read_pairs(options.pairs);
  std::map<std::string, std::size_t> drop_counts{{"max_words", 0}, {"parse_error", read.errors.size()}};
  for (const auto& r : rules) drop_counts.emplace(r.name, 0);

  Json dropped = Json::array();
  for (const auto& e : read.errors) {
    dropped.push_back({{"line", e.line}, {"id", nullptr}, {"reason", "parse_error"}, {"message", e.message}});
  }
  std::vector<ColorPair> kept;
  for (const auto& p : read.pairs) {
    std::string reason;
    if (split_whitespace(p.description).size() > options.max_words) {
      reason = "max_words";
    } else {
      for (const auto& r : rules) {
        if (std::regex_search(p.description, r.pattern)) {
          reason = r.name;
          break;
        }
      }
    }
    if (reason.empty()) {
      kept.push_back(p);
    } else {
      ++drop_counts[reason];
      dropped.push_back({{"line", nullptr}, {"id", p.id}, {"reason", reason}, {"message", nullptr}});
    }
  }

  std::ostringstream clean;
  write_pairs(clean, kept);
  report.add_output("pairs.clean.tsv", clean.str());

  const std::size_t rows = read.pairs.size() + read.errors.size();
  report.results() = {{"rows_read", rows},
                      {"parsed", read.pairs.size()},
                      {"kept", kept.size()},
                      {"dropped", rows - kept.size()},
                      {"drop_counts", counts_json(drop_counts)},
                      {"dropped_rows", dropped}};
  report.write("drops.json");
  log << "ingest: " << kept.size() << " of " << rows << " rows kept\n";
}

void cmd_score(const GlobalOptions& global, const ScoreOptions& options, std::ostream& log) {
  require_file(options.pairs, "pairs");
  require_file(options.concreteness, "concreteness lexicon");
  require_file(options.subjectivity, "subjectivity lexicon");
  if (options.color_words) require_file(*options.color_words, "colour words");

  RunReport report("score", global.out, global.seed);
  report.config() = {{"pairs", options.pairs.generic_string()},
                     {"concreteness", options.concreteness.generic_string()},
                     {"subjectivity", options.subjectivity.generic_string()},
                     {"color_words", path_or_null(options.color_words)},
                     {"top_k", options.top_k}};
  report.add_input("pairs", options.pairs);
  report.add_input("concreteness", options.concreteness);
  report.add_input("subjectivity", options.subjectivity);
  if (options.color_words) report.add_input("color_words", *options.color_words);

  const auto conc = read_input(options.concreteness, [&] { return ConcretenessLexicon::load(options.concreteness); });
  const auto subj = read_input(options.subjectivity, [&] { return SubjectivityLexicon::load(options.subjectivity); });
  const ColorWordSet colors = options.color_words
                                  ? read_input(*options.color_words, [&] { return load_color_words(*options.color_words); })
                                  : default_color_words();
  const auto pairs = load_pairs(options.pairs, report, log);

  std::ostringstream tsv;
  tsv << kScoresHeader << '\n';
  std::size_t covered = 0, with_color = 0;
  double conc_sum = 0.0, subj_sum = 0.0;
  for (const auto& p : pairs) {
    const auto s = score_description(p, conc, subj, colors);
    tsv << s.id << '\t' << (s.concreteness ? format_double(*s.concreteness) : "NA") << '\t'
        << format_double(s.subjectivity) << '\t' << format_double(s.covered_fraction) << '\t'
        << (s.has_color_word ? 1 : 0) << '\n';
    if (s.concreteness) {
      ++covered;
      conc_sum += *s.concreteness;
    }
    subj_sum += s.subjectivity;
    if (s.has_color_word) ++with_color;
  }
  report.add_output("scores.tsv", tsv.str());

  const auto pos = pos_pattern_counts(pairs);
  Json patterns = Json::array();
  for (std::size_t i = 0; i < pos.patterns.size() && i < options.top_k; ++i) {
    std::string joined;
    for (const auto& tag : pos.patterns[i].first) joined += (joined.empty() ? "" : " ") + tag;
    patterns.push_back({{"pattern", joined}, {"count", pos.patterns[i].second}});
  }
  const auto vocab = vocabulary_stats(pairs, options.top_k);
  Json top = Json::array();
  for (const auto& [w, c] : vocab.top_words) top.push_back({{"word", w}, {"count", c}});

  const double n = double(pairs.size());
  report.results() = {
      {"descriptions", pairs.size()},
      {"concreteness_covered", covered},
      {"mean_concreteness", covered > 0 ? Json(conc_sum / double(covered)) : Json(nullptr)},
      {"mean_subjectivity", pairs.empty() ? Json(nullptr) : Json(subj_sum / n)},
      {"with_color_word", with_color},
      {"color_word_fraction", pairs.empty() ? Json(nullptr) : Json(double(with_color) / n)},
      {"pos_patterns", patterns},
      {"untagged", pos.untagged},
      {"tokens", vocab.tokens},
      {"vocabulary", vocab.vocabulary},
      {"top_words", top},
  };
  report.write("score.json");
  log << "score: " << pairs.size() << " descriptions scored, " << covered << " with concreteness\n";
}

void cmd_segment(const GlobalOptions& global, const SegmentOptions& options, std::ostream& log) {
  require_file(options.scores, "scores");
  if (options.by != "subjectivity" && options.by != "concreteness" && options.by != "color-word") {
    throw ArgumentError("--by must be subjectivity, concreteness or color-word");
  }
  RunReport report("segment", global.out, global.seed);
  report.add_input("scores", options.scores);
  const auto rows = read_scores(options.scores);

  std::vector<CorpusSlice> slices;
  std::size_t excluded = 0;
  if (options.by == "color-word") {
    CorpusSlice with{"color_word", {}, "description contains a colour word"};
    CorpusSlice without{"no_color_word", {}, "description contains no colour word"};
    for (const auto& r : rows) (r.has_color_word ? with : without).member_ids.push_back(r.id);
    slices = {with, without};
    report.config() = {{"scores", options.scores.generic_string()}, {"by", options.by}};
  } else {
    const bool subj = options.by == "subjectivity";
    const double lo = options.lo.value_or(subj ? 0.0 : 1.0);
    const double hi = options.hi.value_or(subj ? 1.0 : 5.0);
    std::map<std::string, double> scores;
    for (const auto& r : rows) {
      if (subj) {
        scores[r.id] = r.subjectivity;
      } else if (r.concreteness) {
        scores[r.id] = *r.concreteness;
      } else {
        ++excluded;
      }
    }
    slices = uniform_bins(scores, options.bins, lo, hi, options.by);
    // Keep member order identical to the scores file.
    std::unordered_map<std::string, std::size_t> order;
    for (std::size_t i = 0; i < rows.size(); ++i) order.emplace(rows[i].id, i);
    for (auto& s : slices) {
      std::sort(s.member_ids.begin(), s.member_ids.end(),
                [&](const std::string& a, const std::string& b) { return order.at(a) < order.at(b); });
    }
    report.config() = {{"scores", options.scores.generic_string()},
                       {"by", options.by},
                       {"bins", options.bins},
                       {"lo", lo},
                       {"hi", hi}};
    if (excluded > 0) {
      report.warn(std::to_string(excluded) + " descriptions without a concreteness score left out of the bins");
    }
  }

  Json listed = Json::array();
  for (const auto& s : slices) {
    const std::string file = "slices/" + s.name + ".txt";
    report.add_output(file, format_slice(s));
    listed.push_back({{"name", s.name}, {"size", s.member_ids.size()}, {"provenance", s.provenance}, {"file", file}});
  }
  report.results() = {{"slices", listed}, {"excluded", excluded}};
  report.write("segment_" + options.by + ".json");
  log << "segment: " << slices.size() << " slices by " << options.by << '\n';
}

void cmd_align(const GlobalOptions& global, const AlignOptions& options, std::ostream& log) {
  require_file(options.pairs, "pairs");
  require_file(options.embeddings, "embeddings");
  for (const auto& s : options.slices) require_file(s, "slice");
  const AlignMethod method = parse_method(options.method);

  RunReport report("align", global.out, global.seed);
  report.add_input("pairs", options.pairs);
  report.add_input("embeddings", options.embeddings);
  for (const auto& s : options.slices) report.add_input("slice", s);

  AlignParams params;
  params.floor = options.floor;
  params.jobs = global.jobs;
  params.lmap.alpha = options.alpha;
  params.lmap.folds = options.folds;
  params.lmap.seed = global.seed;
  params.gw.epsilon = options.epsilon;
  params.gw.epsilon_schedule = options.epsilon_schedule;
  params.gw.max_outer = options.max_outer;
  params.gw.tol = options.tol;
  params.gw.vertex_restarts = options.vertex_restarts;
  params.gw.seed = global.seed;

  Json config = {{"pairs", options.pairs.generic_string()},
                 {"embeddings", options.embeddings.generic_string()},
                 {"method", options.method},
                 {"slices", paths(options.slices)},
                 {"floor", options.floor}};
  if (method == AlignMethod::kLmap) {
    config["alpha"] = options.alpha;
    config["folds"] = options.folds;
  } else if (method == AlignMethod::kGw) {
    config["epsilon"] = options.epsilon;
    config["epsilon_schedule"] = options.epsilon_schedule;
    config["max_outer"] = options.max_outer;
    config["tol"] = options.tol;
    config["vertex_restarts"] = options.vertex_restarts;
  }
  report.config() = config;

  const auto pairs = load_pairs(options.pairs, report, log);
  const auto embeddings = read_input(options.embeddings, [&] { return load_embeddings(options.embeddings); });
  std::vector<CorpusSlice> slices = load_slices(options.slices);
  if (slices.empty()) slices.push_back({"all", embeddings.ids(), "every embedded description"});

  std::vector<AlignmentReport> results;
  try {
    results = align_slices(pairs, embeddings, slices, method, params);
  } catch (const JoinError& e) {
    std::string ids;
    for (std::size_t i = 0; i < e.missing_ids().size() && i < 10; ++i) ids += (i ? ", " : "") + e.missing_ids()[i];
    if (e.missing_ids().size() > 10) ids += ", ...";
    throw ValidationError("embeddings " + options.embeddings.string() + " has " +
                          std::to_string(e.missing_ids().size()) + " ids absent from pairs " +
                          options.pairs.string() + ": " + ids);
  }

  std::ostringstream tsv;
  tsv << "slice\tmethod\tn\tscore\tstatus\n";
  Json listed = Json::array();
  for (const auto& r : results) {
    listed.push_back(Json::parse(to_json(r)));
    tsv << r.slice << '\t' << r.method << '\t' << r.n << '\t' << (r.score ? format_double(*r.score) : "NA") << '\t'
        << (r.skipped() ? "skipped" : "ok") << '\n';
    log << "align " << r.method << " " << r.slice << ": n=" << r.n << " score="
        << (r.score ? format_double(*r.score) : "skipped") << '\n';
    for (const auto& w : r.warnings) report.warn(r.slice + ": " + w);
  }
  const std::string stem = "align_" + std::string(method_name(method));
  report.add_output(stem + ".tsv", tsv.str());
  report.results() = {{"reports", listed}};
  report.write(stem + ".json");
}

void cmd_match(const GlobalOptions& global, const MatchOptions& options, std::ostream& log) {
  require_file(options.pairs, "pairs");
  require_file(options.comparatives, "comparatives");
  RunReport report("match", global.out, global.seed);
  report.config() = {{"pairs", options.pairs.generic_string()},
                     {"comparatives", options.comparatives.generic_string()},
                     {"count", options.count}};
  report.add_input("pairs", options.pairs);
  report.add_input("comparatives", options.comparatives);

  const auto pairs = load_pairs(options.pairs, report, log);
  const auto tuples = read_input(options.comparatives, [&] { return read_comparatives(options.comparatives); });
  const auto index_pairs = sample_index_pairs(pairs.size(), options.count, global.seed);
  const auto matched = match_pairs(pairs, index_pairs, tuples, global.jobs);

  std::ostringstream body;
  write_matched(body, matched);
  report.add_output("matched.jsonl", body.str());
  report.results() = {{"matched", matched.size()},
                      {"tuples", tuples.size()},
                      {"labels", comparative_labels(tuples)},
                      {"gold_counts", counts_json(gold_counts(matched))}};
  report.write("match.json");
  log << "match: " << matched.size() << " pairs ranked over " << comparative_labels(tuples).size()
      << " comparatives\n";
}

void cmd_prompts(const GlobalOptions& global, const PromptsOptions& options, std::ostream& log) {
  require_file(options.pairs, "pairs");
  require_file(options.matched, "matched");
  if (options.comparatives) require_file(*options.comparatives, "comparatives");
  RunReport report("prompts", global.out, global.seed);
  report.config() = {{"pairs", options.pairs.generic_string()},
                     {"matched", options.matched.generic_string()},
                     {"comparatives", path_or_null(options.comparatives)},
                     {"k", options.k},
                     {"count", options.count},
                     {"template", options.template_text},
                     {"mask_token", options.mask_token}};
  report.add_input("pairs", options.pairs);
  report.add_input("matched", options.matched);
  if (options.comparatives) report.add_input("comparatives", *options.comparatives);

  const auto pairs = load_pairs(options.pairs, report, log);
  const auto matched = read_input(options.matched, [&] { return read_matched(options.matched); });
  std::vector<std::string> candidates;
  if (options.comparatives) {
    candidates = comparative_labels(
        read_input(*options.comparatives, [&] { return read_comparatives(*options.comparatives); }));
    const std::set<std::string> known(candidates.begin(), candidates.end());
    for (const auto& m : matched) {
      if (!known.count(m.gold())) {
        throw ValidationError("matched " + options.matched.string() + " uses label '" + m.gold() +
                              "' absent from comparatives " + options.comparatives->string());
      }
    }
  }

  PromptOptions po;
  po.k = options.k;
  po.count = options.count;
  po.seed = global.seed;
  po.template_text = options.template_text;
  po.mask_token = options.mask_token;
  std::vector<PromptSet> prompts;
  try {
    prompts = build_prompts(matched, pairs, po, candidates);
  } catch (const ValidationError& e) {
    throw ValidationError("matched " + options.matched.string() + " with pairs " + options.pairs.string() + ": " +
                          e.what());
  }

  std::ostringstream body;
  write_prompts(body, prompts);
  report.add_output("prompts.jsonl", body.str());
  std::map<std::string, std::size_t> golds;
  for (const auto& p : prompts) ++golds[p.gold];
  report.results() = {{"prompts", prompts.size()},
                      {"k", options.k},
                      {"candidates", prompts.empty() ? 0 : prompts.front().candidates.size()},
                      {"gold_counts", counts_json(golds)}};
  report.write("prompts.json");
  log << "prompts: " << prompts.size() << " prompt sets with K=" << options.k << '\n';
}

void cmd_eval(const GlobalOptions& global, const EvalOptions& options, std::ostream& log) {
  require_file(options.prompts, "prompts");
  require_file(options.predictions, "predictions");
  for (const auto& s : options.slices) require_file(s, "slice");
  RunReport report("eval", global.out, global.seed);
  report.config() = {{"prompts", options.prompts.generic_string()},
                     {"predictions", options.predictions.generic_string()},
                     {"slices", paths(options.slices)}};
  report.add_input("prompts", options.prompts);
  report.add_input("predictions", options.predictions);
  for (const auto& s : options.slices) report.add_input("slice", s);

  const auto prompts = read_input(options.prompts, [&] { return read_prompts(options.prompts); });
  const auto preds = read_input(options.predictions, [&] { return read_predictions(options.predictions); });
  const auto slices = load_slices(options.slices);
  MrrReport mrr;
  try {
    mrr = eval_mrr(prompts, preds, slices);
  } catch (const ValidationError& e) {
    throw ValidationError("predictions " + options.predictions.string() + " against prompts " +
                          options.prompts.string() + ": " + e.what());
  }
  if (mrr.unpredicted > 0) {
    report.warn(std::to_string(mrr.unpredicted) + " prompts have no prediction and count as 0");
  }

  std::ostringstream tsv;
  tsv << "slice\tprompts\tmissing\tmrr\n";
  tsv << "all\t" << mrr.prompts << '\t' << mrr.missing << '\t' << format_double(mrr.mrr) << '\n';
  Json per_slice = Json::array();
  for (const auto& s : mrr.slices) {
    tsv << s.slice << '\t' << s.prompts << '\t' << s.missing << '\t' << (s.mrr ? format_double(*s.mrr) : "NA")
        << '\n';
    per_slice.push_back({{"slice", s.slice},
                         {"prompts", s.prompts},
                         {"missing", s.missing},
                         {"mrr", s.mrr ? Json(*s.mrr) : Json(nullptr)}});
  }
  std::ostringstream ranks;
  ranks << "prompt_id\tgold\trank\n";
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto& s = mrr.per_prompt[i];
    ranks << s.prompt_id << '\t' << prompts[i].gold << '\t'
          << (s.rank ? std::to_string(*s.rank) : (s.predicted ? "missing" : "unpredicted")) << '\n';
  }
  report.add_output("eval.tsv", tsv.str());
  report.add_output("eval_ranks.tsv", ranks.str());
  report.results() = {{"mrr", mrr.mrr},
                      {"prompts", mrr.prompts},
                      {"predicted", mrr.predicted},
                      {"missing", mrr.missing},
                      {"unpredicted", mrr.unpredicted},
                      {"correct_at_1", correct_prompt_ids(mrr).size()},
                      {"slices", per_slice}};
  report.write("eval.json");
  log << "eval: MRR " << format_double(mrr.mrr) << " over " << mrr.prompts << " prompts\n";
}

void cmd_cluster(const GlobalOptions& global, const ClusterOptions& options, std::ostream& log) {
  require_file(options.pairs, "pairs");
  if (options.space != "color" && options.space != "embedding") {
    throw ArgumentError("--space must be color or embedding");
  }
  if (options.space == "embedding" && !options.embeddings) {
    throw ArgumentError("--space embedding needs --embeddings");
  }
  if (options.embeddings) require_file(*options.embeddings, "embeddings");
  if (options.within) require_file(*options.within, "slice");

  const std::string name = options.name.empty() ? options.space + "_k" + std::to_string(options.k) : options.name;
  RunReport report("cluster", global.out, global.seed);
  report.config() = {{"pairs", options.pairs.generic_string()},
                     {"embeddings", path_or_null(options.embeddings)},
                     {"space", options.space},
                     {"k", options.k},
                     {"within", path_or_null(options.within)},
                     {"name", name},
                     {"max_iter", options.max_iter}};
  report.add_input("pairs", options.pairs);
  if (options.embeddings) report.add_input("embeddings", *options.embeddings);
  if (options.within) report.add_input("within", *options.within);

  const auto pairs = load_pairs(options.pairs, report, log);
  std::optional<CorpusSlice> within;
  if (options.within) within = read_input(*options.within, [&] { return read_slice(*options.within); });
  const std::unordered_set<std::string> members =
      within ? std::unordered_set<std::string>(within->member_ids.begin(), within->member_ids.end())
             : std::unordered_set<std::string>{};
  auto keep = [&](const std::string& id) { return !within || members.count(id) > 0; };

  std::vector<std::string> ids;
  Eigen::MatrixXd points;
  if (options.space == "color") {
    std::vector<LabPoint> labs;
    for (const auto& p : pairs) {
      if (!keep(p.id)) continue;
      ids.push_back(p.id);
      labs.push_back(srgb_to_lab(p.color));
    }
    points.resize(Eigen::Index(labs.size()), 3);
    for (std::size_t i = 0; i < labs.size(); ++i) points.row(Eigen::Index(i)) << labs[i].L, labs[i].a, labs[i].b;
  } else {
    const auto emb = read_input(*options.embeddings, [&] { return load_embeddings(*options.embeddings); });
    for (const auto& id : emb.ids()) {
      if (keep(id)) ids.push_back(id);
    }
    points = embedding_matrix(emb.select(ids));
  }
  if (within && ids.size() < within->member_ids.size()) {
    report.warn(std::to_string(within->member_ids.size() - ids.size()) + " members of " + within->name +
                " are not in the " + options.space + " space");
  }

  KMeansOptions ko;
  ko.seed = global.seed;
  ko.max_iter = options.max_iter;
  const auto res = kmeans(points, options.k, ko);

  std::vector<CorpusSlice> clusters(options.k);
  for (std::size_t c = 0; c < options.k; ++c) {
    clusters[c].name = name + "_c" + std::to_string(c);
    clusters[c].provenance = "kmeans space=" + options.space + " k=" + std::to_string(options.k) +
                             " cluster=" + std::to_string(c) + " seed=" + std::to_string(global.seed) +
                             (within ? " within=" + within->name : "");
  }
  std::ostringstream tsv;
  tsv << "id\tcluster\n";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    clusters[res.labels[i]].member_ids.push_back(ids[i]);
    tsv << ids[i] << '\t' << res.labels[i] << '\n';
  }
  Json sizes = Json::array();
  for (const auto& c : clusters) {
    report.add_output("clusters/" + c.name + ".txt", format_slice(c));
    sizes.push_back({{"name", c.name}, {"size", c.member_ids.size()}});
  }
  report.add_output("cluster_" + name + ".tsv", tsv.str());
  report.results() = {{"points", ids.size()},
                      {"inertia", res.inertia},
                      {"iterations", res.iterations},
                      {"converged", res.converged},
                      {"reseeded", res.reseeded},
                      {"inertia_history", res.inertia_history},
                      {"clusters", sizes}};
  report.write("cluster_" + name + ".json");
  log << "cluster: " << ids.size() << " points into " << options.k << " clusters (" << options.space << ")\n";
}

void cmd_graph(const GlobalOptions& global, const GraphOptions& options, std::ostream& log) {
  require_file(options.pairs, "pairs");
  require_file(options.matched, "matched");
  require_file(options.prompts, "prompts");
  require_file(options.predictions, "predictions");
  RunReport report("graph", global.out, global.seed);
  report.config() = {{"pairs", options.pairs.generic_string()},
                     {"matched", options.matched.generic_string()},
                     {"prompts", options.prompts.generic_string()},
                     {"predictions", options.predictions.generic_string()}};
  report.add_input("pairs", options.pairs);
  report.add_input("matched", options.matched);
  report.add_input("prompts", options.prompts);
  report.add_input("predictions", options.predictions);

  const auto pairs = load_pairs(options.pairs, report, log);
  const auto matched = read_input(options.matched, [&] { return read_matched(options.matched); });
  const auto prompts = read_input(options.prompts, [&] { return read_prompts(options.prompts); });
  const auto preds = read_input(options.predictions, [&] { return read_predictions(options.predictions); });

  std::string dot;
  std::set<std::string> correct;
  try {
    correct = correct_prompt_ids(eval_mrr(prompts, preds));
    dot = comparative_graph(matched, prompts, correct, pairs);
  } catch (const ValidationError& e) {
    throw ValidationError("graph inputs " + options.matched.string() + ", " + options.prompts.string() + ", " +
                          options.predictions.string() + ": " + e.what());
  }
  report.add_output("graph.dot", dot);
  std::set<std::string> node_ids;
  for (const auto& m : matched) {
    node_ids.insert(m.left_id);
    node_ids.insert(m.right_id);
  }
  const std::size_t nodes = node_ids.size();
  report.results() = {{"nodes", nodes}, {"edges", correct.size()}};
  report.write("graph.json");
  log << "graph: " << nodes << " nodes, " << correct.size() << " edges\n";
}

}  // namespace chromalign::cli
