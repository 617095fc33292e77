// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "chromalign/colorspace.hpp"
#include "chromalign/comparatives.hpp"
#include "chromalign/data.hpp"
#include "chromalign/gromov.hpp"
#include "chromalign/lmap.hpp"
#include "chromalign/rsa.hpp"
#include "chromalign/scoring.hpp"
#include "chromalign/sinkhorn.hpp"
#include "cli.hpp"
#include "instances.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace chromalign;
using Json = nlohmann::json;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      if (!failures_.empty()) failures_ += "; ";
      failures_ += what;
    }
  }
  void note(const std::string& text) {
    if (!notes_.empty()) notes_ += ", ";
    notes_ += text;
  }
  Verdict verdict() const { return {pass_, pass_ ? notes_ : failures_ + " [" + notes_ + "]"}; }

 private:
  bool pass_ = true;
  std::string failures_;
  std::string notes_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd uniform(Eigen::Index n) { return Eigen::VectorXd::Constant(n, 1.0 / double(n)); }

Verdict gw_brute_force() {
  Check c;
  std::mt19937_64 rng(20240601);
  const auto t0 = std::chrono::steady_clock::now();
  double worst_gap = -1e300;
  int misses = 0;
  for (int i = 0; i < 30; ++i) {
    const Eigen::Index n = 4 + i % 3;
    const auto c1 = instances::random_lab_cosine(n, rng);
    const auto c2 = instances::random_lab_cosine(n, rng);
    const double opt = oracle::brute_force_gw(c1, c2);
    GwOptions o;
    o.seed = std::uint64_t(i);
    const double cost = gromov_wasserstein(c1, c2, o).cost;
    worst_gap = std::max(worst_gap, cost - opt);
    if (cost > opt + 1e-3) ++misses;
  }
  const double t = seconds_since(t0);
  c.require(misses == 0, std::to_string(misses) + "/30 above optimum + 1e-3");
  c.require(t < 5.0, "runtime >= 5 s");
  c.note("worst gap " + fmt("%.3g", worst_gap));
  c.note(fmt("%.2f s", t));
  return c.verdict();
}

Verdict gw_isometry() {
  Check c;
  std::mt19937_64 rng(7);
  const auto x = instances::gaussian_points(20, 3, rng);
  const Eigen::MatrixXd y = x * oracle::random_rotation(rng);
  const auto t0 = std::chrono::steady_clock::now();
  GwOptions o;
  o.epsilon = 5e-3;
  const auto r = gromov_wasserstein(cosine_similarity(x), cosine_similarity(y), o);
  const double t = seconds_since(t0);
  const double marg = marginal_error(r.coupling.plan, uniform(20), uniform(20));
  c.require(r.matching_accuracy >= 0.95, "accuracy < 0.95");
  c.require(marg <= 1e-6, "marginal error > 1e-6");
  c.require(t < 2.0, "runtime >= 2 s");
  c.note("accuracy " + fmt("%.3f", r.matching_accuracy));
  c.note("marginal error " + fmt("%.2g", marg));
  c.note(fmt("%.2f s", t));
  return c.verdict();
}

Verdict kendall_exact() {
  Check c;
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> small(0, 6);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> xs, ys;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(20), y(20);
    for (int j = 0; j < 20; ++j) {
      x[std::size_t(j)] = i % 2 ? double(small(rng)) : g(rng);
      y[std::size_t(j)] = i % 3 ? double(small(rng)) : g(rng);
    }
    xs.push_back(std::move(x));
    ys.push_back(std::move(y));
  }
  const auto t0 = std::chrono::steady_clock::now();
  int mismatches = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double got = kendall_tau_b(xs[i], ys[i]);
    const double want = oracle::kendall_tau_b(xs[i], ys[i]);
    const bool same = (std::isnan(got) && std::isnan(want)) || got == want;
    if (!same) ++mismatches;
  }
  const double t = seconds_since(t0);
  c.require(mismatches == 0, std::to_string(mismatches) + "/100 differ from pair counting");
  c.require(t < 1.0, "runtime >= 1 s");
  c.note(std::to_string(100 - mismatches) + "/100 identical");
  c.note(fmt("%.4f s", t));
  return c.verdict();
}

Verdict lasso() {
  Check c;
  std::mt19937_64 rng(5);
  const auto X = instances::gaussian_points(200, 16, rng);
  const Eigen::MatrixXd W = instances::gaussian_points(16, 3, rng) * 10.0;
  Eigen::MatrixXd Y = X * W;
  Y.rowwise() += Eigen::RowVector3d(50.0, 5.0, -5.0);
  const auto fit = fit_lmap(X, Y, {.alpha = 1e-6});
  c.require(fit.score >= 0.999, "noiseless R2 < 0.999");
  c.note("noiseless R2 " + fmt("%.6f", fit.score));

  std::vector<Eigen::Index> perm(200);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const Eigen::MatrixXd shuffled = Y(perm, Eigen::all);
  const auto control = fit_lmap(X, shuffled, {.alpha = 1e-2});
  c.require(control.score <= 0.05, "permuted R2 > 0.05");
  c.note("permuted R2 " + fmt("%.4f", control.score));

  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto Xs = instances::gaussian_points(50, 4, rng);
    const Eigen::VectorXd ys = Xs * Eigen::Vector4d(2.0, 0.0, -1.0, 0.1) + instances::gaussian_points(50, 1, rng).col(0);
    const double alpha = 0.05 * (1 + trial % 4);
    const auto w = lasso_coordinate_descent(Xs, ys, {.alpha = alpha}).w;
    worst = std::max(worst, std::abs(lasso_objective(Xs, ys, w, alpha) - oracle::lasso_optimum(Xs, ys, alpha)));
  }
  c.require(worst <= 1e-6, "objective differs from exact optimum by > 1e-6");
  c.note("objective gap " + fmt("%.2g", worst));
  return c.verdict();
}

Verdict color() {
  Check c;
  const auto w = srgb_to_lab({255, 255, 255}), k = srgb_to_lab({0, 0, 0});
  c.require(std::abs(w.L - 100) <= 0.01 && std::abs(w.a) <= 0.01 && std::abs(w.b) <= 0.01, "white");
  c.require(std::abs(k.L) <= 0.01 && std::abs(k.a) <= 0.01 && std::abs(k.b) <= 0.01, "black");
  double worst_grey = 0.0;
  for (int v = 0; v <= 255; ++v) {
    const auto g = srgb_to_lab({v, v, v});
    worst_grey = std::max({worst_grey, std::abs(g.a), std::abs(g.b)});
  }
  c.require(worst_grey < 0.05, "grey not neutral");
  c.require(delta_e({50, 0, 0}, {50, 3, 4}) == 5.0, "3-4-5 example");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100, 100);
  bool symmetric = true;
  for (int i = 0; i < 1000; ++i) {
    const LabPoint p{u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng)};
    symmetric = symmetric && delta_e(p, q) == delta_e(q, p);
  }
  c.require(symmetric, "dE not symmetric");
  c.note("white L " + fmt("%.4f", w.L));
  c.note("max grey |a|,|b| " + fmt("%.2g", worst_grey));
  return c.verdict();
}

PromptSet bare_prompt(std::string id, std::string gold, std::vector<std::string> candidates) {
  PromptSet p;
  p.prompt_id = std::move(id);
  p.gold = std::move(gold);
  p.candidates = std::move(candidates);
  return p;
}

Verdict mrr() {
  Check c;
  const std::vector<std::string> four{"A", "B", "C", "D"};
  const std::vector<PromptSet> prompts{bare_prompt("p1", "A", four), bare_prompt("p2", "B", four),
                                       bare_prompt("p3", "D", four)};
  const std::vector<PredictionRecord> preds(3, {"", four});
  std::vector<PredictionRecord> named = preds;
  named[0].prompt_id = "p1";
  named[1].prompt_id = "p2";
  named[2].prompt_id = "p3";
  const double worked = eval_mrr(prompts, named).mrr;
  c.require(worked == (1.0 + 0.5 + 0.25) / 3.0, "ranks {1,2,4} != 7/12");
  c.note("ranks {1,2,4} " + fmt("%.5f", worked));

  std::vector<std::string> labels;
  for (int i = 0; i < 81; ++i) labels.push_back("L" + std::to_string(i));
  std::mt19937_64 rng(81);
  std::uniform_int_distribution<std::size_t> pick(0, 80);
  std::vector<PromptSet> sim;
  std::vector<PredictionRecord> sim_preds;
  for (int i = 0; i < 2000; ++i) {
    const std::string id = "p" + std::to_string(i);
    sim.push_back(bare_prompt(id, labels[pick(rng)], labels));
    auto ranking = labels;
    std::shuffle(ranking.begin(), ranking.end(), rng);
    sim_preds.push_back({id, std::move(ranking)});
  }
  const double null_mrr = eval_mrr(sim, sim_preds).mrr;
  c.require(std::abs(null_mrr - 0.0639) <= 0.01, "null MRR outside 0.0639 +- 0.01");
  c.note("null MRR " + fmt("%.4f", null_mrr) + " (H81/81 = " + fmt("%.4f", oracle::uniform_mrr(81)) + ")");
  return c.verdict();
}

Verdict matching() {
  Check c;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> L(0, 100), ab(-60, 60);
  auto lab = [&] { return LabPoint{L(rng), ab(rng), ab(rng)}; };
  std::vector<ComparativeTuple> tuples;
  for (int l = 0; l < 12; ++l)
    for (int t = 0; t < 3; ++t) {
      ComparativeTuple tuple{"C" + std::to_string(l), {}, {}};
      for (int p = 0; p < 3; ++p) {
        tuple.reference.push_back(lab());
        tuple.target.push_back(lab());
      }
      tuples.push_back(std::move(tuple));
    }
  const LabPoint left{35, 20, -10}, right{80, -5, 30};
  auto planted = tuples;
  planted.push_back({"PLANTED", {left, left}, {right}});
  const auto top = rank_comparatives(left, right, planted).front();
  c.require(top.comparative == "PLANTED" && top.cost == 0.0, "zero-cost tuple not ranked first");

  auto swapped = tuples;
  for (auto& t : swapped) std::swap(t.reference, t.target);
  int broken = 0;
  for (int i = 0; i < 100; ++i) {
    const auto a = lab(), b = lab();
    const auto r1 = rank_comparatives(a, b, tuples), r2 = rank_comparatives(b, a, swapped);
    bool same = r1.size() == r2.size();
    for (std::size_t j = 0; same && j < r1.size(); ++j) {
      same = r1[j].comparative == r2[j].comparative && std::abs(r1[j].cost - r2[j].cost) <= 1e-9;
    }
    if (!same) ++broken;
  }
  c.require(broken == 0, std::to_string(broken) + "/100 pairs break swap symmetry");
  c.note("zero-cost tuple rank 1");
  c.note("swap symmetry 100/100");
  return c.verdict();
}

Verdict binning() {
  Check c;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::map<std::string, double> scores;
  for (int i = 0; i < 1000; ++i) scores["r" + std::to_string(i)] = u(rng);
  for (std::size_t k : {2u, 5u, 10u}) {
    const auto bins = uniform_bins(scores, k, 0.0, 1.0);
    std::set<std::string> seen;
    std::size_t total = 0;
    bool in_range = true;
    for (std::size_t i = 0; i < k; ++i) {
      for (const auto& id : bins[i].member_ids) {
        const double s = scores.at(id);
        const double lo = double(i) / double(k), hi = double(i + 1) / double(k);
        in_range = in_range && s >= lo - 1e-15 && (i + 1 == k ? s <= 1.0 : s < hi + 1e-15);
        seen.insert(id);
      }
      total += bins[i].member_ids.size();
    }
    c.require(total == 1000 && seen.size() == 1000 && in_range, "k=" + std::to_string(k) + " not a disjoint cover");
  }
  const auto edge = uniform_bins({{"top", 1.0}}, 5, 0.0, 1.0);
  c.require(edge[4].member_ids.size() == 1, "upper bound not in last bin");
  c.note("k in {2,5,10} cover 1000/1000");
  c.note("hi lands in last bin");
  return c.verdict();
}

Verdict end_to_end(const fs::path& work) {
  Check c;
  const fs::path fixtures = CHROMALIGN_FIXTURE_DIR;
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string out = work.string();
  std::ostringstream log;
  auto step = [&](std::vector<std::string> args) {
    args.insert(args.begin(), {"chromalign", "--out", out, "--seed", "0"});
    const int code = cli::run(args, log, log);
    c.require(code == 0, args[5] + " exited " + std::to_string(code));
    return code == 0;
  };

  const auto t0 = std::chrono::steady_clock::now();
  bool ok = step({"ingest", "--pairs", (fixtures / "pairs.tsv").string(), "--rules", (fixtures / "rules.txt").string()}) &&
            step({"score", "--pairs", (work / "pairs.clean.tsv").string(), "--concreteness",
                  (fixtures / "concreteness.tsv").string(), "--subjectivity", (fixtures / "subjectivity.tsv").string()}) &&
            step({"segment", "--scores", (work / "scores.tsv").string(), "--by", "subjectivity", "--bins", "5"});
  const fs::path planted_slice = work / "slices" / "subjectivity_bin0.txt";
  const fs::path scrambled_slice = work / "slices" / "subjectivity_bin4.txt";
  for (const char* method : {"lmap", "gw"}) {
    ok = ok && step({"align", "--method", method, "--pairs", (work / "pairs.clean.tsv").string(), "--embeddings",
                     (fixtures / "embeddings.emb").string(), "--slice", planted_slice.string(), "--slice",
                     scrambled_slice.string()});
  }
  const double t = seconds_since(t0);
  if (!ok) {
    c.note(log.str());
    return c.verdict();
  }

  // The slices must be exactly the planted (p*) and scrambled (s*) halves.
  const auto planted = read_slice(planted_slice), scrambled = read_slice(scrambled_slice);
  auto all_prefixed = [](const CorpusSlice& s, char prefix) {
    return std::all_of(s.member_ids.begin(), s.member_ids.end(), [&](const std::string& id) { return id[0] == prefix; });
  };
  c.require(planted.member_ids.size() == 250 && all_prefixed(planted, 'p'), "bin0 is not the planted half");
  c.require(scrambled.member_ids.size() == 250 && all_prefixed(scrambled, 's'), "bin4 is not the scrambled half");

  auto score_of = [&](const char* method, std::size_t slice) {
    std::ifstream in(work / ("align_" + std::string(method) + ".json"));
    const auto j = Json::parse(in);
    return j["results"]["reports"][slice]["score"].get<double>();
  };
  const double lmap_planted = score_of("lmap", 0), lmap_scrambled = score_of("lmap", 1);
  const double gw_planted = score_of("gw", 0), gw_scrambled = score_of("gw", 1);
  c.require(lmap_planted >= 0.95, "planted LMap R2 < 0.95");
  c.require(gw_planted >= 0.9, "planted GW accuracy < 0.9");
  c.require(lmap_scrambled <= 0.1, "scrambled LMap R2 > 0.1");
  c.require(gw_scrambled <= 0.05, "scrambled GW accuracy > 0.05");
  c.require(t < 60.0, "pipeline >= 60 s");
  c.note("LMap R2 planted " + fmt("%.4f", lmap_planted) + " scrambled " + fmt("%.4f", lmap_scrambled));
  c.note("GW accuracy planted " + fmt("%.3f", gw_planted) + " scrambled " + fmt("%.3f", gw_scrambled));
  c.note(fmt("%.1f s", t));
  return c.verdict();
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "chromalign_acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--work" && i + 1 < argc) {
      work = argv[++i];
    } else {
      std::cerr << "usage: chromalign_acceptance [--work DIR]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"gw-vs-brute-force", gw_brute_force},
      {"gw-isometry-recovery", gw_isometry},
      {"kendall-tau-b-exact", kendall_exact},
      {"lasso-recovery-control-objective", lasso},
      {"color-conversion", color},
      {"mrr-arithmetic-and-null", mrr},
      {"comparative-matching", matching},
      {"binning-cover-and-boundary", binning},
      {"end-to-end-fixture", [&] { return end_to_end(work); }},
  };

  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
  }
  std::cout << (criteria.size() - std::size_t(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
