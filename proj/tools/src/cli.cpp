#include "cli.hpp"

#include <filesystem>
#include <ostream>

#include "CLI11.hpp"

#include "chromalign/error.hpp"
#include "chromalign/version.hpp"
#include "commands.hpp"

namespace chromalign::cli {
namespace {

struct Parsed {
  GlobalOptions global;
  IngestOptions ingest;
  ScoreOptions score;
  SegmentOptions segment;
  AlignOptions align;
  MatchOptions match;
  PromptsOptions prompts;
  EvalOptions eval;
  ClusterOptions cluster;
  GraphOptions graph;
};

void build(CLI::App& app, Parsed& p) {
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  app.add_option("--seed", p.global.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("--out", p.global.out, "Output directory")->capture_default_str();
  app.add_option("--jobs", p.global.jobs, "Worker threads for parallel maps")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "Filter a pairs TSV; writes pairs.clean.tsv and drops.json");
  ingest->add_option("--pairs", p.ingest.pairs, "Pairs TSV")->required();
  ingest->add_option("--rules", p.ingest.rules, "Spam rules, one regex per line (optionally name<TAB>regex)");
  ingest->add_option("--max-words", p.ingest.max_words, "Longest description kept")->capture_default_str();

  auto* score = app.add_subcommand("score", "Concreteness, subjectivity and colour-word scores");
  score->add_option("--pairs", p.score.pairs)->required();
  score->add_option("--concreteness", p.score.concreteness, "lemma<TAB>rating lexicon")->required();
  score->add_option("--subjectivity", p.score.subjectivity, "word<TAB>score[<TAB>multiplier] lexicon")->required();
  score->add_option("--color-words", p.score.color_words, "Colour word list; built-in list if omitted");
  score->add_option("--top-k", p.score.top_k, "Entries kept in frequency tables")->capture_default_str();

  auto* segment = app.add_subcommand("segment", "Split scored descriptions into slices");
  segment->add_option("--scores", p.segment.scores, "scores.tsv from `score`")->required();
  segment->add_option("--by", p.segment.by)
      ->check(CLI::IsMember({"subjectivity", "concreteness", "color-word"}))
      ->capture_default_str();
  segment->add_option("--bins", p.segment.bins)->check(CLI::PositiveNumber)->capture_default_str();
  segment->add_option("--lo", p.segment.lo, "Lower bin edge (default 0 or 1)");
  segment->add_option("--hi", p.segment.hi, "Upper bin edge (default 1 or 5)");

  auto* align = app.add_subcommand("align", "Alignment per slice with lmap, rsa or gw");
  align->add_option("--pairs", p.align.pairs)->required();
  align->add_option("--embeddings", p.align.embeddings, "EMBV1 file or .tsv")->required();
  align->add_option("--method", p.align.method)->check(CLI::IsMember({"lmap", "rsa", "gw"}))->capture_default_str();
  align->add_option("--slice", p.align.slices, "Slice file; repeatable. Whole corpus if omitted");
  align->add_option("--alpha", p.align.alpha)->capture_default_str();
  align->add_option("--folds", p.align.folds)->capture_default_str();
  align->add_option("--epsilon", p.align.epsilon)->capture_default_str();
  align->add_flag("--epsilon-schedule", p.align.epsilon_schedule, "Anneal epsilon x100, x10, x1");
  align->add_option("--max-outer", p.align.max_outer)->capture_default_str();
  align->add_option("--tol", p.align.tol)->capture_default_str();
  align->add_option("--vertex-restarts", p.align.vertex_restarts)->capture_default_str();
  align->add_option("--floor", p.align.floor, "Smallest slice aligned")->capture_default_str();

  auto* match = app.add_subcommand("match", "Rank comparatives for sampled description pairs");
  match->add_option("--pairs", p.match.pairs)->required();
  match->add_option("--comparatives", p.match.comparatives, "Comparative tuples JSONL")->required();
  match->add_option("--count", p.match.count, "Pairs sampled")->capture_default_str();

  auto* prompts = app.add_subcommand("prompts", "Build K-shot masked prompts from matched pairs");
  prompts->add_option("--pairs", p.prompts.pairs)->required();
  prompts->add_option("--matched", p.prompts.matched, "matched.jsonl from `match`")->required();
  prompts->add_option("--comparatives", p.prompts.comparatives, "Candidate labels; else those seen in rankings");
  prompts->add_option("-k,--k", p.prompts.k, "Pairs per prompt")->capture_default_str();
  prompts->add_option("--count", p.prompts.count, "Prompt sets built")->capture_default_str();
  prompts->add_option("--template", p.prompts.template_text)->capture_default_str();
  prompts->add_option("--mask-token", p.prompts.mask_token)->capture_default_str();

  auto* eval = app.add_subcommand("eval", "MRR of model rankings");
  eval->add_option("--prompts", p.eval.prompts)->required();
  eval->add_option("--predictions", p.eval.predictions)->required();
  eval->add_option("--slice", p.eval.slices, "Slice file; repeatable");

  auto* cluster = app.add_subcommand("cluster", "k-means over colours or embeddings");
  cluster->add_option("--pairs", p.cluster.pairs)->required();
  cluster->add_option("--embeddings", p.cluster.embeddings);
  cluster->add_option("--space", p.cluster.space)->check(CLI::IsMember({"color", "embedding"}))->capture_default_str();
  cluster->add_option("-k,--k", p.cluster.k)->check(CLI::PositiveNumber)->capture_default_str();
  cluster->add_option("--within", p.cluster.within, "Only cluster members of this slice");
  cluster->add_option("--name", p.cluster.name, "Output prefix (default <space>_k<k>)");
  cluster->add_option("--max-iter", p.cluster.max_iter)->capture_default_str();

  auto* graph = app.add_subcommand("graph", "DOT graph of correctly predicted comparatives");
  graph->add_option("--pairs", p.graph.pairs)->required();
  graph->add_option("--matched", p.graph.matched)->required();
  graph->add_option("--prompts", p.graph.prompts)->required();
  graph->add_option("--predictions", p.graph.predictions)->required();
}

void dispatch(const CLI::App& app, const Parsed& p, std::ostream& log) {
  const std::string name = app.get_subcommands().front()->get_name();
  if (name == "ingest") cmd_ingest(p.global, p.ingest, log);
  else if (name == "score") cmd_score(p.global, p.score, log);
  else if (name == "segment") cmd_segment(p.global, p.segment, log);
  else if (name == "align") cmd_align(p.global, p.align, log);
  else if (name == "match") cmd_match(p.global, p.match, log);
  else if (name == "prompts") cmd_prompts(p.global, p.prompts, log);
  else if (name == "eval") cmd_eval(p.global, p.eval, log);
  else if (name == "cluster") cmd_cluster(p.global, p.cluster, log);
  else if (name == "graph") cmd_graph(p.global, p.graph, log);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Alignment of description embeddings with perceptual colour space", "chromalign"};
  Parsed parsed;
  build(app, parsed);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }

  try {
    dispatch(app, parsed, out);
    return kExitOk;
  } catch (const SolverError& e) {
    err << "solver error after " << e.iterations() << " iterations: " << e.what() << '\n';
    return kExitSolver;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace chromalign::cli
