#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chromalign::cli {

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  std::size_t jobs = 1;
};

struct IngestOptions {
  std::filesystem::path pairs;
  std::optional<std::filesystem::path> rules;
  std::size_t max_words = 5;
};

struct ScoreOptions {
  std::filesystem::path pairs;
  std::filesystem::path concreteness;
  std::filesystem::path subjectivity;
  std::optional<std::filesystem::path> color_words;
  std::size_t top_k = 20;
};

struct SegmentOptions {
  std::filesystem::path scores;
  std::string by = "subjectivity";
  std::size_t bins = 5;
  std::optional<double> lo;
  std::optional<double> hi;
};

struct AlignOptions {
  std::filesystem::path pairs;
  std::filesystem::path embeddings;
  std::string method = "gw";
  std::vector<std::filesystem::path> slices;
  double alpha = 1e-2;
  std::size_t folds = 5;
  double epsilon = 5e-3;
  bool epsilon_schedule = false;
  std::size_t max_outer = 100;
  double tol = 1e-6;
  std::size_t vertex_restarts = 64;
  std::size_t floor = 20;
};

struct MatchOptions {
  std::filesystem::path pairs;
  std::filesystem::path comparatives;
  std::size_t count = 1000;
};

struct PromptsOptions {
  std::filesystem::path pairs;
  std::filesystem::path matched;
  std::optional<std::filesystem::path> comparatives;
  std::size_t k = 10;
  std::size_t count = 1000;
  std::string template_text = "{left} is {comparative} than {right}";
  std::string mask_token = "[MASK]";
};

struct EvalOptions {
  std::filesystem::path prompts;
  std::filesystem::path predictions;
  std::vector<std::filesystem::path> slices;
};

struct ClusterOptions {
  std::filesystem::path pairs;
  std::optional<std::filesystem::path> embeddings;
  std::string space = "color";
  std::size_t k = 10;
  std::optional<std::filesystem::path> within;
  std::string name;  // defaults to <space>_k<k>
  std::size_t max_iter = 300;
};

struct GraphOptions {
  std::filesystem::path pairs;
  std::filesystem::path matched;
  std::filesystem::path prompts;
  std::filesystem::path predictions;
};

/// Each command validates every input path first, then computes and writes
/// its artifacts plus one JSON report under `global.out`. Messages for the
/// user go to `log`. Errors propagate as chromalign exceptions.
void cmd_ingest(const GlobalOptions& global, const IngestOptions& options, std::ostream& log);
void cmd_score(const GlobalOptions& global, const ScoreOptions& options, std::ostream& log);
void cmd_segment(const GlobalOptions& global, const SegmentOptions& options, std::ostream& log);
void cmd_align(const GlobalOptions& global, const AlignOptions& options, std::ostream& log);
void cmd_match(const GlobalOptions& global, const MatchOptions& options, std::ostream& log);
void cmd_prompts(const GlobalOptions& global, const PromptsOptions& options, std::ostream& log);
void cmd_eval(const GlobalOptions& global, const EvalOptions& options, std::ostream& log);
void cmd_cluster(const GlobalOptions& global, const ClusterOptions& options, std::ostream& log);
void cmd_graph(const GlobalOptions& global, const GraphOptions& options, std::ostream& log);

}  // namespace chromalign::cli
