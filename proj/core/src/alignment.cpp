#include "chromalign/alignment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "json.hpp"

#include "chromalign/error.hpp"
#include "chromalign/rsa.hpp"

namespace chromalign {
namespace {

using nlohmann::ordered_json;

ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

AlignmentReport skipped_report(AlignMethod method, const CorpusSlice& slice, std::size_t n, std::string why) {
  AlignmentReport r;
  r.method = std::string(method_name(method));
  r.slice = slice.name;
  r.n = n;
  r.warnings.push_back(std::move(why));
  return r;
}

void put_gw_params(AlignmentReport& r, const GwOptions& o) {
  r.params["epsilon"] = o.epsilon;
  r.params["max_outer"] = double(o.max_outer);
  r.params["tol"] = o.tol;
  r.params["epsilon_schedule"] = o.epsilon_schedule ? 1.0 : 0.0;
  r.params["restarts"] = double(o.restarts);
  r.params["vertex_restarts"] = o.refine_permutation ? double(o.vertex_restarts) : 0.0;
  r.params["seed"] = double(o.seed);
}

}  // namespace

std::string_view method_name(AlignMethod method) {
  switch (method) {
    case AlignMethod::kLmap: return "lmap";
    case AlignMethod::kRsa: return "rsa";
    case AlignMethod::kGw: return "gw";
  }
  return "unknown";
}

AlignMethod parse_method(std::string_view name) {
  if (name == "lmap") return AlignMethod::kLmap;
  if (name == "rsa") return AlignMethod::kRsa;
  if (name == "gw") return AlignMethod::kGw;
  throw ArgumentError("unknown alignment method '" + std::string(name) + "' (expected lmap, rsa or gw)");
}

std::string to_json(const AlignmentReport& report) {
  ordered_json j;
  j["method"] = report.method;
  j["slice"] = report.slice;
  j["score"] = report.score ? number_or_null(*report.score) : ordered_json(nullptr);
  j["n"] = report.n;
  j["params"] = ordered_json::object();
  for (const auto& [k, v] : report.params) j["params"][k] = number_or_null(v);
  j["metrics"] = ordered_json::object();
  for (const auto& [k, v] : report.metrics) j["metrics"][k] = number_or_null(v);
  j["detail"] = ordered_json::array();
  for (const auto& [k, v] : report.detail) j["detail"].push_back({{"key", k}, {"value", number_or_null(v)}});
  j["warnings"] = report.warnings;
  return j.dump();
}

Eigen::MatrixXd embedding_matrix(const EmbeddingMatrix& X) {
  Eigen::MatrixXd out(Eigen::Index(X.rows()), Eigen::Index(X.dim()));
  for (std::size_t i = 0; i < X.rows(); ++i) {
    const auto row = X.row(i);
    for (std::size_t j = 0; j < X.dim(); ++j) out(Eigen::Index(i), Eigen::Index(j)) = double(row[j]);
  }
  return out;
}

Eigen::MatrixXd lab_matrix(const ColorMatrix& Y) {
  Eigen::MatrixXd out(Eigen::Index(Y.rows()), 3);
  for (std::size_t i = 0; i < Y.rows(); ++i) {
    out.row(Eigen::Index(i)) << Y.values[i].L, Y.values[i].a, Y.values[i].b;
  }
  return out;
}

LmapAlignment lmap_align(const JoinedData& data, const LmapOptions& options) {
  const LmapResult fit = fit_lmap(embedding_matrix(data.X), lab_matrix(data.Y), options);
  LmapAlignment out;
  out.weights = fit.weights;
  AlignmentReport& r = out.report;
  r.method = "lmap";
  r.n = data.X.rows();
  r.score = fit.score;
  r.params["alpha"] = options.alpha;
  r.params["folds"] = double(options.folds);
  r.params["seed"] = double(options.seed);
  r.metrics["train_r2"] = fit.train_score;
  r.metrics["r2_L"] = fit.channel_score[0];
  r.metrics["r2_a"] = fit.channel_score[1];
  r.metrics["r2_b"] = fit.channel_score[2];
  r.metrics["zero_weights"] = double(fit.zero_weights);
  r.metrics["degenerate_channels"] = double(fit.degenerate_channels);
  static constexpr const char* kChannel[] = {"L", "a", "b"};
  for (const auto& f : fit.folds) {
    for (std::size_t c = 0; c < 3; ++c) {
      r.detail.emplace_back("fold" + std::to_string(f.fold) + "." + kChannel[c], f.test_r2[c]);
      if (f.degenerate[c]) {
        r.warnings.push_back("fold " + std::to_string(f.fold) + " channel " + kChannel[c] +
                             ": held-out targets have zero variance, R2 set to 0");
      }
    }
  }
  return out;
}

AlignmentReport rsa_align(const JoinedData& data) {
  const RsaResult res = rsa(embedding_matrix(data.X), lab_matrix(data.Y));
  AlignmentReport r;
  r.method = "rsa";
  r.n = res.kept_rows.size();
  if (std::isfinite(res.score)) r.score = res.score;
  else r.warnings.push_back("every row is constant in one space; no score");
  r.metrics["flattened_tau"] = res.flattened_tau;
  r.metrics["excluded_rows"] = double(res.excluded_rows);
  r.metrics["undefined_rows"] = double(res.undefined_rows);
  for (std::size_t i = 0; i < res.kept_rows.size(); ++i) {
    r.detail.emplace_back(data.X.ids()[std::size_t(res.kept_rows[i])], res.row_tau[i]);
  }
  if (res.excluded_rows > 0) {
    r.warnings.push_back(std::to_string(res.excluded_rows) + " zero-norm rows excluded");
  }
  return r;
}

GwAlignment gw_align(const JoinedData& data, const GwOptions& options) {
  const Eigen::MatrixXd X = embedding_matrix(data.X);
  const Eigen::MatrixXd Y = lab_matrix(data.Y);
  GwAlignment out;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (X.row(i).squaredNorm() > 0.0 && Y.row(i).squaredNorm() > 0.0) out.kept_rows.push_back(i);
  }
  const auto n = Eigen::Index(out.kept_rows.size());
  if (n < 2) throw ArgumentError("gw: need at least 2 rows with nonzero norm in both spaces");
  Eigen::MatrixXd xs(n, X.cols()), ys(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    xs.row(i) = X.row(out.kept_rows[std::size_t(i)]);
    ys.row(i) = Y.row(out.kept_rows[std::size_t(i)]);
  }

  const GwResult res = gromov_wasserstein(cosine_similarity(xs), cosine_similarity(ys), options);
  out.coupling = res.coupling;

  AlignmentReport& r = out.report;
  r.method = "gw";
  r.n = std::size_t(n);
  r.score = res.matching_accuracy;
  put_gw_params(r, options);
  const double excluded = double(X.rows() - n);
  r.metrics["gw_cost"] = res.cost;
  r.metrics["marginal_error"] = res.marginal_error;
  r.metrics["marginal_check"] = res.marginal_error <= 1e-6 ? 1.0 : 0.0;
  r.metrics["outer_iterations"] = double(res.outer_iterations);
  r.metrics["vertex_restarts_used"] = double(res.vertex_restarts);
  r.metrics["converged"] = res.converged ? 1.0 : 0.0;
  r.metrics["log_domain"] = res.used_log_domain ? 1.0 : 0.0;
  r.metrics["excluded_rows"] = excluded;
  for (Eigen::Index i = 0; i < n; ++i) {
    r.detail.emplace_back(data.X.ids()[std::size_t(out.kept_rows[std::size_t(i)])],
                          double(n) * res.coupling.plan(i, i));
  }
  if (excluded > 0) r.warnings.push_back(std::to_string(X.rows() - n) + " zero-norm rows excluded");
  return out;
}

std::vector<AlignmentReport> align_slices(std::span<const ColorPair> pairs, const EmbeddingMatrix& embeddings,
                                          std::span<const CorpusSlice> slices, AlignMethod method,
                                          const AlignParams& params) {
  const JoinedData full = join(pairs, embeddings);
  std::vector<AlignmentReport> reports(slices.size());

  auto run_one = [&](std::size_t s) {
    const CorpusSlice& slice = slices[s];
    const JoinedData data = restrict_to(full, slice.member_ids);
    const std::size_t n = data.X.rows();
    const std::size_t unmatched = slice.member_ids.size() - n;
    AlignmentReport r;
    if (n == 0) {
      r = skipped_report(method, slice, n, "slice is empty after join; skipped");
    } else if (n < params.floor) {
      r = skipped_report(method, slice, n,
                         "slice has " + std::to_string(n) + " rows, below the floor of " +
                             std::to_string(params.floor) + "; skipped");
    } else {
      switch (method) {
        case AlignMethod::kLmap: r = lmap_align(data, params.lmap).report; break;
        case AlignMethod::kRsa: r = rsa_align(data); break;
        case AlignMethod::kGw: r = gw_align(data, params.gw).report; break;
      }
      r.slice = slice.name;
    }
    r.params["floor"] = double(params.floor);
    if (unmatched > 0) {
      r.warnings.push_back(std::to_string(unmatched) + " slice members have no embedding");
    }
    reports[s] = std::move(r);
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(params.jobs, slices.size()));
  if (jobs == 1) {
    for (std::size_t s = 0; s < slices.size(); ++s) run_one(s);
    return reports;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> failures(slices.size());
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t s = next++; s < slices.size(); s = next++) {
        try {
          run_one(s);
        } catch (...) {
          failures[s] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return reports;
}

}  // namespace chromalign
