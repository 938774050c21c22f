#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stocsens/core/time_function.hpp"
#include "stocsens/lq/spec.hpp"
#include "stocsens/mv/spec.hpp"
#include "stocsens/stochastic/time_grid.hpp"

namespace stocsens::cli {

/// Invalid configuration. The message starts with the JSON path of the
/// offending field ("$.lq.N: ...").
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Time function as written in a config: one sample (constant) or one
/// sample per grid step, each rows x cols.
struct Series {
  Eigen::Index rows = 1;
  Eigen::Index cols = 1;
  std::vector<Eigen::MatrixXd> samples;

  static Series zero(Eigen::Index rows, Eigen::Index cols);
  TimeFunction function() const;
  bool is_zero() const;  ///< single all-zero sample
  bool operator==(const Series&) const;
};

struct GridConfig {
  double T = 1.0;
  std::size_t K = 1000;
};

struct EnsembleConfig {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 42;
};

struct LQConfig {
  Eigen::Index n = 1, m = 1, d = 1;
  Eigen::VectorXd x0;
  Series A, B, e, Q, N;
  std::vector<Series> C, D, f;
  Eigen::MatrixXd M;
  double delta = 1e-8;
};

struct MVConfig {
  Eigen::Index d = 1;
  double x = 0.0;
  double A = 0.0;
  Series r, mu, sigma;
  double delta = 1e-8;
  std::string method = "closed_form";  ///< closed_form | dual
  std::string route = "reduced";       ///< reduced | direct (dual only)
  double tol = 1e-10;
};

/// One perturbation block. LQ "general" blocks use dx0 and the d* series,
/// LQ "additive" blocks use dx0, drift and diffusion, MV blocks use dx, dA
/// and the MV series. Absent series are zero.
struct PerturbationConfig {
  std::string label;
  std::string kind = "general";
  std::optional<Eigen::VectorXd> dx0;
  std::optional<Series> dA_lq, dB, de, drift, diffusion;
  std::vector<Series> dC, dD, df;  ///< one per noise component, zero if absent
  std::optional<double> dx, dA_mv;
  std::optional<Series> dr, dmu, dsigma;
};

struct FDConfig {
  std::optional<double> tau;  ///< default 1e-4 * max(1, ray scale)
  bool richardson = true;
};

struct SensConfig {
  std::string quadrature = "moments";  ///< moments | mc
  bool record_timings = false;         ///< off keeps output byte-stable
};

struct CheckConfig {
  std::size_t picard_paths = 1000;
  double sigma_bound = 4.0;  ///< pass band in MC standard errors
};

struct OutputConfig {
  std::optional<std::string> path;
  std::string format = "csv";  ///< csv | json
};

struct RunConfig {
  std::string problem;  ///< lq | mv
  GridConfig grid;
  EnsembleConfig ensemble;
  std::optional<LQConfig> lq;
  std::optional<MVConfig> mv;
  std::vector<PerturbationConfig> perturbations;
  FDConfig fd;
  SensConfig sens;
  CheckConfig check;
  OutputConfig output;
};

/// Parses and checks a config document against the schema in
/// docs/config.schema.json. Sample counts are checked by `validate_config`
/// because K may still be overridden.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Canonical JSON form; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& cfg);

/// Sample counts, then the library validation of the problem (N positive
/// definite, ellipticity, qualification, ...). Throws ConfigError.
void validate_config(const RunConfig& cfg);

TimeGrid make_grid(const RunConfig& cfg);
lq::LQSpec make_lq_spec(const RunConfig& cfg);
mv::MVSpec make_mv_spec(const RunConfig& cfg);

}  // namespace stocsens::cli
