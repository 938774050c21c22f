#include "stocsens/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "stocsens/core/error.hpp"

namespace stocsens::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void allow_keys(const json& obj, const std::string& path, std::set<std::string> keys) {
  if (!obj.is_object()) bad(path, "expected an object");
  for (const auto& [k, v] : obj.items()) {
    if (!keys.count(k)) bad(path + "." + k, "unknown field");
  }
}

const json& need(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.contains(key)) bad(path + "." + key, "required field is missing");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) bad(path, "must be finite");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) bad(path, "must be positive");
  return x;
}

std::uint64_t count(const json& v, const std::string& path, std::uint64_t min) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) bad(path, "expected an integer");
  if (v.is_number_integer() && v.get<std::int64_t>() < 0) bad(path, "must be nonnegative");
  const auto x = v.get<std::uint64_t>();
  if (x < min) bad(path, "must be at least " + std::to_string(min));
  return x;
}

std::string choice(const json& v, const std::string& path, std::set<std::string> options) {
  if (!v.is_string() || !options.count(v.get<std::string>())) {
    std::string list;
    for (const auto& o : options) list += (list.empty() ? "" : ", ") + o;
    bad(path, "expected one of: " + list);
  }
  return v.get<std::string>();
}

bool boolean(const json& v, const std::string& path) {
  if (!v.is_boolean()) bad(path, "expected true or false");
  return v.get<bool>();
}

Eigen::VectorXd vector(const json& v, const std::string& path, Eigen::Index n) {
  if (n == 1 && v.is_number()) return Eigen::VectorXd::Constant(1, number(v, path));
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n) {
    bad(path, "expected an array of " + std::to_string(n) + " numbers");
  }
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i) = number(v[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
  }
  return out;
}

// Constant value of shape rows x cols: number (1x1), flat array (column),
// nested rows, or "zero" / "identity".
Eigen::MatrixXd matrix(const json& v, const std::string& path, Eigen::Index rows,
                       Eigen::Index cols) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "zero") return Eigen::MatrixXd::Zero(rows, cols);
    if (name == "identity") {
      if (rows != cols) bad(path, "identity needs a square shape, got " + shape(rows, cols));
      return Eigen::MatrixXd::Identity(rows, cols);
    }
    bad(path, "unknown named constant '" + name + "' (zero, identity)");
  }
  if (rows == 1 && cols == 1 && v.is_number()) return Eigen::MatrixXd::Constant(1, 1, number(v, path));
  if (cols == 1 && v.is_array() && !v.empty() && v[0].is_number()) return vector(v, path, rows);
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != rows) {
    bad(path, "expected a " + shape(rows, cols) + " matrix as an array of rows");
  }
  Eigen::MatrixXd out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      bad(rp, "expected a row of " + std::to_string(cols) + " numbers");
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      out(i, j) = number(row[static_cast<std::size_t>(j)], rp + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

Series series(const json& v, const std::string& path, Eigen::Index rows, Eigen::Index cols) {
  Series s;
  s.rows = rows;
  s.cols = cols;
  if (v.is_object()) {
    allow_keys(v, path, {"samples"});
    const json& arr = need(v, path, "samples");
    if (!arr.is_array() || arr.empty()) bad(path + ".samples", "expected a non-empty array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      s.samples.push_back(matrix(arr[k], path + ".samples[" + std::to_string(k) + "]", rows, cols));
    }
    return s;
  }
  if (rows == 1 && cols == 1 && v.is_array()) {
    if (v.empty()) bad(path, "expected a non-empty array of samples");
    for (std::size_t k = 0; k < v.size(); ++k) {
      s.samples.push_back(
          Eigen::MatrixXd::Constant(1, 1, number(v[k], path + "[" + std::to_string(k) + "]")));
    }
    return s;
  }
  s.samples.push_back(matrix(v, path, rows, cols));
  return s;
}

std::optional<Series> optional_series(const json& obj, const std::string& path,
                                      const std::string& key, Eigen::Index rows,
                                      Eigen::Index cols) {
  if (!obj.contains(key)) return std::nullopt;
  return series(obj.at(key), path + "." + key, rows, cols);
}

std::vector<Series> series_list(const json& v, const std::string& path, std::size_t count_,
                                Eigen::Index rows, Eigen::Index cols) {
  if (!v.is_array() || v.size() != count_) {
    bad(path, "expected an array of " + std::to_string(count_) + " entries (one per noise component)");
  }
  std::vector<Series> out;
  for (std::size_t j = 0; j < count_; ++j) {
    out.push_back(series(v[j], path + "[" + std::to_string(j) + "]", rows, cols));
  }
  return out;
}

LQConfig parse_lq(const json& v, const std::string& path) {
  allow_keys(v, path, {"n", "m", "d", "x0", "A", "B", "C", "D", "e", "f", "Q", "N", "M", "delta"});
  LQConfig c;
  c.n = static_cast<Eigen::Index>(count(need(v, path, "n"), path + ".n", 1));
  c.m = static_cast<Eigen::Index>(count(need(v, path, "m"), path + ".m", 1));
  c.d = static_cast<Eigen::Index>(count(need(v, path, "d"), path + ".d", 1));
  const auto d = static_cast<std::size_t>(c.d);
  c.x0 = vector(need(v, path, "x0"), path + ".x0", c.n);
  auto get = [&](const char* key, Eigen::Index r, Eigen::Index cc) {
    return v.contains(key) ? series(v.at(key), path + "." + key, r, cc) : Series::zero(r, cc);
  };
  auto get_list = [&](const char* key, Eigen::Index r, Eigen::Index cc) {
    return v.contains(key) ? series_list(v.at(key), path + "." + key, d, r, cc)
                           : std::vector<Series>(d, Series::zero(r, cc));
  };
  c.A = get("A", c.n, c.n);
  c.B = get("B", c.n, c.m);
  c.e = get("e", c.n, 1);
  c.Q = get("Q", c.n, c.n);
  c.N = series(need(v, path, "N"), path + ".N", c.m, c.m);
  c.C = get_list("C", c.n, c.n);
  c.D = get_list("D", c.n, c.m);
  c.f = get_list("f", c.n, 1);
  c.M = v.contains("M") ? matrix(v.at("M"), path + ".M", c.n, c.n) : Eigen::MatrixXd::Zero(c.n, c.n);
  if (v.contains("delta")) c.delta = positive(v.at("delta"), path + ".delta");
  return c;
}

MVConfig parse_mv(const json& v, const std::string& path) {
  allow_keys(v, path, {"d", "x", "A", "r", "mu", "sigma", "delta", "method", "route", "tol"});
  MVConfig c;
  c.d = static_cast<Eigen::Index>(count(need(v, path, "d"), path + ".d", 1));
  c.x = number(need(v, path, "x"), path + ".x");
  c.A = number(need(v, path, "A"), path + ".A");
  c.r = v.contains("r") ? series(v.at("r"), path + ".r", 1, 1) : Series::zero(1, 1);
  c.mu = series(need(v, path, "mu"), path + ".mu", c.d, 1);
  c.sigma = series(need(v, path, "sigma"), path + ".sigma", c.d, c.d);
  if (v.contains("delta")) c.delta = positive(v.at("delta"), path + ".delta");
  if (v.contains("method")) c.method = choice(v.at("method"), path + ".method", {"closed_form", "dual"});
  if (v.contains("route")) c.route = choice(v.at("route"), path + ".route", {"reduced", "direct"});
  if (v.contains("tol")) c.tol = positive(v.at("tol"), path + ".tol");
  if (c.method == "closed_form" && c.d != 1) {
    bad(path + ".method", "closed_form needs a single asset (d = 1); use dual");
  }
  return c;
}

PerturbationConfig parse_perturbation(const json& v, const std::string& path, const RunConfig& cfg) {
  PerturbationConfig p;
  if (cfg.problem == "lq") {
    const LQConfig& lq = *cfg.lq;
    const auto d = static_cast<std::size_t>(lq.d);
    const std::string kind =
        v.is_object() && v.contains("kind") ? choice(v.at("kind"), path + ".kind", {"general", "additive"})
                                            : "general";
    if (kind == "general") {
      allow_keys(v, path, {"label", "kind", "dx0", "dA", "dB", "dC", "dD", "de", "df"});
    } else {
      allow_keys(v, path, {"label", "kind", "dx0", "drift", "diffusion"});
    }
    p.kind = kind;
    if (v.contains("dx0")) p.dx0 = vector(v.at("dx0"), path + ".dx0", lq.n);
    if (kind == "general") {
      p.dA_lq = optional_series(v, path, "dA", lq.n, lq.n);
      p.dB = optional_series(v, path, "dB", lq.n, lq.m);
      p.de = optional_series(v, path, "de", lq.n, 1);
      auto list = [&](const char* key, Eigen::Index r, Eigen::Index c) {
        return v.contains(key) ? series_list(v.at(key), path + "." + key, d, r, c)
                               : std::vector<Series>(d, Series::zero(r, c));
      };
      p.dC = list("dC", lq.n, lq.n);
      p.dD = list("dD", lq.n, lq.m);
      p.df = list("df", lq.n, 1);
    } else {
      p.drift = optional_series(v, path, "drift", lq.n, 1);
      p.diffusion = optional_series(v, path, "diffusion", lq.n, lq.d);
    }
  } else {
    const MVConfig& mv = *cfg.mv;
    allow_keys(v, path, {"label", "dx", "dr", "dA", "dmu", "dsigma"});
    if (v.contains("dx")) p.dx = number(v.at("dx"), path + ".dx");
    if (v.contains("dA")) p.dA_mv = number(v.at("dA"), path + ".dA");
    p.dr = optional_series(v, path, "dr", 1, 1);
    p.dmu = optional_series(v, path, "dmu", mv.d, 1);
    p.dsigma = optional_series(v, path, "dsigma", mv.d, mv.d);
  }
  const json& label = need(v, path, "label");
  if (!label.is_string() || label.get<std::string>().empty()) bad(path + ".label", "expected a non-empty string");
  p.label = label.get<std::string>();
  return p;
}

json matrix_json(const Eigen::MatrixXd& m, bool as_vector) {
  if (m.rows() == 1 && m.cols() == 1 && !as_vector) return m(0, 0);
  if (m.cols() == 1 && (as_vector || m.rows() > 1)) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) arr.push_back(m(i, 0));
    return arr;
  }
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json series_json(const Series& s) {
  const bool scalar = s.rows == 1 && s.cols == 1;
  if (s.samples.size() == 1) return matrix_json(s.samples[0], false);
  json arr = json::array();
  for (const auto& m : s.samples) arr.push_back(matrix_json(m, false));
  if (scalar) return arr;
  return json{{"samples", arr}};
}

json list_json(const std::vector<Series>& list) {
  json arr = json::array();
  for (const auto& s : list) arr.push_back(series_json(s));
  return arr;
}

// Square matrices always as nested rows so a 1x1 matrix keeps its type.
json square_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

void check_count(const Series& s, std::size_t K, const std::string& path) {
  if (s.samples.size() != 1 && s.samples.size() != K) {
    bad(path, "has " + std::to_string(s.samples.size()) + " samples; expected 1 or K = " +
                  std::to_string(K));
  }
}

void check_count(const std::optional<Series>& s, std::size_t K, const std::string& path) {
  if (s) check_count(*s, K, path);
}

}  // namespace

Series Series::zero(Eigen::Index rows, Eigen::Index cols) {
  Series s;
  s.rows = rows;
  s.cols = cols;
  s.samples.push_back(Eigen::MatrixXd::Zero(rows, cols));
  return s;
}

TimeFunction Series::function() const {
  if (samples.size() == 1) {
    if (is_zero()) return TimeFunction(rows, cols);
    return TimeFunction::constant(samples[0]);
  }
  return TimeFunction::samples(samples);
}

bool Series::is_zero() const { return samples.size() == 1 && samples[0].isZero(0.0); }

bool Series::operator==(const Series& o) const {
  if (rows != o.rows || cols != o.cols || samples.size() != o.samples.size()) return false;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k] != o.samples[k]) return false;
  }
  return true;
}

RunConfig parse_config(const json& doc) {
  const std::string root = "$";
  allow_keys(doc, root,
             {"problem", "grid", "ensemble", "lq", "mv", "perturbations", "fd", "sens", "check", "output"});
  RunConfig cfg;
  cfg.problem = choice(need(doc, root, "problem"), "$.problem", {"lq", "mv"});

  const json& g = need(doc, root, "grid");
  allow_keys(g, "$.grid", {"T", "K"});
  cfg.grid.T = positive(need(g, "$.grid", "T"), "$.grid.T");
  cfg.grid.K = count(need(g, "$.grid", "K"), "$.grid.K", 1);

  if (doc.contains("ensemble")) {
    const json& e = doc.at("ensemble");
    allow_keys(e, "$.ensemble", {"n_paths", "seed"});
    if (e.contains("n_paths")) cfg.ensemble.n_paths = count(e.at("n_paths"), "$.ensemble.n_paths", 1);
    if (e.contains("seed")) cfg.ensemble.seed = count(e.at("seed"), "$.ensemble.seed", 0);
  }

  if (cfg.problem == "lq") {
    cfg.lq = parse_lq(need(doc, root, "lq"), "$.lq");
    if (doc.contains("mv")) bad("$.mv", "not allowed when problem is lq");
  } else {
    cfg.mv = parse_mv(need(doc, root, "mv"), "$.mv");
    if (doc.contains("lq")) bad("$.lq", "not allowed when problem is mv");
  }

  if (doc.contains("perturbations")) {
    const json& arr = doc.at("perturbations");
    if (!arr.is_array()) bad("$.perturbations", "expected an array");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = "$.perturbations[" + std::to_string(i) + "]";
      if (!arr[i].is_object()) bad(path, "expected an object");
      cfg.perturbations.push_back(parse_perturbation(arr[i], path, cfg));
      if (!labels.insert(cfg.perturbations.back().label).second) {
        bad(path + ".label", "duplicate label '" + cfg.perturbations.back().label + "'");
      }
    }
  }

  if (doc.contains("fd")) {
    const json& f = doc.at("fd");
    allow_keys(f, "$.fd", {"tau", "richardson"});
    if (f.contains("tau")) cfg.fd.tau = positive(f.at("tau"), "$.fd.tau");
    if (f.contains("richardson")) cfg.fd.richardson = boolean(f.at("richardson"), "$.fd.richardson");
  }
  if (doc.contains("sens")) {
    const json& s = doc.at("sens");
    allow_keys(s, "$.sens", {"quadrature", "record_timings"});
    if (s.contains("quadrature")) cfg.sens.quadrature = choice(s.at("quadrature"), "$.sens.quadrature", {"moments", "mc"});
    if (s.contains("record_timings")) cfg.sens.record_timings = boolean(s.at("record_timings"), "$.sens.record_timings");
  }
  if (doc.contains("check")) {
    const json& c = doc.at("check");
    allow_keys(c, "$.check", {"picard_paths", "sigma_bound"});
    if (c.contains("picard_paths")) cfg.check.picard_paths = count(c.at("picard_paths"), "$.check.picard_paths", 1);
    if (c.contains("sigma_bound")) cfg.check.sigma_bound = positive(c.at("sigma_bound"), "$.check.sigma_bound");
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    allow_keys(o, "$.output", {"path", "format"});
    if (o.contains("path")) {
      if (!o.at("path").is_string() || o.at("path").get<std::string>().empty()) {
        bad("$.output.path", "expected a non-empty string");
      }
      cfg.output.path = o.at("path").get<std::string>();
    }
    if (o.contains("format")) cfg.output.format = choice(o.at("format"), "$.output.format", {"csv", "json"});
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("$: cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("$: '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& cfg) {
  json doc;
  doc["problem"] = cfg.problem;
  doc["grid"] = {{"T", cfg.grid.T}, {"K", cfg.grid.K}};
  doc["ensemble"] = {{"n_paths", cfg.ensemble.n_paths}, {"seed", cfg.ensemble.seed}};
  if (cfg.lq) {
    const LQConfig& c = *cfg.lq;
    doc["lq"] = {{"n", c.n},
                 {"m", c.m},
                 {"d", c.d},
                 {"x0", matrix_json(c.x0, true)},
                 {"A", series_json(c.A)},
                 {"B", series_json(c.B)},
                 {"C", list_json(c.C)},
                 {"D", list_json(c.D)},
                 {"e", series_json(c.e)},
                 {"f", list_json(c.f)},
                 {"Q", series_json(c.Q)},
                 {"N", series_json(c.N)},
                 {"M", square_json(c.M)},
                 {"delta", c.delta}};
  }
  if (cfg.mv) {
    const MVConfig& c = *cfg.mv;
    doc["mv"] = {{"d", c.d},
                 {"x", c.x},
                 {"A", c.A},
                 {"r", series_json(c.r)},
                 {"mu", series_json(c.mu)},
                 {"sigma", series_json(c.sigma)},
                 {"delta", c.delta},
                 {"method", c.method},
                 {"route", c.route},
                 {"tol", c.tol}};
  }
  json perts = json::array();
  for (const PerturbationConfig& p : cfg.perturbations) {
    json o;
    o["label"] = p.label;
    if (cfg.problem == "lq") {
      o["kind"] = p.kind;
      if (p.dx0) o["dx0"] = matrix_json(*p.dx0, true);
      auto put = [&](const char* key, const std::optional<Series>& s) {
        if (s) o[key] = series_json(*s);
      };
      auto put_list = [&](const char* key, const std::vector<Series>& list) {
        bool any = false;
        for (const auto& s : list) any = any || !s.is_zero();
        if (any) o[key] = list_json(list);
      };
      put("dA", p.dA_lq);
      put("dB", p.dB);
      put("de", p.de);
      put_list("dC", p.dC);
      put_list("dD", p.dD);
      put_list("df", p.df);
      put("drift", p.drift);
      put("diffusion", p.diffusion);
    } else {
      if (p.dx) o["dx"] = *p.dx;
      if (p.dA_mv) o["dA"] = *p.dA_mv;
      if (p.dr) o["dr"] = series_json(*p.dr);
      if (p.dmu) o["dmu"] = series_json(*p.dmu);
      if (p.dsigma) o["dsigma"] = series_json(*p.dsigma);
    }
    perts.push_back(o);
  }
  doc["perturbations"] = perts;
  json fd = {{"richardson", cfg.fd.richardson}};
  if (cfg.fd.tau) fd["tau"] = *cfg.fd.tau;
  doc["fd"] = fd;
  doc["sens"] = {{"quadrature", cfg.sens.quadrature}, {"record_timings", cfg.sens.record_timings}};
  doc["check"] = {{"picard_paths", cfg.check.picard_paths}, {"sigma_bound", cfg.check.sigma_bound}};
  json out = {{"format", cfg.output.format}};
  if (cfg.output.path) out["path"] = *cfg.output.path;
  doc["output"] = out;
  return doc;
}

void validate_config(const RunConfig& cfg) {
  const std::size_t K = cfg.grid.K;
  if (cfg.lq) {
    const LQConfig& c = *cfg.lq;
    check_count(c.A, K, "$.lq.A");
    check_count(c.B, K, "$.lq.B");
    check_count(c.e, K, "$.lq.e");
    check_count(c.Q, K, "$.lq.Q");
    check_count(c.N, K, "$.lq.N");
    for (std::size_t j = 0; j < c.C.size(); ++j) {
      const std::string idx = "[" + std::to_string(j) + "]";
      check_count(c.C[j], K, "$.lq.C" + idx);
      check_count(c.D[j], K, "$.lq.D" + idx);
      check_count(c.f[j], K, "$.lq.f" + idx);
    }
  }
  if (cfg.mv) {
    check_count(cfg.mv->r, K, "$.mv.r");
    check_count(cfg.mv->mu, K, "$.mv.mu");
    check_count(cfg.mv->sigma, K, "$.mv.sigma");
  }
  for (std::size_t i = 0; i < cfg.perturbations.size(); ++i) {
    const PerturbationConfig& p = cfg.perturbations[i];
    const std::string path = "$.perturbations[" + std::to_string(i) + "]";
    for (const auto& [key, s] : {std::pair{".dA", &p.dA_lq}, {".dB", &p.dB}, {".de", &p.de},
                                 {".drift", &p.drift}, {".diffusion", &p.diffusion},
                                 {".dr", &p.dr}, {".dmu", &p.dmu}, {".dsigma", &p.dsigma}}) {
      check_count(*s, K, path + key);
    }
    for (std::size_t j = 0; j < p.dC.size(); ++j) {
      const std::string idx = "[" + std::to_string(j) + "]";
      check_count(p.dC[j], K, path + ".dC" + idx);
      check_count(p.dD[j], K, path + ".dD" + idx);
      check_count(p.df[j], K, path + ".df" + idx);
    }
  }

  const TimeGrid grid = make_grid(cfg);
  try {
    if (cfg.lq) {
      lq::validate(make_lq_spec(cfg), grid);
    } else {
      mv::validate(make_mv_spec(cfg), grid);
    }
  } catch (const Error& e) {
    // Library messages that start with a field name ("N: ...") point at that field.
    std::string path = cfg.lq ? "$.lq" : "$.mv";
    std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon != std::string::npos && colon > 0 &&
        std::all_of(msg.begin(), msg.begin() + static_cast<std::ptrdiff_t>(colon),
                    [](unsigned char ch) { return std::isalnum(ch) || ch == '_'; })) {
      path += "." + msg.substr(0, colon);
      msg = msg.substr(colon + 2);
    }
    throw ConfigError(path + ": " + msg + " [" + std::string(to_string(e.kind())) + "]");
  }
}

TimeGrid make_grid(const RunConfig& cfg) {
  try {
    return build_grid(cfg.grid.T, cfg.grid.K);
  } catch (const Error& e) {
    throw ConfigError(std::string("$.grid: ") + e.what());
  }
}

lq::LQSpec make_lq_spec(const RunConfig& cfg) {
  require(cfg.lq.has_value(), "config does not describe an LQ problem");
  const LQConfig& c = *cfg.lq;
  lq::LQSpec s = lq::LQSpec::zeros(c.n, c.m, c.d);
  s.x0 = c.x0;
  s.A = c.A.function();
  s.B = c.B.function();
  s.e = c.e.function();
  s.Q = c.Q.function();
  s.N = c.N.function();
  for (std::size_t j = 0; j < c.C.size(); ++j) {
    s.C[j] = c.C[j].function();
    s.D[j] = c.D[j].function();
    s.f[j] = c.f[j].function();
  }
  s.M = c.M;
  s.delta = c.delta;
  return s;
}

mv::MVSpec make_mv_spec(const RunConfig& cfg) {
  require(cfg.mv.has_value(), "config does not describe a mean-variance problem");
  const MVConfig& c = *cfg.mv;
  mv::MVSpec s;
  s.d = c.d;
  s.x = c.x;
  s.A = c.A;
  s.r = c.r.function();
  s.mu = c.mu.function();
  s.sigma = c.sigma.function();
  s.delta = c.delta;
  return s;
}

}  // namespace stocsens::cli
