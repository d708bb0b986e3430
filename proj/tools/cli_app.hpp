#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlfunc/mlfunc.hpp"

namespace mlfunc::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kMalformed = 1,
  kEvaluationError = 2,
  kFail = 3,
  kInconclusive = 4,
};

/// Parses "1.5", "-2", "1+2i", "1-2i", "2i", "-i", "3e-2+1e1i".
inline Complex parse_complex(const std::string& text) {
  static const std::string num = R"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
  static const std::regex real_only("^" + num + "$");
  static const std::regex imag_only(R"(^([+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)[ij]$)");
  static const std::regex both("^(" + num + R"()([+-](?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)[ij]$)");
  std::string s;
  for (char c : text) {
    if (c != ' ') s.push_back(c);
  }
  auto coeff = [](const std::string& c) {
    if (c.empty() || c == "+") return 1.0;
    if (c == "-") return -1.0;
    return std::stod(c);
  };
  std::smatch m;
  if (std::regex_match(s, real_only)) return {std::stod(s), 0.0};
  if (std::regex_match(s, m, imag_only)) return {0.0, coeff(m[1].str())};
  if (std::regex_match(s, m, both)) return {std::stod(m[1].str()), coeff(m[2].str())};
  throw PreconditionError("cannot parse complex number '" + text + "'");
}

/// Parses an angle in radians, or a multiple of pi such as "0.75pi".
inline double parse_angle(const std::string& text) {
  std::string s = text;
  const auto pos = s.find("pi");
  if (pos == std::string::npos) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw PreconditionError("cannot parse angle '" + text + "'");
    return v;
  }
  if (pos + 2 != s.size()) throw PreconditionError("cannot parse angle '" + text + "'");
  const std::string head = s.substr(0, pos);
  double factor = 1.0;
  if (head == "-") {
    factor = -1.0;
  } else if (!head.empty() && head != "+") {
    std::size_t used = 0;
    factor = std::stod(head, &used);
    if (used != head.size()) throw PreconditionError("cannot parse angle '" + text + "'");
  }
  return factor * kPi;
}

inline Json to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Options {
  std::string format = "json";
  std::optional<double> alpha;
  std::string beta = "1";
  std::vector<std::string> z;
  std::optional<std::string> lambda;
  std::optional<double> lambda_abs;
  std::optional<std::string> lambda_arg;
  std::vector<double> t;
  int l = 0;
  std::optional<std::string> theta;
  std::optional<std::string> theta0;
  std::optional<double> t_max;
  int points = 40;
  double shrink = 1.0;
  std::optional<double> tol;
  bool reverse = false;
  std::vector<std::string> blocks;
  std::optional<std::string> matrix;
  bool decay = false;
  bool integral = false;
  std::string g = "exp";
  std::vector<double> u;
  std::string config;
};

inline Json header() { return Json{{"tool", "mlfunc"}, {"version", "0.1.0"}}; }

inline Json document(const std::string& command) {
  Json doc;
  doc["schema"] = "mlfunc/1";
  doc["header"] = header();
  doc["command"] = command;
  return doc;
}

inline EvalControls eval_controls(const Options& o) {
  EvalControls c;
  if (o.tol) {
    if (!(*o.tol > 0.0)) throw PreconditionError("--tol must be positive");
    c.quadrature.rel_tol = *o.tol;
  }
  return c;
}

inline Complex resolve_lambda(const Options& o) {
  if (o.lambda) {
    if (o.lambda_abs || o.lambda_arg) {
      throw PreconditionError("give either --lambda or --lambda-abs/--lambda-arg, not both");
    }
    return parse_complex(*o.lambda);
  }
  if (o.lambda_abs || o.lambda_arg) {
    const double r = o.lambda_abs.value_or(1.0);
    const double a = o.lambda_arg ? parse_angle(*o.lambda_arg) : 0.0;
    return std::polar(r, a);
  }
  throw PreconditionError("lambda is required (--lambda or --lambda-abs/--lambda-arg)");
}

inline double require_alpha(const Options& o) {
  if (!o.alpha) throw PreconditionError("--alpha is required");
  return *o.alpha;
}

inline SectorContext resolve_context(const Options& o) {
  const double alpha = require_alpha(o);
  const Complex lambda = resolve_lambda(o);
  if (lambda == Complex{0.0, 0.0}) throw PreconditionError("sector context: lambda must be nonzero");
  SectorContext ctx = default_sector_context(alpha, lambda);
  if (o.theta) {
    ctx.theta = parse_angle(*o.theta);
    ctx.theta0 = 0.5 * std::min(ctx.theta - 0.5 * alpha * kPi,
                                std::fabs(ctx.theta - ctx.arg_abs()));
  }
  if (o.theta0) ctx.theta0 = parse_angle(*o.theta0);
  ctx.validate();
  return ctx;
}

inline std::vector<double> resolve_grid(const Options& o, double t0, double default_factor) {
  if (o.points < 1) throw PreconditionError("--points must be >= 1");
  const double hi = o.t_max.value_or(default_factor * t0);
  if (!(hi >= t0)) throw PreconditionError("--t-max lies below t0 = " + fmt(t0));
  return log_grid(t0, hi, o.points);
}

inline int cmd_eval(const Options& o, std::ostream& out) {
  const MLParams p{require_alpha(o), parse_complex(o.beta)};
  p.validate();
  const EvalControls controls = eval_controls(o);
  const bool pairs = o.lambda || o.lambda_abs || o.lambda_arg;
  if (pairs && !o.z.empty()) throw PreconditionError("give either --z or --lambda with --t");
  if (!pairs && o.z.empty()) throw PreconditionError("no evaluation points (--z is empty)");
  if (pairs && o.t.empty()) throw PreconditionError("no evaluation points (--t is empty)");
  if (o.l < 0) throw PreconditionError("--l must be >= 0");

  std::vector<Complex> zs;
  for (const auto& s : o.z) zs.push_back(parse_complex(s));
  const Complex lambda = pairs ? resolve_lambda(o) : Complex{};

  int code = kOk;
  Json records = Json::array();
  std::ostringstream csv;
  csv << (pairs ? "lambda_re,lambda_im,t," : "z_re,z_im,")
      << "value_re,value_im,err_estimate,method,terms_or_panels,error\n";
  const std::size_t n = pairs ? o.t.size() : zs.size();
  for (std::size_t i = 0; i < n; ++i) {
    Json rec;
    if (pairs) {
      rec["lambda"] = to_json(lambda);
      rec["t"] = o.t[i];
      rec["l"] = o.l;
      csv << fmt(lambda.real()) << ',' << fmt(lambda.imag()) << ',' << fmt(o.t[i]) << ',';
    } else {
      rec["z"] = to_json(zs[i]);
      csv << fmt(zs[i].real()) << ',' << fmt(zs[i].imag()) << ',';
    }
    try {
      const EvalResult r = pairs ? ml_deriv_eval(p, lambda, o.t[i], o.l, controls)
                                 : ml_eval(p, zs[i], controls);
      rec["value"] = to_json(r.value);
      rec["err_estimate"] = r.err_estimate;
      rec["method"] = std::string(to_string(r.method));
      rec["terms_or_panels"] = r.terms_or_panels;
      csv << fmt(r.value.real()) << ',' << fmt(r.value.imag()) << ',' << fmt(r.err_estimate)
          << ',' << to_string(r.method) << ',' << r.terms_or_panels << ",\n";
    } catch (const std::exception& e) {
      rec["error"] = e.what();
      csv << ",,,,," << '"' << e.what() << "\"\n";
      code = kEvaluationError;
    }
    records.push_back(rec);
  }
  if (o.format == "csv") {
    out << csv.str();
  } else {
    Json doc = document("eval");
    doc["params"] = {{"alpha", p.alpha}, {"beta", to_json(p.beta)}};
    doc["results"] = records;
    out << doc.dump(2) << '\n';
  }
  return code;
}

inline Json context_json(const SectorContext& ctx) {
  return {{"alpha", ctx.alpha},
          {"lambda", to_json(ctx.lambda)},
          {"theta", ctx.theta},
          {"theta0", ctx.theta0}};
}

inline Json points_json(const std::vector<CertificatePoint>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) {
    arr.push_back({{"t", p.t},
                   {"measured", p.measured},
                   {"allowed", p.allowed},
                   {"error", p.error},
                   {"ratio", p.ratio},
                   {"method", std::string(to_string(p.method))}});
  }
  return arr;
}

inline int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::pass: return kOk;
    case Verdict::fail: return kFail;
    case Verdict::inconclusive: return kInconclusive;
  }
  return kEvaluationError;
}

inline int cmd_certify(const std::string& lemma, const Options& o, std::ostream& out) {
  const SectorContext ctx = resolve_context(o);
  CertifyOptions copt;
  copt.constant_scale = o.shrink;
  copt.eval = eval_controls(o);
  Json doc = document("certify");
  doc["lemma"] = lemma;
  doc["context"] = context_json(ctx);

  if (lemma == "lemma4") {
    if (o.l < 0 || o.l > 6) throw PreconditionError("--l must lie in [0, 6]");
    const auto grid = resolve_grid(o, onset_time(ctx), 100.0);
    const Lemma4Certificate c = certify_lemma4(ctx, o.l, grid, copt);
    if (o.format == "csv") {
      out << "t,measured_i,allowed_i,ratio_i,measured_ii,allowed_ii,ratio_ii\n";
      for (std::size_t i = 0; i < c.grid.size(); ++i) {
        const auto& a = c.points_i[i];
        const auto& b = c.points_ii[i];
        out << fmt(a.t) << ',' << fmt(a.measured) << ',' << fmt(a.allowed) << ','
            << fmt(a.ratio) << ',' << fmt(b.measured) << ',' << fmt(b.allowed) << ','
            << fmt(b.ratio) << '\n';
      }
      return verdict_code(c.verdict);
    }
    doc["constants"] = {{"l", c.l},
                        {"M_l", c.M_l},
                        {"Mhat_l", c.Mhat_l},
                        {"t0", c.t0},
                        {"constant_scale", c.constant_scale}};
    doc["grid"] = c.grid;
    doc["worst_ratio_i"] = c.worst_ratio_i;
    doc["witness_t_i"] = c.witness_t_i;
    doc["worst_ratio_ii"] = c.worst_ratio_ii;
    doc["witness_t_ii"] = c.witness_t_ii;
    doc["worst_ratio"] = std::max(c.worst_ratio_i, c.worst_ratio_ii);
    doc["tail_exponent_i"] = c.tail_exponent_i;
    doc["tail_exponent_ii"] = c.tail_exponent_ii;
    doc["route_check"] = {{"overlap_points", c.route_overlap_points},
                          {"max_rel_diff", c.route_max_rel_diff},
                          {"consistent", c.routes_consistent}};
    doc["points_i"] = points_json(c.points_i);
    doc["points_ii"] = points_json(c.points_ii);
    doc["verdict"] = std::string(to_string(c.verdict));
    out << doc.dump(2) << '\n';
    return verdict_code(c.verdict);
  }

  const auto grid = resolve_grid(o, onset_time(ctx), 200.0);
  Lemma2Certificate c;
  if (lemma == "lemma2-i") {
    c = certify_lemma2_i(ctx, grid, copt);
  } else if (lemma == "lemma2-ii") {
    c = certify_lemma2_ii(ctx, grid, copt);
  } else if (lemma == "lemma2-iii") {
    c = certify_lemma2_iii(ctx, grid, copt);
  } else {
    throw PreconditionError("unknown certificate '" + lemma + "'");
  }
  if (o.format == "csv") {
    out << "t,measured,allowed,error,ratio,method\n";
    for (const auto& p : c.points) {
      out << fmt(p.t) << ',' << fmt(p.measured) << ',' << fmt(p.allowed) << ',' << fmt(p.error)
          << ',' << fmt(p.ratio) << ',' << to_string(p.method) << '\n';
    }
    return verdict_code(c.verdict);
  }
  doc["constants"] = {{"m", c.m_const},
                      {"m_harmonized", c.m_harmonized},
                      {"t0", c.t0},
                      {"I0", c.kappa.I0},
                      {"I1", c.kappa.I1},
                      {"constant_scale", c.constant_scale}};
  if (lemma != "lemma2-iii") {
    doc["form"] = lemma == "lemma2-i" ? "E_alpha(lambda t^alpha); the statement prints "
                                        "E_alpha(lambda t^(1/alpha))"
                                      : "t^(alpha-1) E_alpha,alpha(lambda t^alpha)";
  }
  doc["grid"] = c.grid;
  doc["worst_ratio"] = c.worst_ratio;
  doc["witness_t"] = c.witness_t;
  doc["worst_ratio_harmonized"] = c.worst_ratio_harmonized;
  doc["max_error_fraction"] = c.max_error_fraction;
  if (c.zform_worst_ratio) doc["zform_worst_ratio"] = *c.zform_worst_ratio;
  doc["points"] = points_json(c.points);
  doc["verdict"] = std::string(to_string(c.verdict));
  out << doc.dump(2) << '\n';
  return verdict_code(c.verdict);
}

inline Json matrix_json(const MatrixC& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

/// "re,im;re,im" style rows with complex entries, e.g. "-1,0.5;0,-2".
inline MatrixC parse_matrix(const std::string& text) {
  std::vector<std::vector<Complex>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<Complex> r;
    std::stringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) r.push_back(parse_complex(cell));
    rows.push_back(r);
  }
  const std::size_t n = rows.size();
  if (n == 0) throw PreconditionError("--matrix is empty");
  MatrixC m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw PreconditionError("--matrix must be square");
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

inline JordanSpec resolve_spec(const Options& o) {
  if (o.matrix && !o.blocks.empty()) throw PreconditionError("give either --block or --matrix");
  if (o.matrix) return jordan_spec_from_matrix(parse_matrix(*o.matrix));
  if (o.blocks.empty()) throw PreconditionError("matrix needs --block or --matrix");
  JordanSpec spec;
  for (const auto& b : o.blocks) {
    const auto colon = b.rfind(':');
    JordanBlock blk;
    blk.lambda = parse_complex(b.substr(0, colon));
    blk.size = 1;
    if (colon != std::string::npos) {
      std::size_t used = 0;
      const std::string size = b.substr(colon + 1);
      blk.size = std::stoi(size, &used);
      if (used != size.size()) throw PreconditionError("bad block size in '" + b + "'");
    }
    spec.blocks.push_back(blk);
  }
  spec.validate();
  return spec;
}

inline int cmd_matrix(const Options& o, std::ostream& out) {
  const double alpha = require_alpha(o);
  const MLParams p{alpha, parse_complex(o.beta)};
  p.validate();
  const JordanSpec spec = resolve_spec(o);
  const EvalControls controls = eval_controls(o);
  Json doc = document("matrix");
  doc["params"] = {{"alpha", p.alpha}, {"beta", to_json(p.beta)}};
  Json blocks = Json::array();
  for (const auto& b : spec.blocks) blocks.push_back({{"lambda", to_json(b.lambda)}, {"size", b.size}});
  doc["blocks"] = blocks;
  const SpectralReport sr = spectral_condition(spec, alpha);
  Json eig = Json::array();
  for (auto e : sr.eigenvalues) eig.push_back(to_json(e));
  doc["spectral"] = {{"eigenvalues", eig},
                     {"sector_margin", sr.sector_margin},
                     {"has_zero_eigenvalue", sr.has_zero_eigenvalue},
                     {"satisfied", sr.satisfied}};
  std::ostringstream csv;
  csv << "t,spectral_norm,row_sum_norm,error,bound\n";
  Json values = Json::array();
  for (double t : o.t) {
    const MatrixResult m = ml_matrix(p, spec, t, controls);
    Json rec{{"t", t}, {"value", matrix_json(m.value)}, {"err_estimate", m.err_estimate},
             {"condition", m.condition}};
    if (m.warning) rec["warning"] = *m.warning;
    values.push_back(rec);
  }
  doc["values"] = values;
  if (o.decay) {
    const double t0 = spec_onset_time(spec, alpha);
    const std::vector<double> grid =
        log_grid(t0, o.t_max.value_or(1e4 * t0), std::max(o.points, 2));
    const DecayReport d = decay_check(alpha, spec, grid, controls);
    Json rows = Json::array();
    for (const auto& r : d.rows) {
      rows.push_back({{"t", r.t},
                      {"spectral_norm", r.spectral_norm},
                      {"row_sum_norm", r.row_sum_norm},
                      {"error", r.error},
                      {"bound", r.bound}});
      csv << fmt(r.t) << ',' << fmt(r.spectral_norm) << ',' << fmt(r.row_sum_norm) << ','
          << fmt(r.error) << ',' << fmt(r.bound) << '\n';
    }
    doc["decay"] = {{"t0", d.t0},
                    {"condition", d.condition},
                    {"bound_constant", d.bound_constant},
                    {"tail_exponent", d.tail_exponent},
                    {"tail_nonincreasing", d.tail_nonincreasing},
                    {"tail_strictly_decreasing", d.tail_strictly_decreasing},
                    {"bound_holds", d.bound_holds},
                    {"final_norm", d.final_norm},
                    {"rows", rows}};
  }
  if (o.integral) {
    const IntegralReport r = integral_check(alpha, spec, o.t_max.value_or(200.0), controls);
    doc["integral"] = {{"t_max", r.t_max},
                       {"t0", r.t0},
                       {"condition", r.condition},
                       {"near_zero_part", r.near_zero_part},
                       {"numeric_part", r.numeric_part},
                       {"numeric_error", r.numeric_error},
                       {"tail_bound", r.tail_bound},
                       {"tail_valid", r.tail_valid},
                       {"total_bound", r.total_bound},
                       {"finite", r.finite}};
  }
  if (o.format == "csv") {
    out << csv.str();
  } else {
    out << doc.dump(2) << '\n';
  }
  return kOk;
}

inline TestFunction named_function(const std::string& name) {
  if (name == "exp") return [](double s) { return std::exp(-s); };
  if (name == "one") return [](double) { return 1.0; };
  if (name == "zero") return [](double) { return 0.0; };
  if (name == "tanh") return [](double s) { return std::tanh(s); };
  throw PreconditionError("unknown test function '" + name + "' (exp, one, zero, tanh)");
}

inline int cmd_limit(const Options& o, std::ostream& out) {
  const double alpha = require_alpha(o);
  const Complex lambda = resolve_lambda(o);
  const std::vector<double> us = o.u.empty() ? std::vector<double>{10, 20, 30, 40, 50} : o.u;
  const Lemma3Report r = lemma3_limit_check(alpha, lambda, named_function(o.g), us, eval_controls(o));
  if (o.format == "csv") {
    out << "u,lhs,lhs_error,abs_error\n";
    for (const auto& e : r.entries) {
      out << fmt(e.u) << ',' << fmt(e.lhs) << ',' << fmt(e.lhs_error) << ',' << fmt(e.abs_error)
          << '\n';
    }
    return kOk;
  }
  Json doc = document("limit");
  doc["params"] = {{"alpha", alpha}, {"lambda", to_json(lambda)}, {"g", o.g}};
  doc["rhs"] = r.rhs;
  doc["rhs_error"] = r.rhs_error;
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    entries.push_back(
        {{"u", e.u}, {"lhs", e.lhs}, {"lhs_error", e.lhs_error}, {"abs_error", e.abs_error}});
  }
  doc["entries"] = entries;
  doc["decreasing"] = r.decreasing;
  doc["eventually_decreasing"] = r.eventually_decreasing;
  doc["strictly_decreasing"] = r.strictly_decreasing;
  doc["limit_observed"] = r.eventually_decreasing;
  out << doc.dump(2) << '\n';
  return kOk;
}

inline int cmd_selftest(const Options& o, std::ostream& out, std::ostream& err) {
  SelftestOptions so;
  so.tol = o.tol;
  if (o.tol && !(*o.tol > 0.0)) throw PreconditionError("--tol must be positive");
  so.reverse_orientation = o.reverse;
  const SelftestReport r = run_selftest(so);
  const auto& worst = r.checks[r.worst];
  if (o.format == "csv") {
    out << "suite,name,value_re,value_im,reference_re,reference_im,deviation,tolerance,ok\n";
    for (const auto& c : r.checks) {
      out << c.suite << ",\"" << c.name << "\"," << fmt(c.value.real()) << ','
          << fmt(c.value.imag()) << ',' << fmt(c.reference.real()) << ','
          << fmt(c.reference.imag()) << ',' << fmt(c.deviation) << ',' << fmt(c.tolerance) << ','
          << (c.ok ? "true" : "false") << '\n';
    }
  } else {
    Json doc = document("selftest");
    Json checks = Json::array();
    for (const auto& c : r.checks) {
      Json j{{"suite", c.suite},
             {"name", c.name},
             {"value", to_json(c.value)},
             {"reference", to_json(c.reference)},
             {"deviation", c.deviation},
             {"tolerance", c.tolerance},
             {"ok", c.ok}};
      if (!c.error.empty()) j["error"] = c.error;
      checks.push_back(j);
    }
    doc["checks"] = checks;
    doc["worst"] = {{"suite", worst.suite},
                    {"name", worst.name},
                    {"deviation", worst.deviation},
                    {"tolerance", worst.tolerance}};
    doc["ok"] = r.ok;
    out << doc.dump(2) << '\n';
  }
  if (!r.ok) {
    err << "selftest: mismatch, worst offender " << worst.suite << " " << worst.name
        << " deviation " << fmt(worst.deviation) << " > tolerance " << fmt(worst.tolerance)
        << '\n';
    return kFail;
  }
  return kOk;
}

namespace detail {

inline bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

inline std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return fmt(v.get<double>());
  throw PreconditionError("config values must be scalars or arrays of scalars");
}

/// Appends "--key value" for every config entry not already given on the
/// command line.
inline std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open config file '" + path + "'");
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const std::exception& e) {
    throw PreconditionError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw PreconditionError("config file must hold a JSON object");
  std::vector<std::string> extra;
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || has_flag(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) extra.push_back(flag);
      continue;
    }
    if (value.is_array()) {
      for (const auto& v : value) extra.push_back(flag + "=" + scalar_text(v));
      continue;
    }
    extra.push_back(flag + "=" + scalar_text(value));
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace detail

/// Runs the command line (without the program name); returns the exit code.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Mittag-Leffler function evaluation and bound certificates", "mlfunc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto common = [&o](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--tol", o.tol, "Tolerance override");
    sub->add_option("--config", o.config, "JSON file with default flag values");
  };
  auto params = [&o](CLI::App* sub) {
    sub->add_option("--alpha", o.alpha, "alpha");
    sub->add_option("--beta", o.beta, "beta (complex)");
  };
  auto lambda_opts = [&o](CLI::App* sub) {
    sub->add_option("--lambda", o.lambda, "lambda (complex, e.g. -1 or 1+2i)");
    sub->add_option("--lambda-abs", o.lambda_abs, "|lambda|");
    sub->add_option("--lambda-arg", o.lambda_arg, "arg lambda, radians or e.g. 0.75pi");
  };

  auto* eval = app.add_subcommand("eval", "Evaluate E_{alpha,beta}(z) or lambda-derivatives");
  common(eval);
  params(eval);
  lambda_opts(eval);
  eval->add_option("--z", o.z, "Evaluation points (complex)");
  eval->add_option("--t", o.t, "t values for lambda t^alpha");
  eval->add_option("--l", o.l, "Derivative order in lambda");

  auto* certify = app.add_subcommand("certify", "Certify an asymptotic bound");
  std::string lemma;
  certify->add_option("lemma", lemma, "lemma2-i | lemma2-ii | lemma2-iii | lemma4")
      ->required()
      ->check(CLI::IsMember({"lemma2-i", "lemma2-ii", "lemma2-iii", "lemma4"}));
  common(certify);
  certify->add_option("--alpha", o.alpha, "alpha");
  lambda_opts(certify);
  certify->add_option("--theta", o.theta, "Contour angle");
  certify->add_option("--theta0", o.theta0, "Safety angle");
  certify->add_option("--l", o.l, "Derivative order (lemma4)");
  certify->add_option("--t-max", o.t_max, "Grid end (default 200 t0, or 100 t0 for lemma4)");
  certify->add_option("--points", o.points, "Grid size");
  certify->add_option("--shrink", o.shrink, "Scale factor applied to the constants");

  auto* matrix = app.add_subcommand("matrix", "Matrix Mittag-Leffler function and decay checks");
  common(matrix);
  params(matrix);
  matrix->add_option("--block", o.blocks, "Jordan block lambda:size");
  matrix->add_option("--matrix", o.matrix, "Diagonalizable matrix, rows split by ';'");
  matrix->add_option("--t", o.t, "t values");
  matrix->add_flag("--decay", o.decay, "Run the decay check");
  matrix->add_flag("--integral", o.integral, "Run the integral check");
  matrix->add_option("--t-max", o.t_max, "Decay grid end or integral cut-off");
  matrix->add_option("--points", o.points, "Decay grid size");

  auto* limit = app.add_subcommand("limit", "Weighted convolution limit check");
  common(limit);
  limit->add_option("--alpha", o.alpha, "alpha");
  lambda_opts(limit);
  limit->add_option("--g", o.g, "Test function: exp, one, zero, tanh");
  limit->add_option("--u", o.u, "u grid");

  auto* selftest = app.add_subcommand("selftest", "Quadrature and overlap self-tests");
  common(selftest);
  selftest->add_flag("--debug-reverse-orientation", o.reverse,
                     "Traverse contours backwards (mutation check)");

  try {
    args = detail::merge_config(std::move(args));
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "mlfunc: " << e.what() << '\n';
    return kMalformed;
  } catch (const std::exception& e) {
    err << "mlfunc: " << e.what() << '\n';
    return kMalformed;
  }

  try {
    if (*eval) return cmd_eval(o, out);
    if (*certify) return cmd_certify(lemma, o, out);
    if (*matrix) return cmd_matrix(o, out);
    if (*limit) return cmd_limit(o, out);
    if (*selftest) return cmd_selftest(o, out, err);
  } catch (const PreconditionError& e) {
    err << "mlfunc: " << e.what() << '\n';
    return kMalformed;
  } catch (const DomainError& e) {
    err << "mlfunc: " << e.what() << '\n';
    return kMalformed;
  } catch (const std::invalid_argument& e) {
    err << "mlfunc: malformed number: " << e.what() << '\n';
    return kMalformed;
  } catch (const std::exception& e) {
    err << "mlfunc: " << e.what() << '\n';
    return kEvaluationError;
  }
  return kMalformed;
}

}  // namespace mlfunc::cli
