// Acceptance harness: one PASS/FAIL line per criterion, details indented
// below it. Exits nonzero when any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "mlfunc/mlfunc.hpp"
#include "oracles.hpp"

using namespace mlfunc;

namespace {

struct Criterion {
  bool ok = true;
  std::vector<std::string> details;

  void check(bool cond, const std::string& what) {
    details.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
    ok = ok && cond;
  }
  void note(const std::string& what) { details.push_back("info " + what); }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

int failures = 0;

void report(int id, const std::string& title, const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.check(false, std::string("exception: ") + e.what());
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (c.ok ? "PASS" : "FAIL") << " criterion " << id << ": " << title << " ("
            << num(secs) << " s)\n";
  for (const auto& d : c.details) std::cout << "    " << d << '\n';
  std::cout.flush();
  if (!c.ok) ++failures;
}

std::pair<int, std::string> run_binary(const std::string& args) {
  const std::string cmd = std::string(MLFUNC_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string text;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) text.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, text};
}

void identities(Criterion& c) {
  double worst = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double x = -5.0 + 0.25 * i;
    worst = std::max(worst, rel(ml_eval({1.0, 1.0}, x).value, std::exp(x)));
  }
  c.check(worst <= 1e-12, "E_{1,1}(x) vs exp(x), 41 points, max rel " + num(worst) + " <= 1e-12");
  worst = 0.0;
  for (double a : {0.3, 0.5, 0.7, 0.9}) {
    for (double b : {a, 1.0, 2.0}) {
      worst = std::max(worst, std::abs(ml_eval({a, b}, 0.0).value - recip_gamma(b)));
    }
  }
  c.check(worst <= 1e-13, "E(0) = 1/Gamma(beta), 12 pairs, max abs " + num(worst) + " <= 1e-13");
  worst = 0.0;
  for (Complex z : {Complex{1}, Complex{-1}, Complex{0, 1}, Complex{0, -1}}) {
    worst = std::max(worst, rel(ml_eval({1.0, 2.0}, z).value, oracle::ml_one_two(z)));
  }
  c.check(worst <= 1e-12, "E_{1,2}(z) = (e^z-1)/z at +-1, +-i, max rel " + num(worst) + " <= 1e-12");
}

void quadrature_selftest(Criterion& c) {
  int n = 0;
  double worst = 0.0;
  for (const auto& [alpha, beta] : recip_gamma_selftest_pairs()) {
    ContourSpec s;
    s.alpha = alpha;
    s.theta = 0.75 * alpha * kPi;
    const Complex v = recip_gamma_via_contour({alpha, beta}, s);
    const double dev = std::abs(v - recip_gamma(beta - alpha));
    worst = std::max(worst, dev);
    if (beta == Complex(alpha)) c.note("beta = alpha = " + num(alpha) + ": |value| = " + num(std::abs(v)));
    ++n;
  }
  c.check(n == 12, std::to_string(n) + " (alpha, beta) pairs");
  c.check(worst <= 1e-9, "max |contour - 1/Gamma(beta - alpha)| = " + num(worst) + " <= 1e-9");
}

void representation(Criterion& c) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double worst = 0.0;
  int points = 0;
  double worst_theta = 0.0, worst_eps = 0.0;
  bool theta_ok = true, eps_ok = true;
  for (double alpha : {0.5, 0.7}) {
    for (double beta : {alpha, 1.0}) {
      for (double r : {5.0, 8.0, 12.0}) {
        for (double a : {0.6, 0.8, 1.0}) {
          const MLParams p{alpha, beta};
          const Complex z = std::polar(r, a * kPi);
          const EvalResult ref = ml_contour(p, z, select_contour(alpha, z));
          const EvalResult s = ml_series(p, z, 1e-16, SeriesMode::compensated);
          worst = std::max(worst, rel(ref.value, s.value));
          ++points;
          for (double f : {0.6, 0.9}) {
            ContourSpec spec;
            spec.alpha = alpha;
            spec.theta = f * alpha * kPi;
            const EvalResult v = ml_contour(p, z, spec);
            const double d = std::abs(v.value - ref.value);
            const double allowed = v.err_estimate + ref.err_estimate + 8 * eps * std::abs(ref.value);
            worst_theta = std::max(worst_theta, d / allowed);
            theta_ok = theta_ok && d <= allowed;
          }
          for (double e : {0.5, 2.0}) {
            ContourSpec spec = select_contour(alpha, z);
            spec.eps = e;
            const EvalResult v = ml_contour(p, z, spec);
            const double d = std::abs(v.value - ref.value);
            const double allowed = v.err_estimate + ref.err_estimate + 8 * eps * std::abs(ref.value);
            worst_eps = std::max(worst_eps, d / allowed);
            eps_ok = eps_ok && d <= allowed;
          }
        }
      }
    }
  }
  c.check(worst <= 1e-8, "contour vs compensated series, " + std::to_string(points) +
                             " annulus points, max rel " + num(worst) + " <= 1e-8");
  c.check(theta_ok, "theta in {0.6, 0.75, 0.9} alpha pi: max |diff| / combined error = " +
                        num(worst_theta) + " <= 1");
  c.check(eps_ok, "eps in {0.5, 1, 2}: max |diff| / combined error = " + num(worst_eps) + " <= 1");
}

void growth_decay(Criterion& c) {
  struct Case {
    std::string part;
    double alpha;
    Complex lambda;
  };
  const std::vector<Case> cases{{"i", 0.6, 1.0},
                                {"ii", 0.5, 1.0},
                                {"ii", 0.5, 2.0},
                                {"ii", 0.6, 1.0},
                                {"ii", 0.6, 2.0},
                                {"iii", 0.6, -1.0},
                                {"iii", 0.4, std::polar(1.0, 0.9 * kPi)}};
  auto certify = [](const Case& k, double scale) {
    const SectorContext ctx = default_sector_context(k.alpha, k.lambda);
    const double t0 = onset_time(ctx);
    const auto grid = log_grid(t0, 200.0 * t0, 40);
    CertifyOptions o;
    o.constant_scale = scale;
    if (k.part == "i") return certify_lemma2_i(ctx, grid, o);
    if (k.part == "ii") return certify_lemma2_ii(ctx, grid, o);
    return certify_lemma2_iii(ctx, grid, o);
  };
  for (const auto& k : cases) {
    const std::string name = "(" + k.part + ") alpha=" + num(k.alpha) + " lambda=" +
                             num(k.lambda.real()) + (k.lambda.imag() != 0.0 ? "+" + num(k.lambda.imag()) + "i" : "");
    const auto full = certify(k, 1.0);
    c.check(full.verdict == Verdict::pass && full.worst_ratio <= 1.0,
            name + ": " + std::string(to_string(full.verdict)) + ", worst_ratio " +
                num(full.worst_ratio));
    const auto half = certify(k, 0.5);
    c.check(half.verdict == Verdict::fail, name + " with m/2: " +
                                              std::string(to_string(half.verdict)) +
                                              " (must be FAIL), worst_ratio " +
                                              num(half.worst_ratio));
  }
  const auto strong = certify(cases[5], 0.01);
  c.note("(iii) alpha=0.6 lambda=-1 with m/100: " + std::string(to_string(strong.verdict)) +
         ", worst_ratio " + num(strong.worst_ratio));
}

void derivative_bounds(Criterion& c) {
  const SectorContext ctx = default_sector_context(0.8, std::polar(1.0, 0.75 * kPi));
  const double t0 = onset_time(ctx);
  const auto grid = log_grid(t0, 100.0 * t0, 40);
  for (int l : {0, 1, 2}) {
    const auto cert = certify_lemma4(ctx, l, grid);
    c.check(cert.verdict == Verdict::pass,
            "l=" + std::to_string(l) + ": " + std::string(to_string(cert.verdict)) +
                ", worst ratios " + num(cert.worst_ratio_i) + " / " + num(cert.worst_ratio_ii));
    c.check(cert.tail_exponent_i <= -0.8 + 0.1,
            "l=" + std::to_string(l) + ": tail exponent of d^l E_alpha " +
                num(cert.tail_exponent_i) + " <= -0.7");
    c.check(cert.tail_exponent_ii <= -1.6 + 0.1,
            "l=" + std::to_string(l) + ": tail exponent of d^l E_{alpha,alpha} " +
                num(cert.tail_exponent_ii) + " <= -1.5");
  }
}

void convolution_limit(Criterion& c) {
  const std::vector<double> u{10.0, 20.0, 30.0, 40.0, 50.0};
  const auto r = lemma3_limit_check(0.5, 2.0, [](double s) { return std::exp(-s); }, u);
  const double err50 = std::fabs(r.entries.back().lhs - 0.4);
  c.check(std::fabs(r.rhs - 0.4) <= 1e-12, "RHS " + num(r.rhs) + " = 0.4");
  c.check(err50 <= 1e-3, "|LHS(50) - 0.4| = " + num(err50) + " <= 1e-3");
  std::string seq;
  for (const auto& e : r.entries) seq += " " + num(e.abs_error) + "+-" + num(e.lhs_error);
  c.check(r.decreasing, "error sequence decreasing within error estimates:" + seq);
  c.note(std::string("strictly decreasing in floating point: ") +
         (r.strictly_decreasing ? "yes" : "no"));
}

MatrixC expm_oracle(const MatrixC& a) {
  const double norm = max_row_sum_norm(a);
  int squarings = 0;
  while (std::ldexp(norm, -squarings) > 0.25) ++squarings;
  const MatrixC b = a * std::ldexp(1.0, -squarings);
  MatrixC term = MatrixC::Identity(a.rows(), a.cols());
  MatrixC sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

void matrix_decay(Criterion& c) {
  JordanSpec spec;
  spec.blocks.push_back({-1.0, 2});
  const double t0 = spec_onset_time(spec, 0.5);
  const DecayReport d = decay_check(0.5, spec, log_grid(t0, 1e4 * t0, 60));
  c.check(d.tail_strictly_decreasing, "norms strictly decreasing for t >= 10 t0 (t0 = " + num(t0) + ")");
  c.check(d.final_norm < 1e-2, "final norm " + num(d.final_norm) + " < 1e-2");
  c.note("tail exponent " + num(d.tail_exponent) + ", bound holds: " + (d.bound_holds ? "yes" : "no"));
  const IntegralReport in = integral_check(0.5, spec, 200.0);
  c.check(in.finite, "integral total bound finite: " + num(in.total_bound));
  c.check(in.tail_bound < 0.1 * in.numeric_part,
          "analytic tail " + num(in.tail_bound) + " < 10% of numeric part " +
              num(in.numeric_part) + " (ratio " + num(in.tail_bound / in.numeric_part) + ")");
  MatrixC a(3, 3);
  a << -2.0, 1.0, 0.5, 0.0, -1.0, 0.3, 0.2, 0.0, -3.0;
  const JordanSpec diag = jordan_spec_from_matrix(a);
  double worst = 0.0;
  for (double t : {0.1, 0.5, 1.0, 2.0}) {
    const MatrixC e = expm_oracle(a * t);
    worst = std::max(worst, spectral_norm(ml_matrix({1.0, 1.0}, diag, t).value - e) / spectral_norm(e));
  }
  c.check(worst <= 1e-9, "alpha=1 diagonalizable vs matrix exponential, max rel " + num(worst) + " <= 1e-9");
}

void derivatives(Criterion& c) {
  double worst = 0.0;
  int n = 0;
  for (double alpha : {0.5, 0.8}) {
    for (int l : {1, 2}) {
      for (double r : {0.5, 1.0, 2.0}) {
        for (double a : {0.0, 0.5, 0.75, 1.0}) {
          for (double t : {0.25, 1.0, 2.0}) {
            const MLParams p{alpha, 1.0};
            const Complex lambda = std::polar(r, a * kPi);
            const double tau = std::pow(t, alpha);
            auto f = [&](Complex lam) { return ml_eval(p, lam * tau).value; };
            const Complex ref = oracle::cauchy_derivative(f, lambda, l, 0.25, 64);
            worst = std::max(worst, rel(ml_series_deriv(p, lambda, t, l, 1e-16).value, ref));
            ++n;
          }
        }
      }
    }
  }
  c.check(worst <= 1e-8, "ml_series_deriv vs complex-step (circle) differentiation, " +
                             std::to_string(n) + " points, max rel " + num(worst) + " <= 1e-8");
}

void cli(Criterion& c) {
  for (const std::string args : {"eval --alpha 0.6 --beta 1 --z -20 --z 2 --z 1+3i",
                                 "certify lemma2-iii --alpha 0.6 --lambda -1", "selftest"}) {
    const auto a = run_binary(args);
    const auto b = run_binary(args);
    c.check(a.first == 0 && !a.second.empty() && a.second == b.second,
            "'" + args + "': exit " + std::to_string(a.first) + ", two runs byte-identical");
  }
  const std::vector<std::pair<std::string, int>> codes{
      {"eval --alpha 2 --z 1", 1},
      {"eval --alpha 0.5 --z 1+", 1},
      {"eval --alpha 1 --z 20", 2},
      {"certify lemma2-iii --alpha 0.6 --lambda -1 --shrink 0.01", 3},
      {"selftest --debug-reverse-orientation", 3},
      {"selftest --tol 1e-18", 3}};
  for (const auto& [args, expected] : codes) {
    const int got = run_binary(args).first;
    c.check(got == expected, "'" + args + "': exit " + std::to_string(got) + " (expected " +
                                 std::to_string(expected) + ")");
  }
}

}  // namespace

int main() {
  report(1, "identity suite", identities);
  report(2, "quadrature self-test", quadrature_selftest);
  report(3, "representation consistency", representation);
  report(4, "growth and decay certificates", growth_decay);
  report(5, "derivative certificates", derivative_bounds);
  report(6, "weighted convolution limit", convolution_limit);
  report(7, "matrix decay and integrability", matrix_decay);
  report(8, "derivative oracle", derivatives);
  report(9, "CLI golden runs and exit codes", cli);
  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL")
            << '\n';
  return failures == 0 ? 0 : 1;
}
