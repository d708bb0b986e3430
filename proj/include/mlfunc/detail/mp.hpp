#pragma once

// Thin RAII layer over MPFR used by the extended-precision series mode.

#include <mpfr.h>

#include <cmath>
#include <utility>
#include <vector>

#include "mlfunc/complex.hpp"

namespace mlfunc::detail {

class MpReal {
 public:
  explicit MpReal(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  MpReal(mpfr_prec_t prec, double x) { mpfr_init2(v_, prec); mpfr_set_d(v_, x, MPFR_RNDN); }
  MpReal(const MpReal& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  MpReal& operator=(const MpReal& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  MpReal(MpReal&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  MpReal& operator=(MpReal&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~MpReal() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  /// Binary exponent e with 2^(e-1) <= |x| < 2^e; very negative for zero.
  long exponent() const { return is_zero() ? -(1L << 40) : mpfr_get_exp(v_); }

 private:
  mpfr_t v_;
};

struct MpComplex {
  MpReal re;
  MpReal im;

  explicit MpComplex(mpfr_prec_t prec) : re(prec), im(prec) {}
  MpComplex(mpfr_prec_t prec, Complex z) : re(prec, z.real()), im(prec, z.imag()) {}

  Complex to_complex() const { return {re.to_double(), im.to_double()}; }
  long exponent() const { return std::max(re.exponent(), im.exponent()); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
};

/// out = a * b (out may alias neither input).
inline void mul(MpComplex& out, const MpComplex& a, const MpComplex& b,
                MpReal& scratch) {
  mpfr_mul(out.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(scratch.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  mpfr_sub(out.re.get(), out.re.get(), scratch.get(), MPFR_RNDN);
  mpfr_mul(out.im.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(scratch.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_add(out.im.get(), out.im.get(), scratch.get(), MPFR_RNDN);
}

/// Complex log-gamma at fixed precision by upward shift plus the Stirling
/// series. Needed only for non-real arguments; real ones use mpfr_gamma.
class MpComplexGamma {
 public:
  explicit MpComplexGamma(mpfr_prec_t prec) : prec_(prec) {
    // Shift so |w| exceeds ~prec * ln2 / (2 pi); Stirling terms then fall
    // below 2^-prec before they start to grow.
    min_modulus_ = 0.12 * static_cast<double>(prec) + 12.0;
    MpReal pi(prec), two_pi_pow(prec), fact(prec), zeta(prec), coeff(prec);
    mpfr_const_pi(pi.get(), MPFR_RNDN);
    MpReal two_pi(prec);
    mpfr_mul_ui(two_pi.get(), pi.get(), 2, MPFR_RNDN);
    mpfr_log(two_pi.get(), two_pi.get(), MPFR_RNDN);
    half_log_two_pi_ = MpReal(prec);
    mpfr_div_ui(half_log_two_pi_.get(), two_pi.get(), 2, MPFR_RNDN);

    // B_2j = (-1)^(j+1) 2 (2j)! zeta(2j) / (2 pi)^(2j); coefficient of
    // w^-(2j-1) is B_2j / (2j (2j-1)).
    const int max_terms = static_cast<int>(0.08 * static_cast<double>(prec)) + 20;
    for (int j = 1; j <= max_terms; ++j) {
      const unsigned long n = 2UL * static_cast<unsigned long>(j);
      mpfr_fac_ui(fact.get(), n, MPFR_RNDN);
      mpfr_zeta_ui(zeta.get(), n, MPFR_RNDN);
      mpfr_mul_ui(two_pi_pow.get(), pi.get(), 2, MPFR_RNDN);
      mpfr_pow_ui(two_pi_pow.get(), two_pi_pow.get(), n, MPFR_RNDN);
      mpfr_mul(coeff.get(), fact.get(), zeta.get(), MPFR_RNDN);
      mpfr_mul_ui(coeff.get(), coeff.get(), 2, MPFR_RNDN);
      mpfr_div(coeff.get(), coeff.get(), two_pi_pow.get(), MPFR_RNDN);
      if (j % 2 == 0) mpfr_neg(coeff.get(), coeff.get(), MPFR_RNDN);
      mpfr_div_ui(coeff.get(), coeff.get(), n * (n - 1), MPFR_RNDN);
      coeffs_.push_back(coeff);
    }
  }

  /// 1/Gamma(w) for w not on the non-positive real axis.
  void recip_gamma(MpComplex& out, const MpComplex& w) const {
    const mpfr_prec_t p = prec_;
    MpReal scratch(p);
    // Shift: w + n with |w + n| >= min_modulus_.
    MpComplex u = w;
    MpComplex product(p);
    mpfr_set_ui(product.re.get(), 1, MPFR_RNDN);
    MpComplex tmp(p);
    while (modulus_estimate(u) < min_modulus_ || u.re.to_double() < min_modulus_ / 2) {
      mul(tmp, product, u, scratch);
      std::swap(product, tmp);
      mpfr_add_ui(u.re.get(), u.re.get(), 1, MPFR_RNDN);
    }
    // log Gamma(u) = (u - 1/2) log u - u + log(2 pi)/2 + sum c_j u^(1-2j)
    MpComplex log_u(p);
    complex_log(log_u, u);
    MpComplex half_less = u;
    mpfr_sub_d(half_less.re.get(), half_less.re.get(), 0.5, MPFR_RNDN);
    MpComplex acc(p);
    mul(acc, half_less, log_u, scratch);
    mpfr_sub(acc.re.get(), acc.re.get(), u.re.get(), MPFR_RNDN);
    mpfr_sub(acc.im.get(), acc.im.get(), u.im.get(), MPFR_RNDN);
    mpfr_add(acc.re.get(), acc.re.get(), half_log_two_pi_.get(), MPFR_RNDN);

    MpComplex inv_u(p), inv_u2(p), power(p), term(p);
    complex_inverse(inv_u, u, scratch);
    mul(inv_u2, inv_u, inv_u, scratch);
    power = inv_u;
    const long stop_exp = acc.exponent() - static_cast<long>(p) - 8;
    for (const auto& c : coeffs_) {
      mpfr_mul(term.re.get(), power.re.get(), c.get(), MPFR_RNDN);
      mpfr_mul(term.im.get(), power.im.get(), c.get(), MPFR_RNDN);
      mpfr_add(acc.re.get(), acc.re.get(), term.re.get(), MPFR_RNDN);
      mpfr_add(acc.im.get(), acc.im.get(), term.im.get(), MPFR_RNDN);
      if (term.exponent() < stop_exp) break;
      mul(tmp, power, inv_u2, scratch);
      std::swap(power, tmp);
    }
    // 1/Gamma(w) = product / Gamma(u) = product * exp(-logGamma(u))
    mpfr_neg(acc.re.get(), acc.re.get(), MPFR_RNDN);
    mpfr_neg(acc.im.get(), acc.im.get(), MPFR_RNDN);
    MpComplex e(p);
    complex_exp(e, acc, scratch);
    mul(out, product, e, scratch);
  }

 private:
  static double modulus_estimate(const MpComplex& u) {
    return std::hypot(u.re.to_double(), u.im.to_double());
  }

  static void complex_log(MpComplex& out, const MpComplex& u) {
    mpfr_hypot(out.re.get(), u.re.get(), u.im.get(), MPFR_RNDN);
    mpfr_log(out.re.get(), out.re.get(), MPFR_RNDN);
    mpfr_atan2(out.im.get(), u.im.get(), u.re.get(), MPFR_RNDN);
  }

  static void complex_inverse(MpComplex& out, const MpComplex& u, MpReal& scratch) {
    MpReal norm(u.re.prec());
    mpfr_sqr(norm.get(), u.re.get(), MPFR_RNDN);
    mpfr_sqr(scratch.get(), u.im.get(), MPFR_RNDN);
    mpfr_add(norm.get(), norm.get(), scratch.get(), MPFR_RNDN);
    mpfr_div(out.re.get(), u.re.get(), norm.get(), MPFR_RNDN);
    mpfr_div(out.im.get(), u.im.get(), norm.get(), MPFR_RNDN);
    mpfr_neg(out.im.get(), out.im.get(), MPFR_RNDN);
  }

  static void complex_exp(MpComplex& out, const MpComplex& u, MpReal& scratch) {
    mpfr_exp(scratch.get(), u.re.get(), MPFR_RNDN);
    mpfr_sin_cos(out.im.get(), out.re.get(), u.im.get(), MPFR_RNDN);
    mpfr_mul(out.re.get(), out.re.get(), scratch.get(), MPFR_RNDN);
    mpfr_mul(out.im.get(), out.im.get(), scratch.get(), MPFR_RNDN);
  }

  mpfr_prec_t prec_;
  double min_modulus_ = 0.0;
  MpReal half_log_two_pi_{64};
  std::vector<MpReal> coeffs_;
};

}  // namespace mlfunc::detail
