#include <cstdio>

#include "mlfunc/mlfunc.hpp"

using namespace mlfunc;

int main() {
  const MLParams p{0.5, 1.0};
  std::printf("E_{1/2}(-x) across the dispatch bands\n");
  for (double x : {0.5, 3.0, 8.0, 40.0}) {
    const EvalResult r = ml_eval(p, -x);
    std::printf("  x = %5.1f  E = %.15g  (%s, err %.1e)\n", x, r.value.real(),
                std::string(to_string(r.method)).c_str(), r.err_estimate);
  }

  const SectorContext ctx = default_sector_context(0.6, -1.0);
  const Lemma2Certificate cert = certify_lemma2_iii(ctx, default_lemma2_grid(ctx));
  std::printf("\nDecay-sector bound for alpha = 0.6, lambda = -1\n");
  std::printf("  m = %.6g, t0 = %.6g, worst ratio %.4g at t = %.4g -> %s\n", cert.m_const,
              cert.t0, cert.worst_ratio, cert.witness_t, std::string(to_string(cert.verdict)).c_str());

  JordanSpec spec;
  spec.blocks = {{-1.0, 2}};
  const MatrixResult m = ml_matrix(p, spec, 4.0);
  std::printf("\nE_{1/2}(J t^{1/2}) for the 2x2 Jordan block of -1 at t = 4\n");
  for (int i = 0; i < 2; ++i) {
    std::printf("  [% .10f  % .10f]\n", m.value(i, 0).real(), m.value(i, 1).real());
  }
  return 0;
}
