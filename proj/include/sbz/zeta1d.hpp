#pragma once

#include <vector>

#include "sbz/schwartz.hpp"

namespace sbz {

/// zeta(g, omega, s) as a rational function of T = q^-s, with d*x = |x|^-1 dx.
ZetaValue zeta(const SBFunction& g, const QuasiCharacter& omega);
/// (1 - omega(pi) T)^-1 for unramified omega, 1 otherwise.
ZetaValue l_function(const QuasiCharacter& omega);
/// zeta / L.
ZetaValue zeta_normalized(const SBFunction& g, const QuasiCharacter& omega);

/// q^{-r/2} sum_theta chi(theta) psi(pi^{d-r} theta) over O^x/(1+pi^r O), r the conductor of chi.
CycRat rho0(const QuasiCharacter& chi, const AdditiveCharacter& psi, const KElement& pi);

/// delta_m: 1 for m even, q^-1 for m odd.
Rational delta_parity(int q, int m);

/// epsilon_*(omega) as a T-monomial, read off the functional equation with two
/// test functions. Throws std::runtime_error if the two disagree or the result
/// is not a monomial.
ZetaValue epsilon_star(const QuasiCharacter& omega, const AdditiveCharacter& psi, const KElement& pi,
                       const Rational& mu = 1);

/// subst_dual(Z(f*, omega^-1)) == eps * Z(f, omega).
bool check_functional_equation(const SBFunction& f, const QuasiCharacter& omega, const AdditiveCharacter& psi,
                               const KElement& pi, const ZetaValue& eps);

/// zeta(f**, omega) == mu^2 q^-d delta_{d-r} omega(-1) zeta(f, omega).
bool check_identity_A(const SBFunction& f, const QuasiCharacter& omega, const AdditiveCharacter& psi,
                      const KElement& pi);

SBFunction double_star(const SBFunction& f, const AdditiveCharacter& psi, const KElement& pi);

struct DoubleStarReport {
  bool prime_independent = false;
  /// Only meaningful when d1 and d2 have equal parity.
  bool conductor_scaling = false;        // D_{d2} f = q^{d1-d2} D_{d1} f
  bool conductor_scaling_stated = false; // D_{d2} f = q^{d2-d1} D_{d1} f
  /// Only meaningful when d1 and d2 have opposite parity.
  bool automorphism = false;             // D_{d2} D_{d1} f = mu^4 q^{-d1-d2-1} f
};

DoubleStarReport double_star_invariance(const SBFunction& f, const KElement& pi1, const KElement& pi2,
                                        const AdditiveCharacter& psi1, const AdditiveCharacter& psi2);

/// Finite sum of c * (f (x) g) on K x K.
struct SBTensorTerm {
  SBFunction f;
  SBFunction g;
  CycRat coeff;
};
using SBTensor = std::vector<SBTensorTerm>;

SBTensor star_product(const SBTensor& t, const AdditiveCharacter& psi, const KElement& pi);
ZetaValue zeta_product(const SBTensor& t, const QuasiCharacter& w1, const QuasiCharacter& w2);
ZetaValue zeta_product_normalized(const SBTensor& t, const QuasiCharacter& w1, const QuasiCharacter& w2);
/// Z((f)*, w^-1, 2-s) == eps(w1) eps(w2) Z(f, w, s).
bool check_product_functional_equation(const SBTensor& t, const QuasiCharacter& w1, const QuasiCharacter& w2,
                                       const AdditiveCharacter& psi, const KElement& pi);

}  // namespace sbz
