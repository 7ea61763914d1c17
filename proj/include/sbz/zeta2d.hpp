#pragma once

#include <string>

#include "sbz/lift2d.hpp"
#include "sbz/zeta1d.hpp"

namespace sbz {

/// Quasi-character of K_2 whose composite with the symbol map on T is
/// (x, y) -> omega1(xbar) omega2(ybar).
struct ChiCharacter {
  QuasiCharacter omega1;
  QuasiCharacter omega2;

  /// chi = omega o boundary, as seen by the rho_2 identity:
  /// chi(t(x, y)) = omega(xbar pi^{w(ybar)}).
  static ChiCharacter boundary(const QuasiCharacter& omega);
  ChiCharacter inverse() const { return {omega1.inverse(), omega2.inverse()}; }
  /// chi(t(x, y)) for (x, y) in T.
  CycRat operator()(const FElement& x, const FElement& y) const;
  std::string label() const;
};

/// |t(x, y)| = |x| |y| on T, as a power of q.
Rational abs_t(const FElement& x, const FElement& y);

/// zeta(f^0, chi, s) by reduction to the residue field.
ZetaValue zeta2(const SBTensor& f, const ChiCharacter& chi);
/// zeta(f^0, chi, s) up to T-order n, summed shell by shell from lifted
/// integrands on F x F.
ZetaValue zeta2_direct(const SBTensor& f, const ChiCharacter& chi, int n);

ZetaValue l2_function(const ChiCharacter& chi);
ZetaValue epsilon2(const ChiCharacter& chi, const AdditiveCharacter& psi, const KElement& pi, const Rational& mu = 1);
/// subst_dual(Z(f*, chi^-1)) == epsilon2(chi) Z(f, chi).
bool verify_FE2(const SBTensor& f, const ChiCharacter& chi, const AdditiveCharacter& psi, const KElement& pi);

/// t1^{i1} t2^{i2} u with u a unit of O_F whose residue is a unit of O_K;
/// t1 is the constant pi and t2 = t.
struct Rank2Decomposition {
  int i1 = 0;
  int i2 = 0;
  FElement u;
  FElement value() const;
};

Rank2Decomposition decompose_rank2(const FElement& x);

struct Rho2Value {
  KElement value;
  /// The t2-exponent was positive and 0 was returned by convention.
  bool by_convention = false;
};

/// Generalised residue map on O_F x O_F. Throws std::invalid_argument for a
/// malformed decomposition.
Rho2Value rho2(const Rank2Decomposition& x, const Rank2Decomposition& y);
Rho2Value rho2(const FElement& x, const FElement& y);

struct Rho2Check {
  ZetaValue lhs;
  ZetaValue rhs;
  bool equal = false;
  /// lhs (1 - omega(pi) T)^2 is a Laurent polynomial.
  bool corollary = false;
};

/// zeta(g o rho_2, omega o boundary, s) by double shell summation, against
/// mu(O^x) (1 + omega(pi)T)/(1 - omega(pi)T) zeta(g, omega) at T -> omega(pi) T^2.
Rho2Check zeta_rho2(const SBFunction& g, const QuasiCharacter& omega);

}  // namespace sbz
