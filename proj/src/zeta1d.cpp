#include "sbz/zeta1d.hpp"

#include <stdexcept>

namespace sbz {

namespace {

Rational q_pow(int p, long e) { return rpow(Rational(p), e); }

CycRat minus_one_value(const QuasiCharacter& w) { return w(KElement(w.p(), w.p() - 1)); }

}  // namespace

ZetaValue zeta(const SBFunction& g0, const QuasiCharacter& omega) {
  if (g0.p() != omega.p()) throw std::invalid_argument("zeta: mismatched residue characteristic");
  const int p = g0.p();
  const int r = omega.conductor();
  SBFunction g = g0.is_plain() ? g0 : normalize(g0);
  ZetaValue total;
  for (const auto& t : g.terms()) {
    const KElement& a = t.coset.rep;
    const int n = t.coset.level;
    if (a.is_zero()) {
      if (omega.ramified()) continue;
      CycRat w_pi = omega.pi_value();
      CycRat m(g.mu() * (1 - Rational(1, p)));
      ZetaValue geo = (ZetaValue(1) - ZetaValue::monomial(p, w_pi, 1)).inverse();
      total += ZetaValue::monomial(p, t.coeff * m * w_pi.pow(n), n) * geo;
      continue;
    }
    const int v = a.valuation();
    const int L = std::max(n, v + r);
    CycRat sum;
    for (const auto& c : subcosets(t.coset, L)) sum += omega(c.rep);
    CycRat meas(g.mu() * q_pow(p, v - L));
    total += ZetaValue::monomial(p, t.coeff * sum * meas, v);
  }
  return total;
}

ZetaValue l_function(const QuasiCharacter& omega) {
  if (omega.ramified()) return ZetaValue(1);
  return (ZetaValue(1) - ZetaValue::monomial(omega.p(), omega.pi_value(), 1)).inverse();
}

ZetaValue zeta_normalized(const SBFunction& g, const QuasiCharacter& omega) {
  return zeta(g, omega) / l_function(omega);
}

CycRat rho0(const QuasiCharacter& chi, const AdditiveCharacter& psi, const KElement& pi) {
  const int r = chi.conductor();
  if (r == 0) throw std::invalid_argument("rho0 needs a ramified character");
  CycRat s;
  for (const auto& [idx, theta] : QuasiCharacter::unit_reps(chi.p(), r)) {
    s += chi(theta) * psi(pi_power_times(pi, psi.d - r, theta, psi.d));
  }
  return s * CycRat::sqrt_prime(chi.p()).pow(-r);
}

Rational delta_parity(int q, int m) { return m % 2 == 0 ? Rational(1) : Rational(1, q); }

ZetaValue epsilon_star(const QuasiCharacter& omega, const AdditiveCharacter& psi, const KElement& pi,
                       const Rational& mu) {
  const int p = omega.p();
  const int r = omega.conductor();
  std::vector<SBFunction> tests;
  if (r == 0) {
    tests.push_back(SBFunction::indicator(KCoset(KElement(p), 0), mu));
    tests.push_back(SBFunction::indicator(KCoset(KElement(p), 1), mu));
  } else {
    tests.push_back(SBFunction::indicator(KCoset(KElement(p, 1), r), mu));
    tests.push_back(SBFunction::indicator(KCoset(KElement::uniformizer(p), r + 1), mu));
  }
  QuasiCharacter inv = omega.inverse();
  std::optional<ZetaValue> eps;
  for (const auto& g : tests) {
    ZetaValue z = zeta_normalized(g, omega);
    if (z.is_zero()) throw std::runtime_error("epsilon: degenerate test function");
    ZetaValue e = subst_dual(zeta_normalized(star_transform(g, psi, pi), inv)) / z;
    if (eps && *eps != e) throw std::runtime_error("epsilon depends on the test function");
    eps = e;
  }
  if (!is_exponential_type(*eps)) throw std::runtime_error("epsilon not of exponential type");
  return *eps;
}

bool check_functional_equation(const SBFunction& f, const QuasiCharacter& omega, const AdditiveCharacter& psi,
                               const KElement& pi, const ZetaValue& eps) {
  ZetaValue lhs = subst_dual(zeta_normalized(star_transform(f, psi, pi), omega.inverse()));
  return lhs == eps * zeta_normalized(f, omega);
}

SBFunction double_star(const SBFunction& f, const AdditiveCharacter& psi, const KElement& pi) {
  return star_transform(star_transform(f, psi, pi), psi, pi);
}

bool check_identity_A(const SBFunction& f, const QuasiCharacter& omega, const AdditiveCharacter& psi,
                      const KElement& pi) {
  const int q = f.p();
  Rational c = f.mu() * f.mu() * q_pow(q, -psi.d) * delta_parity(q, psi.d - omega.conductor());
  ZetaValue rhs = ZetaValue(CycRat(c) * minus_one_value(omega)) * zeta(f, omega);
  return zeta(double_star(f, psi, pi), omega) == rhs;
}

DoubleStarReport double_star_invariance(const SBFunction& f, const KElement& pi1, const KElement& pi2,
                                        const AdditiveCharacter& psi1, const AdditiveCharacter& psi2) {
  if (pi1.valuation() != 1 || pi2.valuation() != 1) throw std::invalid_argument("not a uniformizer");
  const int q = f.p();
  DoubleStarReport rep;
  SBFunction d1 = double_star(f, psi1, pi1);
  rep.prime_independent = d1 == double_star(f, psi1, pi2);
  SBFunction d2 = double_star(f, psi2, pi1);
  const int diff = psi2.d - psi1.d;
  if (diff % 2 == 0) {
    rep.conductor_scaling = d2 == CycRat(q_pow(q, -diff)) * d1;
    rep.conductor_scaling_stated = d2 == CycRat(q_pow(q, diff)) * d1;
  } else {
    Rational mu2 = f.mu() * f.mu();
    rep.automorphism = double_star(d1, psi2, pi1) == CycRat(mu2 * mu2 * q_pow(q, -psi1.d - psi2.d - 1)) * f;
  }
  return rep;
}

SBTensor star_product(const SBTensor& t, const AdditiveCharacter& psi, const KElement& pi) {
  SBTensor out;
  for (const auto& term : t) out.push_back({star_transform(term.f, psi, pi), star_transform(term.g, psi, pi), term.coeff});
  return out;
}

ZetaValue zeta_product(const SBTensor& t, const QuasiCharacter& w1, const QuasiCharacter& w2) {
  ZetaValue s;
  for (const auto& term : t) s += ZetaValue(term.coeff) * zeta(term.f, w1) * zeta(term.g, w2);
  return s;
}

ZetaValue zeta_product_normalized(const SBTensor& t, const QuasiCharacter& w1, const QuasiCharacter& w2) {
  return zeta_product(t, w1, w2) / (l_function(w1) * l_function(w2));
}

bool check_product_functional_equation(const SBTensor& t, const QuasiCharacter& w1, const QuasiCharacter& w2,
                                       const AdditiveCharacter& psi, const KElement& pi) {
  if (t.empty()) return true;
  ZetaValue eps = epsilon_star(w1, psi, pi, t.front().f.mu()) * epsilon_star(w2, psi, pi, t.front().g.mu());
  ZetaValue lhs = subst_dual(zeta_product_normalized(star_product(t, psi, pi), w1.inverse(), w2.inverse()));
  return lhs == eps * zeta_product_normalized(t, w1, w2);
}

}  // namespace sbz
