#include "sbz/zeta2d.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace sbz {

namespace {

Rational q_pow(int p, long e) { return rpow(Rational(p), e); }

std::string omega_label(const QuasiCharacter& w) {
  if (!w.label().empty()) return w.label();
  return w.ramified() ? "r" + std::to_string(w.conductor()) : "unr(" + w.pi_value().str() + ")";
}

/// Lowest and highest coset level of a normalized function.
std::pair<int, int> level_range(const SBFunction& n) {
  int lo = kInfValuation, hi = kInfValuation;
  for (const auto& t : n.terms()) {
    lo = std::min({lo, t.coset.level, t.coset.rep.valuation()});
    hi = hi == kInfValuation ? t.coset.level : std::max(hi, t.coset.level);
  }
  if (lo != kInfValuation) hi = std::max(hi, lo);
  return {lo, hi};
}

/// h(u) omega(u) |u|^-1 on the shell w(u) = k, without the T^k factor.
SBFunction shell_piece(const SBFunction& h, int hi, const QuasiCharacter& omega, int k) {
  const int p = h.p();
  int L = std::max(hi, k + std::max(omega.conductor(), 1));
  SBFunction out(p, h.mu());
  for (const auto& c : subcosets(KCoset(KElement(p), k), L)) {
    if (c.rep.digit(k) == 0) continue;
    CycRat v = h(c.rep);
    if (!v.is_zero()) out.add(c, v * omega(c.rep) * CycRat(q_pow(p, k)));
  }
  return out;
}

void check_unit(const FElement& x) {
  if (x.valuation() != 0) throw std::invalid_argument("point outside T");
}

}  // namespace

ChiCharacter ChiCharacter::boundary(const QuasiCharacter& omega) {
  return {omega, QuasiCharacter::unramified(omega.p(), omega.pi_value())};
}

CycRat ChiCharacter::operator()(const FElement& x, const FElement& y) const {
  check_unit(x);
  check_unit(y);
  return omega1(x.residue()) * omega2(y.residue());
}

std::string ChiCharacter::label() const { return "(" + omega_label(omega1) + "," + omega_label(omega2) + ")"; }

Rational abs_t(const FElement& x, const FElement& y) {
  check_unit(x);
  check_unit(y);
  return q_pow(x.p(), -x.residue().valuation() - y.residue().valuation());
}

ZetaValue zeta2(const SBTensor& f, const ChiCharacter& chi) { return zeta_product(f, chi.omega1, chi.omega2); }

ZetaValue zeta2_direct(const SBTensor& f, const ChiCharacter& chi, int n) {
  LiftedFn2 integrand;
  for (const auto& term : f) {
    SBFunction a = normalize(term.f), b = normalize(term.g);
    auto [lo1, hi1] = level_range(a);
    auto [lo2, hi2] = level_range(b);
    if (lo1 == kInfValuation || lo2 == kInfValuation) continue;
    const int p = a.p();
    std::map<int, SBFunction> pa, pb;
    for (int k = lo1; k <= n - lo2; ++k) pa.emplace(k, shell_piece(a, hi1, chi.omega1, k));
    for (int k = lo2; k <= n - lo1; ++k) pb.emplace(k, shell_piece(b, hi2, chi.omega2, k));
    for (const auto& [k1, g1] : pa)
      for (const auto& [k2, g2] : pb) {
        if (k1 + k2 > n || g1.terms().empty() || g2.terms().empty()) continue;
        integrand.push_back({{{g1, g2, term.coeff}}, FElement(p), FElement(p), 0, 0, ZetaValue::monomial(p, CycRat(1), k1 + k2)});
      }
  }
  return integrate_F2(integrand);
}

ZetaValue l2_function(const ChiCharacter& chi) { return l_function(chi.omega1) * l_function(chi.omega2); }

ZetaValue epsilon2(const ChiCharacter& chi, const AdditiveCharacter& psi, const KElement& pi, const Rational& mu) {
  return epsilon_star(chi.omega1, psi, pi, mu) * epsilon_star(chi.omega2, psi, pi, mu);
}

bool verify_FE2(const SBTensor& f, const ChiCharacter& chi, const AdditiveCharacter& psi, const KElement& pi) {
  if (f.empty()) return true;
  ZetaValue eps = epsilon_star(chi.omega1, psi, pi, f.front().f.mu()) * epsilon_star(chi.omega2, psi, pi, f.front().g.mu());
  ChiCharacter inv = chi.inverse();
  ZetaValue lhs = subst_dual(zeta2(star_product(f, psi, pi), inv) / l2_function(inv));
  return lhs == eps * (zeta2(f, chi) / l2_function(chi));
}

FElement Rank2Decomposition::value() const {
  const int p = u.p();
  return FElement(KElement::monomial(p, 1, i1)) * u.shifted(i2);
}

Rank2Decomposition decompose_rank2(const FElement& x) {
  if (x.is_zero()) throw std::invalid_argument("malformed decomposition: 0 has none");
  const int p = x.p();
  Rank2Decomposition d;
  d.i2 = x.valuation();
  d.i1 = x.eta().valuation();
  d.u = FElement(KElement::monomial(p, 1, -d.i1)) * x.shifted(-d.i2);
  return d;
}

Rho2Value rho2(const Rank2Decomposition& x, const Rank2Decomposition& y) {
  for (const auto* d : {&x, &y}) {
    if (d->u.valuation() != 0 || d->u.eta().valuation() != 0)
      throw std::invalid_argument("malformed decomposition: u is not a unit of rank 2");
    if (d->i2 < 0) throw std::invalid_argument("malformed decomposition: point outside O_F");
  }
  const int p = x.u.p();
  if (std::min(x.i2, y.i2) > 0) return {KElement(p), true};
  return {x.u.residue().shifted(std::min(x.i1, y.i1)), false};
}

Rho2Value rho2(const FElement& x, const FElement& y) { return rho2(decompose_rank2(x), decompose_rank2(y)); }

Rho2Check zeta_rho2(const SBFunction& g, const QuasiCharacter& omega) {
  const int p = g.p();
  const CycRat wp = omega.pi_value();
  const ZetaValue one(1);
  const ZetaValue V = ZetaValue::monomial(p, wp, 1);
  const ZetaValue mu_units(CycRat(g.mu() * (1 - Rational(1, p))));
  Rho2Check out;

  // Z_k = integral of g omega_0 over the shell w = k, constant for k >= hi.
  SBFunction n = normalize(g);
  auto [lo, hi] = level_range(n);
  QuasiCharacter w0 = omega.with_pi_value(CycRat(1));
  if (lo != kInfValuation) {
    std::map<int, ZetaValue> Z;
    for (int k = lo; k < hi; ++k) {
      int L = std::max(hi, k + std::max(omega.conductor(), 1));
      CycRat s;
      for (const auto& c : subcosets(KCoset(KElement(p), k), L))
        if (c.rep.digit(k) != 0) s += n(c.rep) * w0(c.rep);
      Z.emplace(k, ZetaValue(s * CycRat(g.mu() * q_pow(p, k - L))));
    }
    ZetaValue c0 = omega.ramified() ? ZetaValue() : ZetaValue(n(KElement(p))) * mu_units;
    ZetaValue geo = (one - V).inverse();
    ZetaValue S = c0 * V.pow(2L * hi) * geo * geo;
    ZetaValue low;
    for (int m = lo; m < hi; ++m) low += V.pow(m) * Z[m];
    S += V.pow(hi) * geo * low;
    for (int k = lo; k < hi; ++k) {
      for (int m = lo; m < k; ++m) S += V.pow(k + m) * Z[m];
      S += Z[k] * V.pow(2L * k) * geo;
    }
    out.lhs = mu_units * S;
  }
  out.rhs = mu_units * (one + V) / (one - V) * zeta(g, omega).subst(wp, 2);
  out.equal = out.lhs == out.rhs;
  out.corollary = (out.lhs * (one - V).pow(2)).is_laurent_polynomial();
  return out;
}

}  // namespace sbz
