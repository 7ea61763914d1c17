#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbz/schwartz.hpp"
#include "sbz/setring.hpp"
#include "sbz/zeta1d.hpp"

namespace sbz {

/// Element of F = K((t)): a finite Laurent polynomial in t with K coefficients.
class FElement {
 public:
  explicit FElement(int p = 2) : p_(p) {}
  FElement(const KElement& c);  // NOLINT(google-explicit-constructor)
  /// c * t^k.
  static FElement monomial(const KElement& c, int k);
  static FElement t(int p, int k = 1) { return monomial(KElement(p, 1), k); }

  int p() const { return p_; }
  const std::map<int, KElement>& coeffs() const { return c_; }
  KElement coeff(int k) const;
  bool is_zero() const { return c_.empty(); }
  /// nu(x), kInfValuation for 0.
  int valuation() const { return c_.empty() ? kInfValuation : c_.begin()->first; }
  /// eta(x): the coefficient of t^nu(x).
  KElement eta() const;
  /// Coefficient of t^0, the residue of an element of O_F.
  KElement residue() const { return coeff(0); }

  FElement operator-() const;
  friend FElement operator+(const FElement& a, const FElement& b);
  friend FElement operator-(const FElement& a, const FElement& b) { return a + (-b); }
  friend FElement operator*(const FElement& a, const FElement& b);
  friend bool operator==(const FElement& a, const FElement& b) { return a.c_ == b.c_; }
  friend bool operator!=(const FElement& a, const FElement& b) { return !(a == b); }
  friend bool operator<(const FElement& a, const FElement& b) { return a.c_ < b.c_; }

  /// Coefficients at t-exponents < level only.
  FElement truncated(int level) const;
  /// x * t^k.
  FElement shifted(int k) const;
  /// x^-1 correct at t-exponents < N. Requires eta(x) = c u^k.
  FElement inverse(int N) const;

  std::string str() const;
  /// Syntax: "u^-1 + t*(1+u) + 2*t^-2".
  static FElement parse(int p, const std::string& s);

 private:
  int p_;
  std::map<int, KElement> c_;
};

std::ostream& operator<<(std::ostream& os, const FElement& x);

/// psi(sum a_n t^n) = psi_K(a_0); conductor 1 with induced character psi_K.
struct GoodCharacter {
  AdditiveCharacter base;
  int conductor() const { return 1; }
  CycRat operator()(const FElement& x) const { return base(x.residue()); }
  /// psi_b(x) = psi(b x).
  CycRat operator()(const FElement& b, const FElement& x) const;
};

/// Residue data on K: a Schwartz-Bruhat function plus finitely many point
/// values (null functions such as Char({0})).
class ResidueFn {
 public:
  explicit ResidueFn(int p = 2, Rational mu = 1) : sb_(p, std::move(mu)) {}
  ResidueFn(SBFunction sb) : sb_(std::move(sb)) {}  // NOLINT(google-explicit-constructor)
  static ResidueFn point(int p, const KElement& x, const CycRat& v = CycRat(1), Rational mu = 1);
  /// Characteristic function of a K-set (point atoms become point values).
  static ResidueFn indicator(const KSet& s, int p, Rational mu = 1);

  int p() const { return sb_.p(); }
  const Rational& mu() const { return sb_.mu(); }
  const SBFunction& sb() const { return sb_; }
  const std::map<KElement, CycRat>& points() const { return points_; }
  bool has_points() const { return !points_.empty(); }

  ResidueFn& add_point(const KElement& x, const CycRat& v);
  ResidueFn& add(const ResidueFn& o, const CycRat& scale = CycRat(1));
  friend ResidueFn operator*(const CycRat& s, const ResidueFn& g);

  CycRat operator()(const KElement& x) const;
  bool is_zero() const;
  CycRat integral() const { return haar_integral(sb_); }

  /// y -> g(y + tau)
  ResidueFn translated(const KElement& tau) const;
  /// y -> g(alpha y); alpha must be c u^k.
  ResidueFn dilated(const KElement& alpha) const;

  std::string str() const;
  /// SBFunction syntax, with extra point terms "c*{x}".
  static ResidueFn parse(int p, const std::string& s, Rational mu = 1, int psi_d = 0);

 private:
  SBFunction sb_;
  std::map<KElement, CycRat> points_;
};

struct LiftTerm {
  ResidueFn g;
  FElement a;
  int gamma = 0;
  std::optional<FElement> b;  // factor psi_b
  ZetaValue coeff;
};

/// Element of L(F, psi): sum of coeff * g^{a,gamma} * psi_b.
class LiftedFn {
 public:
  explicit LiftedFn(int p = 2, Rational mu = 1, int psi_d = 0);

  int p() const { return p_; }
  const Rational& mu() const { return mu_; }
  GoodCharacter psi() const { return {AdditiveCharacter{p_, psi_d_}}; }
  const std::vector<LiftTerm>& terms() const { return terms_; }

  LiftedFn& add(const ResidueFn& g, const FElement& a, int gamma, const ZetaValue& coeff = ZetaValue(1),
                const std::optional<FElement>& b = std::nullopt);
  LiftedFn& add(const LiftedFn& o, const ZetaValue& scale = ZetaValue(1));
  static LiftedFn lift(const ResidueFn& g, const FElement& a, int gamma, int psi_d = 0);

  LiftedFn operator-() const;
  friend LiftedFn operator+(LiftedFn a, const LiftedFn& b) { return a.add(b); }
  friend LiftedFn operator-(LiftedFn a, const LiftedFn& b) { return a.add(b, ZetaValue(-1)); }
  friend LiftedFn operator*(const ZetaValue& s, const LiftedFn& f);

  ZetaValue operator()(const FElement& x) const;
  /// Zero test by grouping terms per translated ideal (and character class).
  bool is_zero() const;
  friend bool operator==(const LiftedFn& a, const LiftedFn& b) { return (a - b).is_zero(); }

  std::string str() const;
  /// Syntax: "2 * X^1 * lift(1*[O]; t; 1) * psi(u^-1)", terms joined by + or -.
  static LiftedFn parse(int p, const std::string& s, Rational mu = 1, int psi_d = 0);

 private:
  void check_term_count() const;
  int p_;
  Rational mu_;
  int psi_d_;
  std::vector<LiftTerm> terms_;
};

std::ostream& operator<<(std::ostream& os, const LiftedFn& f);

/// Value of g^{a,gamma} at x.
CycRat lift_value(const ResidueFn& g, const FElement& a, int gamma, const FElement& x);

ZetaValue integrate_F(const LiftedFn& f);
/// |alpha| = q^{-w(eta(alpha))} X^{nu(alpha)}.
ZetaValue abs_F(const FElement& alpha);
/// x -> f(alpha x); eta(alpha) must be c u^k.
LiftedFn scale_F(const LiftedFn& f, const FElement& alpha);
/// x -> f(x + tau)
LiftedFn translate_F(const LiftedFn& f, const FElement& tau);
/// Pointwise |f| for untwisted f with constant coefficients.
LiftedFn abs_lifted(const LiftedFn& f);
LiftedFn fourier_F(const LiftedFn& f, const GoodCharacter& psi);

/// a + t^gamma rho^-1(S).
struct DistinguishedSetF {
  FElement a;
  KSet S;
  int gamma = 0;
  bool contains(const FElement& x) const;
  std::string str() const;
};

struct DistinguishedInstance {
  using Atom = DistinguishedSetF;
  static SetRelation relate(const Atom& a, const Atom& b);
  static Atom intersect(const Atom& a, const Atom& b);
  static Atom unite(const Atom& a, const Atom& b);
  static bool contains(const Atom& a, const FElement& x) { return a.contains(x); }
  static std::string str(const Atom& a) { return a.str(); }
};

using FSet = DddSet<DistinguishedInstance>;

/// t^gamma O_F written as the distinguished set t^{gamma-1} rho^-1({0}).
DistinguishedSetF null_atom(int p, int gamma);
/// Characteristic function of W as a lifted function.
LiftedFn char_function(const FSet& W, const Rational& mu = 1);
/// mu^F(W) = integral of Char(W).
ZetaValue measure_F(const FSet& W, const Rational& mu = 1);

/// f(x) |x|^-1 as a lifted function, for f vanishing near 0. Throws
/// std::domain_error when the quotient is not integrable.
LiftedFn divide_by_abs(const LiftedFn& f);
/// Integral over F^x of phi, given the extension ext of phi |x|^-1 to F.
ZetaValue mult_integral(const LiftedFn& ext);

/// zeta^1_F(coeff g^{a,gamma} psi_b, omega) for omega induced by the residue
/// quasi-character omega_bar; T = q^-s. Throws in the gaussian-sum case.
ZetaValue zeta1d_on_F(const LiftTerm& term, const QuasiCharacter& omega_bar, int psi_d, const Rational& mu = 1);
ZetaValue zeta1d_on_F(const LiftedFn& f, const QuasiCharacter& omega_bar);

/// Integral of psi_K(b y) omega(y) |y|^s over the shell w(y) = n, d*y = |y|^-1 dy.
ZetaValue shell_integral(const KElement& b, const QuasiCharacter& omega, const AdditiveCharacter& psi, int n,
                         const Rational& mu = 1);

struct RegularizedZeta {
  ZetaValue value;
  /// Lowest shell that contributes.
  int stable_from = 0;
  std::string label = "regularized";
};

/// Shell-by-shell principal value in the gaussian-sum case. Throws
/// std::runtime_error("no principal value") when the lower shells never vanish.
RegularizedZeta zeta1d_on_F_regularized(const LiftTerm& term, const QuasiCharacter& omega_bar, int psi_d,
                                        const Rational& mu = 1);

/// c * g^{(a1,a2),(gamma1,gamma2)} on F x F with g a tensor of SB functions.
struct LiftTerm2 {
  SBTensor g;
  FElement a1, a2;
  int gamma1 = 0, gamma2 = 0;
  ZetaValue coeff;
};
using LiftedFn2 = std::vector<LiftTerm2>;

ZetaValue integrate_F2(const LiftedFn2& f);
ZetaValue eval_F2(const LiftedFn2& f, const FElement& x, const FElement& y);
/// (x, y) -> f(x + tau1, y + tau2)
LiftedFn2 translate_F2(const LiftedFn2& f, const FElement& tau1, const FElement& tau2);
/// (x, y) -> f1(x) f2(y), for untwisted f1, f2 without point values.
LiftedFn2 tensor(const LiftedFn& f1, const LiftedFn& f2);

}  // namespace sbz
