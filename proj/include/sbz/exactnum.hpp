#pragma once

#include <gmpxx.h>

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sbz {

using Rational = mpq_class;

/// Integer power of a rational, negative exponents allowed.
Rational rpow(const Rational& base, long e);

/// Element of the cyclotomic field Q(zeta_m), stored in the power basis
/// modulo the m-th cyclotomic polynomial.
class CycRat {
 public:
  CycRat();
  CycRat(long v);  // NOLINT(google-explicit-constructor)
  CycRat(const Rational& v);  // NOLINT(google-explicit-constructor)

  /// zeta_m^k.
  static CycRat root_of_unity(int m, long k = 1);
  /// The positive real square root of a prime p, realized inside Q(zeta_8) for
  /// p = 2 and Q(zeta_4p) otherwise.
  static CycRat sqrt_prime(long p);

  int order() const { return m_; }
  const std::vector<Rational>& coords() const { return c_; }

  CycRat embed(int m2) const;
  /// Same element expressed in the smallest cyclotomic field containing it.
  CycRat minimal() const;

  bool is_zero() const;
  bool is_rational() const;
  Rational to_rational() const;

  CycRat operator-() const;
  CycRat& operator+=(const CycRat& o);
  CycRat& operator-=(const CycRat& o);
  CycRat& operator*=(const CycRat& o);
  CycRat& operator/=(const CycRat& o);
  friend CycRat operator+(CycRat a, const CycRat& b) { return a += b; }
  friend CycRat operator-(CycRat a, const CycRat& b) { return a -= b; }
  friend CycRat operator*(CycRat a, const CycRat& b) { return a *= b; }
  friend CycRat operator/(CycRat a, const CycRat& b) { return a /= b; }
  friend bool operator==(const CycRat& a, const CycRat& b);
  friend bool operator!=(const CycRat& a, const CycRat& b) { return !(a == b); }

  CycRat inverse() const;
  CycRat conj() const;
  CycRat pow(long e) const;

  std::complex<double> to_complex() const;
  std::string str() const;
  /// True when str() would need parentheses inside a product.
  bool is_compound() const;

  static CycRat parse(const std::string& s);

 private:
  CycRat(int m, std::vector<Rational> c);
  int m_ = 1;
  std::vector<Rational> c_;
};

std::ostream& operator<<(std::ostream& os, const CycRat& x);

int euler_phi(int m);
/// Integer coefficients of the m-th cyclotomic polynomial, low degree first.
const std::vector<long>& cyclotomic_poly(int m);

/// Dense polynomial in T over CycRat, low degree first, no trailing zeros.
class CPoly {
 public:
  CPoly() = default;
  explicit CPoly(std::vector<CycRat> c);
  static CPoly constant(const CycRat& c);
  static CPoly monomial(const CycRat& c, int k);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<CycRat>& coeffs() const { return c_; }
  CycRat coeff(int k) const;
  CycRat lead() const { return c_.back(); }

  CPoly operator-() const;
  friend CPoly operator+(const CPoly& a, const CPoly& b);
  friend CPoly operator-(const CPoly& a, const CPoly& b);
  friend CPoly operator*(const CPoly& a, const CPoly& b);
  friend bool operator==(const CPoly& a, const CPoly& b) { return a.c_ == b.c_; }
  CPoly scaled(const CycRat& s) const;

  /// Euclidean division; throws on a zero divisor.
  static std::pair<CPoly, CPoly> divmod(const CPoly& a, const CPoly& b);
  static CPoly gcd(CPoly a, CPoly b);

 private:
  void trim();
  std::vector<CycRat> c_;
};

/// Element of Q(zeta_m)(T)[X, X^-1], T standing for q^-s and X for the
/// generator of the value group Z. Stored as (sum_k N_k(T) X^k) / D(T) with
/// N_k Laurent in T, D a polynomial with D(0) = 1 and gcd(D, N_*) = 1.
class ZetaValue {
 public:
  using Laurent = std::map<int, CycRat>;  // T-exponent -> coefficient

  ZetaValue() = default;
  ZetaValue(const CycRat& c);  // NOLINT(google-explicit-constructor)
  ZetaValue(long c);  // NOLINT(google-explicit-constructor)
  ZetaValue(const Rational& c);  // NOLINT(google-explicit-constructor)

  /// c * T^tk * X^xk with T bound to q.
  static ZetaValue monomial(long q, const CycRat& c, int tk, int xk = 0);
  static ZetaValue T(long q) { return monomial(q, CycRat(1), 1); }
  static ZetaValue X(int k = 1) { return monomial(0, CycRat(1), 0, k); }

  long q() const { return q_; }
  bool is_zero() const { return num_.empty(); }
  const std::map<int, Laurent>& numerator() const { return num_; }
  const CPoly& denominator() const { return den_; }
  /// True when no T and no X occur.
  bool is_constant() const;
  std::optional<CycRat> constant_value() const;
  bool is_laurent_polynomial() const { return den_.degree() == 0; }

  ZetaValue operator-() const;
  ZetaValue& operator+=(const ZetaValue& o);
  ZetaValue& operator-=(const ZetaValue& o);
  ZetaValue& operator*=(const ZetaValue& o);
  ZetaValue& operator/=(const ZetaValue& o);
  friend ZetaValue operator+(ZetaValue a, const ZetaValue& b) { return a += b; }
  friend ZetaValue operator-(ZetaValue a, const ZetaValue& b) { return a -= b; }
  friend ZetaValue operator*(ZetaValue a, const ZetaValue& b) { return a *= b; }
  friend ZetaValue operator/(ZetaValue a, const ZetaValue& b) { return a /= b; }
  friend bool operator==(const ZetaValue& a, const ZetaValue& b);
  friend bool operator!=(const ZetaValue& a, const ZetaValue& b) { return !(a == b); }

  /// Throws "division by zero" for 0 and std::domain_error when the result
  /// would need X in the denominator.
  ZetaValue inverse() const;
  ZetaValue conj() const;
  ZetaValue pow(long e) const;

  /// T -> q^-2 T^-1, i.e. s -> 2 - s.
  ZetaValue subst_dual() const;
  /// T -> c T^k for k != 0.
  ZetaValue subst(const CycRat& c, int k) const;
  /// Power series coefficients in T up to (and including) order n; requires
  /// X-degree zero or picks the X^xk component.
  Laurent series(int n, int xk = 0) const;
  /// Truncate a Laurent polynomial to T-orders <= n; requires D = 1.
  ZetaValue truncated(int n) const;

  std::complex<double> eval(std::complex<double> t, std::complex<double> x = 1.0) const;
  std::string str() const;

 private:
  void canonicalize();
  void bind_q(long other);
  long q_ = 0;
  std::map<int, Laurent> num_;
  CPoly den_ = CPoly::constant(CycRat(1));
};

std::ostream& operator<<(std::ostream& os, const ZetaValue& x);

ZetaValue subst_dual(const ZetaValue& v);
ZetaValue subst_scale(const ZetaValue& v, const CycRat& c, int k);

struct ExponentialType {
  CycRat a;
  int b = 0;
};
/// (a, b) with v = a * T^b exactly, if any.
std::optional<ExponentialType> is_exponential_type(const ZetaValue& v);

}  // namespace sbz
