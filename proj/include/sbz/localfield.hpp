#pragma once

#include <climits>
#include <map>
#include <string>
#include <vector>

#include "sbz/exactnum.hpp"

namespace sbz {

constexpr int kInfValuation = INT_MAX;

bool is_prime(long n);

/// Element of K = F_p((u)): a finite Laurent polynomial in u with digits in F_p.
class KElement {
 public:
  KElement() = default;
  explicit KElement(int p) : p_(p) {}
  /// Constant digit c (reduced mod p).
  KElement(int p, long c);
  /// c * u^k.
  static KElement monomial(int p, long c, int k);
  static KElement uniformizer(int p) { return monomial(p, 1, 1); }

  int p() const { return p_; }
  const std::map<int, int>& digits() const { return d_; }
  int digit(int k) const;
  bool is_zero() const { return d_.empty(); }
  /// w(x), kInfValuation for 0.
  int valuation() const { return d_.empty() ? kInfValuation : d_.begin()->first; }
  /// Largest exponent carrying a digit (undefined for 0).
  int top() const { return d_.rbegin()->first; }

  KElement operator-() const;
  friend KElement operator+(const KElement& a, const KElement& b);
  friend KElement operator-(const KElement& a, const KElement& b) { return a + (-b); }
  friend KElement operator*(const KElement& a, const KElement& b);
  friend bool operator==(const KElement& a, const KElement& b) { return a.d_ == b.d_; }
  friend bool operator!=(const KElement& a, const KElement& b) { return !(a == b); }
  friend bool operator<(const KElement& a, const KElement& b) { return a.d_ < b.d_; }

  /// Digits at exponents < level only.
  KElement truncated(int level) const;
  /// x * u^k.
  KElement shifted(int k) const;
  /// x^-1 correct modulo u^N (all digits at exponents < N).
  KElement inverse(int N) const;
  /// Unit part x * u^-w(x).
  KElement unit_part() const { return shifted(-valuation()); }

  std::string str() const;
  static KElement parse(int p, const std::string& s);

 private:
  int p_ = 2;
  std::map<int, int> d_;
};

std::ostream& operator<<(std::ostream& os, const KElement& x);

/// (pi^k * a) with digits only below `level`; pi must be a uniformizer.
KElement pi_power_times(const KElement& pi, int k, const KElement& a, int level);

/// a + u^level O, or the single point {rep} when level == kInfValuation.
struct KCoset {
  KElement rep;
  int level = 0;

  KCoset() = default;
  KCoset(const KElement& r, int n);
  static KCoset point(const KElement& x) { return KCoset(x, kInfValuation); }
  bool is_point() const { return level == kInfValuation; }
  bool contains(const KElement& x) const;
  bool contains_zero() const { return rep.is_zero(); }
  /// this is a subset of o
  bool subset_of(const KCoset& o) const;
  bool meets(const KCoset& o) const { return subset_of(o) || o.subset_of(*this); }
  std::string str() const;
  friend bool operator==(const KCoset& a, const KCoset& b) { return a.level == b.level && a.rep == b.rep; }
  friend bool operator<(const KCoset& a, const KCoset& b) {
    return a.level != b.level ? a.level < b.level : a.rep < b.rep;
  }
};

enum class CosetRelation { kEqual, kFirstInSecond, kSecondInFirst, kDisjoint };
CosetRelation relate(const KCoset& a, const KCoset& b);

/// All sub-cosets of c at level L >= c.level, in lexicographic digit order.
std::vector<KCoset> subcosets(const KCoset& c, int L);

/// psi(x) = zeta_p^{digit of x at u^(d-1)}.
struct AdditiveCharacter {
  int p = 2;
  int d = 0;
  /// Exponent e with psi(x) = zeta_p^e.
  int phase(const KElement& x) const { return x.digit(d - 1); }
  CycRat operator()(const KElement& x) const;
};

/// Quasi-character of K^x: a character of O^x/(1+pi^r O) and a value at pi.
class QuasiCharacter {
 public:
  QuasiCharacter() = default;
  /// `table` is indexed by unit_index(); entries at non-unit indices are ignored.
  QuasiCharacter(int p, int r, std::vector<CycRat> table, CycRat pi_value, std::string label = "");

  static QuasiCharacter trivial(int p, CycRat pi_value = CycRat(1));
  /// Unramified with omega(pi) = pi_value.
  static QuasiCharacter unramified(int p, CycRat pi_value) { return trivial(p, pi_value); }

  int p() const { return p_; }
  /// Table modulus r (not necessarily the exact conductor).
  int level() const { return r_; }
  int conductor() const { return conductor_; }
  bool ramified() const { return conductor_ > 0; }
  const CycRat& pi_value() const { return pi_value_; }
  const std::string& label() const { return label_; }

  QuasiCharacter with_pi_value(const CycRat& v) const;
  QuasiCharacter with_label(std::string label) const;
  QuasiCharacter inverse() const;
  /// Values on unit representatives, in unit_reps() order.
  CycRat on_unit_index(int idx) const { return table_[idx]; }

  CycRat operator()(const KElement& x) const;

  /// Index of the residue of a unit modulo u^r.
  static int unit_index(const KElement& unit, int r);
  /// Representatives of O^x/(1+u^r O) with their indices.
  static std::vector<std::pair<int, KElement>> unit_reps(int p, int r);

 private:
  int p_ = 2;
  int r_ = 0;
  int conductor_ = 0;
  std::vector<CycRat> table_;
  CycRat pi_value_ = CycRat(1);
  std::string label_;
};

/// All characters of O^x/(1+pi^r O), with pi_value 1, trivial first.
std::vector<QuasiCharacter> enumerate_characters(int r, int q, int p);

}  // namespace sbz
