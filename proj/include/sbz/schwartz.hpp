#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbz/exactnum.hpp"
#include "sbz/localfield.hpp"

namespace sbz {

constexpr long kTermCap = 100000;

struct SBTerm {
  KCoset coset;
  std::optional<KElement> twist;  // factor psi(b x)
  CycRat coeff;
};

/// Schwartz-Bruhat function on K: a finite combination of coset indicators,
/// optionally twisted by psi(b x). mu is the Haar measure of O.
class SBFunction {
 public:
  explicit SBFunction(int p = 2, Rational mu = 1);
  static SBFunction indicator(const KCoset& c, Rational mu = 1, CycRat coeff = CycRat(1));

  int p() const { return p_; }
  const Rational& mu() const { return mu_; }
  /// Conductor of the character used by twisted terms, if any.
  std::optional<int> twist_conductor() const { return psi_d_; }
  const std::vector<SBTerm>& terms() const { return terms_; }
  bool is_plain() const;

  SBFunction& add(const KCoset& c, const CycRat& coeff);
  SBFunction& add_twisted(const KCoset& c, const KElement& b, int psi_d, const CycRat& coeff);
  SBFunction& add(const SBFunction& o, const CycRat& scale = CycRat(1));

  SBFunction operator-() const;
  friend SBFunction operator+(SBFunction a, const SBFunction& b) { return a.add(b); }
  friend SBFunction operator-(SBFunction a, const SBFunction& b) { return a.add(b, CycRat(-1)); }
  friend SBFunction operator*(const CycRat& s, const SBFunction& f);

  CycRat operator()(const KElement& x) const;
  bool is_zero() const;
  friend bool operator==(const SBFunction& a, const SBFunction& b);
  friend bool operator!=(const SBFunction& a, const SBFunction& b) { return !(a == b); }

  int min_level() const;
  int max_level() const;

  std::string str() const;
  /// Syntax: "1*[1 + u^2*O] - 2*[u^-1 + u*O]", twisted terms "c*[..]*psi(b)".
  static SBFunction parse(int p, const std::string& s, Rational mu = 1, int psi_d = 0);

 private:
  int p_;
  Rational mu_;
  std::optional<int> psi_d_;
  std::vector<SBTerm> terms_;
};

std::ostream& operator<<(std::ostream& os, const SBFunction& f);

SBFunction normalize(const SBFunction& g);
CycRat haar_integral(const SBFunction& g);
SBFunction fourier(const SBFunction& g, const AdditiveCharacter& psi);
SBFunction w_operator(const SBFunction& g, const KElement& pi);
SBFunction nabla_compose(const SBFunction& g, const KElement& pi);
SBFunction star_transform(const SBFunction& g, const AdditiveCharacter& psi, const KElement& pi);
/// x -> g(alpha x)
SBFunction dilate(const SBFunction& g, const KElement& alpha);
/// x -> g(x + tau)
SBFunction translate(const SBFunction& g, const KElement& tau);
/// h^{0,r}: supported on pi^r O with f(pi^r x) = h(x mod pi), pi = u.
SBFunction lift_finite(const std::vector<CycRat>& h, int r, int p, Rational mu = 1);
/// Multiply a plain function by psi(b x) (result carries twists).
SBFunction twist(const SBFunction& g, const KElement& b, int psi_d);

/// Disjoint cosets covering the union of `cosets` on each of which every
/// coset indicator in the list is constant.
std::vector<KCoset> common_refinement(const std::vector<KCoset>& cosets);

}  // namespace sbz
