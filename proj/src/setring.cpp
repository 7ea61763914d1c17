#include "sbz/setring.hpp"

#include <algorithm>
#include <stdexcept>

namespace sbz {

SetRelation IntervalInstance::relate(const Atom& a, const Atom& b) {
  if (a.hi <= b.lo || b.hi <= a.lo) return SetRelation::kDisjoint;
  if (a.lo == b.lo && a.hi == b.hi) return SetRelation::kEqual;
  if (b.lo <= a.lo && a.hi <= b.hi) return SetRelation::kFirstInSecond;
  if (a.lo <= b.lo && b.hi <= a.hi) return SetRelation::kSecondInFirst;
  return SetRelation::kOverlap;
}

IntervalInstance::Atom IntervalInstance::intersect(const Atom& a, const Atom& b) {
  Atom c{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (c.lo >= c.hi) throw std::invalid_argument("intervals do not meet");
  return c;
}

IntervalInstance::Atom IntervalInstance::unite(const Atom& a, const Atom& b) {
  if (relate(a, b) == SetRelation::kDisjoint) throw std::invalid_argument("intervals do not meet");
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

bool IntervalInstance::covers(const Atom& outer, const std::vector<Atom>& inners) {
  long len = 0;
  for (const auto& a : inners) len += std::min(a.hi, outer.hi) - std::max(a.lo, outer.lo);
  return len >= outer.hi - outer.lo;
}

std::string IntervalInstance::str(const Atom& a) {
  return "[" + std::to_string(a.lo) + "," + std::to_string(a.hi) + ")";
}

SetRelation KCosetInstance::relate(const Atom& a, const Atom& b) {
  switch (sbz::relate(a, b)) {
    case CosetRelation::kEqual: return SetRelation::kEqual;
    case CosetRelation::kFirstInSecond: return SetRelation::kFirstInSecond;
    case CosetRelation::kSecondInFirst: return SetRelation::kSecondInFirst;
    case CosetRelation::kDisjoint: return SetRelation::kDisjoint;
  }
  return SetRelation::kDisjoint;
}

KCoset KCosetInstance::intersect(const Atom& a, const Atom& b) {
  if (a.subset_of(b)) return a;
  if (b.subset_of(a)) return b;
  throw std::invalid_argument("cosets do not meet");
}

KCoset KCosetInstance::unite(const Atom& a, const Atom& b) {
  if (a.subset_of(b)) return b;
  if (b.subset_of(a)) return a;
  throw std::invalid_argument("cosets do not meet");
}

bool KCosetInstance::covers(const Atom& outer, const std::vector<Atom>& inners) {
  if (outer.is_point()) return !inners.empty();
  Rational m = 0;
  for (const auto& a : inners) m += haar_measure(a);
  return m == haar_measure(outer);
}

Rational haar_measure(const KCoset& c, const Rational& mu) {
  if (c.is_point()) return 0;
  return mu * rpow(Rational(c.rep.p()), -c.level);
}

Rational haar_measure(const KSet& s, const Rational& mu) {
  return s.measure<Rational>([&](const KCoset& c) { return haar_measure(c, mu); });
}

}  // namespace sbz
