#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sbz/localfield.hpp"

namespace sbz {

enum class SetRelation { kDisjoint, kEqual, kFirstInSecond, kSecondInFirst, kOverlap };

/// A d-class is described by a traits type I providing
///   using Atom = ...;
///   static SetRelation relate(const Atom&, const Atom&);
///   static Atom intersect(const Atom&, const Atom&);  // atoms that meet
///   static Atom unite(const Atom&, const Atom&);      // atoms that meet
///   static std::string str(const Atom&);
/// and optionally
///   static bool covers(const Atom& outer, const std::vector<Atom>& inners);  // disjoint inners
template <class I>
struct DdComponent {
  typename I::Atom outer;
  std::vector<typename I::Atom> inner;  // disjoint, each strictly inside outer
};

namespace setring_detail {

inline bool meets(SetRelation r) { return r != SetRelation::kDisjoint; }

}  // namespace setring_detail

/// Merge meeting atoms until the list is pairwise disjoint; the union is unchanged.
template <class I>
std::vector<typename I::Atom> refine_disjoint(std::vector<typename I::Atom> atoms) {
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t i = 0; i < atoms.size() && !merged; ++i) {
      for (size_t j = i + 1; j < atoms.size() && !merged; ++j) {
        if (!setring_detail::meets(I::relate(atoms[i], atoms[j]))) continue;
        atoms[i] = I::unite(atoms[i], atoms[j]);
        atoms.erase(atoms.begin() + static_cast<long>(j));
        merged = true;
      }
    }
  }
  return atoms;
}

/// Finite disjoint union of dd sets A \ (A_1 u ... u A_k).
template <class I>
class DddSet {
 public:
  using Atom = typename I::Atom;
  using Component = DdComponent<I>;

  DddSet() = default;
  static DddSet atom(const Atom& a) {
    DddSet s;
    s.comps_.push_back({a, {}});
    return s;
  }
  /// Build outer \ (inners), refining the inner atoms (clipped to outer).
  static DddSet dd(const Atom& outer, const std::vector<Atom>& inners) {
    DddSet s;
    s.push(outer, inners);
    return s;
  }

  const std::vector<Component>& components() const { return comps_; }
  bool is_empty() const { return comps_.empty(); }

  DddSet operator&(const DddSet& o) const {
    DddSet out;
    for (const auto& x : comps_)
      for (const auto& y : o.comps_) out.intersect_dd(x, y);
    return out;
  }

  DddSet operator-(const DddSet& o) const {
    std::vector<Component> cur = comps_;
    for (const auto& y : o.comps_) {
      DddSet next;
      for (const auto& x : cur) next.subtract_dd(x, y);
      cur = std::move(next.comps_);
    }
    DddSet out;
    out.comps_ = std::move(cur);
    return out;
  }

  /// (X n Y) u (X \ Y) u (Y \ X), each piece disjoint from the others.
  DddSet operator|(const DddSet& o) const {
    DddSet out = *this & o;
    DddSet a = *this - o, b = o - *this;
    out.comps_.insert(out.comps_.end(), a.comps_.begin(), a.comps_.end());
    out.comps_.insert(out.comps_.end(), b.comps_.begin(), b.comps_.end());
    return out;
  }

  /// Same set with every atom replaced by fn(atom); fn must be injective on sets.
  template <class Fn>
  DddSet map_atoms(const Fn& fn) const {
    DddSet out;
    for (const auto& c : comps_) {
      Component d{fn(c.outer), {}};
      for (const auto& a : c.inner) d.inner.push_back(fn(a));
      out.comps_.push_back(std::move(d));
    }
    return out;
  }

  template <class Point>
  bool contains(const Point& x) const {
    for (const auto& c : comps_) {
      if (!I::contains(c.outer, x)) continue;
      bool inside_inner = false;
      for (const auto& a : c.inner) inside_inner = inside_inner || I::contains(a, x);
      if (!inside_inner) return true;
    }
    return false;
  }

  template <class V>
  V measure(const std::function<V(const Atom&)>& m) const {
    V total{};
    for (const auto& c : comps_) {
      total += m(c.outer);
      for (const auto& a : c.inner) total -= m(a);
    }
    return total;
  }

  std::string str() const {
    if (comps_.empty()) return "{}";
    std::string out;
    for (const auto& c : comps_) {
      if (!out.empty()) out += " u ";
      out += I::str(c.outer);
      if (!c.inner.empty()) {
        out += " \\ (";
        for (size_t i = 0; i < c.inner.size(); ++i) out += (i ? " u " : "") + I::str(c.inner[i]);
        out += ")";
      }
    }
    return out;
  }

  /// Check the normal-form invariants through the instance predicates.
  bool well_formed() const {
    for (size_t i = 0; i < comps_.size(); ++i) {
      const auto& c = comps_[i];
      for (size_t k = 0; k < c.inner.size(); ++k) {
        if (I::relate(c.inner[k], c.outer) != SetRelation::kFirstInSecond) return false;
        for (size_t l = k + 1; l < c.inner.size(); ++l)
          if (I::relate(c.inner[k], c.inner[l]) != SetRelation::kDisjoint) return false;
      }
      for (size_t j = i + 1; j < comps_.size(); ++j)
        if (!components_disjoint(c, comps_[j])) return false;
    }
    return true;
  }

 private:
  static bool components_disjoint(const Component& a, const Component& b) {
    auto rel = I::relate(a.outer, b.outer);
    if (rel == SetRelation::kDisjoint) return true;
    DddSet x, y;
    x.comps_.push_back(a);
    y.comps_.push_back(b);
    return (x & y).is_empty();
  }

  // Append outer \ (inners clipped to outer); empty when an inner covers outer.
  void push(const Atom& outer, const std::vector<Atom>& inners) {
    std::vector<Atom> clipped;
    for (const auto& a : inners) {
      auto rel = I::relate(a, outer);
      if (rel == SetRelation::kDisjoint) continue;
      if (rel == SetRelation::kEqual || rel == SetRelation::kSecondInFirst) return;
      clipped.push_back(rel == SetRelation::kFirstInSecond ? a : I::intersect(a, outer));
    }
    clipped = refine_disjoint<I>(std::move(clipped));
    for (const auto& a : clipped)
      if (I::relate(a, outer) == SetRelation::kEqual) return;
    if constexpr (requires { I::covers(outer, clipped); }) {
      if (!clipped.empty() && I::covers(outer, clipped)) return;
    }
    comps_.push_back({outer, std::move(clipped)});
  }

  void intersect_dd(const Component& x, const Component& y) {
    auto rel = I::relate(x.outer, y.outer);
    if (rel == SetRelation::kDisjoint) return;
    Atom c = I::intersect(x.outer, y.outer);
    std::vector<Atom> inners = x.inner;
    inners.insert(inners.end(), y.inner.begin(), y.inner.end());
    push(c, inners);
  }

  // (A \ A0) \ (B \ uBj) = (A \ (B u A0)) u  u_j ((Bj n A) \ A0)
  void subtract_dd(const Component& x, const Component& y) {
    auto rel = I::relate(x.outer, y.outer);
    if (rel == SetRelation::kDisjoint) {
      comps_.push_back(x);
      return;
    }
    std::vector<Atom> inners = x.inner;
    inners.push_back(I::intersect(x.outer, y.outer));
    push(x.outer, inners);
    for (const auto& bj : y.inner) {
      if (!setring_detail::meets(I::relate(bj, x.outer))) continue;
      push(I::intersect(bj, x.outer), x.inner);
    }
  }

  std::vector<Component> comps_;
};

/// Half-open integer intervals [lo, hi) with lo < hi.
struct IntervalInstance {
  struct Atom {
    long lo = 0;
    long hi = 1;
  };
  static SetRelation relate(const Atom& a, const Atom& b);
  static Atom intersect(const Atom& a, const Atom& b);
  static Atom unite(const Atom& a, const Atom& b);
  static bool contains(const Atom& a, long x) { return a.lo <= x && x < a.hi; }
  static bool covers(const Atom& outer, const std::vector<Atom>& inners);
  static std::string str(const Atom& a);
};

/// Cosets a + u^n O of K, including single points.
struct KCosetInstance {
  using Atom = KCoset;
  static SetRelation relate(const Atom& a, const Atom& b);
  static Atom intersect(const Atom& a, const Atom& b);
  static Atom unite(const Atom& a, const Atom& b);
  static bool contains(const Atom& a, const KElement& x) { return a.contains(x); }
  static bool covers(const Atom& outer, const std::vector<Atom>& inners);
  static std::string str(const Atom& a) { return a.str(); }
};

using IntervalSet = DddSet<IntervalInstance>;
using KSet = DddSet<KCosetInstance>;

/// Haar measure of a K-coset (0 for points); mu is the measure of O.
Rational haar_measure(const KCoset& c, const Rational& mu = 1);
/// Haar measure of a K-ddd set.
Rational haar_measure(const KSet& s, const Rational& mu = 1);

}  // namespace sbz
