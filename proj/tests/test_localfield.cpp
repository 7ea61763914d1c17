#include <doctest.h>

#include <random>

#include "sbz/localfield.hpp"

using namespace sbz;

namespace {

KElement random_k(std::mt19937& rng, int p, int lo, int hi) {
  std::uniform_int_distribution<int> dg(0, p - 1);
  KElement x(p);
  for (int k = lo; k <= hi; ++k) x = x + KElement::monomial(p, dg(rng), k);
  return x;
}

}  // namespace

TEST_CASE("k_arith examples") {
  KElement a = KElement::parse(2, "u^-1 + 1");
  CHECK(a * KElement::uniformizer(2) == KElement::parse(2, "1 + u"));
  KElement inv = KElement::parse(2, "1 + u").inverse(3);
  CHECK(inv == KElement::parse(2, "1 + u + u^2"));
  CHECK((inv * KElement::parse(2, "1 + u")).truncated(3) == KElement(2, 1));
  CHECK(KElement::parse(2, "u^3 + u^5").valuation() == 3);
  CHECK(KElement(5).valuation() == kInfValuation);
  CHECK_THROWS(KElement(3).inverse(4));
  CHECK(KElement::parse(3, "2*u^-1 + 1 + u^3").str() == "2*u^-1 + 1 + u^3");
  CHECK(KElement::parse(3, "-u") == KElement::monomial(3, 2, 1));
}

TEST_CASE("inversion to precision on random elements") {
  std::mt19937 rng(3);
  for (int p : {2, 3, 5}) {
    for (int it = 0; it < 30; ++it) {
      KElement x = random_k(rng, p, -2, 3);
      if (x.is_zero()) continue;
      for (int N : {0, 2, 5}) {
        KElement y = x.inverse(N);
        // x * y == 1 modulo u^(N + w(x))
        KElement prod = (x * y).truncated(N + x.valuation());
        CHECK(prod == KElement(p, 1).truncated(N + x.valuation()));
      }
    }
  }
}

TEST_CASE("pi powers for a non-standard uniformizer") {
  int p = 3;
  KElement pi = KElement::parse(p, "u + u^2");
  KElement a = KElement::parse(p, "1 + 2*u");
  KElement x = pi_power_times(pi, 2, a, 6);
  CHECK(x == (pi * pi * a).truncated(6));
  KElement y = pi_power_times(pi, -1, a, 4);
  CHECK((y * pi).truncated(4) == a.truncated(4));
}

TEST_CASE("additive character") {
  AdditiveCharacter psi0{3, 0};
  CHECK(psi0(KElement::monomial(3, 1, -1)) == CycRat::root_of_unity(3));
  CHECK(psi0(KElement(3, 1)) == CycRat(1));
  AdditiveCharacter psi1{3, 1};
  CHECK(psi1(KElement::parse(3, "2 + u")) == CycRat::root_of_unity(3, 2));
  std::mt19937 rng(1);
  for (int p : {2, 3, 5}) {
    for (int d : {-1, 0, 1, 2}) {
      AdditiveCharacter psi{p, d};
      for (int it = 0; it < 20; ++it) {
        KElement x = random_k(rng, p, -3, 3), y = random_k(rng, p, -3, 3);
        CHECK(psi(x + y) == psi(x) * psi(y));
        CHECK(psi(random_k(rng, p, d, d + 3)) == CycRat(1));
      }
      CHECK(psi(KElement::monomial(p, 1, d - 1)) != CycRat(1));
    }
  }
}

TEST_CASE("coset trichotomy") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> lv(-1, 3);
  for (int it = 0; it < 200; ++it) {
    int p = 2 + (it % 2);
    KCoset a(random_k(rng, p, -1, 3), lv(rng));
    KCoset b(random_k(rng, p, -1, 3), lv(rng));
    int count = 0;
    count += a == b;
    count += (a != b) && (a.subset_of(b) || b.subset_of(a));
    bool disjoint = true;
    for (const auto& c : subcosets(KCoset(KElement(p), -1), 4)) {
      if (a.contains(c.rep) && b.contains(c.rep)) disjoint = false;
    }
    count += disjoint;
    CHECK(count == 1);
    CHECK((relate(a, b) == CosetRelation::kDisjoint) == disjoint);
  }
}

TEST_CASE("character enumeration") {
  CHECK(enumerate_characters(1, 3, 3).size() == 2);
  auto c22 = enumerate_characters(2, 2, 2);
  REQUIRE(c22.size() == 2);
  CHECK(c22[0].conductor() == 0);
  CHECK(c22[1].conductor() == 2);
  CHECK(enumerate_characters(2, 3, 3).size() == 6);
  CHECK(enumerate_characters(2, 5, 5).size() == 20);
  CHECK(enumerate_characters(3, 2, 2).size() == 4);
  CHECK(enumerate_characters(1, 2, 2).size() == 1);
  CHECK_THROWS(enumerate_characters(-1, 3, 3));
  CHECK_THROWS(enumerate_characters(1, 4, 2));
}

TEST_CASE("characters are homomorphisms with orthogonality and exact conductors") {
  std::mt19937 rng(9);
  for (int p : {2, 3, 5}) {
    for (int r : {1, 2, 3}) {
      if (p == 5 && r == 3) continue;
      auto chars = enumerate_characters(r, p, p);
      int exact = 0;
      for (const auto& w : chars) {
        exact += w.conductor() == r;
        if (w.conductor() > 0) {
          CycRat s;
          for (const auto& [idx, th] : QuasiCharacter::unit_reps(p, w.conductor())) s += w(th);
          CHECK(s.is_zero());
          // nontrivial on 1 + pi^(c-1) O when c >= 2, nontrivial on units when c = 1
          bool nontrivial = false;
          for (const auto& [idx, th] : QuasiCharacter::unit_reps(p, r)) {
            bool in_u = w.conductor() == 1 || (th.digit(0) == 1 && [&] {
                          for (int k = 1; k < w.conductor() - 1; ++k)
                            if (th.digit(k)) return false;
                          return true;
                        }());
            if (in_u && w(th) != CycRat(1)) nontrivial = true;
          }
          CHECK(nontrivial);
        }
        auto w2 = w.with_pi_value(CycRat::root_of_unity(4));
        for (int it = 0; it < 10; ++it) {
          KElement x = random_k(rng, p, -1, 3), y = random_k(rng, p, 0, 4);
          if (x.is_zero() || y.is_zero()) continue;
          CHECK(w2(x * y) == w2(x) * w2(y));
          CHECK(w2(x) * w2.inverse()(x) == CycRat(1));
        }
      }
      CHECK(exact == (p - 1) * static_cast<int>(std::pow(p, r - 1)) -
                         (r == 1 ? 1 : (p - 1) * static_cast<int>(std::pow(p, r - 2))));
    }
  }
}

TEST_CASE("quasichar_eval examples") {
  auto chars = enumerate_characters(1, 3, 3);
  const auto& quad = chars[1];
  CHECK(quad(KElement::monomial(3, 2, 5)) == CycRat(-1));
  CHECK(chars[0](KElement::parse(3, "2*u^-3 + u")) == CycRat(1));
  CHECK_THROWS(quad(KElement(3)));
}
