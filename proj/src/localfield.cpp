#include "sbz/localfield.hpp"

#include <cctype>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sbz {

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

namespace {

int modp(long c, int p) { return static_cast<int>(((c % p) + p) % p); }

int inv_mod(int a, int p) {
  for (int x = 1; x < p; ++x)
    if ((a * x) % p == 1) return x;
  throw std::domain_error("digit not invertible");
}

}  // namespace

KElement::KElement(int p, long c) : p_(p) {
  int v = modp(c, p);
  if (v) d_[0] = v;
}

KElement KElement::monomial(int p, long c, int k) {
  KElement x(p);
  int v = modp(c, p);
  if (v) x.d_[k] = v;
  return x;
}

int KElement::digit(int k) const {
  auto it = d_.find(k);
  return it == d_.end() ? 0 : it->second;
}

KElement KElement::operator-() const {
  KElement r(p_);
  for (const auto& [k, v] : d_) r.d_[k] = p_ - v;
  return r;
}

KElement operator+(const KElement& a, const KElement& b) {
  KElement r = a;
  if (a.d_.empty()) r.p_ = b.p_;
  for (const auto& [k, v] : b.d_) {
    int s = (r.digit(k) + v) % r.p_;
    if (s) r.d_[k] = s;
    else r.d_.erase(k);
  }
  return r;
}

KElement operator*(const KElement& a, const KElement& b) {
  KElement r(a.p_);
  std::map<int, long> acc;
  for (const auto& [i, x] : a.d_)
    for (const auto& [j, y] : b.d_) acc[i + j] += static_cast<long>(x) * y;
  for (const auto& [k, v] : acc) {
    int s = static_cast<int>(v % a.p_);
    if (s) r.d_[k] = s;
  }
  return r;
}

KElement KElement::truncated(int level) const {
  if (level == kInfValuation) return *this;
  KElement r(p_);
  for (const auto& [k, v] : d_) {
    if (k >= level) break;
    r.d_[k] = v;
  }
  return r;
}

KElement KElement::shifted(int k) const {
  KElement r(p_);
  for (const auto& [e, v] : d_) r.d_[e + k] = v;
  return r;
}

KElement KElement::inverse(int N) const {
  if (d_.empty()) throw std::domain_error("division by zero");
  int v = valuation();
  int len = N + v;
  KElement r(p_);
  if (len <= 0) return r;
  std::vector<int> a(len, 0);
  for (const auto& [k, x] : d_) {
    if (k - v < len) a[k - v] = x;
  }
  int a0inv = inv_mod(a[0], p_);
  std::vector<int> b(len, 0);
  b[0] = a0inv;
  for (int k = 1; k < len; ++k) {
    long s = 0;
    for (int j = 1; j <= k; ++j) s += static_cast<long>(a[j]) * b[k - j];
    b[k] = modp(-s * a0inv, p_);
  }
  for (int k = 0; k < len; ++k)
    if (b[k]) r.d_[k - v] = b[k];
  return r;
}

std::string KElement::str() const {
  if (d_.empty()) return "0";
  std::string out;
  for (const auto& [k, v] : d_) {
    std::string t;
    if (k == 0) {
      t = std::to_string(v);
    } else {
      std::string u = k == 1 ? "u" : "u^" + std::to_string(k);
      t = v == 1 ? u : std::to_string(v) + "*" + u;
    }
    out += out.empty() ? t : " + " + t;
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const KElement& x) { return os << x.str(); }

namespace {

class KParser {
 public:
  KParser(int p, const std::string& s) : p_(p), s_(s) {}

  KElement parse_all() {
    KElement v = expr();
    skip();
    if (i_ != s_.size()) fail("trailing characters");
    return v;
  }

  KElement expr() {
    KElement v(p_);
    bool first = true;
    while (true) {
      skip();
      int sign = 1;
      if (eat('-')) sign = -1;
      else if (!eat('+') && !first) break;
      first = false;
      KElement t = term();
      v = v + (sign < 0 ? -t : t);
      skip();
      if (i_ >= s_.size() || (s_[i_] != '+' && s_[i_] != '-')) break;
    }
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("KElement parse error (" + what + ") in \"" + s_ + "\"");
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  long integer() {
    skip();
    size_t st = i_;
    if (i_ < s_.size() && s_[i_] == '-') ++i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (i_ == st || (i_ == st + 1 && s_[st] == '-')) fail("integer expected");
    return std::stol(s_.substr(st, i_ - st));
  }
  KElement factor() {
    skip();
    if (eat('(')) {
      KElement v = expr();
      if (!eat(')')) fail("')' expected");
      return v;
    }
    if (eat('u')) {
      long k = 1;
      if (eat('^')) k = integer();
      return KElement::monomial(p_, 1, static_cast<int>(k));
    }
    return KElement(p_, integer());
  }
  KElement term() {
    KElement v = factor();
    while (true) {
      skip();
      if (i_ < s_.size() && s_[i_] == '*') {
        // Stop before a coset marker "*O" so SBFunction syntax can reuse us.
        size_t save = i_;
        ++i_;
        skip();
        if (i_ < s_.size() && s_[i_] == 'O') {
          i_ = save;
          break;
        }
        v = v * factor();
      } else {
        break;
      }
    }
    return v;
  }

  int p_;
  std::string s_;
  size_t i_ = 0;
};

}  // namespace

KElement KElement::parse(int p, const std::string& s) { return KParser(p, s).parse_all(); }

KElement pi_power_times(const KElement& pi, int k, const KElement& a, int level) {
  if (pi.valuation() != 1) throw std::invalid_argument("not a uniformizer");
  KElement zero(a.p());
  if (a.is_zero()) return zero;
  int v = a.valuation() + k;
  if (level != kInfValuation && v >= level) return zero;
  if (level == kInfValuation && k < 0 && pi.digits().size() > 1)
    throw std::invalid_argument("pi_power_times: infinite precision requested");
  int R = level == kInfValuation ? INT_MAX / 4 : level - v;
  KElement eps = pi.unit_part();
  KElement base = k >= 0 ? eps : eps.inverse(R);
  KElement pw(a.p(), 1);
  for (int i = 0; i < std::abs(k); ++i) pw = (pw * base).truncated(R);
  return (pw * a.unit_part()).truncated(R).shifted(v);
}

KCoset::KCoset(const KElement& r, int n) : rep(r.truncated(n)), level(n) {}

bool KCoset::contains(const KElement& x) const {
  if (is_point()) return x == rep;
  return x.truncated(level) == rep;
}

bool KCoset::subset_of(const KCoset& o) const {
  if (o.is_point()) return is_point() && rep == o.rep;
  return level >= o.level && o.contains(rep);
}

std::string KCoset::str() const {
  if (is_point()) return "{" + rep.str() + "}";
  std::string lv = level == 0 ? "O" : (level == 1 ? "u*O" : "u^" + std::to_string(level) + "*O");
  if (rep.is_zero()) return "[" + lv + "]";
  return "[" + rep.str() + " + " + lv + "]";
}

CosetRelation relate(const KCoset& a, const KCoset& b) {
  if (a == b) return CosetRelation::kEqual;
  if (a.subset_of(b)) return CosetRelation::kFirstInSecond;
  if (b.subset_of(a)) return CosetRelation::kSecondInFirst;
  return CosetRelation::kDisjoint;
}

std::vector<KCoset> subcosets(const KCoset& c, int L) {
  if (c.is_point() || L < c.level) throw std::invalid_argument("subcosets: bad level");
  int p = c.rep.p();
  int n = L - c.level;
  long count = 1;
  for (int i = 0; i < n; ++i) {
    count *= p;
    if (count > 100000) throw std::length_error("term cap exceeded");
  }
  std::vector<KCoset> out;
  out.reserve(count);
  for (long idx = 0; idx < count; ++idx) {
    KElement r = c.rep;
    long t = idx;
    for (int i = n - 1; i >= 0; --i) {
      int dgt = static_cast<int>(t % p);
      t /= p;
      if (dgt) r = r + KElement::monomial(p, dgt, c.level + i);
    }
    out.emplace_back(r, L);
  }
  return out;
}

CycRat AdditiveCharacter::operator()(const KElement& x) const {
  int e = phase(x);
  return e == 0 ? CycRat(1) : CycRat::root_of_unity(p, e);
}

// ---------------------------------------------------------------- characters

int QuasiCharacter::unit_index(const KElement& unit, int r) {
  int idx = 0;
  int pw = 1;
  for (int k = 0; k < r; ++k) {
    idx += unit.digit(k) * pw;
    pw *= unit.p();
  }
  return idx;
}

std::vector<std::pair<int, KElement>> QuasiCharacter::unit_reps(int p, int r) {
  std::vector<std::pair<int, KElement>> out;
  if (r == 0) {
    out.emplace_back(0, KElement(p, 1));
    return out;
  }
  int n = 1;
  for (int k = 0; k < r; ++k) n *= p;
  for (int idx = 0; idx < n; ++idx) {
    if (idx % p == 0) continue;
    KElement x(p);
    int t = idx;
    for (int k = 0; k < r; ++k) {
      int dg = t % p;
      t /= p;
      if (dg) x = x + KElement::monomial(p, dg, k);
    }
    out.emplace_back(idx, x);
  }
  return out;
}

QuasiCharacter::QuasiCharacter(int p, int r, std::vector<CycRat> table, CycRat pi_value, std::string label)
    : p_(p), r_(r), table_(std::move(table)), pi_value_(std::move(pi_value)), label_(std::move(label)) {
  if (r < 0) throw std::invalid_argument("conductor must be nonnegative");
  if (pi_value_.is_zero()) throw std::invalid_argument("omega(pi) must be nonzero");
  auto reps = unit_reps(p, r);
  int n = 1;
  for (int k = 0; k < r; ++k) n *= p;
  if (static_cast<int>(table_.size()) != n) throw std::invalid_argument("unit table has wrong size");
  if (table_[reps.front().first] != CycRat(1)) throw std::invalid_argument("unit table: omega(1) != 1");
  // Homomorphism check against a generating set: digits c and 1 + c u^k.
  std::vector<KElement> gens;
  for (int c = 2; c < p; ++c) gens.emplace_back(p, c);
  for (int k = 1; k < r; ++k)
    for (int c = 1; c < p; ++c) gens.push_back(KElement(p, 1) + KElement::monomial(p, c, k));
  for (const auto& [idx, x] : reps) {
    for (const auto& g : gens) {
      int j = unit_index(g, r);
      int xj = unit_index((x * g).truncated(r), r);
      if (table_[xj] != table_[idx] * table_[j])
        throw std::invalid_argument("unit table is not a homomorphism");
    }
  }
  conductor_ = r;
  for (int c = 0; c < r; ++c) {
    bool trivial = true;
    for (const auto& [idx, x] : reps) {
      bool in_u = (c == 0) || (x.digit(0) == 1 && [&] {
                    for (int k = 1; k < c; ++k)
                      if (x.digit(k)) return false;
                    return true;
                  }());
      if (in_u && table_[idx] != CycRat(1)) {
        trivial = false;
        break;
      }
    }
    if (trivial) {
      conductor_ = c;
      break;
    }
  }
}

QuasiCharacter QuasiCharacter::trivial(int p, CycRat pi_value) {
  return QuasiCharacter(p, 0, {CycRat(1)}, std::move(pi_value), "trivial");
}

QuasiCharacter QuasiCharacter::with_pi_value(const CycRat& v) const {
  QuasiCharacter r = *this;
  if (v.is_zero()) throw std::invalid_argument("omega(pi) must be nonzero");
  r.pi_value_ = v;
  return r;
}

QuasiCharacter QuasiCharacter::with_label(std::string label) const {
  QuasiCharacter r = *this;
  r.label_ = std::move(label);
  return r;
}

QuasiCharacter QuasiCharacter::inverse() const {
  QuasiCharacter r = *this;
  for (auto& [idx, x] : unit_reps(p_, r_)) r.table_[idx] = table_[idx].inverse();
  r.pi_value_ = pi_value_.inverse();
  r.label_ = label_.empty() ? "" : label_ + "^-1";
  return r;
}

CycRat QuasiCharacter::operator()(const KElement& x) const {
  if (x.is_zero()) throw std::domain_error("quasi-character evaluated at 0");
  int idx = unit_index(x.unit_part(), r_);
  return table_[idx] * pi_value_.pow(x.valuation());
}

std::vector<QuasiCharacter> enumerate_characters(int r, int q, int p) {
  if (r < 0) throw std::invalid_argument("conductor must be nonnegative");
  if (q != p || !is_prime(p)) throw std::invalid_argument("q must be prime");
  if (r == 0) return {QuasiCharacter::trivial(p)};
  int N = 1;
  for (int k = 0; k < r; ++k) {
    N *= p;
    if (N > 10000) throw std::length_error("q^r too large for exhaustive enumeration");
  }
  auto decode = [&](int idx) {
    std::vector<int> d(r);
    for (int k = 0; k < r; ++k) {
      d[k] = idx % p;
      idx /= p;
    }
    return d;
  };
  auto mul = [&](int a, int b) {
    auto x = decode(a), y = decode(b);
    std::vector<long> z(r, 0);
    for (int i = 0; i < r; ++i)
      for (int j = 0; i + j < r; ++j) z[i + j] += static_cast<long>(x[i]) * y[j];
    int idx = 0, pw = 1;
    for (int k = 0; k < r; ++k) {
      idx += static_cast<int>(z[k] % p) * pw;
      pw *= p;
    }
    return idx;
  };
  const int one = 1;
  std::vector<char> in_h(N, 0);
  std::vector<std::vector<int>> coord(N);
  in_h[one] = 1;
  std::vector<int> hlist{one};
  std::vector<int> gens, rel_n;
  std::vector<std::vector<int>> rel_c;
  for (int x = 0; x < N; ++x) {
    if (x % p == 0 || in_h[x]) continue;
    int n = 1, pw = x;
    while (!in_h[pw]) {
      pw = mul(pw, x);
      ++n;
    }
    rel_c.push_back(coord[pw]);
    rel_n.push_back(n);
    gens.push_back(x);
    std::vector<int> added;
    int gj = one;
    for (int j = 1; j < n; ++j) {
      gj = mul(gj, x);
      for (int h : hlist) {
        int e = mul(h, gj);
        in_h[e] = 1;
        coord[e] = coord[h];
        coord[e].push_back(j);
        added.push_back(e);
      }
    }
    for (int h : hlist) coord[h].push_back(0);
    hlist.insert(hlist.end(), added.begin(), added.end());
  }
  for (auto& c : rel_c) c.resize(gens.size(), 0);
  // Group exponent = lcm of generator orders.
  long e = 1;
  for (int g : gens) {
    long ord = 1;
    int pw = g;
    while (pw != one) {
      pw = mul(pw, g);
      ++ord;
    }
    e = std::lcm(e, ord);
  }
  std::vector<CycRat> roots;
  for (long k = 0; k < e; ++k) roots.push_back(CycRat::root_of_unity(static_cast<int>(e), k));
  std::vector<QuasiCharacter> out;
  std::vector<long> kv(gens.size(), 0);
  std::function<void(size_t)> dfs = [&](size_t i) {
    if (i == gens.size()) {
      std::vector<CycRat> table(N, CycRat(0));
      for (int x = 0; x < N; ++x) {
        if (x % p == 0) continue;
        long s = 0;
        for (size_t l = 0; l < gens.size(); ++l) s += coord[x][l] * kv[l];
        table[x] = roots[((s % e) + e) % e];
      }
      QuasiCharacter chi(p, r, std::move(table), CycRat(1));
      out.push_back(chi.with_label("c" + std::to_string(chi.conductor()) + "#" + std::to_string(out.size())));
      return;
    }
    long rhs = 0;
    for (size_t l = 0; l < i; ++l) rhs += rel_c[i][l] * kv[l];
    for (long k = 0; k < e; ++k) {
      if (((rel_n[i] * k - rhs) % e + e) % e == 0) {
        kv[i] = k;
        dfs(i + 1);
      }
    }
    kv[i] = 0;
  };
  dfs(0);
  return out;
}

}  // namespace sbz
