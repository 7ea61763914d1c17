#include "sbz/exactnum.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sbz {

Rational rpow(const Rational& base, long e) {
  Rational r = 1;
  Rational b = base;
  bool neg = e < 0;
  unsigned long n = neg ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  while (n) {
    if (n & 1) r *= b;
    b *= b;
    n >>= 1;
  }
  if (neg) {
    if (r == 0) throw std::domain_error("division by zero");
    r = 1 / r;
  }
  return r;
}

int euler_phi(int m) {
  int r = m;
  int n = m;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      r -= r / p;
    }
  }
  if (n > 1) r -= r / n;
  return r;
}

const std::vector<long>& cyclotomic_poly(int m) {
  static std::mutex mu;
  static std::map<int, std::vector<long>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
  }
  if (m < 1) throw std::invalid_argument("cyclotomic order must be positive");
  // x^m - 1 divided by Phi_d for every proper divisor d.
  std::vector<long> num(m + 1, 0);
  num[0] = -1;
  num[m] = 1;
  for (int d = 1; d < m; ++d) {
    if (m % d) continue;
    const std::vector<long>& den = cyclotomic_poly(d);
    int dn = static_cast<int>(den.size()) - 1;
    int nn = static_cast<int>(num.size()) - 1;
    std::vector<long> quo(nn - dn + 1, 0);
    for (int k = nn; k >= dn; --k) {
      long c = num[k];  // den is monic
      quo[k - dn] = c;
      for (int i = 0; i <= dn; ++i) num[k - dn + i] -= c * den[i];
    }
    num = quo;
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(m, num).first->second;
}

namespace {

int lcm_int(int a, int b) { return a / std::gcd(a, b) * b; }

// Reduce a polynomial in zeta_m (any degree) to power-basis coordinates.
std::vector<Rational> reduce_mod(std::vector<Rational> poly, int m) {
  const std::vector<long>& phi = cyclotomic_poly(m);
  int n = static_cast<int>(phi.size()) - 1;
  for (int k = static_cast<int>(poly.size()) - 1; k >= n; --k) {
    if (poly[k] == 0) continue;
    Rational c = poly[k];
    for (int i = 0; i <= n; ++i) {
      if (phi[i]) poly[k - n + i] -= c * phi[i];
    }
  }
  poly.resize(n);
  return poly;
}

// Solve A x = b over Q; A given column-major as cols. Returns nullopt if
// inconsistent.
std::optional<std::vector<Rational>> solve_linear(std::vector<std::vector<Rational>> cols,
                                                  std::vector<Rational> rhs) {
  const int rows = static_cast<int>(rhs.size());
  const int ncols = static_cast<int>(cols.size());
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(ncols + 1));
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < ncols; ++j) a[i][j] = cols[j][i];
    a[i][ncols] = rhs[i];
  }
  std::vector<int> pivcol;
  int r = 0;
  for (int c = 0; c < ncols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i) {
      if (a[i][c] != 0) {
        piv = i;
        break;
      }
    }
    if (piv < 0) continue;
    std::swap(a[piv], a[r]);
    Rational inv = 1 / a[r][c];
    for (int j = c; j <= ncols; ++j) a[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (int j = c; j <= ncols; ++j) a[i][j] -= f * a[r][j];
    }
    pivcol.push_back(c);
    ++r;
  }
  for (int i = r; i < rows; ++i) {
    if (a[i][ncols] != 0) return std::nullopt;
  }
  std::vector<Rational> x(ncols, 0);
  for (int i = 0; i < r; ++i) x[pivcol[i]] = a[i][ncols];
  return x;
}

}  // namespace

CycRat::CycRat() : m_(1), c_{Rational(0)} {}
CycRat::CycRat(long v) : m_(1), c_{Rational(v)} {}
CycRat::CycRat(const Rational& v) : m_(1), c_{v} { c_[0].canonicalize(); }
CycRat::CycRat(int m, std::vector<Rational> c) : m_(m), c_(std::move(c)) {}

CycRat CycRat::root_of_unity(int m, long k) {
  if (m < 1) throw std::invalid_argument("root of unity order must be positive");
  long kk = ((k % m) + m) % m;
  std::vector<Rational> poly(kk + 1, 0);
  poly[kk] = 1;
  return CycRat(m, reduce_mod(std::move(poly), m));
}

CycRat CycRat::sqrt_prime(long p) {
  static std::mutex mu;
  static std::map<long, CycRat> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
  }
  CycRat s;
  if (p == 2) {
    s = root_of_unity(8, 1) + root_of_unity(8, 7);
  } else {
    // Quadratic Gauss sum g with g^2 = (-1/p) p.
    CycRat g;
    for (long a = 1; a < p; ++a) {
      long e = 1;
      long base = a % p;
      long n = (p - 1) / 2;
      while (n) {
        if (n & 1) e = e * base % p;
        base = base * base % p;
        n >>= 1;
      }
      g += CycRat(e == 1 ? 1L : -1L) * root_of_unity(static_cast<int>(p), a);
    }
    s = (p % 4 == 1) ? g : root_of_unity(4, 3) * g;
  }
  if (s.to_complex().real() < 0) s = -s;
  if (s * s != CycRat(p)) throw std::logic_error("sqrt_prime: internal error");
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(p, s);
  return s;
}

CycRat CycRat::embed(int m2) const {
  if (m2 == m_) return *this;
  if (m2 % m_) throw std::invalid_argument("embed: order does not divide target");
  if (m_ == 1) {
    std::vector<Rational> c(euler_phi(m2), 0);
    c[0] = c_[0];
    return CycRat(m2, std::move(c));
  }
  int step = m2 / m_;
  std::vector<Rational> poly(step * (c_.size() - 1) + 1, 0);
  for (size_t j = 0; j < c_.size(); ++j) poly[j * step] = c_[j];
  return CycRat(m2, reduce_mod(std::move(poly), m2));
}

bool CycRat::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Rational& x) { return x == 0; });
}

bool CycRat::is_rational() const {
  return std::all_of(c_.begin() + 1, c_.end(), [](const Rational& x) { return x == 0; });
}

Rational CycRat::to_rational() const {
  if (!is_rational()) throw std::domain_error("CycRat is not rational");
  return c_[0];
}

CycRat CycRat::minimal() const {
  if (is_rational()) return CycRat(c_[0]);
  for (int d = 2; d < m_; ++d) {
    if (m_ % d) continue;
    int n = euler_phi(d);
    std::vector<std::vector<Rational>> cols;
    cols.reserve(n);
    for (int j = 0; j < n; ++j) cols.push_back(root_of_unity(d, j).embed(m_).c_);
    auto sol = solve_linear(cols, c_);
    if (sol) return CycRat(d, *sol);
  }
  return *this;
}

CycRat CycRat::operator-() const {
  CycRat r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

CycRat& CycRat::operator+=(const CycRat& o) {
  if (o.m_ == 1) {
    c_[0] += o.c_[0];
    return *this;
  }
  int m = lcm_int(m_, o.m_);
  if (m != m_) *this = embed(m);
  if (o.m_ == m) {
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  } else {
    CycRat e = o.embed(m);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += e.c_[i];
  }
  return *this;
}

CycRat& CycRat::operator-=(const CycRat& o) { return *this += -o; }

CycRat& CycRat::operator*=(const CycRat& o) {
  if (o.m_ == 1) {
    for (auto& x : c_) x *= o.c_[0];
    return *this;
  }
  if (m_ == 1) {
    Rational s = c_[0];
    *this = o;
    for (auto& x : c_) x *= s;
    return *this;
  }
  int m = lcm_int(m_, o.m_);
  CycRat a = embed(m);
  CycRat b = o.embed(m);
  std::vector<Rational> poly(a.c_.size() + b.c_.size() - 1, 0);
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i] == 0) continue;
    for (size_t j = 0; j < b.c_.size(); ++j) {
      if (b.c_[j] != 0) poly[i + j] += a.c_[i] * b.c_[j];
    }
  }
  *this = CycRat(m, reduce_mod(std::move(poly), m));
  return *this;
}

CycRat& CycRat::operator/=(const CycRat& o) { return *this *= o.inverse(); }

bool operator==(const CycRat& a, const CycRat& b) {
  if (a.m_ == b.m_) return a.c_ == b.c_;
  int m = lcm_int(a.m_, b.m_);
  return a.embed(m).c_ == b.embed(m).c_;
}

CycRat CycRat::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero");
  if (m_ == 1) return CycRat(Rational(1 / c_[0]));
  int n = static_cast<int>(c_.size());
  std::vector<std::vector<Rational>> cols;
  cols.reserve(n);
  for (int j = 0; j < n; ++j) cols.push_back((*this * root_of_unity(m_, j)).c_);
  std::vector<Rational> e(n, 0);
  e[0] = 1;
  auto sol = solve_linear(cols, e);
  if (!sol) throw std::logic_error("CycRat inverse: singular");
  return CycRat(m_, *sol);
}

CycRat CycRat::conj() const {
  if (m_ == 1) return *this;
  std::vector<Rational> poly(m_, 0);
  for (size_t j = 0; j < c_.size(); ++j) poly[(m_ - static_cast<int>(j)) % m_] += c_[j];
  return CycRat(m_, reduce_mod(std::move(poly), m_));
}

CycRat CycRat::pow(long e) const {
  CycRat r(1);
  CycRat b = e < 0 ? inverse() : *this;
  unsigned long n = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  while (n) {
    if (n & 1) r *= b;
    n >>= 1;
    if (n) b *= b;
  }
  return r;
}

std::complex<double> CycRat::to_complex() const {
  std::complex<double> r = 0;
  for (size_t j = 0; j < c_.size(); ++j) {
    if (c_[j] == 0) continue;
    double ang = 2.0 * M_PI * static_cast<double>(j) / m_;
    r += c_[j].get_d() * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return r;
}

std::string CycRat::str() const {
  CycRat x = minimal();
  if (x.m_ == 1) return x.c_[0].get_str();
  std::string out;
  for (size_t j = 0; j < x.c_.size(); ++j) {
    const Rational& c = x.c_[j];
    if (c == 0) continue;
    std::string mono;
    Rational ac = abs(c);
    if (j == 0) {
      mono = ac.get_str();
    } else {
      std::string z = "z" + std::to_string(x.m_);
      if (j > 1) z += "^" + std::to_string(j);
      mono = (ac == 1) ? z : ac.get_str() + "*" + z;
    }
    if (out.empty()) {
      out = (c < 0 ? "-" : "") + mono;
    } else {
      out += (c < 0 ? " - " : " + ") + mono;
    }
  }
  return out;
}

bool CycRat::is_compound() const {
  CycRat x = minimal();
  int nz = 0;
  for (const auto& c : x.c_) nz += (c != 0);
  return nz > 1;
}

std::ostream& operator<<(std::ostream& os, const CycRat& x) { return os << x.str(); }

namespace {

class CycParser {
 public:
  explicit CycParser(const std::string& s) : s_(s) {}
  CycRat parse_all() {
    CycRat v = expr();
    skip();
    if (i_ != s_.size()) fail("trailing characters");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("CycRat parse error (" + what + ") in \"" + s_ + "\"");
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
    if (i_ < s_.size() && (s_[i_] == '-' || s_[i_] == '+')) ++i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (st == i_ || (i_ - st == 1 && !std::isdigit(static_cast<unsigned char>(s_[st])))) fail("integer expected");
    return std::stol(s_.substr(st, i_ - st));
  }
  CycRat expr() {
    CycRat v;
    bool neg = false;
    skip();
    if (eat('-')) neg = true;
    else eat('+');
    v = term();
    if (neg) v = -v;
    while (true) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else break;
    }
    return v;
  }
  CycRat term() {
    CycRat v = factor();
    while (eat('*')) v *= factor();
    return v;
  }
  CycRat factor() {
    skip();
    if (eat('(')) {
      CycRat v = expr();
      if (!eat(')')) fail("')' expected");
      return v;
    }
    if (i_ < s_.size() && s_[i_] == 'z') {
      ++i_;
      long m = integer();
      long k = 1;
      if (eat('^')) k = integer();
      return CycRat::root_of_unity(static_cast<int>(m), k);
    }
    if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      size_t st = i_;
      while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '/')) ++i_;
      Rational r(s_.substr(st, i_ - st));
      r.canonicalize();
      return CycRat(r);
    }
    fail("factor expected");
  }
  std::string s_;
  size_t i_ = 0;
};

}  // namespace

CycRat CycRat::parse(const std::string& s) { return CycParser(s).parse_all(); }

// ---------------------------------------------------------------- CPoly

CPoly::CPoly(std::vector<CycRat> c) : c_(std::move(c)) { trim(); }

CPoly CPoly::constant(const CycRat& c) { return CPoly(std::vector<CycRat>{c}); }

CPoly CPoly::monomial(const CycRat& c, int k) {
  std::vector<CycRat> v(k + 1);
  v[k] = c;
  return CPoly(std::move(v));
}

void CPoly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

CycRat CPoly::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return CycRat();
  return c_[k];
}

CPoly CPoly::operator-() const {
  CPoly r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

CPoly operator+(const CPoly& a, const CPoly& b) {
  std::vector<CycRat> v(std::max(a.c_.size(), b.c_.size()));
  for (size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
  return CPoly(std::move(v));
}

CPoly operator-(const CPoly& a, const CPoly& b) { return a + (-b); }

CPoly operator*(const CPoly& a, const CPoly& b) {
  if (a.is_zero() || b.is_zero()) return CPoly();
  std::vector<CycRat> v(a.c_.size() + b.c_.size() - 1);
  for (size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i].is_zero()) continue;
    for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  }
  return CPoly(std::move(v));
}

CPoly CPoly::scaled(const CycRat& s) const {
  CPoly r = *this;
  for (auto& x : r.c_) x *= s;
  r.trim();
  return r;
}

std::pair<CPoly, CPoly> CPoly::divmod(const CPoly& a, const CPoly& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  CPoly r = a;
  if (a.degree() < b.degree()) return {CPoly(), r};
  std::vector<CycRat> q(a.degree() - b.degree() + 1);
  CycRat inv = b.lead().inverse();
  for (int k = r.degree(); k >= b.degree() && !r.is_zero(); k = r.degree()) {
    CycRat c = r.lead() * inv;
    int sh = k - b.degree();
    q[sh] = c;
    for (int i = 0; i <= b.degree(); ++i) r.c_[sh + i] -= c * b.c_[i];
    r.c_.pop_back();
    r.trim();
  }
  return {CPoly(std::move(q)), r};
}

CPoly CPoly::gcd(CPoly a, CPoly b) {
  while (!b.is_zero()) {
    CPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return a.scaled(a.lead().inverse());
}

// ---------------------------------------------------------------- ZetaValue

namespace {

using Laurent = ZetaValue::Laurent;

void laurent_add(Laurent& a, const Laurent& b, const CycRat& scale = CycRat(1)) {
  for (const auto& [k, c] : b) {
    auto it = a.find(k);
    CycRat v = c * scale;
    if (it == a.end()) {
      if (!v.is_zero()) a.emplace(k, v);
    } else {
      it->second += v;
      if (it->second.is_zero()) a.erase(it);
    }
  }
}

Laurent laurent_mul(const Laurent& a, const Laurent& b) {
  Laurent r;
  for (const auto& [i, x] : a) {
    for (const auto& [j, y] : b) {
      auto it = r.find(i + j);
      if (it == r.end()) r.emplace(i + j, x * y);
      else it->second += x * y;
    }
  }
  for (auto it = r.begin(); it != r.end();) {
    if (it->second.is_zero()) it = r.erase(it);
    else ++it;
  }
  return r;
}

Laurent poly_to_laurent(const CPoly& p, int shift = 0) {
  Laurent r;
  for (int k = 0; k <= p.degree(); ++k) {
    if (!p.coeff(k).is_zero()) r.emplace(k + shift, p.coeff(k));
  }
  return r;
}

// Split a nonzero Laurent polynomial into T^shift * P(T) with P(0) != 0.
std::pair<int, CPoly> laurent_to_poly(const Laurent& l) {
  int lo = l.begin()->first;
  int hi = l.rbegin()->first;
  std::vector<CycRat> v(hi - lo + 1);
  for (const auto& [k, c] : l) v[k - lo] = c;
  return {lo, CPoly(std::move(v))};
}

std::map<int, Laurent> num_mul_poly(const std::map<int, Laurent>& n, const CPoly& p) {
  std::map<int, Laurent> r;
  Laurent lp = poly_to_laurent(p);
  for (const auto& [xk, l] : n) {
    Laurent m = laurent_mul(l, lp);
    if (!m.empty()) r.emplace(xk, std::move(m));
  }
  return r;
}

std::string mono_str(const CycRat& c, int tk, int xk) {
  std::string parts;
  if (tk) parts = tk == 1 ? "T" : "T^" + std::to_string(tk);
  if (xk) {
    std::string xs = xk == 1 ? "X" : "X^" + std::to_string(xk);
    parts = parts.empty() ? xs : parts + "*" + xs;
  }
  if (parts.empty()) return c.str();
  if (c == CycRat(1)) return parts;
  if (c == CycRat(-1)) return "-" + parts;
  std::string cs = c.str();
  if (c.is_compound()) cs = "(" + cs + ")";
  return cs + "*" + parts;
}

std::string join_terms(const std::vector<std::string>& terms) {
  if (terms.empty()) return "0";
  std::string out = terms[0];
  for (size_t i = 1; i < terms.size(); ++i) {
    const std::string& t = terms[i];
    if (!t.empty() && t[0] == '-') out += " - " + t.substr(1);
    else out += " + " + t;
  }
  return out;
}

}  // namespace

ZetaValue::ZetaValue(const CycRat& c) {
  if (!c.is_zero()) num_[0][0] = c;
}
ZetaValue::ZetaValue(long c) : ZetaValue(CycRat(c)) {}
ZetaValue::ZetaValue(const Rational& c) : ZetaValue(CycRat(c)) {}

ZetaValue ZetaValue::monomial(long q, const CycRat& c, int tk, int xk) {
  ZetaValue v;
  v.q_ = q;
  if (!c.is_zero()) v.num_[xk][tk] = c;
  return v;
}

bool ZetaValue::is_constant() const {
  if (den_.degree() != 0) return false;
  if (num_.empty()) return true;
  return num_.size() == 1 && num_.begin()->first == 0 && num_.begin()->second.size() == 1 &&
         num_.begin()->second.begin()->first == 0;
}

std::optional<CycRat> ZetaValue::constant_value() const {
  if (!is_constant()) return std::nullopt;
  if (num_.empty()) return CycRat();
  return num_.begin()->second.begin()->second;
}

void ZetaValue::bind_q(long other) {
  if (other == 0) return;
  if (q_ == 0) q_ = other;
  else if (q_ != other) throw std::invalid_argument("ZetaValue: mismatched q");
}

void ZetaValue::canonicalize() {
  for (auto it = num_.begin(); it != num_.end();) {
    if (it->second.empty()) it = num_.erase(it);
    else ++it;
  }
  if (num_.empty()) {
    den_ = CPoly::constant(CycRat(1));
    return;
  }
  int low = 0;
  while (den_.coeff(low).is_zero()) ++low;
  if (low > 0) {
    std::vector<CycRat> v(den_.coeffs().begin() + low, den_.coeffs().end());
    den_ = CPoly(std::move(v));
    for (auto& [xk, l] : num_) {
      Laurent s;
      for (auto& [k, c] : l) s.emplace(k - low, c);
      l = std::move(s);
    }
  }
  CycRat c0 = den_.coeff(0);
  if (c0 != CycRat(1)) {
    CycRat inv = c0.inverse();
    den_ = den_.scaled(inv);
    for (auto& [xk, l] : num_)
      for (auto& [k, c] : l) c *= inv;
  }
  if (den_.degree() == 0) return;
  CPoly g = den_;
  for (const auto& [xk, l] : num_) {
    g = CPoly::gcd(g, laurent_to_poly(l).second);
    if (g.degree() == 0) return;
  }
  g = g.scaled(g.coeff(0).inverse());
  den_ = CPoly::divmod(den_, g).first;
  for (auto& [xk, l] : num_) {
    auto [sh, p] = laurent_to_poly(l);
    l = poly_to_laurent(CPoly::divmod(p, g).first, sh);
  }
}

ZetaValue ZetaValue::operator-() const {
  ZetaValue r = *this;
  for (auto& [xk, l] : r.num_)
    for (auto& [k, c] : l) c = -c;
  return r;
}

ZetaValue& ZetaValue::operator+=(const ZetaValue& o) {
  bind_q(o.q_);
  if (o.num_.empty()) return *this;
  if (den_ == o.den_) {
    for (const auto& [xk, l] : o.num_) laurent_add(num_[xk], l);
  } else {
    auto a = num_mul_poly(num_, o.den_);
    auto b = num_mul_poly(o.num_, den_);
    for (const auto& [xk, l] : b) laurent_add(a[xk], l);
    num_ = std::move(a);
    den_ = den_ * o.den_;
  }
  canonicalize();
  return *this;
}

ZetaValue& ZetaValue::operator-=(const ZetaValue& o) { return *this += -o; }

ZetaValue& ZetaValue::operator*=(const ZetaValue& o) {
  bind_q(o.q_);
  std::map<int, Laurent> r;
  for (const auto& [i, a] : num_) {
    for (const auto& [j, b] : o.num_) laurent_add(r[i + j], laurent_mul(a, b));
  }
  num_ = std::move(r);
  den_ = den_ * o.den_;
  canonicalize();
  return *this;
}

ZetaValue& ZetaValue::operator/=(const ZetaValue& o) { return *this *= o.inverse(); }

bool operator==(const ZetaValue& a, const ZetaValue& b) {
  if (a.num_.size() != b.num_.size() || !(a.den_ == b.den_)) return false;
  auto it = b.num_.begin();
  for (const auto& [xk, l] : a.num_) {
    if (it->first != xk || it->second.size() != l.size()) return false;
    auto jt = it->second.begin();
    for (const auto& [k, c] : l) {
      if (jt->first != k || jt->second != c) return false;
      ++jt;
    }
    ++it;
  }
  return true;
}

ZetaValue ZetaValue::inverse() const {
  if (num_.empty()) throw std::domain_error("division by zero");
  if (num_.size() != 1) throw std::domain_error("ZetaValue inverse would put X in the denominator");
  int xk = num_.begin()->first;
  auto [sh, p] = laurent_to_poly(num_.begin()->second);
  ZetaValue r;
  r.q_ = q_;
  r.num_[-xk] = poly_to_laurent(den_, -sh);
  r.den_ = p;
  r.canonicalize();
  return r;
}

ZetaValue ZetaValue::conj() const {
  ZetaValue r = *this;
  for (auto& [xk, l] : r.num_)
    for (auto& [k, c] : l) c = c.conj();
  std::vector<CycRat> d;
  for (const auto& c : den_.coeffs()) d.push_back(c.conj());
  r.den_ = CPoly(std::move(d));
  return r;
}

ZetaValue ZetaValue::pow(long e) const {
  ZetaValue r(1);
  r.q_ = q_;
  ZetaValue b = e < 0 ? inverse() : *this;
  unsigned long n = e < 0 ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  while (n) {
    if (n & 1) r *= b;
    n >>= 1;
    if (n) b *= b;
  }
  return r;
}

ZetaValue ZetaValue::subst(const CycRat& c, int k) const {
  if (k == 0) throw std::invalid_argument("subst: exponent must be nonzero");
  auto map_laurent = [&](const Laurent& l) {
    Laurent r;
    for (const auto& [e, v] : l) laurent_add(r, Laurent{{e * k, v * c.pow(e)}});
    return r;
  };
  Laurent dl = map_laurent(poly_to_laurent(den_));
  int lo = dl.begin()->first;
  ZetaValue r;
  r.q_ = q_;
  for (const auto& [xk, l] : num_) {
    Laurent m = map_laurent(l);
    Laurent s;
    for (const auto& [e, v] : m) s.emplace(e - lo, v);
    r.num_.emplace(xk, std::move(s));
  }
  r.den_ = laurent_to_poly(dl).second;
  r.canonicalize();
  return r;
}

ZetaValue ZetaValue::subst_dual() const {
  if (den_.degree() == 0 && (num_.empty() || (num_.size() == 1 && num_.begin()->second.size() == 1 &&
                                              num_.begin()->second.begin()->first == 0))) {
    return *this;
  }
  if (q_ == 0) throw std::invalid_argument("subst_dual: T is not bound to a q");
  return subst(CycRat(rpow(Rational(q_), -2)), -1);
}

ZetaValue::Laurent ZetaValue::series(int n, int xk) const {
  Laurent out;
  auto it = num_.find(xk);
  if (it == num_.end()) return out;
  const Laurent& l = it->second;
  int lo = l.begin()->first;
  if (lo > n) return out;
  int len = n - lo + 1;
  // Inverse of the denominator as a power series (D(0) = 1).
  std::vector<CycRat> inv(len);
  inv[0] = CycRat(1);
  for (int i = 1; i < len; ++i) {
    CycRat s;
    for (int j = 1; j <= std::min(i, den_.degree()); ++j) s += den_.coeff(j) * inv[i - j];
    inv[i] = -s;
  }
  for (const auto& [e, c] : l) {
    for (int i = 0; e + i <= n; ++i) {
      if (inv[i].is_zero()) continue;
      laurent_add(out, Laurent{{e + i, c * inv[i]}});
    }
  }
  return out;
}

ZetaValue ZetaValue::truncated(int n) const {
  if (den_.degree() != 0) throw std::invalid_argument("truncated: not a Laurent polynomial");
  ZetaValue r;
  r.q_ = q_;
  for (const auto& [xk, l] : num_) {
    Laurent s;
    for (const auto& [e, c] : l)
      if (e <= n) s.emplace(e, c);
    if (!s.empty()) r.num_.emplace(xk, std::move(s));
  }
  return r;
}

std::complex<double> ZetaValue::eval(std::complex<double> t, std::complex<double> x) const {
  std::complex<double> n = 0;
  for (const auto& [xk, l] : num_)
    for (const auto& [e, c] : l) n += c.to_complex() * std::pow(t, e) * std::pow(x, xk);
  std::complex<double> d = 0;
  for (int k = 0; k <= den_.degree(); ++k) d += den_.coeff(k).to_complex() * std::pow(t, k);
  return n / d;
}

std::string ZetaValue::str() const {
  std::vector<std::string> terms;
  for (const auto& [xk, l] : num_)
    for (const auto& [e, c] : l) terms.push_back(mono_str(c, e, xk));
  std::string ns = join_terms(terms);
  if (den_.degree() == 0) return ns;
  std::vector<std::string> dterms;
  for (int k = 0; k <= den_.degree(); ++k) {
    if (!den_.coeff(k).is_zero()) dterms.push_back(mono_str(den_.coeff(k), k, 0));
  }
  std::string out = "(" + join_terms(dterms) + ")^-1";
  if (ns == "1") return out;
  if (terms.size() == 1) return out + " * " + ns;
  return out + " * (" + ns + ")";
}

std::ostream& operator<<(std::ostream& os, const ZetaValue& x) { return os << x.str(); }

ZetaValue subst_dual(const ZetaValue& v) { return v.subst_dual(); }

ZetaValue subst_scale(const ZetaValue& v, const CycRat& c, int k) {
  if (k <= 0) throw std::invalid_argument("subst_scale: k must be positive");
  return v.subst(c, k);
}

std::optional<ExponentialType> is_exponential_type(const ZetaValue& v) {
  if (v.denominator().degree() != 0) return std::nullopt;
  const auto& n = v.numerator();
  if (n.size() != 1 || n.begin()->first != 0 || n.begin()->second.size() != 1) return std::nullopt;
  const auto& [b, a] = *n.begin()->second.begin();
  return ExponentialType{a, b};
}

}  // namespace sbz
