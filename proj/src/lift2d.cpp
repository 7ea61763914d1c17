#include "sbz/lift2d.hpp"

#include <algorithm>
#include <regex>
#include <sstream>
#include <stdexcept>

namespace sbz {

namespace {

Rational q_pow(int p, long e) { return rpow(Rational(p), e); }

bool is_k_monomial(const KElement& x) { return x.digits().size() == 1; }

KElement k_monomial_inverse(const KElement& x) {
  if (!is_k_monomial(x)) throw std::invalid_argument("leading coefficient must be c u^k");
  return x.inverse(-x.valuation() + 1);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

bool opens(char c) { return c == '(' || c == '[' || c == '{'; }
bool closes(char c) { return c == ')' || c == ']' || c == '}'; }

// Split at top-level + and -; a sign right after '^' or '*' belongs to the term.
std::vector<std::pair<int, std::string>> split_sum(const std::string& s) {
  std::vector<std::pair<int, std::string>> out;
  int depth = 0;
  int sign = 1;
  std::string cur;
  char last = 0;
  for (char ch : s) {
    if (opens(ch)) ++depth;
    if (closes(ch)) --depth;
    if (depth == 0 && (ch == '+' || ch == '-')) {
      if (trim(cur).empty()) {
        if (ch == '-') sign = -sign;
        continue;
      }
      if (last != '^' && last != '*') {
        out.emplace_back(sign, trim(cur));
        cur.clear();
        last = 0;
        sign = ch == '-' ? -1 : 1;
        continue;
      }
    }
    cur += ch;
    if (ch != ' ' && ch != '\t') last = ch;
  }
  if (!trim(cur).empty()) out.emplace_back(sign, trim(cur));
  return out;
}

std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (opens(ch)) ++depth;
    if (closes(ch)) --depth;
    if (depth == 0 && ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur += ch;
  }
  out.push_back(trim(cur));
  return out;
}

std::string strip_parens(std::string s) {
  s = trim(s);
  while (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    int depth = 0;
    bool outer = true;
    for (size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i] == '(') ++depth;
      if (s[i] == ')') --depth;
      if (depth == 0) {
        outer = false;
        break;
      }
    }
    if (!outer) break;
    s = trim(s.substr(1, s.size() - 2));
  }
  return s;
}

Rational rational_sqrt(const Rational& r) {
  if (r < 0) throw std::domain_error("absolute value not representable exactly");
  mpz_class n = r.get_num(), d = r.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t()))
    throw std::domain_error("absolute value not representable exactly");
  mpz_class sn, sd;
  mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
  return Rational(sn, sd);
}

CycRat cyc_abs(const CycRat& v) {
  if (v.is_zero()) return CycRat();
  CycRat n = v * v.conj();
  if (!n.is_rational()) throw std::domain_error("absolute value not representable exactly");
  return CycRat(rational_sqrt(n.to_rational()));
}

ZetaValue x_power(int p, int k, const CycRat& c = CycRat(1)) { return ZetaValue::monomial(p, c, 0, k); }

// g * psi_K(e y) on residue data.
ResidueFn twisted(const ResidueFn& g, const KElement& e, int psi_d) {
  ResidueFn out(twist(g.sb(), e, psi_d));
  AdditiveCharacter psi{g.p(), psi_d};
  for (const auto& [x, v] : g.points()) out.add_point(x, v * psi(e * x));
  return out;
}

struct IdealKey {
  int gamma;
  FElement a0;
  FElement b0;
  friend bool operator<(const IdealKey& x, const IdealKey& y) {
    if (x.gamma != y.gamma) return x.gamma < y.gamma;
    if (x.a0 != y.a0) return x.a0 < y.a0;
    return x.b0 < y.b0;
  }
};

struct Grouped {
  std::map<IdealKey, std::vector<std::pair<ZetaValue, ResidueFn>>> groups;
};

// Each term rewritten as coeff * psi_{b0} * g'^{a0,gamma} with a0 = a mod t^gamma and
// b0 = b mod t^{-gamma}.
Grouped group_terms(const LiftedFn& f) {
  Grouped out;
  GoodCharacter psi = f.psi();
  for (const auto& t : f.terms()) {
    ZetaValue c = t.coeff;
    ResidueFn g = t.g;
    FElement b0(f.p());
    if (t.b) {
      b0 = t.b->truncated(-t.gamma);
      FElement delta = *t.b - b0;
      if (!delta.is_zero()) {
        c *= ZetaValue(psi(delta, t.a));
        if (delta.valuation() == -t.gamma) g = twisted(g, delta.eta(), psi.base.d);
      }
    }
    FElement a0 = t.a.truncated(t.gamma);
    KElement ag = t.a.coeff(t.gamma);
    if (!ag.is_zero()) g = g.translated(-ag);
    out.groups[{t.gamma, a0, b0}].emplace_back(c, g);
  }
  return out;
}

bool group_is_zero(const std::vector<std::pair<ZetaValue, ResidueFn>>& entries) {
  std::vector<SBFunction> norm;
  std::vector<KCoset> cosets;
  std::map<KElement, bool> pts;
  for (const auto& [c, g] : entries) {
    norm.push_back(normalize(g.sb()));
    for (const auto& t : norm.back().terms()) cosets.push_back(t.coset);
    for (const auto& pv : g.points()) pts[pv.first] = true;
  }
  for (const auto& cell : common_refinement(cosets)) {
    ZetaValue s;
    for (size_t i = 0; i < entries.size(); ++i) s += entries[i].first * ZetaValue(norm[i](cell.rep));
    if (!s.is_zero()) return false;
  }
  for (const auto& pv : pts) {
    ZetaValue s;
    for (const auto& [c, g] : entries) s += c * ZetaValue(g(pv.first));
    if (!s.is_zero()) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------- FElement

FElement::FElement(const KElement& c) : p_(c.p()) {
  if (!c.is_zero()) c_[0] = c;
}

FElement FElement::monomial(const KElement& c, int k) {
  FElement x(c.p());
  if (!c.is_zero()) x.c_[k] = c;
  return x;
}

KElement FElement::coeff(int k) const {
  auto it = c_.find(k);
  return it == c_.end() ? KElement(p_) : it->second;
}

KElement FElement::eta() const {
  if (c_.empty()) throw std::domain_error("eta of 0");
  return c_.begin()->second;
}

FElement FElement::operator-() const {
  FElement r(p_);
  for (const auto& [k, v] : c_) r.c_[k] = -v;
  return r;
}

FElement operator+(const FElement& a, const FElement& b) {
  FElement r = a;
  for (const auto& [k, v] : b.c_) {
    KElement s = r.coeff(k) + v;
    if (s.is_zero()) r.c_.erase(k);
    else r.c_[k] = s;
  }
  return r;
}

FElement operator*(const FElement& a, const FElement& b) {
  FElement r(a.p_);
  std::map<int, KElement> acc;
  for (const auto& [i, x] : a.c_)
    for (const auto& [j, y] : b.c_) {
      auto it = acc.find(i + j);
      if (it == acc.end()) acc.emplace(i + j, x * y);
      else it->second = it->second + x * y;
    }
  for (auto& [k, v] : acc)
    if (!v.is_zero()) r.c_[k] = v;
  return r;
}

FElement FElement::truncated(int level) const {
  FElement r(p_);
  for (const auto& [k, v] : c_) {
    if (k >= level) break;
    r.c_[k] = v;
  }
  return r;
}

FElement FElement::shifted(int k) const {
  FElement r(p_);
  for (const auto& [e, v] : c_) r.c_[e + k] = v;
  return r;
}

FElement FElement::inverse(int N) const {
  if (c_.empty()) throw std::domain_error("division by zero");
  const int nu = valuation();
  KElement einv = k_monomial_inverse(eta());
  FElement r(p_);
  const int M = N + nu;
  if (M <= 0) return r;
  FElement eps = (shifted(-nu) * FElement(einv)) - FElement(KElement(p_, 1));
  FElement neg = -eps;
  FElement s(KElement(p_, 1)), pw(KElement(p_, 1));
  for (int k = 1; k < M; ++k) {
    pw = (pw * neg).truncated(M);
    if (pw.is_zero()) break;
    s = s + pw;
  }
  return (s * FElement(einv)).shifted(-nu).truncated(N);
}

std::string FElement::str() const {
  if (c_.empty()) return "0";
  std::string out;
  for (const auto& [k, v] : c_) {
    std::string term;
    if (k == 0) {
      term = v.str();
    } else {
      std::string tp = k == 1 ? "t" : "t^" + std::to_string(k);
      bool one = v == KElement(p_, 1);
      term = one ? tp : (is_k_monomial(v) && v.valuation() == 0 ? v.str() : "(" + v.str() + ")") + "*" + tp;
    }
    out += out.empty() ? term : " + " + term;
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const FElement& x) { return os << x.str(); }

FElement FElement::parse(int p, const std::string& s) {
  static const std::regex tpow(R"(^t(?:\^(-?\d+))?$)");
  FElement total(p);
  for (const auto& [sign, term] : split_sum(s)) {
    if (term == "0") continue;
    int texp = 0;
    KElement k(p, 1);
    for (const auto& fac : split_top(term, '*')) {
      std::smatch m;
      if (std::regex_match(fac, m, tpow)) {
        texp += m[1].matched ? std::stoi(m[1].str()) : 1;
        continue;
      }
      k = k * KElement::parse(p, strip_parens(fac));
    }
    if (sign < 0) k = -k;
    total = total + monomial(k, texp);
  }
  return total;
}

CycRat GoodCharacter::operator()(const FElement& b, const FElement& x) const {
  KElement s(base.p);
  for (const auto& [k, v] : b.coeffs()) {
    KElement w = x.coeff(-k);
    if (!w.is_zero()) s = s + v * w;
  }
  return base(s);
}

// ---------------------------------------------------------------- ResidueFn

ResidueFn ResidueFn::point(int p, const KElement& x, const CycRat& v, Rational mu) {
  ResidueFn g(p, std::move(mu));
  g.add_point(x, v);
  return g;
}

ResidueFn ResidueFn::indicator(const KSet& s, int p, Rational mu) {
  ResidueFn g(p, std::move(mu));
  auto put = [&](const KCoset& c, long sign) {
    if (c.is_point()) g.add_point(c.rep, CycRat(sign));
    else g.sb_.add(c, CycRat(sign));
  };
  for (const auto& comp : s.components()) {
    put(comp.outer, 1);
    for (const auto& in : comp.inner) put(in, -1);
  }
  return g;
}

ResidueFn& ResidueFn::add_point(const KElement& x, const CycRat& v) {
  CycRat s = points_.count(x) ? points_[x] + v : v;
  if (s.is_zero()) points_.erase(x);
  else points_[x] = s;
  return *this;
}

ResidueFn& ResidueFn::add(const ResidueFn& o, const CycRat& scale) {
  sb_.add(o.sb_, scale);
  for (const auto& [x, v] : o.points_) add_point(x, v * scale);
  return *this;
}

ResidueFn operator*(const CycRat& s, const ResidueFn& g) {
  ResidueFn r(g.p(), g.mu());
  r.add(g, s);
  return r;
}

CycRat ResidueFn::operator()(const KElement& x) const {
  CycRat v = sb_(x);
  auto it = points_.find(x);
  if (it != points_.end()) v += it->second;
  return v;
}

bool ResidueFn::is_zero() const { return points_.empty() && sb_.is_zero(); }

ResidueFn ResidueFn::translated(const KElement& tau) const {
  ResidueFn r(translate(sb_, tau));
  for (const auto& [x, v] : points_) r.add_point(x - tau, v);
  return r;
}

ResidueFn ResidueFn::dilated(const KElement& alpha) const {
  KElement inv = k_monomial_inverse(alpha);
  ResidueFn r(dilate(sb_, alpha));
  for (const auto& [x, v] : points_) r.add_point(inv * x, v);
  return r;
}

std::string ResidueFn::str() const {
  std::string out = sb_.terms().empty() ? "" : sb_.str();
  for (const auto& [x, v] : points_) {
    CycRat c = v;
    bool neg = c.is_rational() && c.to_rational() < 0;
    if (neg) c = -c;
    std::string cs = c.is_compound() ? "(" + c.str() + ")" : c.str();
    std::string term = cs + "*{" + x.str() + "}";
    if (out.empty()) out = (neg ? "-" : "") + term;
    else out += (neg ? " - " : " + ") + term;
  }
  return out.empty() ? "0" : out;
}

ResidueFn ResidueFn::parse(int p, const std::string& s, Rational mu, int psi_d) {
  std::string sb_text;
  std::vector<std::pair<KElement, CycRat>> pts;
  for (const auto& [sign, term] : split_sum(s)) {
    size_t brace = term.find('{');
    if (brace == std::string::npos) {
      if (term == "0") continue;
      sb_text += (sign < 0 ? " - " : " + ") + term;
      continue;
    }
    size_t close = term.find('}', brace);
    if (close == std::string::npos) throw std::invalid_argument("unbalanced point term: " + term);
    std::string cpart = trim(term.substr(0, brace));
    if (!cpart.empty() && cpart.back() == '*') cpart.pop_back();
    CycRat c = cpart.empty() ? CycRat(1) : CycRat::parse(strip_parens(cpart));
    if (sign < 0) c = -c;
    pts.emplace_back(KElement::parse(p, term.substr(brace + 1, close - brace - 1)), c);
  }
  sb_text = trim(sb_text);
  if (sb_text.rfind("+ ", 0) == 0) sb_text = sb_text.substr(2);
  ResidueFn g = sb_text.empty() ? ResidueFn(p, mu) : ResidueFn(SBFunction::parse(p, sb_text, mu, psi_d));
  for (const auto& [x, c] : pts) g.add_point(x, c);
  return g;
}

// ---------------------------------------------------------------- LiftedFn

LiftedFn::LiftedFn(int p, Rational mu, int psi_d) : p_(p), mu_(std::move(mu)), psi_d_(psi_d) {}

LiftedFn& LiftedFn::add(const ResidueFn& g, const FElement& a, int gamma, const ZetaValue& coeff,
                        const std::optional<FElement>& b) {
  if (g.p() != p_ || a.p() != p_) throw std::invalid_argument("mismatched residue characteristic");
  if (g.sb().twist_conductor() && *g.sb().twist_conductor() != psi_d_)
    throw std::invalid_argument("residue twist uses a different additive character");
  if (coeff.is_zero()) return *this;
  std::optional<FElement> bb = b;
  if (bb && bb->is_zero()) bb.reset();
  terms_.push_back({g, a, gamma, bb, coeff});
  check_term_count();
  return *this;
}

LiftedFn& LiftedFn::add(const LiftedFn& o, const ZetaValue& scale) {
  if (o.p_ != p_ || o.psi_d_ != psi_d_) throw std::invalid_argument("mismatched lifted function spaces");
  for (const auto& t : o.terms_) add(t.g, t.a, t.gamma, t.coeff * scale, t.b);
  return *this;
}

void LiftedFn::check_term_count() const {
  if (static_cast<long>(terms_.size()) > kTermCap) throw std::length_error("term cap exceeded");
}

LiftedFn LiftedFn::lift(const ResidueFn& g, const FElement& a, int gamma, int psi_d) {
  LiftedFn f(g.p(), g.mu(), psi_d);
  f.add(g, a, gamma);
  return f;
}

LiftedFn LiftedFn::operator-() const { return ZetaValue(-1) * *this; }

LiftedFn operator*(const ZetaValue& s, const LiftedFn& f) {
  LiftedFn r(f.p_, f.mu_, f.psi_d_);
  r.add(f, s);
  return r;
}

CycRat lift_value(const ResidueFn& g, const FElement& a, int gamma, const FElement& x) {
  FElement z = x - a;
  if (z.valuation() < gamma) return CycRat();
  return g(z.coeff(gamma));
}

ZetaValue LiftedFn::operator()(const FElement& x) const {
  ZetaValue v;
  GoodCharacter ps = psi();
  for (const auto& t : terms_) {
    CycRat g = lift_value(t.g, t.a, t.gamma, x);
    if (g.is_zero()) continue;
    if (t.b) g *= ps(*t.b, x);
    v += t.coeff * ZetaValue(g);
  }
  return v;
}

bool LiftedFn::is_zero() const {
  for (const auto& [key, entries] : group_terms(*this).groups)
    if (!group_is_zero(entries)) return false;
  return true;
}

namespace {

/// "c * X^k * " for c X^k, else the parenthesized value.
std::string coeff_str(const ZetaValue& v) {
  const auto& num = v.numerator();
  if (v.is_laurent_polynomial() && num.size() == 1) {
    int k = num.begin()->first;
    if (auto c = (v * ZetaValue::X(-k)).constant_value()) {
      std::string out = *c == CycRat(1) ? "" : "(" + c->str() + ") * ";
      if (k != 0) out += "X^" + std::to_string(k) + " * ";
      return out;
    }
  }
  return "(" + v.str() + ") * ";
}

}  // namespace

std::string LiftedFn::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    std::string term;
    term = coeff_str(t.coeff);
    term += "lift(" + t.g.str() + "; " + t.a.str() + "; " + std::to_string(t.gamma) + ")";
    if (t.b) term += " * psi(" + t.b->str() + ")";
    out += out.empty() ? term : " + " + term;
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const LiftedFn& f) { return os << f.str(); }

LiftedFn LiftedFn::parse(int p, const std::string& s, Rational mu, int psi_d) {
  static const std::regex xpow(R"(^X(?:\^(-?\d+))?$)");
  LiftedFn f(p, mu, psi_d);
  for (const auto& [sign, term] : split_sum(s)) {
    if (term == "0") continue;
    ZetaValue c(sign);
    std::optional<ResidueFn> g;
    FElement a(p);
    int gamma = 0;
    std::optional<FElement> b;
    for (const auto& fac : split_top(term, '*')) {
      std::smatch m;
      if (fac.rfind("lift(", 0) == 0 && fac.back() == ')') {
        auto parts = split_top(fac.substr(5, fac.size() - 6), ';');
        if (parts.size() != 3) throw std::invalid_argument("lift(g; a; gamma) expected: " + fac);
        g = ResidueFn::parse(p, parts[0], mu, psi_d);
        a = FElement::parse(p, parts[1]);
        gamma = std::stoi(parts[2]);
      } else if (fac.rfind("psi(", 0) == 0 && fac.back() == ')') {
        b = FElement::parse(p, fac.substr(4, fac.size() - 5));
      } else if (std::regex_match(fac, m, xpow)) {
        c *= x_power(p, m[1].matched ? std::stoi(m[1].str()) : 1);
      } else {
        c *= ZetaValue(CycRat::parse(strip_parens(fac)));
      }
    }
    if (!g) throw std::invalid_argument("term without lift(...): " + term);
    f.add(*g, a, gamma, c, b);
  }
  return f;
}

// ---------------------------------------------------------------- integration

ZetaValue integrate_F(const LiftedFn& f) {
  ZetaValue total;
  GoodCharacter psi = f.psi();
  for (const auto& t : f.terms()) {
    CycRat v;
    if (!t.b) {
      v = t.g.integral();
    } else {
      int nb = t.b->valuation();
      if (t.gamma < -nb) continue;
      ResidueFn g = t.gamma == -nb ? twisted(t.g, t.b->eta(), psi.base.d) : t.g;
      v = psi(*t.b, t.a) * g.integral();
    }
    if (!v.is_zero()) total += t.coeff * x_power(f.p(), t.gamma, v);
  }
  return total;
}

ZetaValue abs_F(const FElement& alpha) {
  if (alpha.is_zero()) throw std::invalid_argument("abs_F: alpha = 0");
  return x_power(alpha.p(), alpha.valuation(), CycRat(q_pow(alpha.p(), -alpha.eta().valuation())));
}

LiftedFn scale_F(const LiftedFn& f, const FElement& alpha) {
  if (alpha.is_zero()) throw std::invalid_argument("scale_F: alpha = 0");
  KElement eta = alpha.eta();
  if (!is_k_monomial(eta)) throw std::invalid_argument("scale_F: eta(alpha) must be c u^k");
  const int nu = alpha.valuation();
  LiftedFn out(f.p(), f.mu(), f.psi().base.d);
  for (const auto& t : f.terms()) {
    int g2 = t.gamma - nu;
    FElement a2(f.p());
    if (!t.a.is_zero()) a2 = (alpha.inverse(g2 + 1 - t.a.valuation()) * t.a).truncated(g2 + 1);
    std::optional<FElement> b2;
    if (t.b) b2 = alpha * *t.b;
    out.add(t.g.dilated(eta), a2, g2, t.coeff, b2);
  }
  return out;
}

LiftedFn translate_F(const LiftedFn& f, const FElement& tau) {
  LiftedFn out(f.p(), f.mu(), f.psi().base.d);
  GoodCharacter psi = f.psi();
  for (const auto& t : f.terms()) {
    ZetaValue c = t.coeff;
    if (t.b) c *= ZetaValue(psi(*t.b, tau));
    out.add(t.g, t.a - tau, t.gamma, c, t.b);
  }
  return out;
}

namespace {

// |h + c| - |c| on residue data.
ResidueFn abs_shift(const ResidueFn& h, const CycRat& c) {
  ResidueFn out(h.p(), h.mu());
  SBFunction n = normalize(h.sb());
  std::vector<KCoset> cosets;
  for (const auto& t : n.terms()) cosets.push_back(t.coset);
  CycRat ac = cyc_abs(c);
  SBFunction sb(h.p(), h.mu());
  for (const auto& cell : common_refinement(cosets)) {
    CycRat w = cyc_abs(n(cell.rep) + c) - ac;
    if (!w.is_zero()) sb.add(cell, w);
  }
  out.add(ResidueFn(sb));
  for (const auto& [x, pv] : h.points()) {
    CycRat base = n(x);
    out.add_point(x, cyc_abs(base + pv + c) - cyc_abs(base + c));
  }
  return out;
}

struct IdealGroup {
  int gamma;
  FElement a0;
  ResidueFn h;
};

}  // namespace

LiftedFn abs_lifted(const LiftedFn& f) {
  for (const auto& t : f.terms())
    if (t.b) throw std::invalid_argument("absolute value only defined for untwisted lifts");
  std::vector<IdealGroup> groups;
  for (const auto& [key, entries] : group_terms(f).groups) {
    ResidueFn h(f.p(), f.mu());
    for (const auto& [c, g] : entries) {
      auto cv = c.constant_value();
      if (!cv) throw std::domain_error("absolute value needs complex coefficients");
      h.add(g, *cv);
    }
    if (!h.is_zero()) groups.push_back({key.gamma, key.a0, h});
  }
  LiftedFn out(f.p(), f.mu(), f.psi().base.d);
  while (!groups.empty()) {
    size_t top = 0;
    for (size_t i = 1; i < groups.size(); ++i)
      if (groups[i].gamma >= groups[top].gamma) top = i;
    const IdealGroup& n = groups[top];
    CycRat c;
    for (size_t i = 0; i < groups.size(); ++i)
      if (i != top) c += lift_value(groups[i].h, groups[i].a0, groups[i].gamma, n.a0);
    ResidueFn piece = abs_shift(n.h, c);
    if (!piece.is_zero()) out.add(piece, n.a0, n.gamma);
    groups.erase(groups.begin() + static_cast<long>(top));
  }
  return out;
}

LiftedFn fourier_F(const LiftedFn& f, const GoodCharacter& psi) {
  if (psi.base.p != f.p() || psi.base.d != f.psi().base.d)
    throw std::invalid_argument("fourier_F: character differs from the one used by f");
  LiftedFn out(f.p(), f.mu(), psi.base.d);
  for (const auto& t : f.terms()) {
    FElement b = t.b ? *t.b : FElement(f.p());
    ZetaValue c = t.coeff * x_power(f.p(), t.gamma, psi(t.a, b));
    out.add(ResidueFn(fourier(t.g.sb(), psi.base)), -b, -t.gamma, c, t.a);
  }
  return out;
}

// ---------------------------------------------------------------- measure

bool DistinguishedSetF::contains(const FElement& x) const {
  FElement z = x - a;
  if (z.valuation() < gamma) return false;
  return S.contains(z.coeff(gamma));
}

std::string DistinguishedSetF::str() const {
  return "(" + a.str() + ") + t^" + std::to_string(gamma) + " rho^-1(" + S.str() + ")";
}

namespace {

KSet shift_set(const KSet& s, const KElement& delta) {
  return s.map_atoms([&](const KCoset& c) {
    return c.is_point() ? KCoset::point(c.rep + delta) : KCoset(c.rep + delta, c.level);
  });
}

// S_A expressed in the residue coordinate of B (same level, meeting ideals).
KSet in_coords_of(const DistinguishedSetF& A, const DistinguishedSetF& B) {
  return shift_set(A.S, (A.a - B.a).coeff(B.gamma));
}

// Finer set A inside the residue fibre of coarser B? Returns the fibre point.
std::optional<KElement> fibre(const DistinguishedSetF& A, const DistinguishedSetF& B) {
  FElement z = A.a - B.a;
  if (z.valuation() < B.gamma) return std::nullopt;
  return z.coeff(B.gamma);
}

}  // namespace

SetRelation DistinguishedInstance::relate(const Atom& A, const Atom& B) {
  if (A.gamma == B.gamma) {
    if ((A.a - B.a).valuation() < A.gamma) return SetRelation::kDisjoint;
    KSet sa = in_coords_of(A, B);
    if ((sa & B.S).is_empty()) return SetRelation::kDisjoint;
    bool a_in_b = (sa - B.S).is_empty();
    bool b_in_a = (B.S - sa).is_empty();
    if (a_in_b && b_in_a) return SetRelation::kEqual;
    if (a_in_b) return SetRelation::kFirstInSecond;
    if (b_in_a) return SetRelation::kSecondInFirst;
    return SetRelation::kOverlap;
  }
  if (A.gamma > B.gamma) {
    auto y = fibre(A, B);
    return y && B.S.contains(*y) ? SetRelation::kFirstInSecond : SetRelation::kDisjoint;
  }
  auto y = fibre(B, A);
  return y && A.S.contains(*y) ? SetRelation::kSecondInFirst : SetRelation::kDisjoint;
}

DistinguishedInstance::Atom DistinguishedInstance::intersect(const Atom& A, const Atom& B) {
  if (A.gamma == B.gamma) return {B.a, in_coords_of(A, B) & B.S, B.gamma};
  return A.gamma > B.gamma ? A : B;
}

DistinguishedInstance::Atom DistinguishedInstance::unite(const Atom& A, const Atom& B) {
  if (A.gamma == B.gamma) return {B.a, in_coords_of(A, B) | B.S, B.gamma};
  return A.gamma > B.gamma ? B : A;
}

DistinguishedSetF null_atom(int p, int gamma) {
  return {FElement(p), KSet::atom(KCoset::point(KElement(p))), gamma - 1};
}

LiftedFn char_function(const FSet& W, const Rational& mu) {
  int p = 0;
  for (const auto& c : W.components()) p = c.outer.a.p();
  LiftedFn f(p ? p : 2, mu);
  if (!p) return f;
  for (const auto& comp : W.components()) {
    f.add(ResidueFn::indicator(comp.outer.S, p, mu), comp.outer.a, comp.outer.gamma);
    for (const auto& in : comp.inner) f.add(ResidueFn::indicator(in.S, p, mu), in.a, in.gamma, ZetaValue(-1));
  }
  return f;
}

ZetaValue measure_F(const FSet& W, const Rational& mu) { return integrate_F(char_function(W, mu)); }

// ---------------------------------------------------------------- F^x

LiftedFn divide_by_abs(const LiftedFn& f) {
  const int p = f.p();
  LiftedFn out(p, f.mu(), f.psi().base.d);
  for (const auto& t : f.terms()) {
    int na = t.a.valuation();
    if (na < t.gamma) {
      KElement e = t.a.eta();
      out.add(t.g, t.a, t.gamma, t.coeff * x_power(p, -na, CycRat(q_pow(p, e.valuation()))), t.b);
      continue;
    }
    // 0 in a + t^gamma O_F: |x| = |y + a_gamma| X^gamma with y the residue coordinate.
    KElement ag = t.a.coeff(t.gamma);
    KElement zero_at = -ag;
    SBFunction n = normalize(t.g.sb());
    SBFunction sb(p, t.g.mu());
    for (const auto& c : n.terms()) {
      if (c.coset.contains(zero_at)) throw std::domain_error("not integrable over F^x: nonzero near 0");
      int w = (c.coset.rep + ag).valuation();
      sb.add(c.coset, c.coeff * CycRat(q_pow(p, w)));
    }
    ResidueFn h(sb);
    for (const auto& [x, v] : t.g.points()) {
      if (x == zero_at) throw std::domain_error("not integrable over F^x: nonzero near 0");
      h.add_point(x, v * CycRat(q_pow(p, (x + ag).valuation())));
    }
    out.add(h, t.a, t.gamma, t.coeff * x_power(p, -t.gamma), t.b);
  }
  return out;
}

ZetaValue mult_integral(const LiftedFn& ext) { return integrate_F(ext); }

// ---------------------------------------------------------------- zeta on F

ZetaValue zeta1d_on_F(const LiftTerm& t, const QuasiCharacter& omega, int psi_d, const Rational& mu) {
  const int p = omega.p();
  const int na = t.a.valuation();
  const int g = t.gamma;
  if (na < std::min(g, 0) || (0 < na && na < g) || (0 < g && g <= na)) return ZetaValue();
  if (na == 0 && 0 < g) {
    KElement abar = t.a.coeff(0);
    int w = abar.valuation();
    LiftedFn single(p, mu, psi_d);
    single.add(t.g, t.a, t.gamma, t.coeff, t.b);
    return ZetaValue::monomial(p, omega(abar) * CycRat(q_pow(p, w)), w) * integrate_F(single);
  }
  if (g == 0 && na >= 0) {
    if (t.b && t.b->valuation() < 0) return ZetaValue();
    SBFunction g1 = translate(t.g.sb(), -t.a.coeff(0));
    if (t.b && t.b->valuation() == 0) g1 = twist(g1, t.b->residue(), psi_d);
    return t.coeff * zeta(g1, omega);
  }
  throw std::runtime_error("gaussian-sum case: use zeta1d_on_F_regularized");
}

ZetaValue zeta1d_on_F(const LiftedFn& f, const QuasiCharacter& omega) {
  ZetaValue total;
  for (const auto& t : f.terms()) total += zeta1d_on_F(t, omega, f.psi().base.d, f.mu());
  return total;
}

ZetaValue shell_integral(const KElement& b, const QuasiCharacter& omega, const AdditiveCharacter& psi, int n,
                         const Rational& mu) {
  const int p = omega.p();
  int L = n + std::max(omega.conductor(), 1);
  if (!b.is_zero()) L = std::max(L, psi.d - b.valuation());
  CycRat s;
  for (const auto& c : subcosets(KCoset(KElement(p), n), L)) {
    if (c.rep.digit(n) == 0) continue;
    s += psi(b * c.rep) * omega(c.rep);
  }
  return ZetaValue::monomial(p, s * CycRat(mu * q_pow(p, n - L)), n);
}

RegularizedZeta zeta1d_on_F_regularized(const LiftTerm& t, const QuasiCharacter& omega, int psi_d,
                                        const Rational& mu) {
  const int p = omega.p();
  if (!(t.gamma < 0 && t.a.valuation() >= t.gamma))
    throw std::invalid_argument("zeta1d_on_F_regularized: not the gaussian-sum case");
  ZetaValue f0 = t.coeff * ZetaValue(lift_value(t.g, t.a, t.gamma, FElement(p)));
  if (f0.is_zero()) return {ZetaValue(), 0};
  if (t.b && t.b->valuation() < 0) return {ZetaValue(), 0};
  KElement bb = t.b && t.b->valuation() == 0 ? t.b->residue() : KElement(p);
  AdditiveCharacter psi{p, psi_d};
  const int r = std::max(omega.conductor(), 1);
  // Shells n >= n_triv see psi(bb y) = 1.
  auto tail = [&](int n0) {
    if (omega.ramified()) return ZetaValue();
    CycRat wp = omega.pi_value();
    ZetaValue geo = (ZetaValue(1) - ZetaValue::monomial(p, wp, 1)).inverse();
    return ZetaValue::monomial(p, CycRat(mu * (1 - Rational(1, p))) * wp.pow(n0), n0) * geo;
  };
  auto window = [&](int lo) {
    if (bb.is_zero()) return tail(lo);
    int n_triv = std::max(lo, psi_d - bb.valuation());
    ZetaValue s = tail(n_triv);
    for (int n = lo; n < n_triv; ++n) s += shell_integral(bb, omega, psi, n, mu);
    return s;
  };
  int n0 = bb.is_zero() ? 0 : psi_d - bb.valuation() - r - 1;
  ZetaValue v = window(n0);
  for (int k = 1; k <= 3; ++k)
    if (window(n0 - k) != v) throw std::runtime_error("no principal value");
  return {f0 * v, n0};
}

// ---------------------------------------------------------------- F x F

namespace {

CycRat tensor_value(const SBTensor& g, const KElement& u, const KElement& v) {
  CycRat s;
  for (const auto& t : g) s += t.coeff * t.f(u) * t.g(v);
  return s;
}

}  // namespace

ZetaValue integrate_F2(const LiftedFn2& f) {
  ZetaValue total;
  for (const auto& t : f) {
    CycRat s;
    int p = t.a1.p();
    for (const auto& g : t.g) s += g.coeff * haar_integral(g.f) * haar_integral(g.g);
    if (!s.is_zero()) total += t.coeff * x_power(p, t.gamma1 + t.gamma2, s);
  }
  return total;
}

ZetaValue eval_F2(const LiftedFn2& f, const FElement& x, const FElement& y) {
  ZetaValue total;
  for (const auto& t : f) {
    FElement z1 = x - t.a1, z2 = y - t.a2;
    if (z1.valuation() < t.gamma1 || z2.valuation() < t.gamma2) continue;
    CycRat v = tensor_value(t.g, z1.coeff(t.gamma1), z2.coeff(t.gamma2));
    if (!v.is_zero()) total += t.coeff * ZetaValue(v);
  }
  return total;
}

LiftedFn2 translate_F2(const LiftedFn2& f, const FElement& tau1, const FElement& tau2) {
  LiftedFn2 out = f;
  for (auto& t : out) {
    t.a1 = t.a1 - tau1;
    t.a2 = t.a2 - tau2;
  }
  return out;
}

LiftedFn2 tensor(const LiftedFn& f1, const LiftedFn& f2) {
  LiftedFn2 out;
  for (const auto& s : f1.terms())
    for (const auto& t : f2.terms()) {
      if (s.b || t.b) throw std::invalid_argument("tensor: twisted terms");
      if (s.g.has_points() || t.g.has_points()) throw std::invalid_argument("tensor: point values");
      out.push_back({{{s.g.sb(), t.g.sb(), CycRat(1)}}, s.a, t.a, s.gamma, t.gamma, s.coeff * t.coeff});
    }
  return out;
}

}  // namespace sbz
