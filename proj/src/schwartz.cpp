#include "sbz/schwartz.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <regex>
#include <stdexcept>

namespace sbz {

namespace {

Rational q_pow(int p, long e) { return rpow(Rational(p), e); }

int ceil_half(int m) { return m >= 0 ? (m + 1) / 2 : -((-m) / 2); }

struct TrieNode {
  CycRat acc;
  bool inserted = false;
  std::map<int, std::unique_ptr<TrieNode>> kids;
};

struct Region {
  bool uniform = true;
  CycRat value;
  std::vector<std::pair<KCoset, CycRat>> pieces;
};

class CosetTrie {
 public:
  CosetTrie(int p, int base) : p_(p), base_(base) {}

  void insert(const KCoset& c, const CycRat& coeff) {
    TrieNode* node = &roots_[c.rep.truncated(base_)];
    for (int k = base_; k < c.level; ++k) {
      auto& kid = node->kids[c.rep.digit(k)];
      if (!kid) kid = std::make_unique<TrieNode>();
      node = kid.get();
    }
    node->acc += coeff;
    node->inserted = true;
  }

  std::vector<std::pair<KCoset, CycRat>> canonical() const {
    std::vector<std::pair<KCoset, CycRat>> out;
    for (const auto& [rep, node] : roots_) {
      Region r = collect(node, rep, base_, CycRat());
      if (r.uniform) {
        if (!r.value.is_zero()) out.emplace_back(KCoset(rep, base_), r.value);
      } else {
        out.insert(out.end(), r.pieces.begin(), r.pieces.end());
      }
    }
    return out;
  }

  std::vector<KCoset> cells() const {
    std::vector<KCoset> out;
    for (const auto& [rep, node] : roots_) cells_rec(node, rep, base_, false, out);
    return out;
  }

 private:
  Region collect(const TrieNode& node, const KElement& rep, int level, const CycRat& inherited) const {
    CycRat val = inherited + node.acc;
    Region res;
    res.value = val;
    if (node.kids.empty()) return res;
    std::vector<Region> kids(p_);
    for (int dg = 0; dg < p_; ++dg) {
      auto it = node.kids.find(dg);
      if (it == node.kids.end()) {
        kids[dg].value = val;
      } else {
        kids[dg] = collect(*it->second, rep + KElement::monomial(p_, dg, level), level + 1, val);
      }
    }
    bool all_same = std::all_of(kids.begin(), kids.end(),
                                [&](const Region& r) { return r.uniform && r.value == kids[0].value; });
    if (all_same) {
      res.value = kids[0].value;
      return res;
    }
    res.uniform = false;
    for (int dg = 0; dg < p_; ++dg) {
      if (kids[dg].uniform) {
        if (!kids[dg].value.is_zero())
          res.pieces.emplace_back(KCoset(rep + KElement::monomial(p_, dg, level), level + 1), kids[dg].value);
      } else {
        res.pieces.insert(res.pieces.end(), kids[dg].pieces.begin(), kids[dg].pieces.end());
      }
    }
    return res;
  }

  void cells_rec(const TrieNode& node, const KElement& rep, int level, bool covered, std::vector<KCoset>& out) const {
    covered = covered || node.inserted;
    if (node.kids.empty()) {
      if (covered) out.emplace_back(rep, level);
      return;
    }
    for (int dg = 0; dg < p_; ++dg) {
      KElement r = rep + KElement::monomial(p_, dg, level);
      auto it = node.kids.find(dg);
      if (it != node.kids.end()) cells_rec(*it->second, r, level + 1, covered, out);
      else if (covered) out.emplace_back(r, level + 1);
    }
  }

  int p_;
  int base_;
  std::map<KElement, TrieNode> roots_;
};

// Merge complete sibling families with equal coefficients until stable.
void merge_siblings(std::vector<std::pair<KCoset, CycRat>>& pieces, int p) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::map<std::pair<int, KElement>, std::vector<size_t>> fam;
    for (size_t i = 0; i < pieces.size(); ++i) {
      const KCoset& c = pieces[i].first;
      fam[{c.level, c.rep.truncated(c.level - 1)}].push_back(i);
    }
    std::vector<char> drop(pieces.size(), 0);
    std::vector<std::pair<KCoset, CycRat>> added;
    for (const auto& [key, idx] : fam) {
      if (static_cast<int>(idx.size()) != p) continue;
      const CycRat& v = pieces[idx[0]].second;
      bool same = std::all_of(idx.begin(), idx.end(), [&](size_t i) { return pieces[i].second == v; });
      if (!same) continue;
      for (size_t i : idx) drop[i] = 1;
      added.emplace_back(KCoset(key.second, key.first - 1), v);
      changed = true;
    }
    if (!changed) break;
    std::vector<std::pair<KCoset, CycRat>> next;
    for (size_t i = 0; i < pieces.size(); ++i)
      if (!drop[i]) next.push_back(pieces[i]);
    next.insert(next.end(), added.begin(), added.end());
    pieces = std::move(next);
  }
}

void check_cap(size_t n) {
  if (n > static_cast<size_t>(kTermCap)) throw std::length_error("term cap exceeded");
}

}  // namespace

SBFunction::SBFunction(int p, Rational mu) : p_(p), mu_(std::move(mu)) {
  mu_.canonicalize();
  if (mu_ <= 0) throw std::invalid_argument("Haar measure of O must be positive");
}

SBFunction SBFunction::indicator(const KCoset& c, Rational mu, CycRat coeff) {
  SBFunction f(c.rep.p(), std::move(mu));
  f.add(c, coeff);
  return f;
}

bool SBFunction::is_plain() const {
  return std::none_of(terms_.begin(), terms_.end(), [](const SBTerm& t) { return t.twist.has_value(); });
}

SBFunction& SBFunction::add(const KCoset& c, const CycRat& coeff) {
  if (c.is_point()) throw std::invalid_argument("SBFunction terms must be cosets of finite level");
  if (!coeff.is_zero()) {
    terms_.push_back({c, std::nullopt, coeff});
    check_cap(terms_.size());
  }
  return *this;
}

SBFunction& SBFunction::add_twisted(const KCoset& c, const KElement& b, int psi_d, const CycRat& coeff) {
  if (c.is_point()) throw std::invalid_argument("SBFunction terms must be cosets of finite level");
  if (b.is_zero()) return add(c, coeff);
  if (psi_d_ && *psi_d_ != psi_d) throw std::invalid_argument("mixed additive characters in twists");
  psi_d_ = psi_d;
  if (!coeff.is_zero()) {
    terms_.push_back({c, b, coeff});
    check_cap(terms_.size());
  }
  return *this;
}

SBFunction& SBFunction::add(const SBFunction& o, const CycRat& scale) {
  if (o.p_ != p_) throw std::invalid_argument("mismatched residue characteristic");
  for (const auto& t : o.terms_) {
    if (t.twist) add_twisted(t.coset, *t.twist, *o.psi_d_, t.coeff * scale);
    else add(t.coset, t.coeff * scale);
  }
  return *this;
}

SBFunction SBFunction::operator-() const { return CycRat(-1) * *this; }

SBFunction operator*(const CycRat& s, const SBFunction& f) {
  SBFunction r(f.p_, f.mu_);
  r.add(f, s);
  return r;
}

CycRat SBFunction::operator()(const KElement& x) const {
  CycRat v;
  for (const auto& t : terms_) {
    if (!t.coset.contains(x)) continue;
    if (t.twist) v += t.coeff * AdditiveCharacter{p_, *psi_d_}(*t.twist * x);
    else v += t.coeff;
  }
  return v;
}

bool SBFunction::is_zero() const { return normalize(*this).terms_.empty(); }

bool operator==(const SBFunction& a, const SBFunction& b) {
  SBFunction na = normalize(a), nb = normalize(b);
  if (na.terms_.size() != nb.terms_.size()) return false;
  for (size_t i = 0; i < na.terms_.size(); ++i) {
    if (!(na.terms_[i].coset == nb.terms_[i].coset) || na.terms_[i].coeff != nb.terms_[i].coeff) return false;
  }
  return true;
}

int SBFunction::min_level() const {
  int m = kInfValuation;
  for (const auto& t : terms_) m = std::min(m, t.coset.level);
  return m;
}

int SBFunction::max_level() const {
  int m = -kInfValuation;
  for (const auto& t : terms_) m = std::max(m, t.coset.level);
  return m;
}

std::string SBFunction::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    CycRat c = t.coeff;
    bool neg = c.is_rational() && c.to_rational() < 0;
    if (neg) c = -c;
    std::string cs = c.is_compound() ? "(" + c.str() + ")" : c.str();
    std::string term = cs + "*" + t.coset.str();
    if (t.twist) term += "*psi(" + t.twist->str() + ")";
    if (out.empty()) out = (neg ? "-" : "") + term;
    else out += (neg ? " - " : " + ") + term;
  }
  return out;
}

std::ostream& operator<<(std::ostream& os, const SBFunction& f) { return os << f.str(); }

SBFunction SBFunction::parse(int p, const std::string& s, Rational mu, int psi_d) {
  SBFunction f(p, std::move(mu));
  std::string src = s;
  auto trim = [](std::string x) {
    size_t a = x.find_first_not_of(" \t");
    size_t b = x.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : x.substr(a, b - a + 1);
  };
  if (trim(src) == "0") return f;
  // Split into signed terms at top level; a term ends after ']' or ')'.
  std::vector<std::pair<int, std::string>> terms;
  int depth = 0;
  int sign = 1;
  std::string cur;
  char last = 0;
  for (char ch : src) {
    if (ch == '[' || ch == '(') ++depth;
    if (ch == ']' || ch == ')') --depth;
    if (depth == 0 && (ch == '+' || ch == '-') && (last == ']' || last == ')')) {
      terms.emplace_back(sign, trim(cur));
      cur.clear();
      sign = ch == '+' ? 1 : -1;
      last = ch;
      continue;
    }
    cur += ch;
    if (!std::isspace(static_cast<unsigned char>(ch))) last = ch;
  }
  terms.emplace_back(sign, trim(cur));
  static const std::regex level_re(R"(^(?:u(?:\^(-?\d+))?\*)?O$)");
  for (auto& [sg, t] : terms) {
    if (!t.empty() && t[0] == '-') {
      sg = -sg;
      t = trim(t.substr(1));
    }
    size_t lb = t.find('[');
    size_t rb = t.find(']');
    if (lb == std::string::npos || rb == std::string::npos) throw std::invalid_argument("SBFunction parse: missing coset in \"" + t + "\"");
    std::string cs = trim(t.substr(0, lb));
    if (!cs.empty() && cs.back() == '*') cs = trim(cs.substr(0, cs.size() - 1));
    CycRat coeff = cs.empty() ? CycRat(1) : CycRat::parse(cs);
    std::string inner = trim(t.substr(lb + 1, rb - lb - 1));
    std::string rep_s, lvl_s;
    size_t plus = inner.rfind('+');
    std::smatch m;
    if (std::regex_match(inner, m, level_re)) {
      lvl_s = inner;
    } else if (plus != std::string::npos) {
      rep_s = trim(inner.substr(0, plus));
      lvl_s = trim(inner.substr(plus + 1));
    } else {
      throw std::invalid_argument("SBFunction parse: bad coset \"" + inner + "\"");
    }
    if (!std::regex_match(lvl_s, m, level_re)) throw std::invalid_argument("SBFunction parse: bad level \"" + lvl_s + "\"");
    int level = 0;
    if (lvl_s != "O") level = m[1].matched ? std::stoi(m[1].str()) : 1;
    KElement rep = rep_s.empty() ? KElement(p) : KElement::parse(p, rep_s);
    std::string rest = trim(t.substr(rb + 1));
    CycRat c = sg > 0 ? coeff : -coeff;
    if (rest.empty()) {
      f.add(KCoset(rep, level), c);
    } else {
      static const std::regex psi_re(R"(^\*\s*psi\((.*)\)$)");
      if (!std::regex_match(rest, m, psi_re)) throw std::invalid_argument("SBFunction parse: bad twist \"" + rest + "\"");
      f.add_twisted(KCoset(rep, level), KElement::parse(p, m[1].str()), psi_d, c);
    }
  }
  return f;
}

// ---------------------------------------------------------------- operations

SBFunction normalize(const SBFunction& g) {
  const int p = g.p();
  std::vector<std::pair<KCoset, CycRat>> plain;
  for (const auto& t : g.terms()) {
    if (!t.twist) {
      plain.emplace_back(t.coset, t.coeff);
      continue;
    }
    AdditiveCharacter psi{p, *g.twist_conductor()};
    const KElement& b = *t.twist;
    int L = psi.d - b.valuation();
    if (t.coset.level >= L) {
      plain.emplace_back(t.coset, t.coeff * psi(b * t.coset.rep));
      continue;
    }
    for (const auto& c : subcosets(t.coset, L)) {
      plain.emplace_back(c, t.coeff * psi(b * c.rep));
      check_cap(plain.size());
    }
  }
  SBFunction out(p, g.mu());
  if (plain.empty()) return out;
  int base = kInfValuation;
  for (const auto& [c, v] : plain) base = std::min(base, c.level);
  CosetTrie trie(p, base);
  for (const auto& [c, v] : plain) trie.insert(c, v);
  auto pieces = trie.canonical();
  merge_siblings(pieces, p);
  std::sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [c, v] : pieces) out.add(c, v);
  return out;
}

CycRat haar_integral(const SBFunction& g) {
  CycRat s;
  const int p = g.p();
  for (const auto& t : g.terms()) {
    CycRat m = CycRat(g.mu() * q_pow(p, -t.coset.level));
    if (!t.twist) {
      s += t.coeff * m;
      continue;
    }
    AdditiveCharacter psi{p, *g.twist_conductor()};
    if (t.coset.level + t.twist->valuation() >= psi.d) s += t.coeff * m * psi(*t.twist * t.coset.rep);
  }
  return s;
}

SBFunction fourier(const SBFunction& g, const AdditiveCharacter& psi) {
  if (g.twist_conductor() && *g.twist_conductor() != psi.d)
    throw std::invalid_argument("fourier: twist uses a different additive character");
  SBFunction out(g.p(), g.mu());
  for (const auto& t : g.terms()) {
    const KElement& a = t.coset.rep;
    int n = t.coset.level;
    KElement b = t.twist ? *t.twist : KElement(g.p());
    CycRat c = t.coeff * CycRat(g.mu() * q_pow(g.p(), -n)) * psi(b * a);
    out.add_twisted(KCoset(-b, psi.d - n), a, psi.d, c);
  }
  return normalize(out);
}

SBFunction w_operator(const SBFunction& g0, const KElement& pi) {
  if (pi.valuation() != 1) throw std::invalid_argument("not a uniformizer");
  SBFunction g = g0.is_plain() ? g0 : normalize(g0);
  SBFunction out(g.p(), g.mu());
  for (const auto& t : g.terms()) {
    const KElement& a = t.coset.rep;
    int n = t.coset.level;
    if (a.is_zero()) {
      out.add(KCoset(a, 2 * n), t.coeff);
      continue;
    }
    int v = a.valuation();
    out.add(KCoset(pi_power_times(pi, v, a, n + v), n + v), t.coeff);
    out.add(KCoset(pi_power_times(pi, v + 1, a, n + v + 1), n + v + 1), t.coeff);
  }
  return normalize(out);
}

SBFunction nabla_compose(const SBFunction& g0, const KElement& pi) {
  if (pi.valuation() != 1) throw std::invalid_argument("not a uniformizer");
  SBFunction g = g0.is_plain() ? g0 : normalize(g0);
  SBFunction out(g.p(), g.mu());
  for (const auto& t : g.terms()) {
    const KElement& a = t.coset.rep;
    int n = t.coset.level;
    if (a.is_zero()) {
      out.add(KCoset(a, ceil_half(n)), t.coeff);
      continue;
    }
    int v = a.valuation();
    if (v % 2 != 0) continue;
    out.add(KCoset(pi_power_times(pi, -v / 2, a, n - v / 2), n - v / 2), t.coeff);
  }
  return normalize(out);
}

SBFunction star_transform(const SBFunction& g, const AdditiveCharacter& psi, const KElement& pi) {
  return nabla_compose(fourier(w_operator(g, pi), psi), pi);
}

SBFunction dilate(const SBFunction& g, const KElement& alpha) {
  if (alpha.is_zero()) throw std::invalid_argument("dilate: alpha = 0");
  SBFunction out(g.p(), g.mu());
  int wa = alpha.valuation();
  for (const auto& t : g.terms()) {
    const KElement& a = t.coset.rep;
    int L = t.coset.level - wa;
    KElement rep(g.p());
    if (!a.is_zero()) rep = (alpha.inverse(L - a.valuation()) * a).truncated(L);
    if (t.twist) out.add_twisted(KCoset(rep, L), *t.twist * alpha, *g.twist_conductor(), t.coeff);
    else out.add(KCoset(rep, L), t.coeff);
  }
  return out;
}

SBFunction translate(const SBFunction& g, const KElement& tau) {
  SBFunction out(g.p(), g.mu());
  for (const auto& t : g.terms()) {
    KCoset c(t.coset.rep - tau, t.coset.level);
    if (t.twist) {
      AdditiveCharacter psi{g.p(), *g.twist_conductor()};
      out.add_twisted(c, *t.twist, psi.d, t.coeff * psi(*t.twist * tau));
    } else {
      out.add(c, t.coeff);
    }
  }
  return out;
}

SBFunction lift_finite(const std::vector<CycRat>& h, int r, int p, Rational mu) {
  if (static_cast<int>(h.size()) != p) throw std::invalid_argument("lift_finite: h must have q values");
  SBFunction f(p, std::move(mu));
  for (int xi = 0; xi < p; ++xi) f.add(KCoset(KElement::monomial(p, xi, r), r + 1), h[xi]);
  return normalize(f);
}

SBFunction twist(const SBFunction& g, const KElement& b, int psi_d) {
  SBFunction out(g.p(), g.mu());
  for (const auto& t : g.terms()) {
    if (t.twist) {
      if (*g.twist_conductor() != psi_d) throw std::invalid_argument("twist: mixed additive characters");
      out.add_twisted(t.coset, *t.twist + b, psi_d, t.coeff);
    } else {
      out.add_twisted(t.coset, b, psi_d, t.coeff);
    }
  }
  return out;
}

std::vector<KCoset> common_refinement(const std::vector<KCoset>& cosets) {
  if (cosets.empty()) return {};
  int base = kInfValuation;
  for (const auto& c : cosets) base = std::min(base, c.level);
  CosetTrie trie(cosets.front().rep.p(), base);
  for (const auto& c : cosets) trie.insert(c, CycRat(1));
  return trie.cells();
}

}  // namespace sbz
