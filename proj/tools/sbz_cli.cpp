// sbz: batch verification driver and epsilon-factor tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "sbz/archfe.hpp"
#include "sbz/lift2d.hpp"
#include "sbz/setring.hpp"
#include "sbz/zeta2d.hpp"

using namespace sbz;
using json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kSuites = {"schwartz-oracle", "zeta1d-epsilon", "identity-A", "double-star", "lift2d-invariance",
                                          "measure",         "FE2",            "rho2",       "archfe"};

struct RunConfig {
  int q = 3;
  int p = 0;  // 0: same as q
  std::string mu_text = "1";
  Rational mu = 1;
  int d = 0;
  int rmax = 2;
  int level = 2;
  double tol = 1e-9;
  std::string suite = "all";
  unsigned seed = 12345;
  std::string out_dir = "reports";
  std::string format = "both";
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_prime(int n) {
  if (n < 2) return false;
  for (int k = 2; k * k <= n; ++k)
    if (n % k == 0) return false;
  return true;
}

void validate(RunConfig& c) {
  if (!is_prime(c.q)) throw ConfigError("q must be prime");
  if (c.p == 0) c.p = c.q;
  if (c.p != c.q) throw ConfigError("p must equal q: only prime residue fields are supported");
  try {
    c.mu = Rational(c.mu_text);
    c.mu.canonicalize();
  } catch (const std::invalid_argument&) {
    throw ConfigError("mu must be a rational such as 3/2");
  }
  if (c.mu <= 0) throw ConfigError("mu must be positive");
  if (c.d < -2 || c.d > 4) throw ConfigError("d must lie in [-2, 4]");
  if (c.rmax < 0 || c.rmax > 3) throw ConfigError("rmax must lie in [0, 3]");
  if (c.level < 0 || c.level > 4) throw ConfigError("level must lie in [0, 4]");
  if (!(c.tol > 0)) throw ConfigError("tol must be positive");
  if (c.format != "json" && c.format != "csv" && c.format != "both") throw ConfigError("format must be json, csv or both");
}

std::vector<std::string> selected_suites(const std::string& s) {
  if (s == "all") return kSuites;
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string name; std::getline(ss, name, ',');) {
    if (std::find(kSuites.begin(), kSuites.end(), name) == kSuites.end()) throw ConfigError("unknown suite: " + name);
    out.push_back(name);
  }
  return out;
}

struct Row {
  std::string suite;
  std::string case_id;
  json inputs;
  std::string expected;
  std::string got;
  bool pass = false;
};

using Case = std::function<Row()>;

template <class T>
std::string show(const T& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

std::string show(const KCoset& c) { return c.str(); }
std::string show(bool b) { return b ? "true" : "false"; }

Row make_row(std::string suite, std::string id, json inputs, const std::string& expected, const std::string& got) {
  return {std::move(suite), std::move(id), std::move(inputs), expected, got, expected == got};
}

SBFunction ind(const KCoset& c, const Rational& mu) { return SBFunction::indicator(c, mu); }

std::vector<QuasiCharacter> characters(int p, int rmax) {
  std::vector<QuasiCharacter> out;
  for (int r = 0; r <= rmax; ++r)
    for (const auto& w : enumerate_characters(r, p, p))
      if (w.conductor() == r) out.push_back(w);
  return out;
}

std::string char_label(const QuasiCharacter& w, int i) { return w.label().empty() ? "w" + std::to_string(i) : w.label(); }

/// a*T^b, with a parenthesized when it has several terms.
std::string exponential_str(const ExponentialType& e) {
  std::string a = e.a.is_compound() ? "(" + e.a.str() + ")" : e.a.str();
  return a + "*T^" + std::to_string(e.b);
}

std::string exponential_str(const ZetaValue& v) {
  auto e = is_exponential_type(v);
  return e ? exponential_str(*e) : "not exponential: " + v.str();
}

// ---------------------------------------------------------------- suites

void schwartz_oracle(const RunConfig& c, std::vector<Case>& out) {
  const int p = c.q;
  for (int r = -2; r <= 2; ++r) {
    json in{{"q", p}, {"d", c.d}, {"r", r}, {"mu", c.mu_text}};
    out.push_back([=] {
      SBFunction got = fourier(ind(KCoset(KElement(p), r), c.mu), AdditiveCharacter{p, c.d});
      SBFunction want = SBFunction::indicator(KCoset(KElement(p), c.d - r), c.mu, CycRat(c.mu * oracle::qpow(p, -r)));
      return Row{"schwartz-oracle", "fourier/r=" + std::to_string(r), in, want.str(), got.str(), got == want};
    });
    out.push_back([=] {
      SBFunction got = star_transform(ind(KCoset(KElement(p), r), c.mu), AdditiveCharacter{p, c.d}, KElement::uniformizer(p));
      SBFunction want = SBFunction::indicator(KCoset(KElement(p), oracle::ceil_half(c.d) - r), c.mu,
                                              CycRat(c.mu * oracle::qpow(p, -2 * r)));
      return Row{"schwartz-oracle", "star/r=" + std::to_string(r), in, want.str(), got.str(), got == want};
    });
  }
  out.push_back([=] {
    AdditiveCharacter psi{p, 0};
    KElement pi = KElement::uniformizer(p);
    SBFunction h = ind(KCoset(KElement(p, 1), 2), 1);
    SBFunction got = star_transform(star_transform(h, psi, pi), psi, pi);
    SBFunction want = oracle::h_double_star(p);
    return Row{"schwartz-oracle", "double-star-example", json{{"q", p}, {"d", 0}, {"h", h.str()}}, want.str(), got.str(),
               got == want};
  });
}

void zeta1d_epsilon(const RunConfig& c, std::vector<Case>& out) {
  const int p = c.q;
  auto chars = characters(p, c.rmax);
  for (size_t i = 0; i < chars.size(); ++i) {
    QuasiCharacter w = chars[i];
    std::string label = char_label(w, static_cast<int>(i));
    json in{{"q", p}, {"d", c.d}, {"r", w.conductor()}, {"omega", label}, {"mu", c.mu_text}};
    out.push_back([=] {
      AdditiveCharacter psi{p, c.d};
      KElement pi = KElement::uniformizer(p);
      std::string got = exponential_str(epsilon_star(w, psi, pi, c.mu));
      std::string want = exponential_str(oracle::epsilon_closed_form(w, psi, pi, c.mu));
      return make_row("zeta1d-epsilon", "eps/" + label, in, want, got);
    });
  }
}

void identity_a(const RunConfig& c, std::vector<Case>& out) {
  const int p = c.q;
  auto chars = characters(p, c.rmax);
  auto basis = oracle::coset_basis(p, 0, c.level);
  for (size_t i = 0; i < chars.size(); ++i)
    for (const auto& coset : basis) {
      QuasiCharacter w = chars[i];
      std::string label = char_label(w, static_cast<int>(i));
      json in{{"q", p}, {"d", c.d}, {"omega", label}, {"f", coset.str()}, {"mu", c.mu_text}};
      out.push_back([=] {
        bool ok = check_identity_A(ind(coset, c.mu), w, AdditiveCharacter{p, c.d}, KElement::uniformizer(p));
        return make_row("identity-A", label + "/" + coset.str(), in, "true", show(ok));
      });
    }
}

void double_star(const RunConfig& c, std::vector<Case>& out) {
  const int p = c.q;
  for (const auto& coset : oracle::coset_basis(p, 0, c.level)) {
    json in{{"q", p}, {"d", c.d}, {"d1", c.d + 1}, {"f", coset.str()}, {"pi2", "u + u^2"}, {"mu", c.mu_text}};
    out.push_back([=] {
      auto r = double_star_invariance(ind(coset, c.mu), KElement::uniformizer(p), KElement::parse(p, "u + u^2"),
                                      AdditiveCharacter{p, c.d}, AdditiveCharacter{p, c.d + 1});
      std::string got = "prime_independent=" + show(r.prime_independent) + ",automorphism=" + show(r.automorphism);
      return make_row("double-star", coset.str(), in, "prime_independent=true,automorphism=true", got);
    });
  }
}

FElement random_f(std::mt19937& rng, int p, int lo, int hi) {
  std::uniform_int_distribution<int> dg(0, p - 1);
  FElement x(p);
  for (int k = lo; k <= hi; ++k) {
    if (rng() % 2 == 0) continue;
    KElement a(p);
    for (int i = -1; i <= 1; ++i) a = a + KElement::monomial(p, dg(rng), i);
    x = x + FElement::monomial(a, k);
  }
  return x;
}

LiftedFn random_lifted(std::mt19937& rng, int p, const Rational& mu) {
  std::uniform_int_distribution<int> gm(-1, 1), lv(-1, 2), dg(0, p - 1), cf(1, 3);
  LiftedFn f(p, mu, 0);
  for (int i = 0; i < 2; ++i) {
    int L = lv(rng);
    KElement rep(p);
    for (int k = -1; k < L; ++k) rep = rep + KElement::monomial(p, dg(rng), k);
    std::optional<FElement> b;
    if (rng() % 2) b = random_f(rng, p, -2, 1);
    f.add(ResidueFn(SBFunction::indicator(KCoset(rep, L), mu)), random_f(rng, p, -1, 2), gm(rng), ZetaValue(CycRat(cf(rng))), b);
  }
  return f;
}

void lift2d_invariance(const RunConfig& c, std::vector<Case>& out) {
  const int p = c.q;
  std::mt19937 rng(c.seed);
  for (int it = 0; it < 20; ++it) {
    LiftedFn f = random_lifted(rng, p, c.mu);
    FElement tau = random_f(rng, p, -1, 2);
    std::uniform_int_distribution<int> cf(1, p - 1), k(-1, 1), nu(-1, 1);
    int v = nu(rng);
    FElement alpha = FElement::monomial(KElement::monomial(p, cf(rng), k(rng)), v) + random_f(rng, p, v + 1, v + 2);
    json in{{"q", p}, {"seed", c.seed}, {"f", f.str()}};
    out.push_back([=] {
      json i2 = in;
      i2["tau"] = tau.str();
      return make_row("lift2d-invariance", "translate/" + std::to_string(it), i2, integrate_F(f).str(),
                      integrate_F(translate_F(f, tau)).str());
    });
    out.push_back([=] {
      json i2 = in;
      i2["alpha"] = alpha.str();
      return make_row("lift2d-invariance", "scale/" + std::to_string(it), i2, (abs_F(alpha).inverse() * integrate_F(f)).str(),
                      integrate_F(scale_F(f, alpha)).str());
    });
  }
}

void measure(const RunConfig& c, std::vector<Case>& out) {
  const int p = c.q;
  Rational q(p);
  for (int gamma = -1; gamma <= 1; ++gamma) {
    json in{{"q", p}, {"gamma", gamma}, {"mu", c.mu_text}};
    out.push_back([=] {
      KSet S = KSet::atom(KCoset(KElement(p, 1), 1));
      ZetaValue got = measure_F(FSet::atom({FElement::t(p, -2), S, gamma}), c.mu);
      return make_row("measure", "distinguished/gamma=" + std::to_string(gamma), in,
                      ZetaValue::monomial(p, CycRat(c.mu / q), 0, gamma).str(), got.str());
    });
    out.push_back([=] {
      return make_row("measure", "ideal/gamma=" + std::to_string(gamma), in, ZetaValue().str(),
                      measure_F(FSet::atom(null_atom(p, gamma)), c.mu).str());
    });
  }
  out.push_back([=] {
    FSet complement = FSet::atom(null_atom(p, 0)) - FSet::atom({FElement(p), KSet::atom(KCoset(KElement(p, 1), 1)), 0});
    return make_row("measure", "complement", json{{"q", p}, {"mu", c.mu_text}}, ZetaValue(CycRat(-c.mu / q)).str(),
                    measure_F(complement, c.mu).str());
  });
  std::mt19937 rng(c.seed);
  for (int it = 0; it < 50; ++it) {
    auto random_set = [&]() {
      std::uniform_int_distribution<int> gm(-1, 1);
      oracle::SetExpr<DistinguishedInstance> e;
      for (int i = 0; i < 3; ++i)
        e.atoms.push_back(DistinguishedSetF{random_f(rng, p, -1, 1), KSet::atom(oracle::random_coset(rng, p)), gm(rng)});
      e.root = e.grow(rng, 2);
      return e.eval();
    };
    FSet x = random_set();
    FSet y = random_set() - x;
    out.push_back([=] {
      return make_row("measure", "additivity/" + std::to_string(it), json{{"q", p}, {"seed", c.seed}, {"pair", it}},
                      (measure_F(x, c.mu) + measure_F(y, c.mu)).str(), measure_F(x | y, c.mu).str());
    });
  }
}

void fe2(const RunConfig& c, std::vector<Case>& out) {
  const int p = c.q;
  auto chars = characters(p, c.rmax);
  auto basis = oracle::coset_basis(p, 0, std::min(c.level, 2));
  std::mt19937 rng(c.seed);
  for (size_t i = 0; i < chars.size(); ++i)
    for (size_t j = 0; j < chars.size(); ++j) {
      ChiCharacter chi{chars[i], chars[j]};
      std::string label = char_label(chars[i], static_cast<int>(i)) + "," + char_label(chars[j], static_cast<int>(j));
      for (int k = 0; k < 4; ++k) {
        KCoset a = basis[rng() % basis.size()], b = basis[rng() % basis.size()];
        json in{{"q", p}, {"d", c.d}, {"chi", label}, {"f", a.str()}, {"g", b.str()}, {"mu", c.mu_text}};
        out.push_back([=] {
          SBTensor f{{ind(a, c.mu), ind(b, c.mu), CycRat(1)}};
          bool ok = verify_FE2(f, chi, AdditiveCharacter{p, c.d}, KElement::uniformizer(p));
          return make_row("FE2", "(" + label + ")/" + a.str() + "x" + b.str(), in, "true", show(ok));
        });
      }
    }
}

void rho2(const RunConfig& c, std::vector<Case>& out) {
  const int p = c.q;
  Rational q(p);
  const std::vector<std::pair<std::string, SBFunction>> gs = {
      {"Char(O)", ind(KCoset(KElement(p), 0), c.mu)},
      {"Char(O^x)", ind(KCoset(KElement(p), 0), c.mu) - ind(KCoset(KElement(p), 1), c.mu)},
      {"Char(1+piO)", ind(KCoset(KElement(p, 1), 1), c.mu)}};
  for (const auto& [name, g] : gs)
    for (const CycRat& wp : {CycRat(1), CycRat(1 / q), CycRat(Rational(1, 2))}) {
      json in{{"q", p}, {"g", name}, {"omega_pi", wp.str()}, {"mu", c.mu_text}};
      out.push_back([=, g = g, name = name] {
        Rho2Check r = zeta_rho2(g, QuasiCharacter::unramified(p, wp));
        return make_row("rho2", name + "/omega(pi)=" + wp.str(), in, r.rhs.str(), r.lhs.str());
      });
    }
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

void archfe(const RunConfig& c, std::vector<Case>& out) {
  using namespace sbz::arch;
  const double tol = c.tol;
  // the reported tolerance is 1000 times the quadrature target
  const double accept = 1e3 * tol;
  for (int i = 0; i < 20; ++i) {
    double y = -1.0 + 0.2 * i;
    out.push_back([=] {
      double got = star_numeric(RealTestFunction::gaussian(), y, tol).value.real();
      double want = oracle::gaussian_star(y);
      return Row{"archfe", "star/y=" + num(y), json{{"y", y}, {"tol", accept}}, num(want), num(got), std::abs(got - want) < accept};
    });
  }
  for (double s : {2.0, 4.0, 6.0}) {
    out.push_back([=] {
      double got = zeta_numeric(RealTestFunction::gaussian_nabla(), RealCharacter::trivial, s, tol).value.real();
      double want = oracle::zeta_gaussian_nabla(s);
      return Row{"archfe", "zeta/s=" + num(s), json{{"s", s}, {"tol", accept}}, num(want), num(got), std::abs(got - want) < accept};
    });
  }
  for (cplx s : {cplx(1, 0), cplx(1, 0.3)}) {
    out.push_back([=] {
      ProductCheck pc = fe_product_check(RealTestFunction::gaussian_nabla(), RealTestFunction::gaussian(), RealCharacter::trivial, s, tol);
      std::string id = "product/s=" + num(s.real()) + "+" + num(s.imag()) + "i";
      return Row{"archfe", id, json{{"s", {s.real(), s.imag()}}, {"tol", accept}}, num(pc.rhs.real()) + "+" + num(pc.rhs.imag()) + "i",
                 num(pc.lhs.real()) + "+" + num(pc.lhs.imag()) + "i", std::abs(pc.lhs - pc.rhs) < accept};
    });
  }
}

// ---------------------------------------------------------------- runner

std::vector<Row> run_cases(const std::vector<Case>& cases, const std::string& suite) {
  std::vector<Row> rows(cases.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i; (i = next++) < cases.size();) {
      try {
        rows[i] = cases[i]();
      } catch (const std::exception& e) {
        rows[i] = Row{suite, "case-" + std::to_string(i), json::object(), "no exception", std::string("error: ") + e.what(), false};
      }
    }
  };
  unsigned n = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8));
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return rows;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

void write_reports(const std::vector<Row>& rows, const RunConfig& c) {
  std::filesystem::create_directories(c.out_dir);
  if (c.format != "csv") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"suite", r.suite}, {"case_id", r.case_id}, {"inputs", r.inputs}, {"expected", r.expected}, {"got", r.got}, {"pass", r.pass}});
    std::ofstream(std::filesystem::path(c.out_dir) / "report.json") << arr.dump(2) << "\n";
  }
  if (c.format != "json") {
    std::ofstream os(std::filesystem::path(c.out_dir) / "report.csv");
    os << "suite,case_id,inputs,expected,got,pass\n";
    for (const auto& r : rows)
      os << csv_field(r.suite) << "," << csv_field(r.case_id) << "," << csv_field(r.inputs.dump()) << "," << csv_field(r.expected) << ","
         << csv_field(r.got) << "," << (r.pass ? "true" : "false") << "\n";
  }
}

int run_verify(RunConfig c) {
  validate(c);
  const std::map<std::string, void (*)(const RunConfig&, std::vector<Case>&)> builders = {
      {"schwartz-oracle", schwartz_oracle}, {"zeta1d-epsilon", zeta1d_epsilon}, {"identity-A", identity_a},
      {"double-star", double_star},         {"lift2d-invariance", lift2d_invariance}, {"measure", measure},
      {"FE2", fe2},                         {"rho2", rho2},                   {"archfe", archfe}};
  std::vector<Row> all;
  int failed_suites = 0;
  for (const auto& name : selected_suites(c.suite)) {
    std::vector<Case> cases;
    builders.at(name)(c, cases);
    auto rows = run_cases(cases, name);
    long bad = std::count_if(rows.begin(), rows.end(), [](const Row& r) { return !r.pass; });
    std::cout << (bad ? "FAIL " : "PASS ") << name << " (" << rows.size() - bad << "/" << rows.size() << ")\n";
    for (const auto& r : rows)
      if (!r.pass) std::cout << "  " << r.case_id << ": expected " << r.expected << ", got " << r.got << "\n";
    failed_suites += bad > 0;
    all.insert(all.end(), rows.begin(), rows.end());
  }
  write_reports(all, c);
  return failed_suites ? 1 : 0;
}

int run_epsilon_table(RunConfig c) {
  validate(c);
  const int p = c.q;
  AdditiveCharacter psi{p, c.d};
  KElement pi = KElement::uniformizer(p);
  auto chars = characters(p, c.rmax);
  std::cout << "q,d,r,omega,epsilon,exponential_type,closed_form\n";
  bool ok = true;
  for (size_t i = 0; i < chars.size(); ++i) {
    ZetaValue eps = epsilon_star(chars[i], psi, pi, c.mu);
    auto e = is_exponential_type(eps);
    bool match = eps == oracle::epsilon_closed_form(chars[i], psi, pi, c.mu);
    ok = ok && e && match;
    std::string cell = e ? exponential_str(*e) : eps.str();
    std::cout << p << "," << c.d << "," << chars[i].conductor() << "," << csv_field(char_label(chars[i], static_cast<int>(i))) << ","
              << csv_field(cell) << "," << (e ? "true" : "false") << "," << (match ? "true" : "false") << "\n";
  }
  return ok ? 0 : 1;
}

void add_common(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--q", c.q, "residue field size (prime)");
  cmd->add_option("--p", c.p, "residue characteristic (defaults to q)");
  cmd->add_option("--mu", c.mu_text, "Haar measure of O, a positive rational");
  cmd->add_option("--d", c.d, "conductor of the additive character");
  cmd->add_option("--rmax", c.rmax, "largest character conductor");
  cmd->add_option("--level", c.level, "largest coset level in basis sweeps");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification driver for zeta integrals on local fields"};
  app.require_subcommand(1);
  RunConfig vc, ec;
  auto* verify = app.add_subcommand("verify", "run verification suites and write reports");
  add_common(verify, vc);
  verify->add_option("--tol", vc.tol, "quadrature tolerance for archfe");
  verify->add_option("--suite", vc.suite, "all, or a comma-separated list of suites");
  verify->add_option("--seed", vc.seed, "seed for randomized cases");
  verify->add_option("--out-dir", vc.out_dir, "report directory");
  verify->add_option("--format", vc.format, "json, csv or both");
  auto* table = app.add_subcommand("epsilon-table", "print epsilon factors as CSV");
  add_common(table, ec);
  CLI11_PARSE(app, argc, argv);
  try {
    if (*verify) return run_verify(vc);
    return run_epsilon_table(ec);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
