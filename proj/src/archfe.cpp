#include "sbz/archfe.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sbz::arch {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxRadius = 1e6;
constexpr int kMaxPieces = 4000;
constexpr int kMaxDepth = 30;

/// Bound for the integral of x^{sigma-1} exp(-c x^k) over [R, inf), from the
/// log-derivative at R.
double exp_tail(double R, double sigma, double c, int k) {
  double kappa = k * c * std::pow(R, k - 1) - std::max(sigma - 1, 0.0) / R;
  if (kappa <= 0) return kInf;
  return std::pow(R, sigma - 1) * std::exp(-c * std::pow(R, k)) / kappa;
}

/// Bisection on the 15-point Gauss-Kronrod rule until the estimated error is
/// below abs_tol.
template <class F>
Quadrature integrate(const F& f, double a, double b, double abs_tol, int depth = 0) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0;
  cplx v = gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0, &err);
  if (err <= abs_tol || depth >= kMaxDepth) return {v, err};
  double m = (a + b) / 2;
  Quadrature l = integrate(f, a, m, abs_tol / 2, depth + 1);
  Quadrature r = integrate(f, m, b, abs_tol / 2, depth + 1);
  return {l.value + r.value, l.error + r.error};
}

/// Integral over consecutive breakpoints, with total error target abs_tol.
template <class F>
Quadrature integrate_pieces(const F& f, const std::vector<double>& cuts, double abs_tol) {
  Quadrature total{0.0, 0.0};
  double piece_tol = abs_tol / static_cast<double>(cuts.size());
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    Quadrature q = integrate(f, cuts[i], cuts[i + 1], piece_tol);
    total.value += q.value;
    total.error += q.error;
  }
  return total;
}

/// Smallest R = 2^k >= 1 whose tail bound is below tol / 10.
double tail_radius(const RealTestFunction& f, double sigma, double weight, double tol) {
  for (double R = 1; R <= kMaxRadius; R *= 2)
    if (weight * f.tail_bound(R, sigma) < tol / 10) return R;
  throw std::runtime_error("non-convergent tail");
}

}  // namespace

RealTestFunction RealTestFunction::scaled(double a) const {
  RealTestFunction g = *this;
  g.alpha *= a;
  return g;
}

cplx RealTestFunction::operator()(double x) const {
  double z = alpha * x;
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::gaussian: return amp * std::exp(-kPi * z * z);
    case Kind::gaussian_nabla: return amp * std::exp(-kPi * z * z * z * z);
    case Kind::rational_decay: return amp * 2 / (kPi * (1 + 4 * z * z * z * z));
  }
  return 0.0;
}

double RealTestFunction::tail_bound(double R, double sigma) const {
  double a = std::abs(alpha), m = std::abs(amp);
  switch (kind) {
    case Kind::zero: return 0;
    case Kind::gaussian: return m * exp_tail(R, sigma, kPi * a * a, 2);
    case Kind::gaussian_nabla: return m * exp_tail(R, sigma, kPi * a * a * a * a, 4);
    case Kind::rational_decay:
      if (sigma >= 4) return kInf;
      return m / (2 * kPi * a * a * a * a) * std::pow(R, sigma - 4) / (4 - sigma);
  }
  return kInf;
}

RealTestFunction RealTestFunction::star() const {
  RealTestFunction g = *this;
  switch (kind) {
    case Kind::zero: return g;
    case Kind::gaussian: g.kind = Kind::rational_decay; break;
    case Kind::gaussian_nabla: break;
    case Kind::rational_decay: throw std::invalid_argument("no closed-form star transform for " + label());
  }
  g.alpha = 1 / alpha;
  g.amp = amp / (alpha * alpha);
  return g;
}

std::string RealTestFunction::label() const {
  std::string base;
  switch (kind) {
    case Kind::zero: return "zero";
    case Kind::gaussian: base = "gaussian"; break;
    case Kind::gaussian_nabla: base = "gaussian_nabla"; break;
    case Kind::rational_decay: base = "rational_decay"; break;
  }
  if (alpha != 1) base += "(" + std::to_string(alpha) + "x)";
  if (amp != 1) base = std::to_string(amp) + "*" + base;
  return base;
}

Quadrature star_numeric(const RealTestFunction& f, double y, double tol) {
  if (f.kind == RealTestFunction::Kind::zero) return {0.0, 0.0};
  double R = tail_radius(f, 2, 4, tol);
  double w = y * std::abs(y);
  auto integrand = [&](double x) { return 2.0 * f(x) * std::exp(cplx(0, 2 * kPi * w * x * std::abs(x))) * std::abs(x); };
  // cuts where the phase 2 pi y^2 x^2 passes a multiple of pi / 2
  std::vector<double> cuts{0};
  if (w != 0) {
    double step = 1 / (4 * std::abs(w));
    int n = static_cast<int>(std::min<double>(R * R / step, kMaxPieces));
    for (int k = 1; k < n; ++k) cuts.push_back(std::sqrt(R * R * k / n));
  }
  cuts.push_back(R);
  Quadrature pos = integrate_pieces(integrand, cuts, tol / 4);
  Quadrature neg = integrate_pieces([&](double x) { return integrand(-x); }, cuts, tol / 4);
  double tail = 4 * f.tail_bound(R, 2);
  return {pos.value + neg.value, pos.error + neg.error + tail};
}

Quadrature zeta_numeric(const RealTestFunction& f, RealCharacter omega, cplx s, double tol) {
  double sigma = s.real();
  if (sigma <= 0) throw std::domain_error("zeta_numeric: Re s must be positive");
  if (f.kind == RealTestFunction::Kind::zero) return {0.0, 0.0};
  double sgn = omega == RealCharacter::sign ? -1 : 1;
  auto h = [&](double x) { return f(x) + sgn * f(-x); };
  // [0, 1] with x = t^m so that the integrand is smooth at 0
  double m = std::max(1.0, std::ceil(6 / sigma));
  Quadrature low = integrate([&](double t) { return h(std::pow(t, m)) * m * std::exp((m * s - 1.0) * std::log(t)); },
                             0.0, 1.0, tol / 4);
  double R = std::max(1.0, tail_radius(f, sigma, 2, tol));
  Quadrature high{0.0, 0.0};
  if (R > 1) {
    std::vector<double> cuts{1};
    for (double c = 2; c < R; c *= 2) cuts.push_back(c);
    cuts.push_back(R);
    high = integrate_pieces([&](double x) { return h(x) * std::exp((s - 1.0) * std::log(x)); }, cuts, tol / 4);
  }
  return {low.value + high.value, low.error + high.error + 2 * f.tail_bound(R, sigma)};
}

ProductCheck fe_product_check(const RealTestFunction& f, const RealTestFunction& g, RealCharacter omega, cplx s,
                              double tol) {
  ProductCheck out;
  out.lhs = zeta_numeric(f, omega, s, tol).value * zeta_numeric(g.star(), omega, 2.0 - s, tol).value;
  out.rhs = zeta_numeric(f.star(), omega, 2.0 - s, tol).value * zeta_numeric(g, omega, s, tol).value;
  out.pass = std::abs(out.lhs - out.rhs) <= tol * (1 + std::abs(out.lhs));
  return out;
}

}  // namespace sbz::arch
