#pragma once

#include <complex>
#include <string>

namespace sbz::arch {

using cplx = std::complex<double>;

/// amp * base(alpha x) for one of a few even closed-form base functions.
struct RealTestFunction {
  enum class Kind {
    zero,
    gaussian,        // exp(-pi x^2)
    gaussian_nabla,  // exp(-pi x^4), the gaussian composed with x -> |x| x
    rational_decay,  // 2 / (pi (1 + 4 x^4))
  };
  Kind kind = Kind::zero;
  double alpha = 1.0;
  double amp = 1.0;

  static RealTestFunction zero() { return {}; }
  static RealTestFunction gaussian() { return {Kind::gaussian}; }
  static RealTestFunction gaussian_nabla() { return {Kind::gaussian_nabla}; }
  static RealTestFunction rational_decay() { return {Kind::rational_decay}; }

  /// x -> f(a x)
  RealTestFunction scaled(double a) const;
  cplx operator()(double x) const;
  /// Upper bound for the integral of |f(x)| x^{sigma-1} over [R, inf).
  /// Infinite when the tail does not converge.
  double tail_bound(double R, double sigma) const;
  /// Closed-form star transform; throws std::invalid_argument if none is known.
  RealTestFunction star() const;
  std::string label() const;
};

enum class RealCharacter { trivial, sign };

struct Quadrature {
  cplx value;
  double error = 0;
};

/// 2 * integral of f(x) psi(|yx| yx) |x| dx with psi(x) = exp(2 pi i x).
/// Throws std::runtime_error when the tail cannot be made smaller than tol/10.
Quadrature star_numeric(const RealTestFunction& f, double y, double tol);

/// integral of f(x) omega(x) |x|^s d*x, d*x = dx / |x|. Throws
/// std::domain_error for Re s <= 0 and std::runtime_error for a divergent tail.
Quadrature zeta_numeric(const RealTestFunction& f, RealCharacter omega, cplx s, double tol);

struct ProductCheck {
  cplx lhs;
  cplx rhs;
  bool pass = false;
};

/// zeta(f, w, s) zeta(g*, w^-1, 2-s) against zeta(f*, w^-1, 2-s) zeta(g, w, s),
/// with the closed-form star transforms.
ProductCheck fe_product_check(const RealTestFunction& f, const RealTestFunction& g, RealCharacter omega, cplx s,
                              double tol);

}  // namespace sbz::arch
