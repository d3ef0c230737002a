#pragma once

#include <string>
#include <array>
#include <vector>

namespace caginalp::model {

/// Polynomial on the window [lo, hi] = [-0.5, 1.5], blended outside to a
/// constant over a band of width 0.5 with a degree-7 smoothstep. The result
/// is C^3 and bounded on the whole line.
///
/// Evaluation uses Taylor coefficients recentred at 0 and at 1, so values
/// near either well keep full relative accuracy.
class Potential {
 public:
  static constexpr double lo = -0.5;
  static constexpr double hi = 1.5;
  static constexpr double band = 0.5;

  Potential() = default;
  explicit Potential(std::vector<double> monomial_coeffs);

  /// k-th derivative at x, k in 0..3.
  double eval(double x, int k = 0) const;
  double operator()(double x) const { return eval(x, 0); }

  /// k-th derivative at anchor + off where anchor is 0 or 1. Only valid
  /// inside the polynomial window.
  double eval_offset(int anchor, double off, int k = 0) const;

  const std::vector<double>& coeffs() const { return c0_; }
  Potential scaled(double factor) const;

 private:
  double poly(const std::vector<double>& c, double off, int k) const;
  double spliced(double x, int k) const;

  std::vector<double> c0_;
  std::vector<double> c1_;
  // Derivative coefficients d^k about 0 and 1, falling factorials folded in.
  std::array<std::vector<double>, 4> d0_;
  std::array<std::vector<double>, 4> d1_;
  void tabulate();
};

struct SupNorms {
  double W1 = 0, W2 = 0, W3 = 0;
  double nu1 = 0, nu2 = 0, nu3 = 0;
};

/// Double well W and entropy interpolant nu with derived data.
struct Potentials {
  Potential W;
  Potential nu;
  std::string W_name = "quartic";
  std::string nu_name = "smoothstep";
  SupNorms sup;
  double a = 0.5;           // interior root of W'
  double b = 0.5;           // argmax of nu' on [0, 1]
  bool b_multiple = false;  // nu' has several maximisers

  /// W = phi^2 (1-phi)^2, nu = phi^2 (3 - 2 phi).
  static Potentials standard();
  static Potentials make(Potential W, Potential nu, std::string W_name = "custom",
                         std::string nu_name = "custom");
  /// Named polynomial: quartic, smoothstep, zero, identity, or poly:c0,c1,...
  static Potential named(const std::string& name);

  /// Structural checks of the model assumptions; empty when all hold.
  std::vector<std::string> validate() const;
};

double sup_abs(const Potential& p, int k);

}  // namespace caginalp::model
