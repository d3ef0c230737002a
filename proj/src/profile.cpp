#include "caginalp/profile.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "caginalp/errors.hpp"

namespace caginalp::profile {

namespace {

// Steps in u never exceed 0.125 and dz/du is analytic there, so a fixed
// 30-point rule is exact to rounding.
using GL = boost::math::quadrature::gauss<double, 30>;

// phi = logistic(u), kept together with the offset to the nearer well so
// that W stays accurate in both tails.
struct Logistic {
  double xi;
  double one_minus;
  int anchor;
  double off;
};

Logistic logistic(double u) {
  Logistic l;
  if (u < 0) {
    const double e = std::exp(u);
    l.xi = e / (1.0 + e);
    l.one_minus = 1.0 / (1.0 + e);
    l.anchor = 0;
    l.off = l.xi;
  } else {
    const double e = std::exp(-u);
    l.xi = 1.0 / (1.0 + e);
    l.one_minus = e / (1.0 + e);
    l.anchor = 1;
    l.off = -l.one_minus;
  }
  return l;
}

double sqrt_2W(const model::Potentials& pot, const Logistic& l) {
  const double w = pot.W.eval_offset(l.anchor, l.off, 0);
  return std::sqrt(std::max(0.0, 2.0 * w));
}

// dz/du
double dzdu(const model::Potentials& pot, double u) {
  const Logistic l = logistic(u);
  const double s = sqrt_2W(pot, l);
  if (!(s > 0.0)) {
    std::ostringstream os;
    os << "W vanishes at phi=" << l.xi << " inside (0,1); no heteroclinic profile";
    throw NumericalError(os.str());
  }
  return l.xi * l.one_minus / s;
}

double integrate(const model::Potentials& pot, double a, double b) {
  const double v = GL::integrate([&](double u) { return dzdu(pot, u); }, a, b);
  if (!std::isfinite(v)) throw NumericalError("profile quadrature did not converge");
  return v;
}

}  // namespace

double sigma0_integral(const model::Potentials& pot) {
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [&](double p) { return std::sqrt(std::max(0.0, 2.0 * pot.W(p))); }, 0.0, 1.0, 15, 1e-14,
      &err);
  return v;
}

ProfileSolution solve_profile(const model::Potentials& pot, double half_width, int n_points,
                              int orientation) {
  if (n_points < 64) throw DomainError("profile needs at least 64 points");
  if (!(half_width > 0.0)) throw DomainError("profile half_width must be positive");
  if (orientation != 1 && orientation != -1) throw DomainError("orientation must be +1 or -1");
  const double b = pot.b;
  if (!(b > 0.0 && b < 1.0)) throw DomainError("profile centre b must lie in (0,1)");

  // Tabulate z(u) on a uniform u lattice through u_b in both directions.
  const double ub = std::log(b / (1.0 - b));
  const double du = 0.125;
  const double reach = half_width + 1.0;
  const int max_steps = 8000;
  std::vector<double> up{ub}, zp{0.0};
  while (zp.back() < reach) {
    if (static_cast<int>(up.size()) > max_steps)
      throw NumericalError("profile tail does not reach half_width; W may have a degenerate well");
    const double u1 = up.back() + du;
    zp.push_back(zp.back() + integrate(pot, up.back(), u1));
    up.push_back(u1);
  }
  std::vector<double> un{ub}, zn{0.0};
  while (zn.back() > -reach) {
    if (static_cast<int>(un.size()) > max_steps)
      throw NumericalError("profile tail does not reach half_width; W may have a degenerate well");
    const double u1 = un.back() - du;
    zn.push_back(zn.back() - integrate(pot, u1, un.back()));
    un.push_back(u1);
  }
  std::vector<double> U, Z;
  for (std::size_t i = un.size(); i-- > 1;) {
    U.push_back(un[i]);
    Z.push_back(zn[i]);
  }
  U.insert(U.end(), up.begin(), up.end());
  Z.insert(Z.end(), zp.begin(), zp.end());
  for (std::size_t i = 1; i < Z.size(); ++i)
    if (!(Z[i] > Z[i - 1])) throw NumericalError("profile inversion is not monotone");

  // u(z) by bracketed Newton.
  auto invert = [&](double zt) {
    const auto it = std::upper_bound(Z.begin(), Z.end(), zt);
    std::size_t k = static_cast<std::size_t>(std::clamp<long>(it - Z.begin() - 1, 0, long(Z.size()) - 2));
    double lo = U[k], hi = U[k + 1];
    double u = lo + (zt - Z[k]) / (Z[k + 1] - Z[k]) * (hi - lo);
    for (int iter = 0; iter < 60; ++iter) {
      const double f = Z[k] + integrate(pot, U[k], u) - zt;
      if (f > 0) hi = u; else lo = u;
      double next = u - f / dzdu(pot, u);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - u) < 1e-15 * std::max(1.0, std::abs(u))) return next;
      u = next;
    }
    return u;
  };

  ProfileSolution s;
  s.half_width = half_width;
  s.b = b;
  s.orientation = orientation;
  s.dz = 2.0 * half_width / (n_points - 1);
  s.z.resize(n_points);
  s.phi0.resize(n_points);
  s.dphi0.resize(n_points);
  for (int j = 0; j < n_points; ++j) {
    const double z = -half_width + j * s.dz;
    s.z[j] = z;
    const double u = invert(orientation * z);
    const Logistic l = logistic(u);
    s.phi0[j] = l.xi;
    s.dphi0[j] = orientation * sqrt_2W(pot, l);
  }
  for (int j = 1; j < n_points; ++j)
    if (orientation * (s.phi0[j] - s.phi0[j - 1]) < 0.0)
      throw NumericalError("inverted profile is not monotone");
  const double tail = std::max(pot.W(s.phi0.front()), pot.W(s.phi0.back()));
  if (!(tail < 1e-12))
    throw NumericalError("profile tails not converged at half_width: W = " + std::to_string(tail));

  double sig = 0.0;
  for (int j = 0; j < n_points; ++j) {
    const double w = (j == 0 || j == n_points - 1) ? 0.5 : 1.0;
    sig += w * s.dphi0[j] * s.dphi0[j];
  }
  s.sigma0 = sig * s.dz;
  s.sigma0_quadrature = sigma0_integral(pot);

  const InterfaceWeight iw = interface_weight(s, pot);
  s.weight = iw.weight;
  s.weight_norm = iw.normalization;
  return s;
}

double surface_tension(const ProfileSolution& sol) {
  if (!(std::abs(sol.sigma0 - sol.sigma0_quadrature) <= 1e-9)) {
    std::ostringstream os;
    os.precision(17);
    os << "surface tension routes disagree: grid " << sol.sigma0 << " vs quadrature "
       << sol.sigma0_quadrature;
    throw NumericalError(os.str());
  }
  return sol.sigma0;
}

InterfaceWeight interface_weight(const ProfileSolution& sol, const model::Potentials& pot) {
  InterfaceWeight iw;
  const std::size_t n = sol.phi0.size();
  iw.weight.resize(n);
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    iw.weight[j] = pot.nu.eval(sol.phi0[j], 1) * sol.dphi0[j];
    sum += ((j == 0 || j + 1 == n) ? 0.5 : 1.0) * iw.weight[j];
  }
  iw.normalization = sum * sol.dz;
  if (!(std::abs(std::abs(iw.normalization) - 1.0) <= 1e-6))
    throw NumericalError("interface weight integrates to " + std::to_string(iw.normalization) +
                         ", expected +-1 (tail truncation)");
  return iw;
}

double profile_value(const ProfileSolution& sol, double z) {
  const int n = static_cast<int>(sol.z.size());
  if (z <= sol.z.front()) return sol.phi0.front();
  if (z >= sol.z.back()) return sol.phi0.back();
  const double u = (z - sol.z.front()) / sol.dz;
  const int k = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, n - 4);
  const double t = u - k;
  double out = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int c = 0; c < 4; ++c)
      if (c != a) l *= (t - c) / (a - c);
    out += l * sol.phi0[k + a];
  }
  return out;
}

double weighted_average(const ProfileSolution& sol, const std::function<double(double)>& f) {
  const std::size_t n = sol.z.size();
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = ((j == 0 || j + 1 == n) ? 0.5 : 1.0) * sol.weight[j];
    num += w * f(sol.z[j]);
    den += w;
  }
  return num / den;
}

double first_integral_residual(const ProfileSolution& sol, const model::Potentials& pot) {
  static const double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  const std::size_t n = sol.phi0.size();
  double worst = 0.0;
  for (std::size_t j = 4; j + 4 < n; ++j) {
    double d = 0.0;
    for (int m = 1; m <= 4; ++m) d += c[m - 1] * (sol.phi0[j + m] - sol.phi0[j - m]);
    d /= sol.dz;
    worst = std::max(worst, std::abs(d * d - 2.0 * pot.W(sol.phi0[j])));
  }
  return worst;
}

}  // namespace caginalp::profile
