#include "caginalp/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "caginalp/errors.hpp"

namespace caginalp::model {

double mu_g(double phi, double lap_phi, double T, const Potentials& pot, const HatParams& h) {
  return pot.W.eval(phi, 1) - h.gamma * pot.nu.eval(phi, 1) * T - h.eps * h.eps * lap_phi;
}

double source_F(double phi, double lap_phi, double T, const Potentials& pot, const HatParams& h) {
  const double g = h.eps * h.eps * lap_phi - pot.W.eval(phi, 1);
  return (g * g + h.gamma * g * pot.nu.eval(phi, 1) * T) / h.alpha_hat;
}

double latent_heat(double T, const NondimParams& n) {
  if (!(T + n.theta > 0.0)) throw DomainError("absolute temperature T + theta must be positive");
  return 1.0 + T / n.theta;
}

double latent_heat_physical(double T_abs, const PhysicalParams& p) {
  if (!(T_abs > 0.0)) throw DomainError("absolute temperature must be positive");
  return p.Le * T_abs / p.Te;
}

double e1_coefficient(const Potentials& pot, const HatParams& h) {
  const double mu = h.gamma * h.gamma * pot.sup.nu1 * pot.sup.nu1;
  if (mu == 0.0) return std::numeric_limits<double>::infinity();
  return 0.5 * h.eps * h.eps * h.delta * h.alpha_hat / (mu * h.theta);
}

EnergyReport energy_report(const Grid& g, const FieldState& s, const Potentials& pot,
                           const HatParams& h, const std::vector<double>* lifting,
                           EntropyPolicy policy) {
  check_shape(g, s);
  const std::size_t n = g.size();
  const double vol = g.cell_volume();
  const double inv_bh = 1.0 / h.beta_hat;
  const double inv_St = h.gamma * h.theta / h.beta_hat;

  double sumT = 0, sumW = 0, sumNu = 0, sumTbar2 = 0, sumS = 0;
  bool bad_temp = false;
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = s.phi[k];
    const double T = s.T[k];
    const double w = pot.W(phi);
    const double nu = pot.nu(phi);
    const double tb = lifting ? T - (*lifting)[k] : T;
    sumT += T;
    sumW += w;
    sumNu += nu;
    sumTbar2 += tb * tb;
    if (T + h.theta > 0.0)
      sumS += nu * h.gamma / h.beta_hat + std::log(T + h.theta);
    else
      bad_temp = true;
  }
  EnergyReport r;
  r.grad_phi_sq = discrete::grad_sq_neumann(g, s.phi);
  std::vector<double> lap;
  discrete::laplacian_neumann(g, s.phi, lap);
  double l2 = 0;
  for (double v : lap) l2 += v * v;
  r.lap_phi_sq = l2 * vol;

  const double eps2 = h.eps * h.eps;
  r.E = vol * (sumT + inv_bh * sumW + inv_St * sumNu) + 0.5 * inv_bh * eps2 * r.grad_phi_sq;
  r.E0 = vol * (h.beta_hat / (2.0 * h.theta) * sumTbar2 + sumW) + 0.5 * eps2 * r.grad_phi_sq;
  const double c1 = e1_coefficient(pot, h);
  r.E1 = r.lap_phi_sq == 0.0 ? r.E0 : r.E0 + c1 * r.lap_phi_sq;
  r.E1_star = std::max(1.0, r.E1);
  if (bad_temp) {
    if (policy == EntropyPolicy::throw_error)
      throw DomainError("entropy undefined: T + theta <= 0 somewhere");
    r.S = std::numeric_limits<double>::quiet_NaN();
  } else {
    r.S = vol * sumS;
  }
  return r;
}

EstimateConstants estimate_constants(const HatParams& h, const Potentials& pot,
                                     const LiftingNorms& lift, std::optional<double> E1_0) {
  validate(h);
  if (!(std::isfinite(lift.L2) && std::isfinite(lift.H1)) || lift.L2 < 0 || lift.H1 < 0)
    throw DomainError("lifting norms must be finite and nonnegative");
  EstimateConstants c;
  const double alpha = 1.0 / h.alpha_hat;
  const double beta = 1.0 / h.beta_hat;
  const double delta = h.delta, theta = h.theta, eps = h.eps;
  const double nu1 = pot.sup.nu1, nu2 = pot.sup.nu2, W1 = pot.sup.W1, W2 = pot.sup.W2;
  const double L2sq = lift.L2 * lift.L2, H1sq = lift.H1 * lift.H1;

  c.mu = h.gamma * h.gamma * nu1 * nu1;
  c.omega = W2 * W2;
  c.B0 = h.beta_hat / theta * L2sq;
  c.B = c.B0;
  c.C0 = (c.mu * alpha + delta / theta) * H1sq;
  if (nu1 == 0.0) {
    const double inf = std::numeric_limits<double>::infinity();
    c.degenerate = true;
    c.iota = std::numeric_limits<double>::quiet_NaN();
    c.A0 = c.D0 = c.A = c.D = inf;
    c.C = inf;
    c.t_star_1 = E1_0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    return c;
  }
  c.iota = (nu2 / nu1) * (nu2 / nu1);
  const double mu = c.mu, iota = c.iota;
  const double e2 = eps * eps, e4 = e2 * e2;
  const double bt = beta * theta;
  const double smu = std::sqrt(mu);

  c.A0 = delta * c.omega / (mu * theta * e2);
  c.D0 = std::max(1.0, bt) * bt * (1.0 + mu * alpha * theta / delta) * iota * mu / e4 *
         (1.0 + iota * mu / e4);

  c.A = c.A0 + beta * alpha * (1.0 + smu) * W1 + alpha * alpha * mu * smu / delta;
  c.C = c.C0 + alpha * smu * W1 * H1sq / theta + alpha * W1 * W1 * W1 / theta +
        alpha * e2 * smu * H1sq * H1sq / theta;
  const double a3d3 = alpha * alpha * alpha / (delta * delta * delta);
  const double d2 = e2 * std::sqrt(bt) * alpha * alpha * mu / delta *
                    (1.0 + a3d3 * mu * mu * mu * bt * std::sqrt(bt));
  const double d3 = eps * beta * mu * std::sqrt(alpha * alpha * alpha * theta / delta) *
                    (1.0 + e2 * eps * mu * mu * mu *
                               std::sqrt(std::pow(alpha, 9) * theta * theta * theta *
                                         std::pow(delta, -9)));
  c.D = c.D0 + d2 + d3;
  c.t_star_1 = E1_0 ? existence_time(c, *E1_0) : std::numeric_limits<double>::quiet_NaN();
  return c;
}

double existence_time(const EstimateConstants& c, double E1_0) {
  if (!(E1_0 > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / (c.D * E1_0 * E1_0);
}

StefanCoefficients physical_stefan_coefficients(const PhysicalParams& p) {
  StefanCoefficients s;
  s.kinetic = p.rho / (p.kappa0 * p.h);
  s.capillary = p.sigma;
  s.undercooling = p.rho * p.Le / p.Te;
  s.quadratic = 2.0 / (p.kappa0 * p.h);
  return s;
}

}  // namespace caginalp::model
