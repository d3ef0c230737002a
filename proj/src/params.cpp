#include "caginalp/params.hpp"

#include <cmath>
#include <string>

#include "caginalp/errors.hpp"

namespace caginalp::model {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw DomainError(std::string("parameter '") + name + "' must be positive and finite, got " +
                      std::to_string(v));
}

}  // namespace

void validate(const PhysicalParams& p) {
  require_positive(p.rho, "rho");
  require_positive(p.Te, "Te");
  require_positive(p.dT, "dT");
  require_positive(p.L, "L");
  require_positive(p.h, "h");
  require_positive(p.t0, "t0");
  require_positive(p.sigma, "sigma");
  require_positive(p.Le, "Le");
  require_positive(p.C0, "C0");
  require_positive(p.kappa0, "kappa0");
  require_positive(p.k0, "k0");
  if (p.h > p.L) throw DomainError("interface thickness h exceeds length scale L");
}

void validate(const NondimParams& n) {
  require_positive(n.eps, "eps");
  require_positive(n.Pe, "Pe");
  require_positive(n.alpha, "alpha");
  require_positive(n.theta, "theta");
  require_positive(n.beta, "beta");
  require_positive(n.St, "St");
}

void validate(const HatParams& h) {
  require_positive(h.alpha_hat, "alpha_hat");
  require_positive(h.beta_hat, "beta_hat");
  require_positive(h.gamma, "gamma");
  require_positive(h.delta, "delta");
  require_positive(h.eps, "eps");
  require_positive(h.theta, "theta");
}

void validate(const SharpScalings& s) {
  require_positive(s.alpha_bar, "alpha_bar");
  require_positive(s.beta_bar, "beta_bar");
  require_positive(s.gamma_bar, "gamma_bar");
  require_positive(s.delta_bar, "delta_bar");
  require_positive(s.eps, "eps");
}

NondimParams nondimensionalize(const PhysicalParams& p) {
  validate(p);
  NondimParams n;
  n.eps = p.h / p.L;
  n.Pe = p.rho * p.C0 * p.L * p.L / (p.k0 * p.t0);
  n.alpha = p.kappa0 * p.t0 * p.sigma / (p.rho * p.h);
  n.theta = p.Te / p.dT;
  n.beta = p.sigma / (p.rho * p.C0 * p.h * p.dT);
  n.St = p.C0 * p.dT / p.Le;
  return n;
}

HatParams hat_params(const NondimParams& n) {
  validate(n);
  HatParams h;
  h.alpha_hat = 1.0 / n.alpha;
  h.beta_hat = 1.0 / n.beta;
  h.gamma = 1.0 / (n.beta * n.St * n.theta);
  h.delta = 1.0 / (n.beta * n.Pe);
  h.eps = n.eps;
  h.theta = n.theta;
  return h;
}

SharpScalings sharp_scalings(const HatParams& h) {
  validate(h);
  SharpScalings s;
  s.alpha_bar = h.alpha_hat / (h.eps * h.eps);
  s.beta_bar = h.beta_hat / h.eps;
  s.gamma_bar = h.gamma / h.eps;
  s.delta_bar = h.delta / h.eps;
  s.eps = h.eps;
  return s;
}

ChartPair hat_and_sharp_params(const NondimParams& n) {
  ChartPair c;
  c.hat = hat_params(n);
  c.sharp = sharp_scalings(c.hat);
  return c;
}

HatParams hat_from_sharp(const SharpScalings& s, double theta) {
  validate(s);
  require_positive(theta, "theta");
  HatParams h;
  h.alpha_hat = s.alpha_bar * s.eps * s.eps;
  h.beta_hat = s.beta_bar * s.eps;
  h.gamma = s.gamma_bar * s.eps;
  h.delta = s.delta_bar * s.eps;
  h.eps = s.eps;
  h.theta = theta;
  return h;
}

NondimParams nondim_from_hat(const HatParams& h) {
  validate(h);
  NondimParams n;
  n.eps = h.eps;
  n.theta = h.theta;
  n.alpha = 1.0 / h.alpha_hat;
  n.beta = 1.0 / h.beta_hat;
  n.St = h.beta_hat / (h.gamma * h.theta);
  n.Pe = h.beta_hat / h.delta;
  return n;
}

}  // namespace caginalp::model
