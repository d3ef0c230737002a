#pragma once

namespace caginalp::model {

/// Dimensional material and scale data. Everything strictly positive.
struct PhysicalParams {
  double rho = 1.0;
  double Te = 1.0;
  double dT = 1.0;
  double L = 1.0;
  double h = 1.0;
  double t0 = 1.0;
  double sigma = 1.0;
  double Le = 1.0;
  double C0 = 1.0;
  double kappa0 = 1.0;
  double k0 = 1.0;

  bool operator==(const PhysicalParams&) const = default;
};

struct NondimParams {
  double eps = 1.0;
  double Pe = 1.0;
  double alpha = 1.0;
  double theta = 1.0;
  double beta = 1.0;
  double St = 1.0;

  bool operator==(const NondimParams&) const = default;
};

/// The chart every solver works in: alpha_hat = 1/alpha, beta_hat = 1/beta,
/// gamma = 1/(beta St theta), delta = 1/(beta Pe).
struct HatParams {
  double alpha_hat = 1.0;
  double beta_hat = 1.0;
  double gamma = 1.0;
  double delta = 1.0;
  double eps = 0.05;
  double theta = 1.0;

  bool operator==(const HatParams&) const = default;
};

/// Sharp-interface scalings, held fixed while eps -> 0.
struct SharpScalings {
  double alpha_bar = 1.0;
  double beta_bar = 1.0;
  double gamma_bar = 1.0;
  double delta_bar = 1.0;
  double eps = 1.0;

  bool operator==(const SharpScalings&) const = default;
};

NondimParams nondimensionalize(const PhysicalParams& p);

HatParams hat_params(const NondimParams& n);
SharpScalings sharp_scalings(const HatParams& h);

struct ChartPair {
  HatParams hat;
  SharpScalings sharp;
};
ChartPair hat_and_sharp_params(const NondimParams& n);

/// Inverse maps.
HatParams hat_from_sharp(const SharpScalings& s, double theta);
NondimParams nondim_from_hat(const HatParams& h);

void validate(const PhysicalParams& p);
void validate(const NondimParams& n);
void validate(const HatParams& h);
void validate(const SharpScalings& s);

}  // namespace caginalp::model
