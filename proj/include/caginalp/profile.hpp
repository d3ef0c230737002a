#pragma once

#include <functional>
#include <vector>

#include "caginalp/potentials.hpp"

namespace caginalp::profile {

/// Stationary interface eps^2-free profile: phi0'' = W'(phi0), phi0(0) = b.
struct ProfileSolution {
  std::vector<double> z;
  std::vector<double> phi0;
  std::vector<double> dphi0;
  std::vector<double> weight;  // nu'(phi0) phi0'
  double dz = 0.0;
  double half_width = 0.0;
  double b = 0.5;
  int orientation = 1;  // +1: 0 at -inf, 1 at +inf
  double sigma0 = 0.0;            // integral of phi0'^2 on the grid
  double sigma0_quadrature = 0.0; // integral over [0,1] of sqrt(2W)
  double weight_norm = 0.0;       // integral of weight, +-1
};

ProfileSolution solve_profile(const model::Potentials& pot, double half_width = 20.0,
                              int n_points = 2048, int orientation = 1);

/// sigma0 after checking that both quadrature routes agree to 1e-9.
double surface_tension(const ProfileSolution& sol);

/// Integral over [0,1] of sqrt(2 W(phi)) by adaptive Gauss-Kronrod.
double sigma0_integral(const model::Potentials& pot);

struct InterfaceWeight {
  std::vector<double> weight;
  double normalization = 0.0;
};

/// nu'(phi0) phi0' and its integral; throws if the integral is not +-1 to
/// within 1e-6.
InterfaceWeight interface_weight(const ProfileSolution& sol, const model::Potentials& pot);

/// phi0(z) by cubic interpolation of the table; constant beyond the ends.
double profile_value(const ProfileSolution& sol, double z);

/// Weighted mean of f(z) against the normalised weight.
double weighted_average(const ProfileSolution& sol, const std::function<double(double)>& f);

/// max |phi0'^2 - 2 W(phi0)| with phi0' taken from an eighth-order central
/// difference of the sampled profile (independent of the stored derivative).
double first_integral_residual(const ProfileSolution& sol, const model::Potentials& pot);

}  // namespace caginalp::profile
