#pragma once

#include <optional>
#include <vector>

#include "caginalp/grid.hpp"
#include "caginalp/params.hpp"
#include "caginalp/potentials.hpp"

namespace caginalp::model {

/// Generalised chemical potential W'(phi) - gamma nu'(phi) T - eps^2 lap_phi.
double mu_g(double phi, double lap_phi, double T, const Potentials& pot, const HatParams& h);

/// Heat source of the full model:
/// (1/alpha_hat) (eps^2 lap - W')^2 + (gamma/alpha_hat) (eps^2 lap - W') nu' T.
double source_F(double phi, double lap_phi, double T, const Potentials& pot, const HatParams& h);

/// Nondimensional latent heat 1 + T/theta.
double latent_heat(double T, const NondimParams& n);
/// Physical latent heat Le * T / Te (T absolute).
double latent_heat_physical(double T_abs, const PhysicalParams& p);

struct EnergyReport {
  double E = 0.0;
  double E0 = 0.0;
  double E1 = 0.0;
  double E1_star = 1.0;
  double S = 0.0;
  double grad_phi_sq = 0.0;  // integral of |grad phi|^2
  double lap_phi_sq = 0.0;   // integral of |lap phi|^2
};

enum class EntropyPolicy { throw_error, flag_nan };

/// Discrete energies on the grid. When `lifting` is given, E0 and E1 are
/// evaluated on T - lifting (the homogeneous part); E and S always use T.
EnergyReport energy_report(const Grid& g, const FieldState& s, const Potentials& pot,
                           const HatParams& h, const std::vector<double>* lifting = nullptr,
                           EntropyPolicy policy = EntropyPolicy::throw_error);

/// Coefficient of the integral of |lap phi|^2 in E1:
/// (1/2) eps^2 delta alpha_hat / (mu theta).
double e1_coefficient(const Potentials& pot, const HatParams& h);

struct LiftingNorms {
  double L2 = 0.0;
  double H1 = 0.0;
};

struct EstimateConstants {
  double mu = 0, omega = 0, iota = 0;
  double A0 = 0, B0 = 0, C0 = 0, D0 = 0;
  double A = 0, B = 0, C = 0, D = 0;
  double t_star_1 = 0;
  bool degenerate = false;  // nu'_inf = 0: no coupling, iota undefined
};

/// Constants of the second-order and final a priori estimates with the
/// hidden multiplicative constants set to 1. t_star_1 is filled when E1_0
/// is given, NaN otherwise.
EstimateConstants estimate_constants(const HatParams& h, const Potentials& pot,
                                     const LiftingNorms& lift,
                                     std::optional<double> E1_0 = std::nullopt);

double existence_time(const EstimateConstants& c, double E1_0);

struct StefanCoefficients {
  double kinetic = 0;      // rho / (kappa h)
  double capillary = 0;    // sigma
  double undercooling = 0; // rho Le / Te
  double quadratic = 0;    // 2 / (kappa h)
};

StefanCoefficients physical_stefan_coefficients(const PhysicalParams& p);

}  // namespace caginalp::model
