#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "caginalp/grid.hpp"
#include "caginalp/params.hpp"
#include "caginalp/potentials.hpp"
#include "caginalp/profile.hpp"

namespace caginalp::stefan {

// Conventions. Measurements are taken along a fixed direction N (+e_x in
// 1D, inward radial in the 2D bubble). `orientation` is [nu(phi0)] along N:
// +1 when the liquid lies in the +N direction. v and H are the normal speed
// and curvature sum with respect to N; [grad T . N] is the slope on the +N
// side minus the slope on the -N side.

struct Crossing {
  double position = 0.0;
  int orientation = 1;   // +1: phi increases along +x
  bool grazing = false;  // slope too small for a reliable crossing
};

/// Level-set crossings phi = b along a 1D profile (cubic interpolation).
std::vector<Crossing> locate_crossings(const std::vector<double>& x, const std::vector<double>& phi,
                                       double b);

struct InterfaceGeometry {
  std::vector<double> positions;  // 1D: crossing abscissae; 2D radial: {R}
  int orientation = 1;
  bool radial = false;
  bool grazing = false;
  double v = 0.0;
  double H = 0.0;
};

/// 1D: all crossings. 2D: radius of a bubble centred at the origin,
/// averaged between the first row and the first column.
InterfaceGeometry locate_interface(const Grid& g, const FieldState& s, double b);

struct Kinematics {
  std::vector<double> times;  // interior samples
  std::vector<double> v;
  std::vector<double> H;
};

/// Centred differences of a position series. Planar: v = dx/dt along N,
/// H = 0. Radial (liquid bubble, N inward): v = -dR/dt, H = (dim-1)/R.
Kinematics interface_kinematics(const std::vector<double>& positions,
                                const std::vector<double>& times, bool radial = false,
                                int dim = 1, double spacing = 0.0);

struct FluxJump {
  double jump = 0.0;
  double slope_plus = 0.0;   // +N side
  double slope_minus = 0.0;  // -N side
  double T_plus = 0.0;       // fits extrapolated to the interface
  double T_minus = 0.0;
  bool inner_edge_too_close = false;
  std::string warning;
};

/// Least-squares lines of T against signed distance d on d in
/// [inner, outer]*eps and [-outer, -inner]*eps.
FluxJump flux_jump_measure(const Grid& g, const FieldState& s, const InterfaceGeometry& geom,
                           double eps, double inner = 2.0, double outer = 10.0);

/// Profile-weighted interface temperature <T0> along N.
double weighted_temperature(const Grid& g, const FieldState& s, const InterfaceGeometry& geom,
                            const profile::ProfileSolution& sol, double eps);
/// T interpolated at the interface.
double interface_temperature(const Grid& g, const FieldState& s, const InterfaceGeometry& geom);

struct Measurements {
  double v = 0.0;
  double H = 0.0;
  int orientation = 1;
  double T_interface = 0.0;
  double T_weighted = 0.0;
  double jump = 0.0;
};

struct StefanResiduals {
  /// sigma0 (H_L - alpha_bar v_L) - gamma_bar <T0>, with v_L = s v and
  /// H_L = s H the liquid-referenced speed and curvature.
  double gibbs_thomson_defect = 0.0;
  /// delta_bar J + s gamma_bar (<T0> + theta) v + 2 alpha_bar sigma0 v^2
  double jump_defect = 0.0;
  /// as jump_defect without the quadratic term
  double linear_jump_defect = 0.0;
  /// as jump_defect with quadratic coefficient 1, the value implied by the
  /// energy balance of the diffuse model
  double energy_jump_defect = 0.0;
  double interface_temperature = 0.0;
  double weighted_temperature = 0.0;
};

StefanResiduals stefan_residuals(const Measurements& m, const profile::ProfileSolution& sol,
                                 const model::SharpScalings& bars, double theta);

/// Jump defect with an arbitrary quadratic coefficient.
double jump_defect(const Measurements& m, double sigma0, const model::SharpScalings& bars,
                   double theta, double quadratic_coefficient);

// ---------------------------------------------------------------------------
// Sharp-interface reference solver

struct EndCondition {
  bool dirichlet = false;
  double value = 0.0;  // T for Dirichlet, outward dT/dn for flux
};

struct ReferenceOptions {
  model::SharpScalings bars;
  double theta = 1.0;
  double sigma0 = 0.0;
  double Lx = 1.0;
  double front = 0.5;
  bool liquid_right = true;
  EndCondition left{false, 0.0};
  EndCondition right{true, 0.0};
  std::function<double(double)> T_initial;  // T(x) at t = 0
  double t_end = 1.0;
  int nodes_per_side = 200;
  double sample_every = 0.01;
  /// 2 is the paper's law, 1 the energy-consistent one, 0 the classical
  /// linear law.
  double quadratic_coefficient = 2.0;
};

struct ReferenceTrajectory {
  std::vector<double> times;
  std::vector<double> positions;
  std::vector<double> velocities;
  std::vector<double> interface_T;
  long steps = 0;
};

ReferenceTrajectory stefan_reference_1d(const ReferenceOptions& opt);

/// Traveling wave of the planar sharp problem with solid behind the front:
/// speed c, interface temperature T_f, for far-field liquid temperature
/// T_inf. Requires hypercooling (beta_bar T_inf < -gamma_bar theta).
struct TravelingWave {
  double c = 0.0;
  double T_front = 0.0;
  double decay = 0.0;  // liquid-side exponential rate beta_bar c / delta_bar
};
TravelingWave traveling_wave(const model::SharpScalings& bars, double theta, double sigma0,
                             double T_inf, double quadratic_coefficient);

// ---------------------------------------------------------------------------
// eps sweeps

enum class Scenario { planar_1d, radial_2d };

struct PlanarScenario {
  double Lx = 6.0;
  double x0 = 1.0;
  double T_inf = -1.5;
  double seed_quadratic_coefficient = 1.0;
  double cells_per_eps = 12.0;
  double dt_per_eps2 = 0.05;
  /// Also run at half resolution and extrapolate the measurements.
  bool richardson = true;
  double t_end = 1.0;
  double tau = 0.01;  // half-width of the centred velocity difference
  double sample_every = 0.01;
  bool operator==(const PlanarScenario&) const = default;
};

struct RadialScenario {
  double L = 1.0;
  double R0 = 0.3;
  double T0 = 0.0;
  double cells_per_eps = 4.0;
  double dt_per_eps2 = 0.1;
  double t_end = 0.05;
  double tau = 0.005;
  bool operator==(const RadialScenario&) const = default;
};

struct SweepOptions {
  model::SharpScalings bars;  // eps field ignored
  double theta = 1.0;
  std::vector<double> eps_list;
  Scenario scenario = Scenario::planar_1d;
  PlanarScenario planar;
  RadialScenario radial;
  int jobs = 1;
};

struct SweepRow {
  double eps = 0.0;
  model::HatParams hat;
  Measurements m;
  StefanResiduals res;
  std::vector<double> times;      // sampled front trajectory
  std::vector<double> positions;
  bool truncated = false;
  std::string note;
};

struct EpsSweepReport {
  std::vector<SweepRow> rows;
  double order_gt = 0.0;
  double order_jump = 0.0;
  double order_linear_jump = 0.0;
  double order_energy_jump = 0.0;
};

/// Initial temperature of the planar scenario: the sharp traveling wave of
/// the seeding law, solid at T_front behind x0.
std::function<double(double)> planar_seed_temperature(const SweepOptions& opt, double sigma0);

/// Oracle set up on the planar scenario's domain, boundary data and seed.
ReferenceOptions planar_reference_options(const SweepOptions& opt, double sigma0,
                                          double quadratic_coefficient, int nodes_per_side);

EpsSweepReport eps_sweep(const SweepOptions& opt, const model::Potentials& pot);
SweepRow sweep_row(const SweepOptions& opt, const model::Potentials& pot,
                   const profile::ProfileSolution& sol, double eps);

/// Least-squares slope of log|y| against log x.
double fitted_order(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace caginalp::stefan
