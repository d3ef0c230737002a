#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "caginalp/grid.hpp"
#include "caginalp/model.hpp"
#include "caginalp/pde.hpp"

namespace caginalp::galerkin {

/// Closed-form Laplacian eigenfunctions on (0,1), L2-orthonormal:
/// neumann      1, sqrt2 cos(k pi x)
/// mixed_left   sqrt2 cos((k-1/2) pi x)        (flux at 0, Dirichlet at 1)
/// mixed_right  sqrt2 cos((k-1/2) pi (1-x))
/// dirichlet    sqrt2 sin(k pi x)
enum class Family { neumann, mixed_left, mixed_right, dirichlet };

double mode_value(Family f, int i, double x);       // i is 1-based
double mode_derivative(Family f, int i, double x);
double mode_eigenvalue(Family f, int i);

/// Temperature family for the 1D faces in Gamma.
Family T_family_for(const BoundarySpec& bc);

struct SpectralBasis {
  int n = 0;
  int quad_points = 0;  // midpoint rule on (0,1)
  Family phi_family = Family::neumann;
  Family T_family = Family::mixed_left;
  std::vector<double> phi_eig, T_eig;
  std::vector<double> x;
  double weight = 0.0;
  // Row-major quad_points x n tables.
  std::vector<double> phi_val, phi_der, T_val, T_der;
};

/// Needs a 1D grid on (0,1); the temperature family follows bc.gamma.
/// Quadrature uses max(min_quad, 8 (n+1)) points.
SpectralBasis build_bases(const Grid& g, const BoundarySpec& bc, int n, int min_quad = 1024);

struct ModeVector {
  std::vector<double> a;
  std::vector<double> b;
  double time = 0.0;
};

/// Harmonic lifting of the boundary data at the quadrature nodes (affine in 1D).
std::vector<double> lifting_values(const SpectralBasis& basis, const BoundarySpec& bc);
double lifting_at(const BoundarySpec& bc, double x);

/// L2 projections P_Vn(phi0) and P_Zn(T0 - lifting).
ModeVector project(const SpectralBasis& basis, const std::function<double(double)>& phi0,
                   const std::function<double(double)>& T0, const BoundarySpec& bc);
/// Projection of nodal values onto the phi modes.
std::vector<double> project_phi(const SpectralBasis& basis, const std::vector<double>& values);
std::vector<double> project_T(const SpectralBasis& basis, const std::vector<double>& values);

/// phi and T = Tbar + lifting at arbitrary points.
std::vector<double> evaluate_phi(const SpectralBasis& basis, const ModeVector& m,
                                 const std::vector<double>& x);
std::vector<double> evaluate_T(const SpectralBasis& basis, const ModeVector& m,
                               const BoundarySpec& bc, const std::vector<double>& x);

struct Derivative {
  std::vector<double> da;
  std::vector<double> db;
  /// delta |grad Tbar|^2 + alpha_hat theta |phi_t|^2 - (F, Tbar)
  /// - gamma theta (nu' phi_t, lifting); equals -theta dE0/dt exactly.
  double dissipation = 0.0;
  double dE0_dt = 0.0;
  double dE1_dt = 0.0;
};

Derivative galerkin_rhs(const ModeVector& m, const SpectralBasis& basis,
                        const model::Potentials& pot, const model::HatParams& h,
                        const std::vector<double>& lifting, pde::Mode mode = pde::Mode::full);

/// Energies of the reconstructed fields. Gradient and Laplacian norms are
/// spectral; E0 and E1 use Tbar, E and S use Tbar + lifting.
model::EnergyReport energies(const SpectralBasis& basis, const ModeVector& m,
                             const model::Potentials& pot, const model::HatParams& h,
                             const std::vector<double>& lifting);

/// Fraction of the coefficient energy carried by the top eighth of modes.
double tail_fraction(const ModeVector& m);

struct IntegrateOptions {
  double dt = 1e-4;
  double t_end = 0.0;
  int sample_every = 1;
  double E1_cap = 1e12;
  double aliasing_threshold = 1e-8;
  pde::Mode mode = pde::Mode::full;
};

struct Sample {
  double time = 0.0;
  ModeVector m;
  model::EnergyReport energy;
  double r = 0.0;      // (dE1*/dt) / (A E1* + D (B + E1*)^3 + C)
  double r_max = 0.0;  // running max
};

struct Trajectory {
  std::vector<Sample> samples;
  ModeVector final_modes;
  long steps = 0;
  double dt = 0.0;
  bool truncated = false;
  /// max over steps of |theta dE0 + integral of dissipation| / dt
  double identity_residual_max = 0.0;
  model::EstimateConstants constants;
  std::vector<std::string> warnings;
};

/// Classical RK4 on the mode system; the dissipation integral rides along
/// as an extra unknown so the energy identity can be checked per step.
Trajectory integrate_modes(const ModeVector& m0, const SpectralBasis& basis,
                           const model::Potentials& pot, const model::HatParams& h,
                           const BoundarySpec& bc, const IntegrateOptions& opt);

/// sum (1 + lambda + lambda^2) a_i^2 for the phi coefficients.
double h2_norm_sq(const SpectralBasis& basis, const std::vector<double>& a);

struct DependenceRun {
  double scale = 0.0;
  std::vector<double> times;
  std::vector<double> R;
  double R_max = 1.0;
  bool shortened = false;
  double t_reached = 0.0;
};

struct DependenceReport {
  std::vector<DependenceRun> runs;
  /// max over t of |R_s(t) / R_last(t) - 1| across scales
  double spread = 0.0;
};

/// Runs m0 and m0 + scale * direction for each scale and tracks
/// R(t) = (|[T]|^2_L2 + |[phi]|^2_H2)(t) / (same at 0).
DependenceReport continuous_dependence_experiment(
    const ModeVector& m0, const ModeVector& direction, const std::vector<double>& scales,
    const SpectralBasis& basis, const model::Potentials& pot, const model::HatParams& h,
    const BoundarySpec& bc, const IntegrateOptions& opt);

}  // namespace caginalp::galerkin
