#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "caginalp/errors.hpp"
#include "caginalp/grid.hpp"
#include "caginalp/model.hpp"

namespace caginalp::pde {

enum class Mode { full, caginalp };

/// imex_euler: first order, implicit Laplacians, explicit reactions.
/// imex_trapezoid: Euler predictor followed by a Crank-Nicolson/Heun
/// corrector; second order, same linear systems with halved coefficients.
enum class Scheme { imex_euler, imex_trapezoid };

struct StepOptions {
  Mode mode = Mode::full;
  Scheme scheme = Scheme::imex_trapezoid;
};

/// Raised when a step produces non-finite values or leaves the potential
/// window; carries the last accepted state.
class SolverFailure : public NumericalError {
 public:
  SolverFailure(const std::string& what, FieldState last_good)
      : NumericalError(what), last_good_(std::move(last_good)) {}
  const FieldState& last_good() const { return last_good_; }

 private:
  FieldState last_good_;
};

/// Discrete harmonic temperature carrying the boundary data.
std::vector<double> lifting_solution(const Grid& g, const BoundarySpec& bc);

/// min(h^2 alpha_hat / (4 eps^2) * safety, 0.1 alpha_hat / W''_inf).
double default_dt(const Grid& g, const model::HatParams& h, const model::Potentials& pot,
                  double safety = 0.9);

/// Owns the factorised linear systems for one (grid, parameters, dt).
class Stepper {
 public:
  Stepper(const Grid& g, const model::HatParams& h, const model::Potentials& pot,
          const BoundarySpec& bc, double dt, StepOptions opt = {});
  ~Stepper();
  Stepper(Stepper&&) noexcept;

  FieldState step(const FieldState& s) const;
  double dt() const { return dt_; }

 private:
  struct Impl;
  Grid g_;
  model::HatParams h_;
  model::Potentials pot_;
  BoundarySpec bc_;
  double dt_;
  StepOptions opt_;
  std::unique_ptr<Impl> impl_;

  void euler(const FieldState& s, FieldState& out) const;
  void trapezoid(const FieldState& s, FieldState& out) const;
  void heat_source(const std::vector<double>& phi_old, const std::vector<double>& phi_new,
                   const std::vector<double>& T_ref, std::vector<double>& src) const;
  void check(const FieldState& before, const FieldState& after) const;
};

FieldState step(const FieldState& s, const Grid& g, const model::HatParams& h,
                const model::Potentials& pot, const BoundarySpec& bc, double dt,
                StepOptions opt = {});

struct DiagnosticsRecord {
  double time = 0.0;
  model::EnergyReport energy;
  double energy_residual = 0.0;
  double entropy_prod_conduction = 0.0;
  double entropy_prod_mobility = 0.0;
  double entropy_flux = 0.0;
  double caginalp_residual = 0.0;
  bool entropy_defined = true;
};

/// Record for a single state; all residuals are NaN.
DiagnosticsRecord initial_record(const FieldState& s, const Grid& g, const model::HatParams& h,
                                 const model::Potentials& pot,
                                 const std::vector<double>* lifting = nullptr);

/// Defects of the energy balance, entropy production and Caginalp identity
/// over one step from a to b.
DiagnosticsRecord diagnostics(const FieldState& a, const FieldState& b, double dt, const Grid& g,
                              const model::HatParams& h, const model::Potentials& pot,
                              const BoundarySpec& bc, const std::vector<double>* lifting = nullptr);

struct RunOptions {
  double dt = 0.0;  // 0 selects default_dt
  double t_end = 0.0;
  int diag_every = 1;
  StepOptions step;
  /// Called with every accepted state (including the initial one) whose
  /// step index is a multiple of observe_every.
  std::function<void(const FieldState&, long)> observer;
  int observe_every = 1;
};

struct RunResult {
  FieldState final_state;
  std::vector<DiagnosticsRecord> diagnostics;
  long steps = 0;
  double dt = 0.0;
};

RunResult run(const FieldState& initial, const Grid& g, const model::HatParams& h,
              const model::Potentials& pot, const BoundarySpec& bc, const RunOptions& opt);

}  // namespace caginalp::pde
