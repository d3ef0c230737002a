#include "caginalp/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace caginalp::pde {

using model::HatParams;
using model::Potentials;

std::vector<double> lifting_solution(const Grid& g, const BoundarySpec& bc) {
  g.validate();
  if (bc.pure_neumann(g)) {
    for (int f = 0; f < g.face_count(); ++f)
      if (bc.flux(static_cast<Face>(f)) != 0.0)
        throw DomainError(
            "pure Neumann temperature data with nonzero flux has no stationary lifting");
    return std::vector<double>(g.size(), 0.0);
  }
  std::vector<double> rhs;
  discrete::boundary_source(g, bc, rhs);
  HelmholtzSolver solver(g, HelmholtzSolver::for_T(bc), 1.0, 0.0);
  std::vector<double> x;
  solver.solve(rhs, x);
  return x;
}

double default_dt(const Grid& g, const HatParams& h, const Potentials& pot, double safety) {
  const double hmin = g.dim == 2 ? std::min(g.dx(), g.dy()) : g.dx();
  double dt = hmin * hmin * h.alpha_hat / (4.0 * h.eps * h.eps) * safety;
  if (pot.sup.W2 > 0.0) dt = std::min(dt, 0.1 * h.alpha_hat / pot.sup.W2);
  return dt;
}

struct Stepper::Impl {
  HelmholtzSolver phi_full, T_full;
  std::unique_ptr<HelmholtzSolver> phi_half, T_half;
  std::vector<double> gT;  // boundary part of the temperature Laplacian
};

Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;

Stepper::Stepper(const Grid& g, const HatParams& h, const Potentials& pot, const BoundarySpec& bc,
                 double dt, StepOptions opt)
    : g_(g), h_(h), pot_(pot), bc_(bc), dt_(dt), opt_(opt) {
  g.validate();
  model::validate(h);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
  const double cphi = h.eps * h.eps * dt / h.alpha_hat;
  const double cT = h.delta * dt / h.beta_hat;
  impl_.reset(new Impl{HelmholtzSolver(g, HelmholtzSolver::for_phi(), cphi),
                       HelmholtzSolver(g, HelmholtzSolver::for_T(bc), cT), nullptr, nullptr, {}});
  if (opt.scheme == Scheme::imex_trapezoid) {
    impl_->phi_half = std::make_unique<HelmholtzSolver>(g, HelmholtzSolver::for_phi(), 0.5 * cphi);
    impl_->T_half = std::make_unique<HelmholtzSolver>(g, HelmholtzSolver::for_T(bc), 0.5 * cT);
  }
  discrete::boundary_source(g, bc, impl_->gT);
}

// src = -gamma (T_ref + theta) nu'(phi_mid) Dphi + alpha_hat Dphi^2 (full) or
// -gamma theta nu'(phi_mid) Dphi (caginalp).
void Stepper::heat_source(const std::vector<double>& phi_old, const std::vector<double>& phi_new,
                          const std::vector<double>& T_ref, std::vector<double>& src) const {
  const std::size_t n = phi_old.size();
  src.resize(n);
  const double inv_dt = 1.0 / dt_;
  const bool full = opt_.mode == Mode::full;
  for (std::size_t k = 0; k < n; ++k) {
    const double dphi = (phi_new[k] - phi_old[k]) * inv_dt;
    const double nup = pot_.nu.eval(0.5 * (phi_old[k] + phi_new[k]), 1);
    if (full)
      src[k] = -h_.gamma * (T_ref[k] + h_.theta) * nup * dphi + h_.alpha_hat * dphi * dphi;
    else
      src[k] = -h_.gamma * h_.theta * nup * dphi;
  }
}

void Stepper::euler(const FieldState& s, FieldState& out) const {
  const std::size_t n = s.phi.size();
  const double a = dt_ / h_.alpha_hat;
  const double b = dt_ / h_.beta_hat;
  std::vector<double> rhs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = s.phi[k];
    rhs[k] = p + a * (-pot_.W.eval(p, 1) + h_.gamma * pot_.nu.eval(p, 1) * s.T[k]);
  }
  impl_->phi_full.solve(rhs, out.phi);
  std::vector<double> src;
  heat_source(s.phi, out.phi, s.T, src);
  for (std::size_t k = 0; k < n; ++k)
    rhs[k] = s.T[k] + b * (h_.delta * impl_->gT[k] + src[k]);
  impl_->T_full.solve(rhs, out.T);
}

void Stepper::trapezoid(const FieldState& s, FieldState& out) const {
  FieldState pred;
  euler(s, pred);
  const std::size_t n = s.phi.size();
  const double a = dt_ / h_.alpha_hat;
  const double b = dt_ / h_.beta_hat;
  const double cphi = h_.eps * h_.eps * a;
  const double cT = h_.delta * b;
  std::vector<double> lap, rhs(n);
  discrete::laplacian_neumann(g_, s.phi, lap);
  for (std::size_t k = 0; k < n; ++k) {
    const double p0 = s.phi[k], p1 = pred.phi[k];
    const double react = -0.5 * (pot_.W.eval(p0, 1) + pot_.W.eval(p1, 1)) +
                         0.5 * h_.gamma *
                             (pot_.nu.eval(p0, 1) * s.T[k] + pot_.nu.eval(p1, 1) * pred.T[k]);
    rhs[k] = p0 + 0.5 * cphi * lap[k] + a * react;
  }
  impl_->phi_half->solve(rhs, out.phi);

  std::vector<double> Tm(n), src;
  for (std::size_t k = 0; k < n; ++k) Tm[k] = 0.5 * (s.T[k] + pred.T[k]);
  heat_source(s.phi, out.phi, Tm, src);
  discrete::laplacian_T(g_, bc_, s.T, lap);
  for (std::size_t k = 0; k < n; ++k)
    rhs[k] = s.T[k] + 0.5 * cT * (lap[k] + impl_->gT[k]) + b * src[k];
  impl_->T_half->solve(rhs, out.T);
}

void Stepper::check(const FieldState& before, const FieldState& after) const {
  for (std::size_t k = 0; k < after.phi.size(); ++k) {
    const double p = after.phi[k], t = after.T[k];
    if (!std::isfinite(p) || !std::isfinite(t)) {
      std::ostringstream os;
      os << "non-finite value at cell " << k << " after t=" << before.time;
      throw SolverFailure(os.str(), before);
    }
    if (p < model::Potential::lo || p > model::Potential::hi) {
      std::ostringstream os;
      os.precision(6);
      os << "phi=" << p << " left the potential window [-0.5,1.5] at cell " << k
         << " after t=" << before.time;
      throw SolverFailure(os.str(), before);
    }
  }
}

FieldState Stepper::step(const FieldState& s) const {
  check_shape(g_, s);
  FieldState out;
  if (opt_.scheme == Scheme::imex_euler)
    euler(s, out);
  else
    trapezoid(s, out);
  out.time = s.time + dt_;
  check(s, out);
  return out;
}

FieldState step(const FieldState& s, const Grid& g, const HatParams& h, const Potentials& pot,
                const BoundarySpec& bc, double dt, StepOptions opt) {
  return Stepper(g, h, pot, bc, dt, opt).step(s);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

BoundarySpec homogeneous(const BoundarySpec& bc) {
  BoundarySpec h = bc;
  h.q_b = 0.0;
  h.T_b = 0.0;
  for (auto& o : h.flux_override)
    if (o) o = 0.0;
  return h;
}

}  // namespace

DiagnosticsRecord initial_record(const FieldState& s, const Grid& g, const HatParams& h,
                                 const Potentials& pot, const std::vector<double>* lifting) {
  DiagnosticsRecord r;
  r.time = s.time;
  r.energy = model::energy_report(g, s, pot, h, lifting, model::EntropyPolicy::flag_nan);
  r.entropy_defined = std::isfinite(r.energy.S);
  r.energy_residual = r.entropy_prod_conduction = r.entropy_prod_mobility = r.entropy_flux =
      r.caginalp_residual = kNaN;
  return r;
}

DiagnosticsRecord diagnostics(const FieldState& a, const FieldState& b, double dt, const Grid& g,
                              const HatParams& h, const Potentials& pot, const BoundarySpec& bc,
                              const std::vector<double>* lifting) {
  check_shape(g, a);
  check_shape(g, b);
  if (!(dt > 0.0)) throw DomainError("diagnostics need a positive time step");
  DiagnosticsRecord r;
  r.time = b.time;
  const auto ea = model::energy_report(g, a, pot, h, lifting, model::EntropyPolicy::flag_nan);
  r.energy = model::energy_report(g, b, pot, h, lifting, model::EntropyPolicy::flag_nan);

  const double inflow =
      0.5 * (discrete::boundary_inflow(g, bc, a.T) + discrete::boundary_inflow(g, bc, b.T));
  r.energy_residual = (r.energy.E - ea.E) / dt - h.delta / h.beta_hat * inflow;

  const std::size_t n = g.size();
  std::vector<double> Tm(n);
  for (std::size_t k = 0; k < n; ++k) Tm[k] = 0.5 * (a.T[k] + b.T[k]);
  std::vector<double> grad2;
  discrete::grad_sq_pointwise_T(g, bc, Tm, grad2);
  double cond = 0.0, mob = 0.0, dphi2 = 0.0;
  bool ok = true;
  for (std::size_t k = 0; k < n; ++k) {
    const double abs_T = Tm[k] + h.theta;
    const double dphi = (b.phi[k] - a.phi[k]) / dt;
    dphi2 += dphi * dphi;
    if (!(abs_T > 0.0)) {
      ok = false;
      continue;
    }
    cond += h.delta / h.beta_hat * grad2[k] / (abs_T * abs_T);
    mob += h.alpha_hat / h.beta_hat * dphi * dphi / abs_T;
  }
  const double vol = g.cell_volume();
  r.entropy_defined = ok;
  if (ok) {
    r.entropy_prod_conduction = cond * vol;
    r.entropy_prod_mobility = mob * vol;
    r.entropy_flux = h.delta / h.beta_hat * discrete::boundary_entropy_flux(g, bc, Tm, h.theta);
  } else {
    r.entropy_prod_conduction = r.entropy_prod_mobility = r.entropy_flux = kNaN;
  }

  // theta dE0/dt + delta |grad Tbar|^2 + alpha_hat theta |dphi/dt|^2
  const BoundarySpec hb = homogeneous(bc);
  double ga, gb;
  if (lifting) {
    std::vector<double> ta(n), tb(n);
    for (std::size_t k = 0; k < n; ++k) {
      ta[k] = a.T[k] - (*lifting)[k];
      tb[k] = b.T[k] - (*lifting)[k];
    }
    ga = discrete::grad_sq_T(g, hb, ta);
    gb = discrete::grad_sq_T(g, hb, tb);
  } else {
    ga = discrete::grad_sq_T(g, bc, a.T);
    gb = discrete::grad_sq_T(g, bc, b.T);
  }
  r.caginalp_residual = h.theta * (r.energy.E0 - ea.E0) / dt + h.delta * 0.5 * (ga + gb) +
                        h.alpha_hat * h.theta * dphi2 * vol;
  return r;
}

RunResult run(const FieldState& initial, const Grid& g, const HatParams& h, const Potentials& pot,
              const BoundarySpec& bc, const RunOptions& opt) {
  check_shape(g, initial);
  if (!(opt.t_end >= 0.0)) throw DomainError("t_end must be nonnegative");
  if (opt.diag_every < 1 || opt.observe_every < 1)
    throw DomainError("sampling intervals must be at least 1");
  RunResult res;
  const double dt_req = opt.dt > 0.0 ? opt.dt : default_dt(g, h, pot);
  const long nsteps =
      opt.t_end > 0.0 ? static_cast<long>(std::ceil(opt.t_end / dt_req - 1e-9)) : 0;
  res.dt = nsteps > 0 ? opt.t_end / nsteps : dt_req;

  std::vector<double> lift;
  const std::vector<double>* lp = nullptr;
  try {
    lift = lifting_solution(g, bc);
    lp = &lift;
  } catch (const DomainError&) {
    lp = nullptr;
  }

  FieldState cur = initial;
  res.diagnostics.push_back(initial_record(cur, g, h, pot, lp));
  if (opt.observer) opt.observer(cur, 0);
  if (nsteps > 0) {
    Stepper stepper(g, h, pot, bc, res.dt, opt.step);
    for (long k = 1; k <= nsteps; ++k) {
      FieldState next = stepper.step(cur);
      if (k == nsteps) next.time = initial.time + opt.t_end;
      if (k % opt.diag_every == 0 || k == nsteps)
        res.diagnostics.push_back(diagnostics(cur, next, res.dt, g, h, pot, bc, lp));
      cur = std::move(next);
      if (opt.observer && (k % opt.observe_every == 0 || k == nsteps)) opt.observer(cur, k);
    }
  }
  res.steps = nsteps;
  res.final_state = std::move(cur);
  return res;
}

}  // namespace caginalp::pde
