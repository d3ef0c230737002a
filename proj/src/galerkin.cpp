#include "caginalp/galerkin.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "caginalp/errors.hpp"

namespace caginalp::galerkin {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Eigen::Map;
using Eigen::VectorXd;

constexpr double kPi = std::numbers::pi;
const double kSqrt2 = std::sqrt(2.0);

double frequency(Family f, int i) {
  switch (f) {
    case Family::neumann: return (i - 1) * kPi;
    case Family::mixed_left:
    case Family::mixed_right: return (i - 0.5) * kPi;
    case Family::dirichlet: return i * kPi;
  }
  return 0.0;
}

Map<const RowMat> table(const std::vector<double>& v, const SpectralBasis& b) {
  return {v.data(), b.quad_points, b.n};
}

struct Work {
  VectorXd phi, lap, Tbar, T, phit, X;
};

}  // namespace

double mode_value(Family f, int i, double x) {
  if (i < 1) throw DomainError("mode index is 1-based");
  const double k = frequency(f, i);
  switch (f) {
    case Family::neumann: return i == 1 ? 1.0 : kSqrt2 * std::cos(k * x);
    case Family::mixed_left: return kSqrt2 * std::cos(k * x);
    case Family::mixed_right: return kSqrt2 * std::cos(k * (1.0 - x));
    case Family::dirichlet: return kSqrt2 * std::sin(k * x);
  }
  return 0.0;
}

double mode_derivative(Family f, int i, double x) {
  if (i < 1) throw DomainError("mode index is 1-based");
  const double k = frequency(f, i);
  switch (f) {
    case Family::neumann: return i == 1 ? 0.0 : -kSqrt2 * k * std::sin(k * x);
    case Family::mixed_left: return -kSqrt2 * k * std::sin(k * x);
    case Family::mixed_right: return kSqrt2 * k * std::sin(k * (1.0 - x));
    case Family::dirichlet: return kSqrt2 * k * std::cos(k * x);
  }
  return 0.0;
}

double mode_eigenvalue(Family f, int i) {
  const double k = frequency(f, i);
  return k * k;
}

Family T_family_for(const BoundarySpec& bc) {
  const bool l = bc.is_gamma(Face::left), r = bc.is_gamma(Face::right);
  if (l && r) return Family::neumann;
  if (l) return Family::mixed_left;
  if (r) return Family::mixed_right;
  return Family::dirichlet;
}

SpectralBasis build_bases(const Grid& g, const BoundarySpec& bc, int n, int min_quad) {
  if (g.dim != 1) throw DomainError("spectral bases are only available in 1D");
  if (std::abs(g.Lx - 1.0) > 1e-14) throw DomainError("spectral bases need the unit interval");
  if (n < 1) throw DomainError("mode count must be at least 1");
  SpectralBasis b;
  b.n = n;
  b.quad_points = std::max(min_quad, 8 * (n + 1));
  b.phi_family = Family::neumann;
  b.T_family = T_family_for(bc);
  const int M = b.quad_points;
  b.weight = 1.0 / M;
  b.x.resize(M);
  for (int q = 0; q < M; ++q) b.x[q] = (q + 0.5) / M;
  b.phi_val.resize(static_cast<std::size_t>(M) * n);
  b.phi_der.resize(b.phi_val.size());
  b.T_val.resize(b.phi_val.size());
  b.T_der.resize(b.phi_val.size());
  for (int i = 1; i <= n; ++i) {
    b.phi_eig.push_back(mode_eigenvalue(b.phi_family, i));
    b.T_eig.push_back(mode_eigenvalue(b.T_family, i));
  }
  for (int q = 0; q < M; ++q)
    for (int i = 1; i <= n; ++i) {
      const std::size_t k = static_cast<std::size_t>(q) * n + (i - 1);
      b.phi_val[k] = mode_value(b.phi_family, i, b.x[q]);
      b.phi_der[k] = mode_derivative(b.phi_family, i, b.x[q]);
      b.T_val[k] = mode_value(b.T_family, i, b.x[q]);
      b.T_der[k] = mode_derivative(b.T_family, i, b.x[q]);
    }
  return b;
}

double lifting_at(const BoundarySpec& bc, double x) {
  const bool l = bc.is_gamma(Face::left), r = bc.is_gamma(Face::right);
  const double ql = bc.flux(Face::left), qr = bc.flux(Face::right);
  if (l && r) {
    if (ql != 0.0 || qr != 0.0)
      throw DomainError("pure flux boundary with nonzero flux has no harmonic lifting");
    return 0.0;
  }
  // dT/dn = q on a flux face: -T'(0) = q at the left, T'(1) = q at the right.
  if (l) return bc.T_b + ql * (1.0 - x);
  if (r) return bc.T_b + qr * x;
  return bc.T_b;
}

std::vector<double> lifting_values(const SpectralBasis& basis, const BoundarySpec& bc) {
  std::vector<double> out(basis.x.size());
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = lifting_at(bc, basis.x[q]);
  return out;
}

std::vector<double> project_phi(const SpectralBasis& basis, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != basis.quad_points) throw DomainError("wrong node count");
  VectorXd a = table(basis.phi_val, basis).transpose() *
               Map<const VectorXd>(values.data(), basis.quad_points) * basis.weight;
  return {a.data(), a.data() + a.size()};
}

std::vector<double> project_T(const SpectralBasis& basis, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != basis.quad_points) throw DomainError("wrong node count");
  VectorXd b = table(basis.T_val, basis).transpose() *
               Map<const VectorXd>(values.data(), basis.quad_points) * basis.weight;
  return {b.data(), b.data() + b.size()};
}

ModeVector project(const SpectralBasis& basis, const std::function<double(double)>& phi0,
                   const std::function<double(double)>& T0, const BoundarySpec& bc) {
  std::vector<double> p(basis.quad_points), t(basis.quad_points);
  for (int q = 0; q < basis.quad_points; ++q) {
    p[q] = phi0(basis.x[q]);
    t[q] = T0(basis.x[q]) - lifting_at(bc, basis.x[q]);
  }
  ModeVector m;
  m.a = project_phi(basis, p);
  m.b = project_T(basis, t);
  return m;
}

std::vector<double> evaluate_phi(const SpectralBasis& basis, const ModeVector& m,
                                 const std::vector<double>& x) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k)
    for (int i = 0; i < basis.n; ++i) out[k] += m.a[i] * mode_value(basis.phi_family, i + 1, x[k]);
  return out;
}

std::vector<double> evaluate_T(const SpectralBasis& basis, const ModeVector& m,
                               const BoundarySpec& bc, const std::vector<double>& x) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    out[k] = lifting_at(bc, x[k]);
    for (int i = 0; i < basis.n; ++i) out[k] += m.b[i] * mode_value(basis.T_family, i + 1, x[k]);
  }
  return out;
}

namespace {

void check_modes(const ModeVector& m, const SpectralBasis& basis) {
  if (static_cast<int>(m.a.size()) != basis.n || static_cast<int>(m.b.size()) != basis.n)
    throw DomainError("mode vector length differs from basis size");
}

}  // namespace

Derivative galerkin_rhs(const ModeVector& m, const SpectralBasis& basis,
                        const model::Potentials& pot, const model::HatParams& h,
                        const std::vector<double>& lifting, pde::Mode mode) {
  check_modes(m, basis);
  if (static_cast<int>(lifting.size()) != basis.quad_points)
    throw DomainError("lifting must be given at the quadrature nodes");
  const int n = basis.n, M = basis.quad_points;
  const auto P = table(basis.phi_val, basis);
  const auto Tm = table(basis.T_val, basis);
  const Map<const VectorXd> a(m.a.data(), n), b(m.b.data(), n);
  const Map<const VectorXd> lam(basis.phi_eig.data(), n), lamT(basis.T_eig.data(), n);
  const Map<const VectorXd> lift(lifting.data(), M);
  const double w = basis.weight, eps2 = h.eps * h.eps;

  const VectorXd phi = P * a;
  const VectorXd lap = -(P * lam.cwiseProduct(a));
  const VectorXd Tbar = Tm * b;
  const VectorXd T = Tbar + lift;

  VectorXd rhs_phi(M), nup(M), Wp(M);
  for (int q = 0; q < M; ++q) {
    Wp[q] = pot.W.eval(phi[q], 1);
    nup[q] = pot.nu.eval(phi[q], 1);
    rhs_phi[q] = -Wp[q] + h.gamma * nup[q] * T[q] + eps2 * lap[q];
  }
  Derivative d;
  VectorXd da = P.transpose() * rhs_phi * (w / h.alpha_hat);
  const VectorXd phit = P * da;

  VectorXd src(M), F = VectorXd::Zero(M);
  for (int q = 0; q < M; ++q) {
    if (mode == pde::Mode::full) {
      const double X = eps2 * lap[q] - Wp[q];
      F[q] = (X * X + h.gamma * X * nup[q] * T[q]) / h.alpha_hat;
    }
    src[q] = -h.gamma * h.theta * nup[q] * phit[q] + F[q];
  }
  VectorXd db = (Tm.transpose() * src * w - h.delta * lamT.cwiseProduct(b)) / h.beta_hat;

  const double grad_T = (lamT.array() * b.array().square()).sum();
  const double phit2 = da.squaredNorm();
  const double FT = w * F.dot(Tbar);
  const double nuLift = w * (nup.array() * phit.array() * lift.array()).sum();
  d.dissipation =
      h.delta * grad_T + h.alpha_hat * h.theta * phit2 - FT - h.gamma * h.theta * nuLift;
  d.dE0_dt = h.beta_hat / h.theta * b.dot(db) + w * Wp.dot(phit) + eps2 * (lam.cwiseProduct(a)).dot(da);
  const double c1 = model::e1_coefficient(pot, h);
  const double dlap2 = 2.0 * (lam.array().square() * a.array() * da.array()).sum();
  d.dE1_dt = d.dE0_dt + (std::isfinite(c1) ? c1 * dlap2 : 0.0);
  d.da.assign(da.data(), da.data() + n);
  d.db.assign(db.data(), db.data() + n);
  return d;
}

model::EnergyReport energies(const SpectralBasis& basis, const ModeVector& m,
                             const model::Potentials& pot, const model::HatParams& h,
                             const std::vector<double>& lifting) {
  check_modes(m, basis);
  const int n = basis.n, M = basis.quad_points;
  const auto P = table(basis.phi_val, basis);
  const auto Tm = table(basis.T_val, basis);
  const Map<const VectorXd> a(m.a.data(), n), b(m.b.data(), n);
  const VectorXd phi = P * a;
  const VectorXd Tbar = Tm * b;
  double sW = 0, sNu = 0, sT = 0, sS = 0;
  bool bad = false;
  for (int q = 0; q < M; ++q) {
    const double T = Tbar[q] + lifting[q];
    const double nu = pot.nu(phi[q]);
    sW += pot.W(phi[q]);
    sNu += nu;
    sT += T;
    if (T + h.theta > 0.0) sS += h.gamma * nu / h.beta_hat + std::log(T + h.theta);
    else bad = true;
  }
  const double w = basis.weight, eps2 = h.eps * h.eps;
  model::EnergyReport r;
  for (int i = 0; i < n; ++i) {
    r.grad_phi_sq += basis.phi_eig[i] * m.a[i] * m.a[i];
    r.lap_phi_sq += basis.phi_eig[i] * basis.phi_eig[i] * m.a[i] * m.a[i];
  }
  const double Tbar2 = b.squaredNorm();
  r.E = w * (sT + sW / h.beta_hat + h.gamma * h.theta / h.beta_hat * sNu) +
        0.5 * eps2 * r.grad_phi_sq / h.beta_hat;
  r.E0 = h.beta_hat / (2.0 * h.theta) * Tbar2 + w * sW + 0.5 * eps2 * r.grad_phi_sq;
  const double c1 = model::e1_coefficient(pot, h);
  r.E1 = r.lap_phi_sq == 0.0 ? r.E0 : r.E0 + c1 * r.lap_phi_sq;
  r.E1_star = std::max(1.0, r.E1);
  r.S = bad ? std::numeric_limits<double>::quiet_NaN() : w * sS;
  return r;
}

double tail_fraction(const ModeVector& m) {
  const std::size_t n = m.a.size();
  const std::size_t start = n - std::max<std::size_t>(1, n / 8);
  double tail = 0.0, total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = m.a[i] * m.a[i] + m.b[i] * m.b[i];
    total += e;
    if (i >= start) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

double h2_norm_sq(const SpectralBasis& basis, const std::vector<double>& a) {
  double s = 0.0;
  for (int i = 0; i < basis.n; ++i) {
    const double l = basis.phi_eig[i];
    s += (1.0 + l + l * l) * a[i] * a[i];
  }
  return s;
}

namespace {

model::LiftingNorms lifting_norms(const SpectralBasis& basis, const BoundarySpec& bc) {
  double l2 = 0.0, d2 = 0.0;
  const double h = 1e-6;
  for (double x : basis.x) {
    const double v = lifting_at(bc, x);
    const double dv = (lifting_at(bc, std::min(1.0, x + h)) - lifting_at(bc, std::max(0.0, x - h))) /
                      (std::min(1.0, x + h) - std::max(0.0, x - h));
    l2 += v * v;
    d2 += dv * dv;
  }
  model::LiftingNorms n;
  n.L2 = std::sqrt(l2 * basis.weight);
  n.H1 = std::sqrt((l2 + d2) * basis.weight);
  return n;
}

double estimate_ratio(const model::EstimateConstants& c, double E1, double dE1) {
  const double star = std::max(1.0, E1);
  const double dstar = E1 >= 1.0 ? dE1 : 0.0;
  const double bound = c.A * star + c.D * std::pow(c.B + star, 3) + c.C;
  if (!std::isfinite(bound)) return 0.0;
  return dstar / bound;
}

struct State {
  std::vector<double> a, b;
  double I = 0.0;
};

}  // namespace

Trajectory integrate_modes(const ModeVector& m0, const SpectralBasis& basis,
                           const model::Potentials& pot, const model::HatParams& h,
                           const BoundarySpec& bc, const IntegrateOptions& opt) {
  check_modes(m0, basis);
  model::validate(h);
  if (!(opt.dt > 0.0)) throw DomainError("dt must be positive");
  if (opt.t_end < 0.0) throw DomainError("t_end must be nonnegative");
  const std::vector<double> lift = lifting_values(basis, bc);
  const int n = basis.n;

  Trajectory tr;
  tr.constants = model::estimate_constants(h, pot, lifting_norms(basis, bc));
  const long steps = opt.t_end > 0.0 ? static_cast<long>(std::ceil(opt.t_end / opt.dt - 1e-9)) : 0;
  const double dt = steps > 0 ? opt.t_end / steps : opt.dt;
  tr.dt = dt;

  ModeVector m = m0;
  double r_max = 0.0;
  bool aliasing_warned = false;
  auto sample = [&](const ModeVector& mm, const Derivative& d) {
    Sample s;
    s.time = mm.time;
    s.m = mm;
    s.energy = energies(basis, mm, pot, h, lift);
    s.r = estimate_ratio(tr.constants, s.energy.E1, d.dE1_dt);
    r_max = std::max(r_max, s.r);
    s.r_max = r_max;
    tr.samples.push_back(std::move(s));
    if (!aliasing_warned && tail_fraction(mm) > opt.aliasing_threshold) {
      aliasing_warned = true;
      std::ostringstream os;
      os << "top modes carry more than " << opt.aliasing_threshold
         << " of the coefficient energy at t=" << mm.time << "; increase n";
      tr.warnings.push_back(os.str());
    }
  };

  auto eval = [&](const State& s, double t, Derivative& d) {
    ModeVector mm{s.a, s.b, t};
    d = galerkin_rhs(mm, basis, pot, h, lift, opt.mode);
  };

  Derivative d0;
  eval(State{m.a, m.b, 0.0}, m.time, d0);
  sample(m, d0);
  double E0_prev = tr.samples.back().energy.E0;

  auto axpy = [n](const State& s, const Derivative& d, double c) {
    State o = s;
    for (int i = 0; i < n; ++i) {
      o.a[i] += c * d.da[i];
      o.b[i] += c * d.db[i];
    }
    o.I += c * d.dissipation;
    return o;
  };

  for (long k = 1; k <= steps; ++k) {
    const State y{m.a, m.b, 0.0};
    const double t = m.time;
    Derivative k1 = d0, k2, k3, k4;
    eval(axpy(y, k1, 0.5 * dt), t + 0.5 * dt, k2);
    eval(axpy(y, k2, 0.5 * dt), t + 0.5 * dt, k3);
    eval(axpy(y, k3, dt), t + dt, k4);
    State next = y;
    for (int i = 0; i < n; ++i) {
      next.a[i] += dt / 6.0 * (k1.da[i] + 2 * k2.da[i] + 2 * k3.da[i] + k4.da[i]);
      next.b[i] += dt / 6.0 * (k1.db[i] + 2 * k2.db[i] + 2 * k3.db[i] + k4.db[i]);
    }
    next.I = dt / 6.0 *
             (k1.dissipation + 2 * k2.dissipation + 2 * k3.dissipation + k4.dissipation);
    ModeVector mn{next.a, next.b, steps > 0 ? opt.t_end * k / steps : t + dt};
    for (int i = 0; i < n; ++i)
      if (!std::isfinite(mn.a[i]) || !std::isfinite(mn.b[i])) {
        tr.truncated = true;
        tr.warnings.push_back("non-finite mode coefficient at t=" + std::to_string(mn.time));
        break;
      }
    if (tr.truncated) break;

    const model::EnergyReport e = energies(basis, mn, pot, h, lift);
    const double resid = std::abs(h.theta * (e.E0 - E0_prev) + next.I) / dt;
    tr.identity_residual_max = std::max(tr.identity_residual_max, resid);
    E0_prev = e.E0;
    m = mn;
    ++tr.steps;
    eval(State{m.a, m.b, 0.0}, m.time, d0);
    if (k % std::max(1, opt.sample_every) == 0 || k == steps) sample(m, d0);
    if (!(e.E1 <= opt.E1_cap)) {
      tr.truncated = true;
      tr.warnings.push_back("E1 exceeded the cap at t=" + std::to_string(m.time));
      break;
    }
  }
  tr.final_modes = m;
  return tr;
}

DependenceReport continuous_dependence_experiment(
    const ModeVector& m0, const ModeVector& direction, const std::vector<double>& scales,
    const SpectralBasis& basis, const model::Potentials& pot, const model::HatParams& h,
    const BoundarySpec& bc, const IntegrateOptions& opt) {
  check_modes(m0, basis);
  check_modes(direction, basis);
  if (scales.empty()) throw DomainError("no perturbation scales");
  const Trajectory base = integrate_modes(m0, basis, pot, h, bc, opt);

  auto dist = [&](const ModeVector& x, const ModeVector& y) {
    std::vector<double> da(basis.n);
    double s = 0.0;
    for (int i = 0; i < basis.n; ++i) {
      da[i] = x.a[i] - y.a[i];
      s += (x.b[i] - y.b[i]) * (x.b[i] - y.b[i]);
    }
    return s + h2_norm_sq(basis, da);
  };

  DependenceReport rep;
  for (double sc : scales) {
    ModeVector p = m0;
    for (int i = 0; i < basis.n; ++i) {
      p.a[i] += sc * direction.a[i];
      p.b[i] += sc * direction.b[i];
    }
    const Trajectory pert = integrate_modes(p, basis, pot, h, bc, opt);
    DependenceRun run;
    run.scale = sc;
    const std::size_t K = std::min(base.samples.size(), pert.samples.size());
    run.shortened = base.truncated || pert.truncated;
    const double d0 = dist(pert.samples.front().m, base.samples.front().m);
    run.R_max = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double dk = dist(pert.samples[k].m, base.samples[k].m);
      const double R = d0 == 0.0 ? 1.0 : dk / d0;
      run.times.push_back(base.samples[k].time);
      run.R.push_back(R);
      run.R_max = std::max(run.R_max, R);
      run.t_reached = base.samples[k].time;
    }
    rep.runs.push_back(std::move(run));
  }
  const auto& ref = rep.runs.back();
  for (const auto& run : rep.runs)
    for (std::size_t k = 0; k < std::min(run.R.size(), ref.R.size()); ++k)
      rep.spread = std::max(rep.spread, std::abs(run.R[k] / ref.R[k] - 1.0));
  return rep;
}

}  // namespace caginalp::galerkin
