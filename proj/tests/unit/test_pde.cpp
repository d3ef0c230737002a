#include <doctest.h>

#include <cmath>
#include <numbers>

#include "caginalp/errors.hpp"
#include "caginalp/pde.hpp"
#include "generators.hpp"

using namespace caginalp;

namespace {

constexpr double pi = std::numbers::pi;

const model::Potentials& standard() {
  static const model::Potentials p = model::Potentials::standard();
  return p;
}

FieldState smooth_state(const Grid& g, const std::vector<double>& lift, double T_amp = 0.2) {
  FieldState s = make_state(g, 0.0, 0.0);
  for (int i = 0; i < g.nx; ++i) {
    s.phi[i] = 0.5 + 0.3 * std::cos(pi * g.x(i));
    s.T[i] = lift[i] + T_amp * std::cos(pi * g.x(i) / 2);
  }
  return s;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

FieldState run_to(const FieldState& s0, const Grid& g, const BoundarySpec& bc, double dt,
                  double t_end, pde::Scheme scheme, pde::Mode mode = pde::Mode::full,
                  model::HatParams h = {}) {
  pde::RunOptions o;
  o.dt = dt;
  o.t_end = t_end;
  o.diag_every = 1 << 30;
  o.step = {mode, scheme};
  return pde::run(s0, g, h, standard(), bc, o).final_state;
}

}  // namespace

TEST_CASE("lifting with flux on the left is affine") {
  const Grid g = Grid::line(64);
  BoundarySpec bc;
  bc.q_b = 0.7;
  bc.T_b = -0.2;
  const auto T = pde::lifting_solution(g, bc);
  for (int i = 0; i < g.nx; ++i) CHECK(T[i] == doctest::Approx(-0.2 + 0.7 * (1 - g.x(i))).epsilon(1e-12));
  std::vector<double> lap;
  discrete::laplacian_T(g, bc, T, lap);
  for (double v : lap) CHECK(std::abs(v) < 1e-9);
}

TEST_CASE("zero flux gives the constant Dirichlet value for any flux faces") {
  const Grid g = Grid::rect(12, 10);
  for (auto faces : {std::array<bool, 4>{true, false, false, false},
                     std::array<bool, 4>{false, false, false, false},
                     std::array<bool, 4>{true, true, true, false},
                     std::array<bool, 4>{false, true, false, true}}) {
    BoundarySpec bc;
    bc.gamma = faces;
    bc.T_b = 0.35;
    for (double v : pde::lifting_solution(g, bc)) CHECK(v == doctest::Approx(0.35).epsilon(1e-12));
  }
}

TEST_CASE("2D lifting with a flux edge reduces to the 1D solution") {
  const Grid g2 = Grid::rect(32, 16, 1.0, 0.5);
  const Grid g1 = Grid::line(32);
  BoundarySpec bc;
  bc.gamma = {true, false, true, true};  // top and bottom insulated
  bc.q_b = 0.4;
  bc.T_b = 0.1;
  bc.flux_override[2] = 0.0;
  bc.flux_override[3] = 0.0;
  BoundarySpec bc1;
  bc1.q_b = 0.4;
  bc1.T_b = 0.1;
  const auto T2 = pde::lifting_solution(g2, bc);
  const auto T1 = pde::lifting_solution(g1, bc1);
  for (int j = 0; j < g2.ny; ++j)
    for (int i = 0; i < g2.nx; ++i) CHECK(T2[j * g2.nx + i] == doctest::Approx(T1[i]).epsilon(1e-10));
}

TEST_CASE("pure Neumann lifting") {
  const Grid g = Grid::line(32);
  BoundarySpec bc;
  bc.gamma = {true, true, false, false};
  for (double v : pde::lifting_solution(g, bc)) CHECK(v == 0.0);
  bc.q_b = 0.1;
  CHECK_THROWS_AS(pde::lifting_solution(g, bc), DomainError);
}

TEST_CASE("single-phase states with the lifting are stationary") {
  for (int dim : {1, 2}) {
    const Grid g = dim == 1 ? Grid::line(64) : Grid::rect(24, 20);
    BoundarySpec bc;
    bc.q_b = 0.3;
    bc.T_b = -0.1;
    if (dim == 2) bc.flux_override = {std::nullopt, std::nullopt, 0.0, 0.0}, bc.gamma = {true, false, true, true};
    const auto lift = pde::lifting_solution(g, bc);
    for (double phi : {0.0, 1.0})
      for (auto scheme : {pde::Scheme::imex_euler, pde::Scheme::imex_trapezoid}) {
        FieldState s = make_state(g, phi, 0.0);
        s.T = lift;
        const FieldState n = pde::step(s, g, model::HatParams{}, standard(), bc, 1e-3, {pde::Mode::full, scheme});
        CHECK(max_diff(n.phi, s.phi) < 1e-12);
        CHECK(max_diff(n.T, s.T) < 1e-10);
        const auto d = pde::diagnostics(s, n, 1e-3, g, model::HatParams{}, standard(), bc, &lift);
        CHECK(std::abs(d.caginalp_residual) < 1e-6);
        CHECK(std::abs(d.entropy_prod_mobility) < 1e-12);
        CHECK(std::abs(d.entropy_prod_conduction - 0.0) < 1.0);  // the lifting itself conducts
      }
  }
}

TEST_CASE("insulated stationary state has vanishing residuals") {
  const Grid g = Grid::line(64);
  const BoundarySpec bc = BoundarySpec::insulated();
  const FieldState s = make_state(g, 1.0, 0.25);
  const FieldState n = pde::step(s, g, model::HatParams{}, standard(), bc, 1e-3);
  const auto d = pde::diagnostics(s, n, 1e-3, g, model::HatParams{}, standard(), bc);
  CHECK(std::abs(d.energy_residual) < 1e-9);
  CHECK(std::abs(d.caginalp_residual) < 1e-9);
  CHECK(std::abs(d.entropy_prod_conduction) < 1e-12);
  CHECK(std::abs(d.entropy_prod_mobility) < 1e-12);
}

TEST_CASE("time error decays at the scheme order") {
  const Grid g = Grid::line(64);
  BoundarySpec bc;
  bc.q_b = 0.2;
  bc.T_b = -0.1;
  const auto lift = pde::lifting_solution(g, bc);
  const FieldState s0 = smooth_state(g, lift);
  model::HatParams h;
  h.eps = 0.1;
  const double t = 0.05, dt = 2.5e-3;
  for (auto [scheme, order] : {std::pair{pde::Scheme::imex_euler, 1.0},
                               std::pair{pde::Scheme::imex_trapezoid, 2.0}}) {
    const FieldState ref = run_to(s0, g, bc, dt / 64, t, scheme, pde::Mode::full, h);
    double err[3];
    for (int k = 0; k < 3; ++k) {
      const FieldState s = run_to(s0, g, bc, dt / (1 << k), t, scheme, pde::Mode::full, h);
      err[k] = std::max(max_diff(s.phi, ref.phi), max_diff(s.T, ref.T));
    }
    const double r = std::pow(2.0, order);
    CHECK(err[0] / err[1] == doctest::Approx(r).epsilon(0.15));
    CHECK(err[1] / err[2] == doctest::Approx(r).epsilon(0.15));
  }
}

TEST_CASE("zero-length run has exactly the initial record") {
  const Grid g = Grid::line(32);
  pde::RunOptions o;
  o.t_end = 0.0;
  const auto r = pde::run(make_state(g, 0.5, 0.0), g, model::HatParams{}, standard(),
                          BoundarySpec::insulated(), o);
  CHECK(r.diagnostics.size() == 1);
  CHECK(r.steps == 0);
  CHECK(std::isnan(r.diagnostics[0].energy_residual));
}

TEST_CASE("insulated energy drift shrinks with dt and spacing") {
  const BoundarySpec bc = BoundarySpec::insulated();
  double drift[2];
  for (int k = 0; k < 2; ++k) {
    const Grid g = Grid::line(64 << k);
    FieldState s = make_state(g, 0.0, 0.0);
    for (int i = 0; i < g.nx; ++i) {
      s.phi[i] = 0.5 + 0.3 * std::cos(pi * g.x(i));
      s.T[i] = 0.2 * std::cos(pi * g.x(i));
    }
    pde::RunOptions o;
    o.dt = 4e-3 / (1 << k);
    o.t_end = 0.5;
    o.diag_every = 1 << 30;
    const auto r = pde::run(s, g, model::HatParams{}, standard(), bc, o);
    const double E0 = r.diagnostics.front().energy.E, E1 = r.diagnostics.back().energy.E;
    drift[k] = std::abs(E1 - E0) / std::max(1.0, std::abs(E0));
  }
  CHECK(drift[0] < 1e-3);
  CHECK(drift[0] / drift[1] > 3.5);
}

TEST_CASE("insulated entropy grows and both productions are nonnegative") {
  const Grid g = Grid::line(128);
  const BoundarySpec bc = BoundarySpec::insulated();
  gen::Gen r(41);
  for (int trial = 0; trial < 4; ++trial) {
    FieldState s;
    s.phi = r.smooth_field(g, 0.5, 0.3);
    s.T = r.smooth_field(g, 0.0, 0.3);
    pde::RunOptions o;
    o.dt = 1e-3;
    o.t_end = 0.2;
    const auto run = pde::run(s, g, model::HatParams{}, standard(), bc, o);
    for (std::size_t k = 1; k < run.diagnostics.size(); ++k) {
      const auto& d = run.diagnostics[k];
      CHECK(d.entropy_prod_conduction >= -1e-10);
      CHECK(d.entropy_prod_mobility >= -1e-10);
      CHECK(d.energy.S >= run.diagnostics[k - 1].energy.S - 1e-7);
    }
  }
}

TEST_CASE("mobility production equals its pointwise formula") {
  const Grid g = Grid::line(64);
  const BoundarySpec bc = BoundarySpec::insulated();
  gen::Gen r(42);
  model::HatParams h = r.hat();
  h.theta = 3.0;
  FieldState a;
  a.phi = r.smooth_field(g, 0.5, 0.3);
  a.T = r.smooth_field(g, 0.0, 0.3);
  const double dt = 1e-4;
  const FieldState b = pde::step(a, g, h, standard(), bc, dt);
  double mob = 0;
  for (int i = 0; i < g.nx; ++i) {
    const double phit = (b.phi[i] - a.phi[i]) / dt;
    mob += h.alpha_hat / h.beta_hat * phit * phit / (0.5 * (a.T[i] + b.T[i]) + h.theta);
  }
  const auto d = pde::diagnostics(a, b, dt, g, h, standard(), bc);
  CHECK(d.entropy_prod_mobility == doctest::Approx(mob * g.dx()).epsilon(1e-12));
}

TEST_CASE("Caginalp mode dissipates E0 and its identity residual is first order") {
  const Grid g = Grid::line(128);
  BoundarySpec bc;  // insulated left, T = 0 on the right
  const std::vector<double> zero(g.size(), 0.0);
  const FieldState s0 = smooth_state(g, zero);
  double res[3];
  for (int k = 0; k < 3; ++k) {
    pde::RunOptions o;
    o.dt = 4e-3 / (1 << k);
    o.t_end = 0.2;
    o.step = {pde::Mode::caginalp, pde::Scheme::imex_euler};
    const auto r = pde::run(s0, g, model::HatParams{}, standard(), bc, o);
    res[k] = 0;
    for (std::size_t i = 1; i < r.diagnostics.size(); ++i) {
      res[k] = std::max(res[k], std::abs(r.diagnostics[i].caginalp_residual));
      CHECK(r.diagnostics[i].energy.E0 <= r.diagnostics[i - 1].energy.E0 + 1e-12);
    }
  }
  CHECK(res[0] / res[1] == doctest::Approx(2.0).epsilon(0.2));
  CHECK(res[1] / res[2] == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("step is bit-for-bit deterministic") {
  const Grid g = Grid::rect(20, 16);
  BoundarySpec bc;
  bc.q_b = 0.1;
  gen::Gen r(43);
  FieldState s;
  s.phi = r.smooth_field(g, 0.5, 0.3);
  s.T = r.smooth_field(g, 0.0, 0.2);
  const pde::Stepper st(g, model::HatParams{}, standard(), bc, 1e-3);
  const FieldState a = st.step(s), b = st.step(s);
  CHECK(a.phi == b.phi);
  CHECK(a.T == b.T);
}

TEST_CASE("leaving the potential window aborts with the last good state") {
  const Grid g = Grid::line(32);
  FieldState s = make_state(g, 1.0, 0.0);
  s.phi[5] = 1.6;
  try {
    pde::step(s, g, model::HatParams{}, standard(), BoundarySpec::insulated(), 1e-3);
    FAIL("expected SolverFailure");
  } catch (const pde::SolverFailure& f) {
    CHECK(f.last_good().phi == s.phi);
  }
}

TEST_CASE("perturbed pure phases relax back") {
  gen::Gen r(44);
  for (double phi : {0.0, 1.0}) {
    const Grid g = Grid::line(128);
    BoundarySpec bc;
    bc.q_b = 0.1;
    const auto lift = pde::lifting_solution(g, bc);
    FieldState s = make_state(g, phi, 0.0);
    s.T = lift;
    FieldState p = s;
    for (std::size_t k = 0; k < g.size(); ++k) {
      p.phi[k] += r.uniform(-1e-3, 1e-3);
      p.T[k] += r.uniform(-1e-3, 1e-3);
    }
    auto dev = [&](const FieldState& x) {
      std::vector<double> dp(g.size()), dT(g.size());
      for (std::size_t k = 0; k < g.size(); ++k) {
        dp[k] = x.phi[k] - phi;
        dT[k] = x.T[k] - lift[k];
      }
      return discrete::l2_norm(g, dp) + discrete::l2_norm(g, dT);
    };
    const FieldState e = run_to(p, g, bc, 1e-3, 0.5, pde::Scheme::imex_trapezoid);
    CHECK(dev(e) < 0.5 * dev(p));
  }
}

TEST_CASE("Helmholtz solve inverts shift minus c Laplacian") {
  gen::Gen r(45);
  for (int dim : {1, 2}) {
    const Grid g = dim == 1 ? Grid::line(50) : Grid::rect(17, 23, 1.0, 2.0);
    BoundarySpec bc;
    bc.gamma = {true, false, false, true};
    const std::vector<double> rhs = r.smooth_field(g, 0.3, 1.0);
    const HelmholtzSolver solver(g, HelmholtzSolver::for_T(bc), 0.7, 1.3);
    std::vector<double> x, lap;
    solver.solve(rhs, x);
    BoundarySpec hom = bc;
    hom.T_b = 0.0;
    hom.q_b = 0.0;
    discrete::laplacian_T(g, hom, x, lap);
    double m = 0;
    for (std::size_t k = 0; k < g.size(); ++k) m = std::max(m, std::abs(1.3 * x[k] - 0.7 * lap[k] - rhs[k]));
    CHECK(m < 1e-10);
  }
}

TEST_CASE("default time step") {
  const Grid g = Grid::line(100);
  model::HatParams h;
  h.eps = 0.05;
  const double diff = 0.01 * 0.01 * h.alpha_hat / (4 * h.eps * h.eps) * 0.9;
  const double react = 0.1 * h.alpha_hat / standard().sup.W2;
  CHECK(pde::default_dt(g, h, standard()) == doctest::Approx(std::min(diff, react)));
}
