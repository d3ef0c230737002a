#include <doctest.h>

#include <cmath>

#include "caginalp/errors.hpp"
#include "caginalp/stefan.hpp"
#include "generators.hpp"

using namespace caginalp;
using namespace caginalp::stefan;

namespace {

const model::Potentials& standard() {
  static const model::Potentials p = model::Potentials::standard();
  return p;
}

const profile::ProfileSolution& profile_up() {
  static const profile::ProfileSolution s = profile::solve_profile(standard());
  return s;
}

double tanh_front(double x, double x0, double eps, int orientation = 1) {
  return 0.5 * (1 + std::tanh(orientation * (x - x0) / (std::sqrt(2.0) * eps)));
}

FieldState front_state(const Grid& g, double x0, double eps, int orientation,
                       const std::function<double(double)>& T) {
  FieldState s = make_state(g, 0.0, 0.0);
  for (int i = 0; i < g.nx; ++i) {
    s.phi[i] = tanh_front(g.x(i), x0, eps, orientation);
    s.T[i] = T(g.x(i));
  }
  return s;
}

double position_at(const ReferenceTrajectory& r, double t) {
  for (std::size_t k = 1; k < r.times.size(); ++k)
    if (r.times[k] >= t) {
      const double w = (t - r.times[k - 1]) / (r.times[k] - r.times[k - 1]);
      return (1 - w) * r.positions[k - 1] + w * r.positions[k];
    }
  return r.positions.back();
}

ReferenceOptions small_drive(double A, double q, int nodes = 100) {
  ReferenceOptions o;
  o.sigma0 = profile_up().sigma0;
  o.theta = 1.0;
  o.Lx = 2.0;
  o.front = 1.0;
  o.right = {true, -A};
  o.T_initial = [A](double x) { return -A * x / 2.0; };
  o.t_end = 0.5;
  o.nodes_per_side = nodes;
  o.sample_every = 0.01;
  o.quadratic_coefficient = q;
  return o;
}

}  // namespace

TEST_CASE("linear field crosses exactly at its level") {
  const Grid g = Grid::line(100);
  FieldState s = make_state(g, 0.0, 0.0);
  for (int i = 0; i < g.nx; ++i) s.phi[i] = g.x(i);
  const auto geom = locate_interface(g, s, 0.5);
  REQUIRE(geom.positions.size() == 1);
  CHECK(geom.positions[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(geom.orientation == 1);
  CHECK_FALSE(geom.grazing);
}

TEST_CASE("tanh front is located within a squared spacing") {
  const Grid g = Grid::line(200);
  for (int o : {1, -1}) {
    const auto geom = locate_interface(g, front_state(g, 0.3, 0.05, o, [](double) { return 0.0; }), 0.5);
    REQUIRE(geom.positions.size() == 1);
    CHECK(std::abs(geom.positions[0] - 0.3) < g.dx() * g.dx());
    CHECK(geom.orientation == o);
  }
}

TEST_CASE("pure phase has no interface") {
  const Grid g = Grid::line(64);
  CHECK(locate_interface(g, make_state(g, 0.0, 0.0), 0.5).positions.empty());
  CHECK(locate_interface(Grid::rect(16, 16), make_state(Grid::rect(16, 16), 1.0, 0.0), 0.5)
            .positions.empty());
}

TEST_CASE("bubble radius and curvature") {
  const Grid g = Grid::rect(160, 160);
  FieldState s = make_state(g, 0.0, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s.phi[j * g.nx + i] = tanh_front(std::hypot(g.x(i), g.y(j)), 0.25, 0.02, -1);
  const auto geom = locate_interface(g, s, 0.5);
  REQUIRE(geom.radial);
  CHECK(geom.positions[0] == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(geom.H == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(geom.orientation == 1);  // liquid toward the centre, along the inward normal
}

TEST_CASE("kinematics of stationary, linear and radial series") {
  std::vector<double> t, still, moving;
  for (int k = 0; k < 6; ++k) {
    t.push_back(0.1 * k * k + 0.3 * k);  // nonuniform
    still.push_back(0.4);
    moving.push_back(0.2 + 0.7 * t.back());
  }
  for (double v : interface_kinematics(still, t).v) CHECK(std::abs(v) < 1e-15);
  for (double v : interface_kinematics(moving, t).v) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
  const auto r = interface_kinematics(moving, t, true, 2);
  for (double v : r.v) CHECK(v == doctest::Approx(-0.7).epsilon(1e-12));
  const auto q = interface_kinematics({0.25, 0.25, 0.25}, {0.0, 1.0, 2.0}, true, 2);
  CHECK(q.H[0] == 4.0);
  CHECK_THROWS_AS(interface_kinematics({0.1, 0.5, 0.1}, {0.0, 1.0, 2.0}, false, 1, 0.01),
                  NumericalError);
  CHECK_THROWS_AS(interface_kinematics({0.1, 0.2}, {0.0, 1.0}), DomainError);
}

TEST_CASE("flux jump of linear and piecewise-linear temperatures") {
  const Grid g = Grid::line(400);
  const double eps = 0.02, p = 0.5;
  auto geom_of = [&](const FieldState& s) { return locate_interface(g, s, 0.5); };
  const FieldState lin = front_state(g, p, eps, 1, [](double x) { return 0.3 - 1.7 * x; });
  const auto f0 = flux_jump_measure(g, lin, geom_of(lin), eps);
  CHECK(std::abs(f0.jump) < 1e-10);
  CHECK(f0.warning.empty());
  const double s1 = 0.8, s2 = -2.5;
  const FieldState pw = front_state(g, p, eps, 1, [&](double x) { return x < p ? s1 * (x - p) : s2 * (x - p); });
  const auto geom = geom_of(pw);
  const auto f1 = flux_jump_measure(g, pw, geom, eps);
  CHECK(f1.jump == doctest::Approx(s2 - s1).epsilon(1e-10));
  CHECK(std::abs(f1.T_plus) < 1e-10);
  CHECK(std::abs(f1.T_minus) < 1e-10);
  const auto f2 = flux_jump_measure(g, pw, geom, eps, 1.0, 10.0);
  CHECK(f2.inner_edge_too_close);
  CHECK_FALSE(f2.warning.empty());
  CHECK_THROWS_AS(flux_jump_measure(g, pw, geom, 0.1), DomainError);
}

TEST_CASE("mirroring the configuration leaves the measured jump unchanged") {
  const Grid g = Grid::line(400);
  const double eps = 0.02;
  auto T = [](double x) { return x < 0.45 ? 0.5 * (x - 0.45) : -1.2 * (x - 0.45); };
  const FieldState a = front_state(g, 0.45, eps, 1, T);
  const FieldState b = front_state(g, 0.55, eps, -1, [&](double x) { return T(1.0 - x); });
  const auto ga = locate_interface(g, a, 0.5), gb = locate_interface(g, b, 0.5);
  CHECK(gb.orientation == -ga.orientation);
  CHECK(flux_jump_measure(g, b, gb, eps).jump ==
        doctest::Approx(flux_jump_measure(g, a, ga, eps).jump).epsilon(1e-10));
}

TEST_CASE("weighted temperature of a constant field is that constant") {
  const Grid g = Grid::line(400);
  for (int o : {1, -1}) {
    const FieldState s = front_state(g, 0.5, 0.02, o, [](double) { return -0.37; });
    const auto geom = locate_interface(g, s, 0.5);
    CHECK(weighted_temperature(g, s, geom, profile_up(), 0.02) == doctest::Approx(-0.37).epsilon(1e-10));
    CHECK(interface_temperature(g, s, geom) == doctest::Approx(-0.37).epsilon(1e-12));
  }
}

TEST_CASE("weighted temperature of a field linear along the normal is its interface value") {
  const Grid g = Grid::line(800);
  const FieldState s = front_state(g, 0.5, 0.01, 1, [](double x) { return 2.0 * (x - 0.5) + 0.1; });
  const auto geom = locate_interface(g, s, 0.5);
  CHECK(weighted_temperature(g, s, geom, profile_up(), 0.01) == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("stationary front at zero temperature has vanishing defects") {
  Measurements m;
  const auto r = stefan_residuals(m, profile_up(), model::SharpScalings{}, 1.0);
  CHECK(r.gibbs_thomson_defect == 0.0);
  CHECK(r.jump_defect == 0.0);
  CHECK(r.linear_jump_defect == 0.0);
}

TEST_CASE("manufactured interface data satisfy the laws") {
  gen::Gen r(51);
  const double s0 = profile_up().sigma0;
  for (int trial = 0; trial < 200; ++trial) {
    model::SharpScalings bars;
    bars.alpha_bar = r.log_uniform(0.1, 10);
    bars.beta_bar = r.log_uniform(0.1, 10);
    bars.gamma_bar = r.log_uniform(0.1, 10);
    bars.delta_bar = r.log_uniform(0.1, 10);
    const double theta = r.log_uniform(0.1, 10);
    Measurements m;
    m.orientation = 1;
    m.v = r.uniform(-2, 2);
    m.H = r.uniform(-3, 3);
    m.T_weighted = s0 * (m.H - bars.alpha_bar * m.v) / bars.gamma_bar;
    m.jump = -(bars.gamma_bar * (m.T_weighted + theta) * m.v +
               2 * bars.alpha_bar * s0 * m.v * m.v) / bars.delta_bar;
    const auto res = stefan_residuals(m, profile_up(), bars, theta);
    const double scale = 1 + std::abs(bars.gamma_bar * theta * m.v) + bars.alpha_bar * m.v * m.v;
    CHECK(std::abs(res.gibbs_thomson_defect) < 1e-12 * scale);
    CHECK(std::abs(res.jump_defect) < 1e-12 * scale);
    const double quad = 2 * bars.alpha_bar * s0 * m.v * m.v;
    CHECK(res.linear_jump_defect == doctest::Approx(-quad).epsilon(1e-10).scale(scale));
    CHECK(res.jump_defect - res.linear_jump_defect == doctest::Approx(quad).epsilon(1e-12));
    CHECK(res.energy_jump_defect == doctest::Approx(-0.5 * quad).epsilon(1e-10).scale(scale));
  }
}

TEST_CASE("defects are invariant under swapping the phases") {
  gen::Gen r(52);
  const auto down = profile::solve_profile(standard(), 20.0, 2048, -1);
  for (int trial = 0; trial < 100; ++trial) {
    model::SharpScalings bars;
    bars.alpha_bar = r.log_uniform(0.1, 10);
    bars.gamma_bar = r.log_uniform(0.1, 10);
    bars.delta_bar = r.log_uniform(0.1, 10);
    Measurements a;
    a.v = r.uniform(-2, 2);
    a.T_weighted = r.uniform(-1, 1);
    a.jump = r.uniform(-3, 3);
    Measurements b = a;
    b.orientation = -1;
    b.v = -a.v;
    const auto ra = stefan_residuals(a, profile_up(), bars, 1.5);
    const auto rb = stefan_residuals(b, down, bars, 1.5);
    CHECK(ra.gibbs_thomson_defect == doctest::Approx(rb.gibbs_thomson_defect).epsilon(1e-14));
    CHECK(ra.jump_defect == doctest::Approx(rb.jump_defect).epsilon(1e-14));
    CHECK(ra.linear_jump_defect == doctest::Approx(rb.linear_jump_defect).epsilon(1e-14));
  }
}

TEST_CASE("orientation mismatch is rejected") {
  Measurements m;
  m.orientation = -1;
  CHECK_THROWS_AS(stefan_residuals(m, profile_up(), model::SharpScalings{}, 1.0), DomainError);
  m.orientation = 0;
  CHECK_THROWS_AS(stefan_residuals(m, profile_up(), model::SharpScalings{}, 1.0), DomainError);
}

TEST_CASE("traveling wave satisfies both interface laws") {
  const double s0 = profile_up().sigma0, theta = 1.0, T_inf = -1.5;
  model::SharpScalings bars;
  bars.beta_bar = 1.3;
  bars.delta_bar = 0.7;
  for (double q : {0.0, 1.0, 2.0}) {
    const auto w = traveling_wave(bars, theta, s0, T_inf, q);
    CHECK(w.c > 0);
    // liquid on the right: T = T_inf + (T_f - T_inf) exp(-decay (x - ct)), solid at T_f
    Measurements m;
    m.v = w.c;
    m.T_weighted = w.T_front;
    m.jump = -w.decay * (w.T_front - T_inf);
    CHECK(std::abs(s0 * (-bars.alpha_bar * w.c) - bars.gamma_bar * w.T_front) < 1e-12);
    CHECK(std::abs(jump_defect(m, s0, bars, theta, q)) < 1e-12);
    // heat equation in the moving frame
    CHECK(bars.beta_bar * w.c * w.decay == doctest::Approx(bars.delta_bar * w.decay * w.decay));
  }
  CHECK_THROWS_AS(traveling_wave(bars, theta, s0, -0.5, 2.0), DomainError);
}

TEST_CASE("oracle front at zero temperature stays put") {
  ReferenceOptions o = small_drive(0.0, 2.0);
  const auto r = stefan_reference_1d(o);
  REQUIRE(r.positions.size() > 10);
  for (double p : r.positions) CHECK(p == 1.0);
  for (double v : r.velocities) CHECK(v == 0.0);
}

TEST_CASE("oracle quadratic term shifts the front at second order in the speed") {
  double diff[3];
  for (int k = 0; k < 3; ++k) {
    const double A = 0.2 / (1 << k);
    const auto full = stefan_reference_1d(small_drive(A, 2.0));
    const auto lin = stefan_reference_1d(small_drive(A, 0.0));
    CHECK(std::abs(full.positions.back() - 1.0) > 0.0);
    diff[k] = std::abs(full.positions.back() - lin.positions.back());
  }
  CHECK(diff[0] / diff[1] == doctest::Approx(4.0).epsilon(0.15));
  CHECK(diff[1] / diff[2] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("oracle converges under refinement") {
  double p[4];
  for (int k = 0; k < 4; ++k) p[k] = stefan_reference_1d(small_drive(0.5, 2.0, 25 << k)).positions.back();
  const double d1 = std::abs(p[1] - p[0]), d2 = std::abs(p[2] - p[1]), d3 = std::abs(p[3] - p[2]);
  CHECK(d2 < 0.6 * d1);
  CHECK(d3 < 0.6 * d2);
}

TEST_CASE("oracle seeded with the traveling wave moves at its speed") {
  SweepOptions so;
  so.theta = 1.0;
  so.planar.seed_quadratic_coefficient = 2.0;
  so.planar.t_end = 1.0;
  const double s0 = profile_up().sigma0;
  const auto w = traveling_wave(so.bars, so.theta, s0, so.planar.T_inf, 2.0);
  const auto r = stefan_reference_1d(planar_reference_options(so, s0, 2.0, 200));
  CHECK(position_at(r, 1.0) - position_at(r, 0.0) == doctest::Approx(w.c).epsilon(0.01));
  CHECK(r.interface_T.back() == doctest::Approx(w.T_front).epsilon(0.01));
}

TEST_CASE("oracle rejects bad setups") {
  ReferenceOptions o = small_drive(0.1, 2.0);
  o.front = 2.5;
  CHECK_THROWS_AS(stefan_reference_1d(o), DomainError);
  o = small_drive(0.1, 2.0);
  o.nodes_per_side = 2;
  CHECK_THROWS_AS(stefan_reference_1d(o), DomainError);
  o = small_drive(0.1, 2.0);
  o.T_initial = nullptr;
  CHECK_THROWS_AS(stefan_reference_1d(o), DomainError);
}

TEST_CASE("fitted order of a power law") {
  CHECK(fitted_order({0.1, 0.05, 0.025}, {0.02, 0.005, 0.00125}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fitted_order({0.1, 0.05}, {-3e-3, -1.5e-3}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-entry sweep yields one row with scaled parameters") {
  SweepOptions so;
  so.theta = 1.0;
  so.bars.gamma_bar = 1.2;
  so.bars.alpha_bar = 0.9;
  so.eps_list = {0.08};
  so.planar.t_end = 0.1;
  so.planar.richardson = false;
  const auto rep = eps_sweep(so, standard());
  REQUIRE(rep.rows.size() == 1);
  const auto& row = rep.rows[0];
  CHECK(row.eps == 0.08);
  CHECK(row.hat.gamma / row.eps == doctest::Approx(1.2).epsilon(1e-14));
  CHECK(row.hat.alpha_hat / (row.eps * row.eps) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(std::isfinite(row.res.gibbs_thomson_defect));
  CHECK(std::isfinite(row.res.jump_defect));
  CHECK_FALSE(row.truncated);
  CHECK(row.m.v > 0);

  const auto again = sweep_row(so, standard(), profile_up(), 0.08);
  CHECK(again.m.v == row.m.v);
  CHECK(again.m.jump == row.m.jump);
  CHECK(again.positions == row.positions);
}

TEST_CASE("sweep rejects an increasing eps list") {
  SweepOptions so;
  so.eps_list = {0.04, 0.08};
  CHECK_THROWS_AS(eps_sweep(so, standard()), DomainError);
}
