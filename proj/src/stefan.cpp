#include "caginalp/stefan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "caginalp/errors.hpp"
#include "caginalp/pde.hpp"

namespace caginalp::stefan {

namespace {

// Four-point Lagrange interpolation of samples u at abscissae x0 + k*dx.
double cubic(const std::vector<double>& u, double x0, double dx, double x) {
  const int n = static_cast<int>(u.size());
  if (n < 4) throw DomainError("interpolation needs at least 4 samples");
  const double s = (x - x0) / dx;
  if (s <= 0.0) return u.front();
  if (s >= n - 1) return u.back();
  const int k = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, n - 4);
  const double t = s - k;
  double out = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int c = 0; c < 4; ++c)
      if (c != a) l *= (t - c) / (a - c);
    out += l * u[k + a];
  }
  return out;
}

// Bilinear on a cell-centred 2D grid, mirrored across the low faces.
double bilinear(const Grid& g, const std::vector<double>& u, double x, double y) {
  auto coord = [](double p, double h, int n, int& i, double& f) {
    double s = p / h - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(n - 1));
    i = std::min(static_cast<int>(std::floor(s)), n - 2);
    f = s - i;
  };
  int i, j;
  double fx, fy;
  coord(std::abs(x), g.dx(), g.nx, i, fx);
  coord(std::abs(y), g.dy(), g.ny, j, fy);
  auto at = [&](int a, int b) { return u[static_cast<std::size_t>(b) * g.nx + a]; };
  return (1 - fy) * ((1 - fx) * at(i, j) + fx * at(i + 1, j)) +
         fy * ((1 - fx) * at(i, j + 1) + fx * at(i + 1, j + 1));
}

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line l;
  l.slope = sxy / sxx;
  l.intercept = my - l.slope * mx;
  return l;
}

std::vector<double> row_phi(const Grid& g, const std::vector<double>& u, int j) {
  return {u.begin() + static_cast<long>(j) * g.nx, u.begin() + static_cast<long>(j + 1) * g.nx};
}

std::vector<double> column_phi(const Grid& g, const std::vector<double>& u, int i) {
  std::vector<double> out(g.ny);
  for (int j = 0; j < g.ny; ++j) out[j] = u[static_cast<std::size_t>(j) * g.nx + i];
  return out;
}

// Temperature sampled at signed distance d along N.
double T_along_normal(const Grid& g, const FieldState& s, const InterfaceGeometry& geom,
                      double d) {
  if (!geom.radial) return cubic(s.T, g.x(0), g.dx(), geom.positions.front() + d);
  const double r = std::abs(geom.positions.front() - d);
  const double c = r / std::sqrt(2.0);
  return bilinear(g, s.T, c, c);
}

}  // namespace

std::vector<Crossing> locate_crossings(const std::vector<double>& x, const std::vector<double>& phi,
                                       double b) {
  const int n = static_cast<int>(phi.size());
  std::vector<Crossing> out;
  if (n < 2) return out;
  const double dx = x[1] - x[0];
  for (int i = 0; i + 1 < n; ++i) {
    const double a = phi[i] - b, c = phi[i + 1] - b;
    if ((a < 0.0) == (c < 0.0)) continue;
    Crossing cr;
    cr.orientation = c > a ? 1 : -1;
    cr.grazing = std::abs(c - a) < 1e-8;
    double t = cr.grazing ? 0.5 : a / (a - c);
    if (n >= 4 && !cr.grazing) {
      // Newton on the local cubic, kept inside the bracket.
      const int k = std::clamp(i - 1, 0, n - 4);
      auto p = [&](double tt, double& dp) {
        const double s = i - k + tt;
        double val = 0.0;
        dp = 0.0;
        for (int q = 0; q < 4; ++q) {
          double l = 1.0, dl = 0.0;
          for (int r = 0; r < 4; ++r) {
            if (r == q) continue;
            dl = dl * (s - r) / (q - r) + l / (q - r);
            l *= (s - r) / (q - r);
          }
          val += l * phi[k + q];
          dp += dl * phi[k + q];
        }
        return val - b;
      };
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 50; ++it) {
        double dp;
        const double f = p(t, dp);
        if ((f < 0.0) == (a < 0.0)) lo = t; else hi = t;
        double next = t - f / dp;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) < 1e-15) {
          t = next;
          break;
        }
        t = next;
      }
    }
    cr.position = x[i] + t * dx;
    out.push_back(cr);
  }
  return out;
}

InterfaceGeometry locate_interface(const Grid& g, const FieldState& s, double b) {
  check_shape(g, s);
  InterfaceGeometry geom;
  if (g.dim == 1) {
    std::vector<double> x(g.nx);
    for (int i = 0; i < g.nx; ++i) x[i] = g.x(i);
    const auto cr = locate_crossings(x, s.phi, b);
    if (cr.empty()) return geom;
    geom.orientation = cr.front().orientation;
    for (const auto& c : cr) {
      geom.positions.push_back(c.position);
      geom.grazing = geom.grazing || c.grazing;
    }
    return geom;
  }
  // Bubble centred at the origin of the quarter domain.
  std::vector<double> x(g.nx), y(g.ny);
  for (int i = 0; i < g.nx; ++i) x[i] = g.x(i);
  for (int j = 0; j < g.ny; ++j) y[j] = g.y(j);
  const auto cx = locate_crossings(x, row_phi(g, s.phi, 0), b);
  const auto cy = locate_crossings(y, column_phi(g, s.phi, 0), b);
  if (cx.empty() || cy.empty()) return geom;
  const double rx = std::hypot(cx.front().position, g.y(0));
  const double ry = std::hypot(cy.front().position, g.x(0));
  geom.radial = true;
  geom.positions = {0.5 * (rx + ry)};
  // N points inward; phi increasing along N means phi decreasing in r.
  geom.orientation = -cx.front().orientation;
  geom.grazing = cx.front().grazing || cy.front().grazing;
  geom.H = (g.dim - 1) / geom.positions.front();
  return geom;
}

Kinematics interface_kinematics(const std::vector<double>& positions,
                                const std::vector<double>& times, bool radial, int dim,
                                double spacing) {
  if (positions.size() != times.size()) throw DomainError("positions and times differ in length");
  if (positions.size() < 3) throw DomainError("interface kinematics needs at least 3 samples");
  for (std::size_t k = 1; k < positions.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw DomainError("times must increase");
    if (spacing > 0.0 && std::abs(positions[k] - positions[k - 1]) > 5.0 * spacing) {
      std::ostringstream os;
      os << "interface jumps by " << std::abs(positions[k] - positions[k - 1]) << " between t="
         << times[k - 1] << " and t=" << times[k];
      throw NumericalError(os.str());
    }
  }
  Kinematics k;
  for (std::size_t i = 1; i + 1 < positions.size(); ++i) {
    const double ta = times[i - 1], tb = times[i], tc = times[i + 1];
    const double h1 = tb - ta, h2 = tc - tb;
    // Three-point derivative at the middle sample, exact for quadratics.
    const double d = -h2 / (h1 * (h1 + h2)) * positions[i - 1] +
                     (h2 - h1) / (h1 * h2) * positions[i] +
                     h1 / (h2 * (h1 + h2)) * positions[i + 1];
    k.times.push_back(tb);
    k.v.push_back(radial ? -d : d);
    k.H.push_back(radial ? (dim - 1) / positions[i] : 0.0);
  }
  return k;
}

FluxJump flux_jump_measure(const Grid& g, const FieldState& s, const InterfaceGeometry& geom,
                           double eps, double inner, double outer) {
  check_shape(g, s);
  if (geom.positions.empty()) throw DomainError("no interface to measure");
  if (!(outer > inner && inner > 0.0)) throw DomainError("fitting window must satisfy 0 < inner < outer");
  const double p = geom.positions.front();
  const double lo = inner * eps, hi = outer * eps;
  if (!geom.radial) {
    if (p - hi < 0.0 || p + hi > g.Lx) throw DomainError("fitting window leaves the domain");
  } else {
    const double Lmin = std::min(g.Lx, g.Ly);
    if (p - hi < 0.0 || p + hi > Lmin) throw DomainError("fitting window leaves the domain");
  }
  std::vector<double> dp, Tp, dm, Tm;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const int i = static_cast<int>(c % g.nx);
    const int j = static_cast<int>(c / g.nx);
    const double d = geom.radial ? p - std::hypot(g.x(i), g.y(j)) : g.x(i) - p;
    if (d >= lo && d <= hi) {
      dp.push_back(d);
      Tp.push_back(s.T[c]);
    } else if (d <= -lo && d >= -hi) {
      dm.push_back(d);
      Tm.push_back(s.T[c]);
    }
  }
  if (dp.size() < 2 || dm.size() < 2) throw DomainError("fitting window holds fewer than 2 cells");
  const Line a = least_squares(dp, Tp), b = least_squares(dm, Tm);
  FluxJump f;
  f.slope_plus = a.slope;
  f.slope_minus = b.slope;
  f.T_plus = a.intercept;
  f.T_minus = b.intercept;
  f.jump = a.slope - b.slope;
  f.inner_edge_too_close = inner < 2.0;
  if (f.inner_edge_too_close) f.warning = "inner fitting edge inside the diffuse layer";
  const double tol = 0.05 * std::max(1.0, std::max(std::abs(a.intercept), std::abs(b.intercept)));
  if (std::abs(a.intercept - b.intercept) > tol) {
    std::ostringstream os;
    os.precision(10);
    os << "side fits disagree at the interface: " << a.intercept << " vs " << b.intercept;
    if (!f.warning.empty()) f.warning += "; ";
    f.warning += os.str();
  }
  return f;
}

double weighted_temperature(const Grid& g, const FieldState& s, const InterfaceGeometry& geom,
                            const profile::ProfileSolution& sol, double eps) {
  if (geom.positions.empty()) throw DomainError("no interface");
  const double flip = geom.orientation * sol.orientation;
  return profile::weighted_average(
      sol, [&](double z) { return T_along_normal(g, s, geom, flip * eps * z); });
}

double interface_temperature(const Grid& g, const FieldState& s, const InterfaceGeometry& geom) {
  if (geom.positions.empty()) throw DomainError("no interface");
  return T_along_normal(g, s, geom, 0.0);
}

double jump_defect(const Measurements& m, double sigma0, const model::SharpScalings& bars,
                   double theta, double q) {
  return bars.delta_bar * m.jump + m.orientation * bars.gamma_bar * (m.T_weighted + theta) * m.v +
         q * bars.alpha_bar * sigma0 * m.v * m.v;
}

StefanResiduals stefan_residuals(const Measurements& m, const profile::ProfileSolution& sol,
                                 const model::SharpScalings& bars, double theta) {
  if (std::abs(m.orientation) != 1) throw DomainError("orientation must be +1 or -1");
  if (m.orientation != sol.orientation)
    throw DomainError("measurement orientation does not match the profile orientation");
  const double s0 = sol.sigma0;
  StefanResiduals r;
  const double vL = m.orientation * m.v, HL = m.orientation * m.H;
  r.gibbs_thomson_defect = s0 * (HL - bars.alpha_bar * vL) - bars.gamma_bar * m.T_weighted;
  r.jump_defect = jump_defect(m, s0, bars, theta, 2.0);
  r.linear_jump_defect = jump_defect(m, s0, bars, theta, 0.0);
  r.energy_jump_defect = jump_defect(m, s0, bars, theta, 1.0);
  r.interface_temperature = m.T_interface;
  r.weighted_temperature = m.T_weighted;
  return r;
}

TravelingWave traveling_wave(const model::SharpScalings& bars, double theta, double sigma0,
                             double T_inf, double q) {
  const double drive = bars.gamma_bar * theta + bars.beta_bar * T_inf;
  const double k = sigma0 * bars.alpha_bar * (q - 1.0 + bars.beta_bar / bars.gamma_bar);
  if (!(drive < 0.0) || !(k > 0.0))
    throw DomainError("no solidification wave: need beta_bar T_inf < -gamma_bar theta");
  TravelingWave w;
  w.c = -drive / k;
  w.T_front = -sigma0 * bars.alpha_bar * w.c / bars.gamma_bar;
  w.decay = bars.beta_bar * w.c / bars.delta_bar;
  return w;
}

// ---------------------------------------------------------------------------

ReferenceTrajectory stefan_reference_1d(const ReferenceOptions& o) {
  const auto& B = o.bars;
  if (!(o.Lx > 0.0) || !(o.front > 0.0 && o.front < o.Lx))
    throw DomainError("front must lie inside (0, Lx)");
  if (!(o.sigma0 > 0.0)) throw DomainError("sigma0 must be positive");
  if (o.nodes_per_side < 4) throw DomainError("nodes_per_side must be at least 4");
  if (!o.T_initial) throw DomainError("initial temperature missing");

  // Work in a frame with the liquid on the right.
  const bool mirror = !o.liquid_right;
  const EndCondition left = mirror ? o.right : o.left;
  const EndCondition right = mirror ? o.left : o.right;
  auto to_phys = [&](double x) { return mirror ? o.Lx - x : x; };

  const int m = o.nodes_per_side;
  const double dxi = 1.0 / m;
  double s = mirror ? o.Lx - o.front : o.front;
  std::vector<double> TS(m + 1), TL(m + 1);
  for (int j = 0; j <= m; ++j) {
    TS[j] = o.T_initial(to_phys(j * dxi * s));
    TL[j] = o.T_initial(to_phys(s + j * dxi * (o.Lx - s)));
  }
  if (left.dirichlet) TS[0] = left.value;
  if (right.dirichlet) TL[m] = right.value;

  const double vmax = 10.0 * B.gamma_bar * o.theta / (2.0 * B.alpha_bar * o.sigma0);
  const double kappa = B.delta_bar / B.beta_bar;

  auto front_T = [&](double v) { return -o.sigma0 * B.alpha_bar * v / B.gamma_bar; };
  auto residual = [&](double v) {
    const double Tf = front_T(v);
    const double hS = s * dxi, hL = (o.Lx - s) * dxi;
    const double gl = (-3.0 * Tf + 4.0 * TL[1] - TL[2]) / (2.0 * hL);
    const double gs = (3.0 * Tf - 4.0 * TS[m - 1] + TS[m - 2]) / (2.0 * hS);
    return B.delta_bar * (gl - gs) + B.gamma_bar * (Tf + o.theta) * v +
           o.quadratic_coefficient * B.alpha_bar * o.sigma0 * v * v;
  };
  auto solve_v = [&]() {
    double a = -vmax, b = vmax;
    double fa = residual(a), fb = residual(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa < 0.0) == (fb < 0.0)) {
      std::ostringstream os;
      os << "no admissible front speed in [" << a << ", " << b << "]: residual " << fa << ", "
         << fb;
      throw NumericalError(os.str());
    }
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
      const double c = 0.5 * (a + b);
      const double fc = residual(c);
      if (fc == 0.0) return c;
      if ((fc < 0.0) == (fa < 0.0)) {
        a = c;
        fa = fc;
      } else {
        b = c;
      }
    }
    return 0.5 * (a + b);
  };

  ReferenceTrajectory out;
  auto record = [&](double t, double v) {
    out.times.push_back(t);
    out.positions.push_back(to_phys(s));
    out.velocities.push_back(mirror ? -v : v);
    out.interface_T.push_back(front_T(v));
  };

  std::vector<double> nS(m + 1), nL(m + 1);
  double t = 0.0;
  const double every = o.sample_every > 0.0 ? o.sample_every : o.t_end;
  double next_sample = 0.0;
  int sample_index = 0;
  while (true) {
    const double v = solve_v();
    const double Tf = front_T(v);
    TS[m] = Tf;
    TL[0] = Tf;
    if (t >= next_sample - 1e-12 * std::max(1.0, o.t_end)) {
      record(t, v);
      ++sample_index;
      next_sample = sample_index * every;
    }
    if (t >= o.t_end - 1e-12 * std::max(1.0, o.t_end)) {
      if (out.times.empty() || out.times.back() < t) record(t, v);
      break;
    }

    const double hS = s * dxi, hL = (o.Lx - s) * dxi;
    double dt = 0.4 * std::min(hS, hL) * std::min(hS, hL) / kappa;
    dt = std::min({dt, next_sample - t, o.t_end - t});
    if (!(dt > 0.0)) dt = std::min(o.t_end - t, 1e-300);

    // Solid on x = xi s, liquid on x = s + eta (Lx - s).
    for (int j = 0; j < m; ++j) {
      const double xi = j * dxi;
      double lo = j > 0 ? TS[j - 1] : TS[1] - 2.0 * hS * (-left.value);
      if (j == 0 && left.dirichlet) {
        nS[0] = TS[0];
        continue;
      }
      const double diff = kappa * (TS[j + 1] - 2.0 * TS[j] + lo) / (hS * hS);
      const double adv = xi * v * (TS[j + 1] - lo) / (2.0 * hS);
      nS[j] = TS[j] + dt * (diff + adv);
    }
    for (int j = 1; j <= m; ++j) {
      if (j == m && right.dirichlet) {
        nL[m] = TL[m];
        continue;
      }
      const double eta = j * dxi;
      const double hi = j < m ? TL[j + 1] : TL[m - 1] + 2.0 * hL * right.value;
      const double diff = kappa * (hi - 2.0 * TL[j] + TL[j - 1]) / (hL * hL);
      const double adv = (1.0 - eta) * v * (hi - TL[j - 1]) / (2.0 * hL);
      nL[j] = TL[j] + dt * (diff + adv);
    }
    for (int j = 0; j < m; ++j) TS[j] = nS[j];
    for (int j = 1; j <= m; ++j) TL[j] = nL[j];
    s += v * dt;
    t += dt;
    ++out.steps;
    if (!(s > 0.0 && s < o.Lx)) throw DomainError("front left the domain at t=" + std::to_string(t));
  }
  return out;
}

// ---------------------------------------------------------------------------

double fitted_order(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::abs(y[i])));
  }
  return least_squares(lx, ly).slope;
}

namespace {

SweepRow planar_run(const SweepOptions& opt, const model::Potentials& pot,
                    const profile::ProfileSolution& sol, double eps, double cells_per_eps,
                    double dt_per_eps2) {
  const PlanarScenario& P = opt.planar;
  model::SharpScalings bars = opt.bars;
  bars.eps = eps;
  SweepRow row;
  row.eps = eps;
  row.hat = model::hat_from_sharp(bars, opt.theta);

  const int N = static_cast<int>(std::ceil(P.Lx * cells_per_eps / eps));
  const Grid g = Grid::line(N, P.Lx);
  BoundarySpec bc;
  bc.q_b = 0.0;
  bc.T_b = P.T_inf;
  const auto T0 = planar_seed_temperature(opt, sol.sigma0);
  FieldState s = make_state(g, 0.0, 0.0);
  for (int i = 0; i < N; ++i) {
    const double x = g.x(i);
    s.phi[i] = profile::profile_value(sol, (x - P.x0) / eps);
    s.T[i] = T0(x);
  }

  const long n = static_cast<long>(std::ceil(P.t_end / (dt_per_eps2 * eps * eps)));
  const double dt = P.t_end / n;
  const long ktau = std::max<long>(1, std::lround(P.tau / dt));
  const long kev = std::max<long>(1, std::lround(P.sample_every / dt));
  pde::Stepper st(g, row.hat, pot, bc, dt);

  auto pos_of = [&](const FieldState& f) {
    const auto geom = locate_interface(g, f, sol.b);
    if (geom.positions.size() != 1) throw NumericalError("expected a single planar front");
    return geom;
  };
  const double margin = (10.0 + 1.0) * eps;
  std::vector<double> trail_t, trail_x;
  FieldState mid;
  for (long k = 0; k <= n; ++k) {
    if (k > 0) s = st.step(s);
    const bool sample = k % kev == 0 || k == n;
    const bool tail = k >= n - 2 * ktau;
    if (!sample && !tail) continue;
    const auto geom = pos_of(s);
    const double x = geom.positions.front();
    if (sample) {
      row.times.push_back(s.time);
      row.positions.push_back(x);
    }
    if (x - margin < 0.0 || x + margin > P.Lx) {
      row.truncated = true;
      row.note = "interface reached the boundary margin at t=" + std::to_string(s.time);
      break;
    }
    if (tail) {
      trail_t.push_back(s.time);
      trail_x.push_back(x);
      if (k == n - ktau) mid = s;
    }
  }
  if (row.truncated) {
    row.m = {};
    row.res.gibbs_thomson_defect = row.res.jump_defect = row.res.linear_jump_defect =
        row.res.energy_jump_defect = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  // Centred difference across [t_end - 2 tau, t_end].
  const std::size_t L = trail_t.size();
  const double v = (trail_x[L - 1] - trail_x[0]) / (trail_t[L - 1] - trail_t[0]);
  const InterfaceGeometry geom = pos_of(mid);
  const FluxJump fj = flux_jump_measure(g, mid, geom, eps);
  if (!fj.warning.empty()) row.note = fj.warning;
  Measurements& m = row.m;
  m.v = v;
  m.H = 0.0;
  m.orientation = geom.orientation;
  m.T_interface = interface_temperature(g, mid, geom);
  m.T_weighted = weighted_temperature(g, mid, geom, sol, eps);
  m.jump = fj.jump;
  row.res = stefan_residuals(m, sol, bars, opt.theta);
  return row;
}

SweepRow planar_row(const SweepOptions& opt, const model::Potentials& pot,
                    const profile::ProfileSolution& sol, double eps) {
  const PlanarScenario& P = opt.planar;
  SweepRow fine = planar_run(opt, pot, sol, eps, P.cells_per_eps, P.dt_per_eps2);
  if (!P.richardson || fine.truncated) return fine;
  // Second-order error in h and dt at fixed h/eps, dt/eps^2 leaves an
  // eps-independent floor; the coarse run removes it.
  const SweepRow coarse =
      planar_run(opt, pot, sol, eps, 0.5 * P.cells_per_eps, 2.0 * P.dt_per_eps2);
  if (coarse.truncated) return fine;
  auto ex = [](double f, double c) { return f + (f - c) / 3.0; };
  Measurements& m = fine.m;
  m.v = ex(fine.m.v, coarse.m.v);
  m.T_interface = ex(fine.m.T_interface, coarse.m.T_interface);
  m.T_weighted = ex(fine.m.T_weighted, coarse.m.T_weighted);
  m.jump = ex(fine.m.jump, coarse.m.jump);
  model::SharpScalings bars = opt.bars;
  bars.eps = eps;
  fine.res = stefan_residuals(m, sol, bars, opt.theta);
  return fine;
}

SweepRow radial_row(const SweepOptions& opt, const model::Potentials& pot,
                    const profile::ProfileSolution& sol, double eps) {
  const RadialScenario& R = opt.radial;
  model::SharpScalings bars = opt.bars;
  bars.eps = eps;
  SweepRow row;
  row.eps = eps;
  row.hat = model::hat_from_sharp(bars, opt.theta);
  const int N = static_cast<int>(std::ceil(R.L * R.cells_per_eps / eps));
  const Grid g = Grid::rect(N, N, R.L, R.L);
  BoundarySpec bc = BoundarySpec::insulated();
  FieldState s = make_state(g, 0.0, R.T0);
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      s.phi[static_cast<std::size_t>(j) * N + i] =
          profile::profile_value(sol, (R.R0 - std::hypot(g.x(i), g.y(j))) / eps);

  const long n = static_cast<long>(std::ceil(R.t_end / (R.dt_per_eps2 * eps * eps)));
  const double dt = R.t_end / n;
  const long ktau = std::max<long>(1, std::lround(R.tau / dt));
  if (2 * ktau > n) throw DomainError("radial scenario: t_end shorter than 2 tau");
  pde::Stepper st(g, row.hat, pot, bc, dt);
  std::vector<double> rt, rr;
  FieldState mid;
  for (long k = 0; k <= n; ++k) {
    if (k > 0) s = st.step(s);
    if (k == n - 2 * ktau || k == n - ktau || k == n) {
      const auto geom = locate_interface(g, s, sol.b);
      if (geom.positions.empty()) {
        row.truncated = true;
        row.note = "bubble vanished at t=" + std::to_string(s.time);
        row.res.gibbs_thomson_defect = row.res.jump_defect = row.res.linear_jump_defect =
            row.res.energy_jump_defect = std::numeric_limits<double>::quiet_NaN();
        return row;
      }
      rt.push_back(s.time);
      rr.push_back(geom.positions.front());
      row.times.push_back(s.time);
      row.positions.push_back(geom.positions.front());
      if (k == n - ktau) mid = s;
    }
  }
  const Kinematics kin = interface_kinematics(rr, rt, true, 2);
  const InterfaceGeometry geom = locate_interface(g, mid, sol.b);
  const FluxJump fj = flux_jump_measure(g, mid, geom, eps);
  if (!fj.warning.empty()) row.note = fj.warning;
  Measurements& m = row.m;
  m.v = kin.v.front();
  m.H = geom.H;
  m.orientation = geom.orientation;
  m.T_interface = interface_temperature(g, mid, geom);
  m.T_weighted = weighted_temperature(g, mid, geom, sol, eps);
  m.jump = fj.jump;
  row.res = stefan_residuals(m, sol, bars, opt.theta);
  return row;
}

}  // namespace

std::function<double(double)> planar_seed_temperature(const SweepOptions& opt, double sigma0) {
  const PlanarScenario& P = opt.planar;
  const TravelingWave w =
      traveling_wave(opt.bars, opt.theta, sigma0, P.T_inf, P.seed_quadratic_coefficient);
  return [w, P](double x) {
    return x < P.x0 ? w.T_front
                    : P.T_inf + (w.T_front - P.T_inf) * std::exp(-w.decay * (x - P.x0));
  };
}

ReferenceOptions planar_reference_options(const SweepOptions& opt, double sigma0,
                                          double quadratic_coefficient, int nodes_per_side) {
  const PlanarScenario& P = opt.planar;
  ReferenceOptions r;
  r.bars = opt.bars;
  r.theta = opt.theta;
  r.sigma0 = sigma0;
  r.Lx = P.Lx;
  r.front = P.x0;
  r.liquid_right = true;
  r.left = {false, 0.0};
  r.right = {true, P.T_inf};
  r.T_initial = planar_seed_temperature(opt, sigma0);
  r.t_end = P.t_end;
  r.nodes_per_side = nodes_per_side;
  r.sample_every = P.sample_every;
  r.quadratic_coefficient = quadratic_coefficient;
  return r;
}

SweepRow sweep_row(const SweepOptions& opt, const model::Potentials& pot,
                   const profile::ProfileSolution& sol, double eps) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  return opt.scenario == Scenario::planar_1d ? planar_row(opt, pot, sol, eps)
                                             : radial_row(opt, pot, sol, eps);
}

EpsSweepReport eps_sweep(const SweepOptions& opt, const model::Potentials& pot) {
  if (opt.eps_list.empty()) throw DomainError("eps_list is empty");
  for (std::size_t i = 1; i < opt.eps_list.size(); ++i)
    if (!(opt.eps_list[i] < opt.eps_list[i - 1])) throw DomainError("eps_list must decrease");

  // Both scenarios put the liquid on the +N side.
  const profile::ProfileSolution sol = profile::solve_profile(pot, 20.0, 2048, 1);
  EpsSweepReport rep;
  rep.rows.resize(opt.eps_list.size());
  std::vector<std::exception_ptr> errors(opt.eps_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < opt.eps_list.size(); i = next++) {
      try {
        rep.rows[i] = sweep_row(opt, pot, sol, opt.eps_list[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp<int>(opt.jobs, 1, static_cast<int>(opt.eps_list.size()));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> x, gt, jd, lj, ej;
  for (const auto& r : rep.rows) {
    if (r.truncated) continue;
    x.push_back(r.eps);
    gt.push_back(r.res.gibbs_thomson_defect);
    jd.push_back(r.res.jump_defect);
    lj.push_back(r.res.linear_jump_defect);
    ej.push_back(r.res.energy_jump_defect);
  }
  rep.order_gt = fitted_order(x, gt);
  rep.order_jump = fitted_order(x, jd);
  rep.order_linear_jump = fitted_order(x, lj);
  rep.order_energy_jump = fitted_order(x, ej);
  return rep;
}

}  // namespace caginalp::stefan
