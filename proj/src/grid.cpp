#include "caginalp/grid.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <string>

#include "caginalp/errors.hpp"

namespace caginalp {

Grid Grid::line(int n, double L) {
  Grid g;
  g.dim = 1;
  g.nx = n;
  g.ny = 1;
  g.Lx = L;
  g.Ly = 1.0;
  g.validate();
  return g;
}

Grid Grid::rect(int nx, int ny, double Lx, double Ly) {
  Grid g;
  g.dim = 2;
  g.nx = nx;
  g.ny = ny;
  g.Lx = Lx;
  g.Ly = Ly;
  g.validate();
  return g;
}

void Grid::validate() const {
  if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
  if (nx < 8 || (dim == 2 && ny < 8)) throw DomainError("grid needs at least 8 cells per axis");
  if (!(Lx > 0.0) || (dim == 2 && !(Ly > 0.0))) throw DomainError("grid extents must be positive");
}

double BoundarySpec::flux(Face f) const {
  const auto& o = flux_override[static_cast<int>(f)];
  return o ? *o : q_b;
}

bool BoundarySpec::pure_neumann(const Grid& g) const {
  for (int f = 0; f < g.face_count(); ++f)
    if (!gamma[f]) return false;
  return true;
}

BoundarySpec BoundarySpec::insulated() {
  BoundarySpec bc;
  bc.gamma = {true, true, true, true};
  return bc;
}

FieldState make_state(const Grid& g, double phi, double T) {
  FieldState s;
  s.phi.assign(g.size(), phi);
  s.T.assign(g.size(), T);
  return s;
}

void check_shape(const Grid& g, const FieldState& s) {
  if (s.phi.size() != g.size() || s.T.size() != g.size())
    throw DomainError("field size does not match grid (" + std::to_string(s.phi.size()) + "/" +
                      std::to_string(s.T.size()) + " vs " + std::to_string(g.size()) + ")");
}

namespace discrete {

namespace {

// Ghost value across face f for temperature data, given the adjacent cell
// value u0 and spacing h normal to the face.
inline double ghost_T(const BoundarySpec& bc, Face f, double u0, double h) {
  if (bc.is_gamma(f)) return u0 + bc.flux(f) * h;
  return 2.0 * bc.T_b - u0;
}

template <class Ghost>
void laplacian_impl(const Grid& g, const std::vector<double>& u, std::vector<double>& out,
                    Ghost ghost) {
  const int nx = g.nx, ny = g.dim == 2 ? g.ny : 1;
  const double ix2 = 1.0 / (g.dx() * g.dx());
  const double iy2 = g.dim == 2 ? 1.0 / (g.dy() * g.dy()) : 0.0;
  out.resize(u.size());
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = row + i;
      const double c = u[k];
      const double l = i > 0 ? u[k - 1] : ghost(Face::left, c, g.dx());
      const double r = i < nx - 1 ? u[k + 1] : ghost(Face::right, c, g.dx());
      double v = (l - 2.0 * c + r) * ix2;
      if (g.dim == 2) {
        const double b = j > 0 ? u[k - nx] : ghost(Face::bottom, c, g.dy());
        const double t = j < ny - 1 ? u[k + nx] : ghost(Face::top, c, g.dy());
        v += (b - 2.0 * c + t) * iy2;
      }
      out[k] = v;
    }
  }
}

}  // namespace

double integral(const Grid& g, const std::vector<double>& u) {
  double s = 0.0;
  for (double v : u) s += v;
  return s * g.cell_volume();
}

double l2_norm(const Grid& g, const std::vector<double>& u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s * g.cell_volume());
}

void laplacian_neumann(const Grid& g, const std::vector<double>& u, std::vector<double>& out) {
  laplacian_impl(g, u, out, [](Face, double u0, double) { return u0; });
}

void laplacian_T(const Grid& g, const BoundarySpec& bc, const std::vector<double>& u,
                 std::vector<double>& out) {
  laplacian_impl(g, u, out, [&](Face f, double u0, double h) { return ghost_T(bc, f, u0, h); });
}

void boundary_source(const Grid& g, const BoundarySpec& bc, std::vector<double>& out) {
  std::vector<double> zero(g.size(), 0.0);
  laplacian_T(g, bc, zero, out);
}

double grad_sq_neumann(const Grid& g, const std::vector<double>& u) {
  const int nx = g.nx, ny = g.dim == 2 ? g.ny : 1;
  const double wx = g.dy() / g.dx();
  const double wy = g.dim == 2 ? g.dx() / g.dy() : 0.0;
  double s = 0.0;
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 0; i + 1 < nx; ++i) {
      const double d = u[row + i + 1] - u[row + i];
      s += d * d * wx;
    }
    if (g.dim == 2 && j + 1 < ny)
      for (int i = 0; i < nx; ++i) {
        const double d = u[row + nx + i] - u[row + i];
        s += d * d * wy;
      }
  }
  return s;
}

double grad_sq_T(const Grid& g, const BoundarySpec& bc, const std::vector<double>& u) {
  double s = grad_sq_neumann(g, u);
  const int nx = g.nx, ny = g.dim == 2 ? g.ny : 1;
  auto add_x = [&](Face f, int i) {
    if (bc.is_gamma(f)) return;
    for (int j = 0; j < ny; ++j) {
      const double d = u[static_cast<std::size_t>(j) * nx + i] - bc.T_b;
      s += 2.0 * d * d * g.dy() / g.dx();
    }
  };
  add_x(Face::left, 0);
  add_x(Face::right, nx - 1);
  if (g.dim == 2) {
    auto add_y = [&](Face f, int j) {
      if (bc.is_gamma(f)) return;
      for (int i = 0; i < nx; ++i) {
        const double d = u[static_cast<std::size_t>(j) * nx + i] - bc.T_b;
        s += 2.0 * d * d * g.dx() / g.dy();
      }
    };
    add_y(Face::bottom, 0);
    add_y(Face::top, ny - 1);
  }
  return s;
}

void grad_sq_pointwise_T(const Grid& g, const BoundarySpec& bc, const std::vector<double>& u,
                         std::vector<double>& out) {
  const int nx = g.nx, ny = g.dim == 2 ? g.ny : 1;
  const double hx = g.dx(), hy = g.dy();
  out.assign(u.size(), 0.0);
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = row + i;
      const double c = u[k];
      // face gradients; a boundary face sits half a cell away
      const double gl = i > 0 ? (c - u[k - 1]) / hx : (c - bc.T_b) / (0.5 * hx);
      const double gr = i < nx - 1 ? (u[k + 1] - c) / hx : (bc.T_b - c) / (0.5 * hx);
      const double fl = (i == 0 && bc.is_gamma(Face::left)) ? -bc.flux(Face::left) : gl;
      const double fr = (i == nx - 1 && bc.is_gamma(Face::right)) ? bc.flux(Face::right) : gr;
      const double gxv = 0.5 * (fl + fr);
      double v = gxv * gxv;
      if (g.dim == 2) {
        const double gb = j > 0 ? (c - u[k - nx]) / hy : (c - bc.T_b) / (0.5 * hy);
        const double gt = j < ny - 1 ? (u[k + nx] - c) / hy : (bc.T_b - c) / (0.5 * hy);
        const double fb = (j == 0 && bc.is_gamma(Face::bottom)) ? -bc.flux(Face::bottom) : gb;
        const double ft = (j == ny - 1 && bc.is_gamma(Face::top)) ? bc.flux(Face::top) : gt;
        const double gyv = 0.5 * (fb + ft);
        v += gyv * gyv;
      }
      out[k] = v;
    }
  }
}

double boundary_inflow(const Grid& g, const BoundarySpec& bc, const std::vector<double>& u) {
  const int nx = g.nx, ny = g.dim == 2 ? g.ny : 1;
  double s = 0.0;
  auto face = [&](Face f, double u0, double h, double area) {
    s += (ghost_T(bc, f, u0, h) - u0) / h * area;
  };
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    face(Face::left, u[row], g.dx(), g.dy());
    face(Face::right, u[row + nx - 1], g.dx(), g.dy());
  }
  if (g.dim == 2)
    for (int i = 0; i < nx; ++i) {
      face(Face::bottom, u[i], g.dy(), g.dx());
      face(Face::top, u[static_cast<std::size_t>(ny - 1) * nx + i], g.dy(), g.dx());
    }
  return s;
}

double boundary_entropy_flux(const Grid& g, const BoundarySpec& bc, const std::vector<double>& u,
                             double theta) {
  const int nx = g.nx, ny = g.dim == 2 ? g.ny : 1;
  double s = 0.0;
  auto face = [&](Face f, double u0, double h, double area) {
    const double gh = ghost_T(bc, f, u0, h);
    s += (gh - u0) / h / (0.5 * (gh + u0) + theta) * area;
  };
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    face(Face::left, u[row], g.dx(), g.dy());
    face(Face::right, u[row + nx - 1], g.dx(), g.dy());
  }
  if (g.dim == 2)
    for (int i = 0; i < nx; ++i) {
      face(Face::bottom, u[i], g.dy(), g.dx());
      face(Face::top, u[static_cast<std::size_t>(ny - 1) * nx + i], g.dy(), g.dx());
    }
  return s;
}

}  // namespace discrete

struct HelmholtzSolver::Impl {
  // 1D: Thomas factors
  std::vector<double> diag, lower_factor, inv_pivot;
  double off = 0.0;
  // 2D
  Eigen::SparseMatrix<double> A;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

std::array<bool, 4> HelmholtzSolver::for_T(const BoundarySpec& bc) {
  return {!bc.gamma[0], !bc.gamma[1], !bc.gamma[2], !bc.gamma[3]};
}

HelmholtzSolver::~HelmholtzSolver() = default;
HelmholtzSolver::HelmholtzSolver(HelmholtzSolver&&) noexcept = default;
HelmholtzSolver& HelmholtzSolver::operator=(HelmholtzSolver&&) noexcept = default;

HelmholtzSolver::HelmholtzSolver(const Grid& g, std::array<bool, 4> dirichlet, double c,
                                 double shift)
    : g_(g), c_(c), impl_(std::make_unique<Impl>()) {
  const double ix2 = 1.0 / (g.dx() * g.dx());
  if (g.dim == 1) {
    const int n = g.nx;
    auto& d = impl_->diag;
    d.assign(n, shift + 2.0 * c * ix2);
    d[0] = shift + c * ix2 * (dirichlet[0] ? 3.0 : 1.0);
    d[n - 1] = shift + c * ix2 * (dirichlet[1] ? 3.0 : 1.0);
    impl_->off = -c * ix2;
    impl_->lower_factor.assign(n, 0.0);
    impl_->inv_pivot.assign(n, 0.0);
    double piv = d[0];
    impl_->inv_pivot[0] = 1.0 / piv;
    for (int i = 1; i < n; ++i) {
      const double l = impl_->off * impl_->inv_pivot[i - 1];
      impl_->lower_factor[i] = l;
      piv = d[i] - l * impl_->off;
      impl_->inv_pivot[i] = 1.0 / piv;
    }
    return;
  }
  const int nx = g.nx, ny = g.ny;
  const double iy2 = 1.0 / (g.dy() * g.dy());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(g.size() * 5);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int k = j * nx + i;
      double d = shift;
      auto axis = [&](bool has_lo, bool has_hi, bool dir_lo, bool dir_hi, int stride, double w) {
        if (has_lo) {
          d += c * w;
          trip.emplace_back(k, k - stride, -c * w);
        } else if (dir_lo) {
          d += 2.0 * c * w;
        }
        if (has_hi) {
          d += c * w;
          trip.emplace_back(k, k + stride, -c * w);
        } else if (dir_hi) {
          d += 2.0 * c * w;
        }
      };
      axis(i > 0, i < nx - 1, dirichlet[0], dirichlet[1], 1, ix2);
      axis(j > 0, j < ny - 1, dirichlet[2], dirichlet[3], nx, iy2);
      trip.emplace_back(k, k, d);
    }
  impl_->A.resize(g.size(), g.size());
  impl_->A.setFromTriplets(trip.begin(), trip.end());
  impl_->ldlt.compute(impl_->A);
  if (impl_->ldlt.info() != Eigen::Success)
    throw NumericalError("sparse Cholesky factorisation failed");
}

void HelmholtzSolver::solve(const std::vector<double>& r, std::vector<double>& x) const {
  const std::size_t n = r.size();
  x.resize(n);
  double rnorm = 0.0, res = 0.0;
  if (g_.dim == 1) {
    const auto& lf = impl_->lower_factor;
    const auto& ip = impl_->inv_pivot;
    const double off = impl_->off;
    x[0] = r[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = r[i] - lf[i] * x[i - 1];
    x[n - 1] *= ip[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (x[i] - off * x[i + 1]) * ip[i];
    const auto& d = impl_->diag;
    for (std::size_t i = 0; i < n; ++i) {
      double ax = d[i] * x[i];
      if (i > 0) ax += off * x[i - 1];
      if (i + 1 < n) ax += off * x[i + 1];
      res = std::max(res, std::abs(ax - r[i]));
      rnorm = std::max(rnorm, std::abs(r[i]));
    }
  } else {
    Eigen::Map<const Eigen::VectorXd> rb(r.data(), static_cast<Eigen::Index>(n));
    Eigen::Map<Eigen::VectorXd> xb(x.data(), static_cast<Eigen::Index>(n));
    xb = impl_->ldlt.solve(rb);
    res = (impl_->A * xb - rb).lpNorm<Eigen::Infinity>();
    rnorm = rb.lpNorm<Eigen::Infinity>();
  }
  if (!(res <= 1e-10 * std::max(rnorm, 1e-300)) && !(res < 1e-280))
    throw NumericalError("linear solve residual " + std::to_string(res) + " exceeds tolerance");
}

}  // namespace caginalp
