#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace caginalp {

enum class Face { left = 0, right = 1, bottom = 2, top = 3 };

/// Uniform cell-centred grid on (0,Lx) or (0,Lx)x(0,Ly). Cell (i,j) is
/// stored at j*nx + i.
struct Grid {
  int dim = 1;
  int nx = 256;
  int ny = 1;
  double Lx = 1.0;
  double Ly = 1.0;

  static Grid line(int n, double L = 1.0);
  static Grid rect(int nx, int ny, double Lx = 1.0, double Ly = 1.0);

  double dx() const { return Lx / nx; }
  double dy() const { return dim == 2 ? Ly / ny : 1.0; }
  double cell_volume() const { return dx() * dy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * (dim == 2 ? ny : 1); }
  double x(int i) const { return (i + 0.5) * dx(); }
  double y(int j) const { return (j + 0.5) * dy(); }
  double volume() const { return Lx * (dim == 2 ? Ly : 1.0); }
  int face_count() const { return dim == 2 ? 4 : 2; }

  void validate() const;
  bool operator==(const Grid&) const = default;
};

/// Temperature boundary data. Faces in Gamma carry the Neumann flux
/// dT/dn = q_b (outward normal), the rest carry T = T_b. phi is always
/// homogeneous Neumann.
struct BoundarySpec {
  double q_b = 0.0;
  double T_b = 0.0;
  std::array<bool, 4> gamma{true, false, false, false};
  /// Per-face flux replacing q_b on that Gamma face (used for symmetry
  /// planes, which need zero flux while another face carries q_b).
  std::array<std::optional<double>, 4> flux_override{};

  bool is_gamma(Face f) const { return gamma[static_cast<int>(f)]; }
  double flux(Face f) const;
  bool pure_neumann(const Grid& g) const;
  static BoundarySpec insulated();
  bool operator==(const BoundarySpec&) const = default;
};

struct FieldState {
  std::vector<double> phi;
  std::vector<double> T;
  double time = 0.0;
};

FieldState make_state(const Grid& g, double phi, double T);
void check_shape(const Grid& g, const FieldState& s);

namespace discrete {

double integral(const Grid& g, const std::vector<double>& u);
double l2_norm(const Grid& g, const std::vector<double>& u);

/// Neumann Laplacian (ghost reflection).
void laplacian_neumann(const Grid& g, const std::vector<double>& u, std::vector<double>& out);
/// Temperature Laplacian with the affine boundary terms of `bc`.
void laplacian_T(const Grid& g, const BoundarySpec& bc, const std::vector<double>& u,
                 std::vector<double>& out);
/// Only the boundary-data part of laplacian_T (what it returns for u = 0).
void boundary_source(const Grid& g, const BoundarySpec& bc, std::vector<double>& out);

/// Sum over faces of squared face differences, i.e. -<u, Lap u> for
/// homogeneous data. Neumann version for phi.
double grad_sq_neumann(const Grid& g, const std::vector<double>& u);
/// Temperature version: Dirichlet faces contribute through the half-cell
/// difference to T_b, flux faces contribute nothing.
double grad_sq_T(const Grid& g, const BoundarySpec& bc, const std::vector<double>& u);
/// Pointwise |grad u|^2 at cell centres from averaged face gradients.
void grad_sq_pointwise_T(const Grid& g, const BoundarySpec& bc, const std::vector<double>& u,
                         std::vector<double>& out);
/// Integral of dT/dn over the boundary (heat inflow).
double boundary_inflow(const Grid& g, const BoundarySpec& bc, const std::vector<double>& u);

/// Boundary integral of (dT/dn) / (T_face + theta), T_face the face value.
double boundary_entropy_flux(const Grid& g, const BoundarySpec& bc, const std::vector<double>& u,
                             double theta);

}  // namespace discrete

/// Solves (shift I - c Lap) x = r, with the homogeneous part of the
/// Laplacian for the given boundary kinds. Symmetric positive definite as
/// long as shift > 0 or some face is Dirichlet.
class HelmholtzSolver {
 public:
  /// dirichlet[f] selects the Dirichlet closure on face f, Neumann otherwise.
  HelmholtzSolver(const Grid& g, std::array<bool, 4> dirichlet, double c, double shift = 1.0);
  ~HelmholtzSolver();
  HelmholtzSolver(HelmholtzSolver&&) noexcept;
  HelmholtzSolver& operator=(HelmholtzSolver&&) noexcept;

  void solve(const std::vector<double>& r, std::vector<double>& x) const;
  double coefficient() const { return c_; }

  static std::array<bool, 4> for_phi() { return {false, false, false, false}; }
  static std::array<bool, 4> for_T(const BoundarySpec& bc);

 private:
  struct Impl;
  Grid g_;
  double c_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace caginalp
