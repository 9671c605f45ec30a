////////////////////////////////////////////////////////////////////////////////
// cell_solver.hpp
//
// Periodic voxel finite-element solver for the homogenization cell problems:
// order-1 corrector chi0 (six macroscopic strain modes), order-2 corrector
// chi1 (eighteen strain-gradient modes), localization fields L0/L1, and
// full-field loading under an imposed macroscopic strain.
//
// Discretization: one trilinear hexahedral element per voxel, 2x2x2 Gauss
// quadrature, periodic node pairing across opposite faces (node grid == voxel
// grid). The operator is applied element by element with a sequential loop so
// assembled products are bitwise reproducible. Translation nullspace is
// handled by projecting the componentwise mean out of each CG iterate.
//
// Reduced notation follows tensors.hpp: strain vectors are engineering
// (doubled shears), stress vectors raw components, so B^T C B works with the
// stiffness matrix as stored.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aeh/microstructure.hpp"
#include "aeh/tensors.hpp"

namespace aeh {

using Matrix24 = Eigen::Matrix<double, 24, 24>;
using Vector24 = Eigen::Matrix<double, 24, 1>;
using BMatrix = Eigen::Matrix<double, 6, 24>;

/// Periodic hexahedral mesh derived from a voxel grid. Nodes coincide with
/// the voxel corner lattice modulo periodic wrap, so there are exactly
/// nx*ny*nz independent nodes; numbering is x-fastest.
struct PeriodicMesh {
  int nx = 0, ny = 0, nz = 0;
  double spacing = 1.0;
  std::vector<std::uint8_t> elem_phase;  // per element, 0 matrix / 1 inclusion

  std::size_t num_elements() const {
    return static_cast<std::size_t>(nx) * ny * nz;
  }
  std::size_t num_nodes() const { return num_elements(); }
  std::size_t num_dofs() const { return 3 * num_nodes(); }
  double volume() const {
    return static_cast<double>(num_elements()) * spacing * spacing * spacing;
  }

  std::size_t node_id(int x, int y, int z) const {
    x %= nx;
    y %= ny;
    z %= nz;
    return (static_cast<std::size_t>(z) * ny + y) * nx + x;
  }

  /// Corner nodes of element e, local order l = ix + 2 iy + 4 iz.
  void element_nodes(std::size_t e, std::size_t out[8]) const {
    const int ex = static_cast<int>(e % nx);
    const int ey = static_cast<int>((e / nx) % ny);
    const int ez = static_cast<int>(e / (static_cast<std::size_t>(nx) * ny));
    for (int l = 0; l < 8; ++l)
      out[l] = node_id(ex + (l & 1), ey + ((l >> 1) & 1), ez + ((l >> 2) & 1));
  }
};

inline PeriodicMesh build_mesh(const VoxelGrid& grid) {
  if (grid.nx < 2 || grid.ny < 2 || grid.nz < 2)
    throw std::domain_error("build_mesh: grid dims must each be >= 2");
  PeriodicMesh mesh;
  mesh.nx = grid.nx;
  mesh.ny = grid.ny;
  mesh.nz = grid.nz;
  mesh.spacing = grid.spacing;
  mesh.elem_phase = grid.labels;
  return mesh;
}

/// Trilinear hex shape data at the 2x2x2 Gauss points, for the uniform cube
/// element of edge h. Quadrature is exact for the trilinear stiffness.
struct HexQuadrature {
  std::array<BMatrix, 8> B;                 // engineering strain rows
  std::array<std::array<double, 8>, 8> N;   // [gp][local node]
  double weight;                            // per gauss point, = h^3 / 8

  explicit HexQuadrature(double h) {
    const double g = 1.0 / std::sqrt(3.0);
    weight = h * h * h / 8.0;
    for (int gp = 0; gp < 8; ++gp) {
      const double xi[3] = {(gp & 1) ? g : -g, ((gp >> 1) & 1) ? g : -g,
                            ((gp >> 2) & 1) ? g : -g};
      BMatrix& Bm = B[gp];
      Bm.setZero();
      for (int l = 0; l < 8; ++l) {
        const double s[3] = {(l & 1) ? 1.0 : -1.0, ((l >> 1) & 1) ? 1.0 : -1.0,
                             ((l >> 2) & 1) ? 1.0 : -1.0};
        N[gp][l] = 0.125 * (1 + s[0] * xi[0]) * (1 + s[1] * xi[1]) *
                   (1 + s[2] * xi[2]);
        const double dN[3] = {
            0.125 * s[0] * (1 + s[1] * xi[1]) * (1 + s[2] * xi[2]) * 2.0 / h,
            0.125 * s[1] * (1 + s[0] * xi[0]) * (1 + s[2] * xi[2]) * 2.0 / h,
            0.125 * s[2] * (1 + s[0] * xi[0]) * (1 + s[1] * xi[1]) * 2.0 / h};
        Bm(0, 3 * l + 0) = dN[0];
        Bm(1, 3 * l + 1) = dN[1];
        Bm(2, 3 * l + 2) = dN[2];
        Bm(3, 3 * l + 1) = dN[2];  // gamma_23 = du2/dz + du3/dy
        Bm(3, 3 * l + 2) = dN[1];
        Bm(4, 3 * l + 0) = dN[2];  // gamma_13 = du1/dz + du3/dx
        Bm(4, 3 * l + 2) = dN[0];
        Bm(5, 3 * l + 0) = dN[1];  // gamma_12 = du1/dy + du2/dx
        Bm(5, 3 * l + 1) = dN[0];
      }
    }
  }
};

struct SolverSettings {
  double cg_tolerance = 1e-8;  // relative residual
  int max_iterations = 0;      // 0: 50 * cbrt(num_dofs)
  std::string preconditioner = "jacobi";  // "jacobi" | "none"
  // Test hook: called with (iteration, current iterate) after each CG step.
  std::function<void(int, const std::vector<double>&)> iterate_callback;

  void validate() const {
    if (!(cg_tolerance > 0))
      throw std::domain_error("SolverSettings: tolerance must be > 0");
    if (preconditioner != "jacobi" && preconditioner != "none")
      throw std::domain_error("SolverSettings: unknown preconditioner '" +
                              preconditioner + "'");
  }
};

struct ConvergenceError : std::runtime_error {
  int iterations;
  double residual;
  ConvergenceError(int it, double res)
      : std::runtime_error("cell solver: CG did not converge in " +
                           std::to_string(it) +
                           " iterations, relative residual " +
                           std::to_string(res)),
        iterations(it),
        residual(res) {}
};

/// Six periodic zero-mean nodal vector fields, one per macroscopic strain
/// basis mode (11,22,33,23,13,12). Shear basis modes carry tensor components
/// 1/2 (engineering component 1), so assembled tensors come out in raw
/// component storage directly.
struct CorrectorChi0 {
  std::array<std::vector<double>, 6> fields;  // each 3 * num_nodes
};

/// Eighteen periodic zero-mean nodal vector fields, modes (ij,m) indexed
/// 3 * voigt(ij) + m.
struct CorrectorChi1 {
  std::array<std::vector<double>, 18> fields;
};

/// Element-by-element operator for the two-phase periodic cell problem.
class CellSystem {
 public:
  CellSystem(const PeriodicMesh& mesh, const ElasticTensor& c_m,
             const ElasticTensor& c_i)
      : mesh_(mesh), quad_(mesh.spacing), phase_c_{c_m.m, c_i.m} {
    for (int ph = 0; ph < 2; ++ph) {
      ke_[ph].setZero();
      for (int gp = 0; gp < 8; ++gp)
        ke_[ph] += quad_.weight * quad_.B[gp].transpose() * phase_c_[ph] *
                   quad_.B[gp];
    }
    diag_.assign(mesh.num_dofs(), 0.0);
    std::size_t nodes[8];
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      mesh.element_nodes(e, nodes);
      const Matrix24& ke = ke_[mesh.elem_phase[e]];
      for (int l = 0; l < 8; ++l)
        for (int d = 0; d < 3; ++d)
          diag_[3 * nodes[l] + d] += ke(3 * l + d, 3 * l + d);
    }
  }

  const PeriodicMesh& mesh() const { return mesh_; }
  const HexQuadrature& quadrature() const { return quad_; }
  const Matrix6& phase_stiffness(int ph) const { return phase_c_[ph]; }

  /// y = K x. Sequential element loop; deterministic.
  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    std::size_t nodes[8];
    Vector24 xe, ye;
    for (std::size_t e = 0; e < mesh_.num_elements(); ++e) {
      mesh_.element_nodes(e, nodes);
      for (int l = 0; l < 8; ++l)
        for (int d = 0; d < 3; ++d) xe[3 * l + d] = x[3 * nodes[l] + d];
      ye.noalias() = ke_[mesh_.elem_phase[e]] * xe;
      for (int l = 0; l < 8; ++l)
        for (int d = 0; d < 3; ++d) y[3 * nodes[l] + d] += ye[3 * l + d];
    }
  }

  /// Gather element dof values from a global vector.
  void gather(const std::vector<double>& x, std::size_t e, Vector24& xe) const {
    std::size_t nodes[8];
    mesh_.element_nodes(e, nodes);
    for (int l = 0; l < 8; ++l)
      for (int d = 0; d < 3; ++d) xe[3 * l + d] = x[3 * nodes[l] + d];
  }

  /// Preconditioned CG with componentwise mean projection (translation
  /// nullspace). Returns the converged iterate in x.
  void solve(const std::vector<double>& b, std::vector<double>& x,
             const SolverSettings& s) const {
    s.validate();
    const std::size_t n = mesh_.num_dofs();
    x.assign(n, 0.0);
    std::vector<double> r(b), z(n), p(n), q(n);
    project_mean(r);
    const double bnorm = norm(r);
    if (bnorm == 0.0) return;
    const bool jacobi = s.preconditioner == "jacobi";
    const int maxit = s.max_iterations > 0
                          ? s.max_iterations
                          : static_cast<int>(50.0 * std::cbrt(double(n))) + 10;

    precond(r, z, jacobi);
    p = z;
    double rz = dot(r, z);
    double res = 1.0;
    for (int it = 1; it <= maxit; ++it) {
      apply(p, q);
      const double pq = dot(p, q);
      if (pq <= 0.0) throw ConvergenceError(it, res);
      const double alpha = rz / pq;
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      project_mean(x);
      project_mean(r);
      res = norm(r) / bnorm;
      if (s.iterate_callback) s.iterate_callback(it, x);
      if (res <= s.cg_tolerance) return;
      precond(r, z, jacobi);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw ConvergenceError(maxit, res);
  }

  /// Subtract the componentwise mean (nodal average equals the volume average
  /// for this uniform periodic mesh).
  void project_mean(std::vector<double>& v) const {
    const std::size_t nn = mesh_.num_nodes();
    double mean[3] = {0, 0, 0};
    for (std::size_t i = 0; i < nn; ++i)
      for (int d = 0; d < 3; ++d) mean[d] += v[3 * i + d];
    for (int d = 0; d < 3; ++d) mean[d] /= static_cast<double>(nn);
    for (std::size_t i = 0; i < nn; ++i)
      for (int d = 0; d < 3; ++d) v[3 * i + d] -= mean[d];
  }

 private:
  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  static double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

  void precond(const std::vector<double>& r, std::vector<double>& z,
               bool jacobi) const {
    if (jacobi) {
      for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag_[i];
    } else {
      z = r;
    }
  }

  const PeriodicMesh& mesh_;
  HexQuadrature quad_;
  Matrix6 phase_c_[2];
  Matrix24 ke_[2];
  std::vector<double> diag_;
};

namespace detail {

/// Engineering strain vector of the macroscopic basis mode a (unit normal
/// strain / tensor shear component 1/2).
inline Vector6 basis_strain_eng(int a) {
  Vector6 e = Vector6::Zero();
  e[a] = 1.0;
  return e;
}

}  // namespace detail

/// Order-1 corrector: for each strain basis mode solve the periodic
/// equilibrium of the fluctuation field.
inline CorrectorChi0 solve_chi0(const CellSystem& sys,
                                const SolverSettings& s = {}) {
  const auto& mesh = sys.mesh();
  const auto& quad = sys.quadrature();
  CorrectorChi0 chi;
  std::vector<double> b(mesh.num_dofs());
  std::size_t nodes[8];
  for (int a = 0; a < 6; ++a) {
    std::fill(b.begin(), b.end(), 0.0);
    const Vector6 E = detail::basis_strain_eng(a);
    for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
      mesh.element_nodes(e, nodes);
      const Vector6 sigma = sys.phase_stiffness(mesh.elem_phase[e]) * E;
      Vector24 fe = Vector24::Zero();
      for (int gp = 0; gp < 8; ++gp)
        fe -= quad.weight * quad.B[gp].transpose() * sigma;
      for (int l = 0; l < 8; ++l)
        for (int d = 0; d < 3; ++d) b[3 * nodes[l] + d] += fe[3 * l + d];
    }
    sys.solve(b, chi.fields[a], s);
  }
  return chi;
}

inline CorrectorChi0 solve_chi0(const PeriodicMesh& mesh,
                                const ElasticTensor& c_m,
                                const ElasticTensor& c_i,
                                const SolverSettings& s = {}) {
  CellSystem sys(mesh, c_m, c_i);
  return solve_chi0(sys, s);
}

namespace detail {

/// Local engineering strain of chi0 mode a at (element, gauss point):
/// E_a + B chi_e.
inline Vector6 chi0_strain_eng(const CellSystem& sys, const CorrectorChi0& chi,
                               int a, std::size_t e, int gp) {
  Vector24 xe;
  sys.gather(chi.fields[a], e, xe);
  return basis_strain_eng(a) + sys.quadrature().B[gp] * xe;
}

/// Engineering vector of sym(v (x) e_m) for a 3-vector v.
inline Vector6 sym_outer_eng(const Eigen::Vector3d& v, int m) {
  Vector6 s = Vector6::Zero();
  // raw components S_ij = (v_i d_jm + v_j d_im)/2; engineering doubles shears
  for (int a = 0; a < 6; ++a) {
    const int i = kVoigtI[a], j = kVoigtJ[a];
    double raw = 0.0;
    if (j == m) raw += 0.5 * v[i];
    if (i == m) raw += 0.5 * v[j];
    s[a] = kVoigtWeight[a] * raw;
  }
  return s;
}

}  // namespace detail

/// Volume-average stress of each chi0 mode (used for the chi1 source term and
/// by the homogenized tensor assembly).
inline std::array<Vector6, 6> mean_mode_stress(const CellSystem& sys,
                                               const CorrectorChi0& chi0) {
  const auto& mesh = sys.mesh();
  const auto& quad = sys.quadrature();
  std::array<Vector6, 6> mean;
  for (auto& v : mean) v = Vector6::Zero();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Matrix6& C = sys.phase_stiffness(mesh.elem_phase[e]);
    for (int a = 0; a < 6; ++a)
      for (int gp = 0; gp < 8; ++gp)
        mean[a] +=
            quad.weight * (C * detail::chi0_strain_eng(sys, chi0, a, e, gp));
  }
  for (auto& v : mean) v /= mesh.volume();
  return mean;
}

/// Order-2 corrector: for each mode (ij,m) solve
///   div_y( C : (eps_y(phi) + sym(chi0^ij (x) e_m)) ) = -g,
/// g = (sigma^ij - <sigma^ij>) . e_m, which has zero mean by construction.
inline CorrectorChi1 solve_chi1(const CellSystem& sys,
                                const CorrectorChi0& chi0,
                                const SolverSettings& s = {}) {
  const auto& mesh = sys.mesh();
  const auto& quad = sys.quadrature();
  const auto mean_sigma = mean_mode_stress(sys, chi0);

  CorrectorChi1 chi1;
  std::vector<double> b(mesh.num_dofs());
  std::size_t nodes[8];
  for (int a = 0; a < 6; ++a) {
    for (int m = 0; m < 3; ++m) {
      std::fill(b.begin(), b.end(), 0.0);
      Eigen::Vector3d g_int = Eigen::Vector3d::Zero();
      for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
        mesh.element_nodes(e, nodes);
        const Matrix6& C = sys.phase_stiffness(mesh.elem_phase[e]);
        Vector24 xe;
        sys.gather(chi0.fields[a], e, xe);
        Vector24 fe = Vector24::Zero();
        for (int gp = 0; gp < 8; ++gp) {
          // source g = (sigma^a - <sigma^a>) . e_m at the gauss point
          const Vector6 sig =
              C * (detail::basis_strain_eng(a) + quad.B[gp] * xe) -
              mean_sigma[a];
          Eigen::Vector3d g;
          for (int k = 0; k < 3; ++k) g[k] = sig[voigt_index(k, m)];
          g_int += quad.weight * g;
          // interpolated chi0 at the gauss point
          Eigen::Vector3d chi_gp = Eigen::Vector3d::Zero();
          for (int l = 0; l < 8; ++l)
            for (int d = 0; d < 3; ++d)
              chi_gp[d] += quad.N[gp][l] * xe[3 * l + d];
          const Vector6 S = detail::sym_outer_eng(chi_gp, m);
          fe -= quad.weight * quad.B[gp].transpose() * (C * S);
          for (int l = 0; l < 8; ++l)
            for (int d = 0; d < 3; ++d)
              fe[3 * l + d] += quad.weight * quad.N[gp][l] * g[d];
        }
        for (int l = 0; l < 8; ++l)
          for (int d = 0; d < 3; ++d) b[3 * nodes[l] + d] += fe[3 * l + d];
      }
      if (g_int.norm() > 1e-10 * mesh.volume())
        throw std::runtime_error(
            "solve_chi1: source term violates solvability, |int g| = " +
            std::to_string(g_int.norm()));
      sys.solve(b, chi1.fields[3 * a + m], s);
    }
  }
  return chi1;
}

inline CorrectorChi1 solve_chi1(const PeriodicMesh& mesh,
                                const ElasticTensor& c_m,
                                const ElasticTensor& c_i,
                                const CorrectorChi0& chi0,
                                const SolverSettings& s = {}) {
  CellSystem sys(mesh, c_m, c_i);
  return solve_chi1(sys, chi0, s);
}

/// Per-quadrature-point localization fields. Column a of L0 is the local
/// engineering strain of strain mode a; column (ij,m) of L1 the local
/// engineering strain of gradient mode (ij,m), including the chi0 (x) delta
/// part. Intended for small meshes; assemblies recompute these on the fly.
struct LocalizationField {
  std::vector<Matrix6> L0;     // one per (element * 8 + gp)
  std::vector<Matrix6x18> L1;  // empty unless chi1 supplied
};

inline LocalizationField localization_L0(const CellSystem& sys,
                                         const CorrectorChi0& chi0) {
  const auto& mesh = sys.mesh();
  LocalizationField f;
  f.L0.resize(mesh.num_elements() * 8);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e)
    for (int gp = 0; gp < 8; ++gp) {
      Matrix6 L;
      for (int a = 0; a < 6; ++a)
        L.col(a) = detail::chi0_strain_eng(sys, chi0, a, e, gp);
      f.L0[e * 8 + gp] = L;
    }
  return f;
}

inline LocalizationField localization_L1(const CellSystem& sys,
                                         const CorrectorChi0& chi0,
                                         const CorrectorChi1& chi1) {
  const auto& mesh = sys.mesh();
  const auto& quad = sys.quadrature();
  LocalizationField f = localization_L0(sys, chi0);
  f.L1.resize(mesh.num_elements() * 8);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    for (int gp = 0; gp < 8; ++gp) {
      Matrix6x18 L;
      for (int a = 0; a < 6; ++a) {
        Vector24 xe0;
        sys.gather(chi0.fields[a], e, xe0);
        Eigen::Vector3d chi_gp = Eigen::Vector3d::Zero();
        for (int l = 0; l < 8; ++l)
          for (int d = 0; d < 3; ++d)
            chi_gp[d] += quad.N[gp][l] * xe0[3 * l + d];
        for (int m = 0; m < 3; ++m) {
          Vector24 xe1;
          sys.gather(chi1.fields[3 * a + m], e, xe1);
          L.col(3 * a + m) =
              detail::sym_outer_eng(chi_gp, m) + quad.B[gp] * xe1;
        }
      }
      f.L1[e * 8 + gp] = L;
    }
  }
  return f;
}

/// Full-field solve under an imposed macroscopic strain.
struct FullFieldResult {
  std::vector<double> fluctuation;     // nodal, 3 per node
  std::vector<SymTensor2> elem_strain; // element average
  SymTensor2 mean_strain;
  SymTensor2 mean_stress;
  double mean_energy_density = 0.0;    // <sigma : eps> / 2
  int iterations = 0;
};

inline FullFieldResult full_field(const CellSystem& sys,
                                  const SymTensor2& e_macro,
                                  const SolverSettings& s = {}) {
  const auto& mesh = sys.mesh();
  const auto& quad = sys.quadrature();
  const Vector6 E = e_macro.eng();

  std::vector<double> b(mesh.num_dofs(), 0.0);
  std::size_t nodes[8];
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    mesh.element_nodes(e, nodes);
    const Vector6 sigma = sys.phase_stiffness(mesh.elem_phase[e]) * E;
    Vector24 fe = Vector24::Zero();
    for (int gp = 0; gp < 8; ++gp)
      fe -= quad.weight * quad.B[gp].transpose() * sigma;
    for (int l = 0; l < 8; ++l)
      for (int d = 0; d < 3; ++d) b[3 * nodes[l] + d] += fe[3 * l + d];
  }

  FullFieldResult out;
  sys.solve(b, out.fluctuation, s);

  out.elem_strain.resize(mesh.num_elements());
  Vector6 mean_eps = Vector6::Zero(), mean_sig = Vector6::Zero();
  double work = 0.0;
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Matrix6& C = sys.phase_stiffness(mesh.elem_phase[e]);
    Vector24 xe;
    sys.gather(out.fluctuation, e, xe);
    Vector6 eng_avg = Vector6::Zero();
    for (int gp = 0; gp < 8; ++gp) {
      const Vector6 eps = E + quad.B[gp] * xe;  // engineering
      const Vector6 sig = C * eps;              // raw components
      eng_avg += 0.125 * eps;
      mean_eps += quad.weight * eps;
      mean_sig += quad.weight * sig;
      work += quad.weight * sig.dot(eps);  // sigma : eps
    }
    for (int a = 0; a < 6; ++a)
      out.elem_strain[e].v[a] = eng_avg[a] / kVoigtWeight[a];
  }
  const double V = mesh.volume();
  for (int a = 0; a < 6; ++a) {
    out.mean_strain.v[a] = mean_eps[a] / V / kVoigtWeight[a];
    out.mean_stress.v[a] = mean_sig[a] / V;
  }
  out.mean_energy_density = 0.5 * work / V;
  return out;
}

inline FullFieldResult full_field(const PeriodicMesh& mesh,
                                  const ElasticTensor& c_m,
                                  const ElasticTensor& c_i,
                                  const SymTensor2& e_macro,
                                  const SolverSettings& s = {}) {
  CellSystem sys(mesh, c_m, c_i);
  return full_field(sys, e_macro, s);
}

/// Volume average of a nodal vector field, one value per component.
inline Eigen::Vector3d field_mean(const PeriodicMesh& mesh,
                                  const std::vector<double>& field) {
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  const std::size_t nn = mesh.num_nodes();
  for (std::size_t i = 0; i < nn; ++i)
    for (int d = 0; d < 3; ++d) m[d] += field[3 * i + d];
  return m / static_cast<double>(nn);
}

}  // namespace aeh
