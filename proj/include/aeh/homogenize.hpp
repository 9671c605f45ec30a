////////////////////////////////////////////////////////////////////////////////
// homogenize.hpp
//
// Assembly of the homogenized tensors from the corrector fields, ensemble
// averaging over realizations, and the two-term energy with Voigt-Reuss
// references.
//
// All cell integrals are normalized by the cell volume so the order-0 tensor
// reduces to the phase stiffness in the homogeneous limit and is directly
// comparable to the mixture bounds.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aeh/cell_solver.hpp"
#include "aeh/covariogram.hpp"
#include "aeh/tensors.hpp"

namespace aeh {

/// The assembled cell tensors plus the metadata needed to reproduce them.
struct HomogenizedSet {
  ElasticTensor A;    // order-0 effective stiffness
  ElasticTensor B;    // coefficient of E0 : E1 in the order-1 energy
  CouplingTensor5 C5; // coefficient of E0 : grad E0 (chi0 part), GPa * voxel
  CouplingTensor5 D5; // coefficient of E0 : grad E0 (chi1 part), GPa * voxel
  double volume_fraction = 0.0;
  double l0 = 0.0, l1 = 0.0;
  double eta = 0.0;  // l0 / l1
  IsotropicMaterial matrix, inclusion;
  std::vector<std::uint64_t> realization_seeds;
  bool lengths_fallback = false;
};

namespace detail {

/// <L0^T C L0> and friends in one sweep. `rhs` selects the right factor of
/// the sandwich: the local strain of a chi0 mode (A/B), the sym(chi0 (x) e_m)
/// tensor (C5) or the chi1 mode strain (D5).
enum class RightFactor { mode_strain, chi0_outer, chi1_strain };

inline void assemble_sandwich(const CellSystem& sys, const CorrectorChi0& chi0,
                              const CorrectorChi1* chi1, RightFactor rhs,
                              Matrix6* out4, Matrix6x18* out5) {
  const auto& mesh = sys.mesh();
  const auto& quad = sys.quadrature();
  if (out4) out4->setZero();
  if (out5) out5->setZero();
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const Matrix6& C = sys.phase_stiffness(mesh.elem_phase[e]);
    std::array<Vector24, 6> xe0;
    for (int a = 0; a < 6; ++a) sys.gather(chi0.fields[a], e, xe0[a]);
    for (int gp = 0; gp < 8; ++gp) {
      // sigma of every left mode at this gauss point
      std::array<Vector6, 6> sig;
      for (int a = 0; a < 6; ++a)
        sig[a] = C * (detail::basis_strain_eng(a) + quad.B[gp] * xe0[a]);
      if (rhs == RightFactor::mode_strain) {
        for (int b = 0; b < 6; ++b) {
          const Vector6 eps_b =
              detail::basis_strain_eng(b) + quad.B[gp] * xe0[b];
          for (int a = 0; a < 6; ++a)
            (*out4)(a, b) += quad.weight * sig[a].dot(eps_b);
        }
      } else if (rhs == RightFactor::chi0_outer) {
        for (int b = 0; b < 6; ++b) {
          Eigen::Vector3d chi_gp = Eigen::Vector3d::Zero();
          for (int l = 0; l < 8; ++l)
            for (int d = 0; d < 3; ++d)
              chi_gp[d] += quad.N[gp][l] * xe0[b][3 * l + d];
          for (int m = 0; m < 3; ++m) {
            const Vector6 S = detail::sym_outer_eng(chi_gp, m);
            for (int a = 0; a < 6; ++a)
              (*out5)(a, 3 * b + m) += quad.weight * sig[a].dot(S);
          }
        }
      } else {
        for (int bm = 0; bm < 18; ++bm) {
          Vector24 xe1;
          sys.gather(chi1->fields[bm], e, xe1);
          const Vector6 eps1 = quad.B[gp] * xe1;
          for (int a = 0; a < 6; ++a)
            (*out5)(a, bm) += quad.weight * sig[a].dot(eps1);
        }
      }
    }
  }
  const double inv_v = 1.0 / mesh.volume();
  if (out4) *out4 *= inv_v;
  if (out5) *out5 *= inv_v;
}

}  // namespace detail

/// Order-0 effective stiffness <(1 + grad chi0)^T : C : (1 + grad chi0)>.
inline ElasticTensor assemble_A00(const CellSystem& sys,
                                  const CorrectorChi0& chi0) {
  ElasticTensor A;
  detail::assemble_sandwich(sys, chi0, nullptr,
                            detail::RightFactor::mode_strain, &A.m, nullptr);
  return A;
}

/// Coefficient of E0 : E1 in the order-1 energy. Same integrand as the
/// order-0 tensor; kept as a separate entry point and checked against it.
inline ElasticTensor assemble_B01(const CellSystem& sys,
                                  const CorrectorChi0& chi0) {
  ElasticTensor B;
  detail::assemble_sandwich(sys, chi0, nullptr,
                            detail::RightFactor::mode_strain, &B.m, nullptr);
  return B;
}

/// Coupling <(1 + grad chi0)^T : C : chi0>, the chi0 part of the E0:gradE0
/// energy term. Reported in GPa * voxel.
inline CouplingTensor5 assemble_C00(const CellSystem& sys,
                                    const CorrectorChi0& chi0) {
  CouplingTensor5 c5;
  detail::assemble_sandwich(sys, chi0, nullptr, detail::RightFactor::chi0_outer,
                            nullptr, &c5.m);
  return c5;
}

/// Coupling <(1 + grad chi0)^T : C : grad chi1>. Not part of the default
/// energy; available behind the include_D flag of energy_total.
inline CouplingTensor5 assemble_D00(const CellSystem& sys,
                                    const CorrectorChi0& chi0,
                                    const CorrectorChi1& chi1) {
  CouplingTensor5 d5;
  detail::assemble_sandwich(sys, chi0, &chi1, detail::RightFactor::chi1_strain,
                            nullptr, &d5.m);
  return d5;
}

struct EnsembleVariance {
  Matrix6 A_variance = Matrix6::Zero();  // componentwise, population variance
  double max_rel_std_A = 0.0;
};

/// Componentwise arithmetic mean over realizations; all sets must share the
/// phase pair.
inline HomogenizedSet ensemble_average(const std::vector<HomogenizedSet>& sets,
                                       EnsembleVariance* variance = nullptr) {
  if (sets.empty())
    throw std::invalid_argument("ensemble_average: empty realization list");
  for (const auto& s : sets)
    if (!(s.matrix == sets[0].matrix) || !(s.inclusion == sets[0].inclusion))
      throw std::invalid_argument(
          "ensemble_average: realizations mix different phase materials");

  HomogenizedSet mean = sets[0];
  mean.A = ElasticTensor::zero();
  mean.B = ElasticTensor::zero();
  mean.C5 = CouplingTensor5::zero();
  mean.D5 = CouplingTensor5::zero();
  mean.volume_fraction = 0.0;
  mean.l0 = mean.l1 = mean.eta = 0.0;
  mean.realization_seeds.clear();
  mean.lengths_fallback = false;
  const double n = static_cast<double>(sets.size());
  for (const auto& s : sets) {
    mean.A = mean.A + s.A * (1.0 / n);
    mean.B = mean.B + s.B * (1.0 / n);
    mean.C5 = mean.C5 + s.C5 * (1.0 / n);
    mean.D5 = mean.D5 + s.D5 * (1.0 / n);
    mean.volume_fraction += s.volume_fraction / n;
    mean.l0 += s.l0 / n;
    mean.l1 += s.l1 / n;
    mean.lengths_fallback = mean.lengths_fallback || s.lengths_fallback;
    mean.realization_seeds.insert(mean.realization_seeds.end(),
                                  s.realization_seeds.begin(),
                                  s.realization_seeds.end());
  }
  mean.eta = mean.l1 > 0.0 ? mean.l0 / mean.l1 : 0.0;

  if (variance) {
    variance->A_variance.setZero();
    for (const auto& s : sets) {
      const Matrix6 d = s.A.m - mean.A.m;
      variance->A_variance += d.cwiseProduct(d) / n;
    }
    variance->max_rel_std_A = 0.0;
    const double scale = mean.A.m.cwiseAbs().maxCoeff();
    if (scale > 0.0)
      variance->max_rel_std_A =
          std::sqrt(variance->A_variance.maxCoeff()) / scale;
  }
  return mean;
}

/// W(0) = 1/2 E0 : A : E0 per unit macroscopic volume, GPa.
inline double energy_order0(const ElasticTensor& A, const SymTensor2& E0) {
  return 0.5 * quadratic_form(A, E0);
}

struct EnergyReport {
  double W0 = 0.0;
  double W1 = 0.0;
  double eta = 0.0;
  double total = 0.0;  // W0 + eta * W1
  double W1_B_term = 0.0, W1_C_term = 0.0, W1_D_term = 0.0;
  double voigt_energy = 0.0, reuss_energy = 0.0;
  bool include_D = false;
  bool lengths_fallback = false;
};

/// Two-term energy W0 + eta W1. The orders below zero vanish because the
/// leading displacement carries no fast-variable strain; asserted, not
/// computed.
inline EnergyReport energy_total(const HomogenizedSet& set,
                                 const SymTensor2& E0, const SymTensor2& E1,
                                 const GradTensor3& gradE0,
                                 bool include_D = false) {
  EnergyReport r;
  r.eta = set.eta;
  r.include_D = include_D;
  r.lengths_fallback = set.lengths_fallback;
  r.W0 = energy_order0(set.A, E0);

  // E0 : B : E1
  SymTensor2 BE1 = set.B.apply(E1);
  r.W1_B_term = E0.eng().dot(Vector6::Map(BE1.v.data()));
  r.W1_C_term = coupling_form(E0, set.C5, gradE0);
  r.W1_D_term = include_D ? coupling_form(E0, set.D5, gradE0) : 0.0;
  r.W1 = r.W1_B_term + r.W1_C_term + r.W1_D_term;
  r.total = r.W0 + r.eta * r.W1;

  const ElasticTensor cv = voigt_bound(isotropic_stiffness(set.matrix),
                                       isotropic_stiffness(set.inclusion),
                                       set.volume_fraction);
  const ElasticTensor cr = reuss_bound(isotropic_stiffness(set.matrix),
                                       isotropic_stiffness(set.inclusion),
                                       set.volume_fraction);
  r.voigt_energy = 0.5 * quadratic_form(cv, E0);
  r.reuss_energy = 0.5 * quadratic_form(cr, E0);
  return r;
}

inline json to_json(const HomogenizedSet& s) {
  return json{{"A", to_json(s.A)},
              {"B", to_json(s.B)},
              {"C5", to_json(s.C5)},
              {"D5", to_json(s.D5)},
              {"volume_fraction", s.volume_fraction},
              {"l0", s.l0},
              {"l1", s.l1},
              {"eta", s.eta},
              {"matrix", {{"E", s.matrix.young_modulus},
                          {"nu", s.matrix.poisson_ratio}}},
              {"inclusion", {{"E", s.inclusion.young_modulus},
                             {"nu", s.inclusion.poisson_ratio}}},
              {"realization_seeds", s.realization_seeds},
              {"lengths_fallback", s.lengths_fallback}};
}

inline HomogenizedSet homogenized_set_from_json(const json& j) {
  HomogenizedSet s;
  s.A = elastic_tensor_from_json(j.at("A"));
  s.B = elastic_tensor_from_json(j.at("B"));
  s.C5 = coupling_tensor5_from_json(j.at("C5"));
  s.D5 = coupling_tensor5_from_json(j.at("D5"));
  s.volume_fraction = j.at("volume_fraction").get<double>();
  s.l0 = j.at("l0").get<double>();
  s.l1 = j.at("l1").get<double>();
  s.eta = j.at("eta").get<double>();
  s.matrix = {j.at("matrix").at("E").get<double>(),
              j.at("matrix").at("nu").get<double>()};
  s.inclusion = {j.at("inclusion").at("E").get<double>(),
                 j.at("inclusion").at("nu").get<double>()};
  s.realization_seeds =
      j.at("realization_seeds").get<std::vector<std::uint64_t>>();
  s.lengths_fallback = j.at("lengths_fallback").get<bool>();
  return s;
}

inline json to_json(const EnergyReport& r) {
  return json{{"W0", r.W0},
              {"W1", r.W1},
              {"W1_B_term", r.W1_B_term},
              {"W1_C_term", r.W1_C_term},
              {"W1_D_term", r.W1_D_term},
              {"eta", r.eta},
              {"total", r.total},
              {"voigt_energy", r.voigt_energy},
              {"reuss_energy", r.reuss_energy},
              {"flags",
               {{"include_D", r.include_D},
                {"lengths_fallback", r.lengths_fallback}}}};
}

inline EnergyReport energy_report_from_json(const json& j) {
  EnergyReport r;
  r.W0 = j.at("W0").get<double>();
  r.W1 = j.at("W1").get<double>();
  r.W1_B_term = j.at("W1_B_term").get<double>();
  r.W1_C_term = j.at("W1_C_term").get<double>();
  r.W1_D_term = j.at("W1_D_term").get<double>();
  r.eta = j.at("eta").get<double>();
  r.total = j.at("total").get<double>();
  r.voigt_energy = j.at("voigt_energy").get<double>();
  r.reuss_energy = j.at("reuss_energy").get<double>();
  r.include_D = j.at("flags").at("include_D").get<bool>();
  r.lengths_fallback = j.at("flags").at("lengths_fallback").get<bool>();
  return r;
}

}  // namespace aeh
