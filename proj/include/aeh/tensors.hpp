////////////////////////////////////////////////////////////////////////////////
// tensors.hpp
//
// Reduced-notation algebra for the symmetric elasticity tensors used
// throughout the toolkit: rank-2 strain/stress, rank-4 stiffness, rank-3
// strain gradients and the 6x18 rank-5 coupling blocks.
//
// Storage convention ("engineering-voigt"): component order
// (11, 22, 33, 23, 13, 12). Matrices hold raw tensor components, so a 6x6
// stiffness row 4 diagonal entry is C_2323 itself. Contractions apply the
// multiplicity weights (1,1,1,2,2,2) explicitly; spectral operations
// (eigenvalues, definiteness) go through the Kelvin congruence
// diag(1,1,1,sqrt 2,sqrt 2,sqrt 2) so they agree with the full rank-4 tensor.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <json.hpp>

namespace aeh {

using json = nlohmann::json;

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix6x18 = Eigen::Matrix<double, 6, 18>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

// Voigt index pairs in the (11,22,33,23,13,12) order.
inline constexpr int kVoigtI[6] = {0, 1, 2, 1, 0, 0};
inline constexpr int kVoigtJ[6] = {0, 1, 2, 2, 2, 1};

// Contraction multiplicity per reduced index.
inline constexpr double kVoigtWeight[6] = {1, 1, 1, 2, 2, 2};

/// Reduced index for an (i,j) pair, any order.
inline int voigt_index(int i, int j) {
  static constexpr int map[3][3] = {{0, 5, 4}, {5, 1, 3}, {4, 3, 2}};
  return map[i][j];
}

/// Symmetric rank-2 tensor (strain or stress) with six stored components.
struct SymTensor2 {
  std::array<double, 6> v{};  // raw tensor components, voigt order

  static SymTensor2 zero() { return {}; }

  double& operator[](int a) { return v[a]; }
  double operator[](int a) const { return v[a]; }

  /// Full 3x3 component.
  double at(int i, int j) const { return v[voigt_index(i, j)]; }
  void set(int i, int j, double x) { v[voigt_index(i, j)] = x; }

  SymTensor2 operator+(const SymTensor2& o) const {
    SymTensor2 r;
    for (int a = 0; a < 6; ++a) r.v[a] = v[a] + o.v[a];
    return r;
  }
  SymTensor2 operator-(const SymTensor2& o) const {
    SymTensor2 r;
    for (int a = 0; a < 6; ++a) r.v[a] = v[a] - o.v[a];
    return r;
  }
  SymTensor2 operator*(double s) const {
    SymTensor2 r;
    for (int a = 0; a < 6; ++a) r.v[a] = v[a] * s;
    return r;
  }

  /// Engineering vector (doubled shear components).
  Vector6 eng() const {
    Vector6 e;
    for (int a = 0; a < 6; ++a) e[a] = kVoigtWeight[a] * v[a];
    return e;
  }
};

/// Rank-3 tensor G_(ij),m with a minor-symmetric first pair: 6x3 = 18
/// components, index 3*voigt(ij) + m. Used for strain gradients and for the
/// chi0 corrector viewed as a tensor.
struct GradTensor3 {
  std::array<double, 18> v{};

  static GradTensor3 zero() { return {}; }

  double& operator()(int a, int m) { return v[3 * a + m]; }
  double operator()(int a, int m) const { return v[3 * a + m]; }

  double at(int i, int j, int m) const { return v[3 * voigt_index(i, j) + m]; }
};

/// Rank-4 stiffness / homogenized tensor with minor symmetries, stored as a
/// 6x6 matrix of raw components. Major symmetry is an invariant of admissible
/// inputs, not enforced by the storage.
struct ElasticTensor {
  Matrix6 m = Matrix6::Zero();

  static ElasticTensor zero() { return {}; }
  static ElasticTensor identity() {
    ElasticTensor t;
    t.m = Matrix6::Identity();
    return t;
  }

  double operator()(int a, int b) const { return m(a, b); }
  double& operator()(int a, int b) { return m(a, b); }

  /// Full 4-index component.
  double at(int i, int j, int k, int l) const {
    return m(voigt_index(i, j), voigt_index(k, l));
  }

  ElasticTensor operator+(const ElasticTensor& o) const {
    ElasticTensor r;
    r.m = m + o.m;
    return r;
  }
  ElasticTensor operator-(const ElasticTensor& o) const {
    ElasticTensor r;
    r.m = m - o.m;
    return r;
  }
  ElasticTensor operator*(double s) const {
    ElasticTensor r;
    r.m = m * s;
    return r;
  }

  bool is_symmetric(double tol = 1e-10) const {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
  }

  /// Kelvin (Mandel) representation: congruence that makes the 6x6 spectrum
  /// coincide with the rank-4 tensor spectrum.
  Matrix6 kelvin() const {
    Vector6 s;
    s << 1, 1, 1, std::sqrt(2.0), std::sqrt(2.0), std::sqrt(2.0);
    return s.asDiagonal() * m * s.asDiagonal();
  }

  Vector6 eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Matrix6> es(kelvin());
    return es.eigenvalues();
  }

  /// Stress response to a strain, sigma = C : e.
  SymTensor2 apply(const SymTensor2& e) const {
    Vector6 s = m * e.eng();
    SymTensor2 r;
    for (int a = 0; a < 6; ++a) r.v[a] = s[a];
    return r;
  }
};

/// Rank-5 coupling block pairing a SymTensor2 slot with a GradTensor3 slot.
/// 6x18 raw components C_(ij),(kl)m; no symmetry assumed between the slots.
struct CouplingTensor5 {
  Matrix6x18 m = Matrix6x18::Zero();

  static CouplingTensor5 zero() { return {}; }

  double operator()(int a, int bm) const { return m(a, bm); }
  double& operator()(int a, int bm) { return m(a, bm); }

  double at(int i, int j, int k, int l, int mm) const {
    return m(voigt_index(i, j), 3 * voigt_index(k, l) + mm);
  }

  CouplingTensor5 operator+(const CouplingTensor5& o) const {
    CouplingTensor5 r;
    r.m = m + o.m;
    return r;
  }
  CouplingTensor5 operator-(const CouplingTensor5& o) const {
    CouplingTensor5 r;
    r.m = m - o.m;
    return r;
  }
  CouplingTensor5 operator*(double s) const {
    CouplingTensor5 r;
    r.m = m * s;
    return r;
  }
};

/// Isotropic phase description; moduli in GPa.
struct IsotropicMaterial {
  double young_modulus = 1.0;
  double poisson_ratio = 0.3;

  void validate() const {
    if (!(young_modulus > 0.0))
      throw std::domain_error("IsotropicMaterial: young_modulus must be > 0");
    if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5))
      throw std::domain_error(
          "IsotropicMaterial: poisson_ratio must lie in (-1, 0.5)");
  }

  double lambda() const {
    return young_modulus * poisson_ratio /
           ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
  }
  double mu() const { return young_modulus / (2.0 * (1.0 + poisson_ratio)); }

  bool operator==(const IsotropicMaterial& o) const {
    return young_modulus == o.young_modulus && poisson_ratio == o.poisson_ratio;
  }
};

/// Isotropic rank-4 stiffness from the Lame constants.
inline ElasticTensor isotropic_stiffness(const IsotropicMaterial& mat) {
  mat.validate();
  const double la = mat.lambda();
  const double mu = mat.mu();
  ElasticTensor c;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) c.m(a, b) = la;
    c.m(a, a) = la + 2.0 * mu;
    c.m(a + 3, a + 3) = mu;
  }
  return c;
}

/// Arithmetic (upper) mixture bound, (1-f) c_m + f c_i.
inline ElasticTensor voigt_bound(const ElasticTensor& c_m,
                                 const ElasticTensor& c_i, double f) {
  if (!(f >= 0.0 && f <= 1.0))
    throw std::domain_error("voigt_bound: fraction outside [0,1]");
  return c_m * (1.0 - f) + c_i * f;
}

/// Harmonic (lower) mixture bound, inverse of the compliance average.
inline ElasticTensor reuss_bound(const ElasticTensor& c_m,
                                 const ElasticTensor& c_i, double f) {
  if (!(f >= 0.0 && f <= 1.0))
    throw std::domain_error("reuss_bound: fraction outside [0,1]");
  Eigen::FullPivLU<Matrix6> lu_m(c_m.m), lu_i(c_i.m);
  if (!lu_m.isInvertible() || !lu_i.isInvertible())
    throw std::domain_error("reuss_bound: singular phase tensor");
  Matrix6 s = (1.0 - f) * lu_m.inverse() + f * lu_i.inverse();
  Eigen::FullPivLU<Matrix6> lu_s(s);
  if (!lu_s.isInvertible())
    throw std::domain_error("reuss_bound: singular compliance average");
  ElasticTensor r;
  r.m = lu_s.inverse();
  return r;
}

/// Full contraction e : c : e, in GPa.
inline double quadratic_form(const ElasticTensor& c, const SymTensor2& e) {
  return e.eng().dot(c.m * e.eng());
}

/// Full contraction E_ij C_ij,klm G_klm.
inline double coupling_form(const SymTensor2& e, const CouplingTensor5& c5,
                            const GradTensor3& g) {
  double s = 0.0;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b)
      for (int mm = 0; mm < 3; ++mm)
        s += kVoigtWeight[a] * kVoigtWeight[b] * e[a] * c5(a, 3 * b + mm) *
             g(b, mm);
  return s;
}

// JSON serialization: named component arrays, row-major, with the convention
// tag so downstream tools can sanity-check what they read.

inline json to_json(const SymTensor2& t) {
  return json{{"convention", "engineering-voigt"},
              {"components", std::vector<double>(t.v.begin(), t.v.end())}};
}

inline SymTensor2 sym_tensor2_from_json(const json& j) {
  SymTensor2 t;
  auto c = j.at("components").get<std::vector<double>>();
  if (c.size() != 6)
    throw std::runtime_error("SymTensor2: expected 6 components");
  std::copy(c.begin(), c.end(), t.v.begin());
  return t;
}

inline json to_json(const ElasticTensor& t) {
  std::vector<double> c(36);
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) c[6 * a + b] = t.m(a, b);
  return json{{"convention", "engineering-voigt"}, {"components", c}};
}

inline ElasticTensor elastic_tensor_from_json(const json& j) {
  auto c = j.at("components").get<std::vector<double>>();
  if (c.size() != 36)
    throw std::runtime_error("ElasticTensor: expected 36 components");
  ElasticTensor t;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) t.m(a, b) = c[6 * a + b];
  return t;
}

inline json to_json(const GradTensor3& t) {
  return json{{"convention", "engineering-voigt"},
              {"components", std::vector<double>(t.v.begin(), t.v.end())}};
}

inline GradTensor3 grad_tensor3_from_json(const json& j) {
  auto c = j.at("components").get<std::vector<double>>();
  if (c.size() != 18)
    throw std::runtime_error("GradTensor3: expected 18 components");
  GradTensor3 t;
  std::copy(c.begin(), c.end(), t.v.begin());
  return t;
}

inline json to_json(const CouplingTensor5& t) {
  std::vector<double> c(108);
  for (int a = 0; a < 6; ++a)
    for (int bm = 0; bm < 18; ++bm) c[18 * a + bm] = t.m(a, bm);
  return json{{"convention", "engineering-voigt"}, {"components", c}};
}

inline CouplingTensor5 coupling_tensor5_from_json(const json& j) {
  auto c = j.at("components").get<std::vector<double>>();
  if (c.size() != 108)
    throw std::runtime_error("CouplingTensor5: expected 108 components");
  CouplingTensor5 t;
  for (int a = 0; a < 6; ++a)
    for (int bm = 0; bm < 18; ++bm) t.m(a, bm) = c[18 * a + bm];
  return t;
}

}  // namespace aeh
