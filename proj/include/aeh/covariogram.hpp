////////////////////////////////////////////////////////////////////////////////
// covariogram.hpp
//
// Two-point probability statistics C(h) of the inclusion phase along lattice
// directions, and extraction of the correlation distance l0 and repulsion
// distance l1 from intersections of C(h) with its asymptote p^2.
//
// Production estimator: FFT autocorrelation (FFTW), O(N log N). Pair counts
// are integers, so the FFT result is rounded to the nearest count before
// normalization; the direct-counting estimator below is the reference the
// tests check against.
//
// The "intersection with the asymptote" is a tolerance band
// |C(h) - p^2| <= tol_factor * (C(0) - p^2), crossings located by linear
// interpolation between lags.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include <fftw3.h>

#include "aeh/microstructure.hpp"

namespace aeh {

enum class CovEstimator { periodic, truncated };

struct Covariogram {
  std::array<int, 3> direction{1, 0, 0};
  std::vector<double> lags;    // 0 .. h_max, voxel units
  std::vector<double> values;  // C(h)
  double p = 0.0;              // phase fraction; C(0) == p
  CovEstimator estimator = CovEstimator::periodic;
};

struct EmptyPairError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoCrossingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateCovariogramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

/// Circular autocorrelation counts of a 0/1 field on an (mx,my,mz) box.
/// Returns sum_x f(x) f(x+h) for every lag, x-fastest layout.
inline std::vector<double> autocorrelation_counts(const std::vector<double>& f,
                                                  int mx, int my, int mz) {
  const std::size_t n = static_cast<std::size_t>(mx) * my * mz;
  const std::size_t nc = static_cast<std::size_t>(mz) * my * (mx / 2 + 1);
  std::vector<double> in(f);
  std::vector<std::complex<double>> spec(nc);
  std::vector<double> out(n);

  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fwd = fftw_plan_dft_r2c_3d(mz, my, mx, in.data(),
                               reinterpret_cast<fftw_complex*>(spec.data()),
                               FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_3d(mz, my, mx,
                               reinterpret_cast<fftw_complex*>(spec.data()),
                               out.data(), FFTW_ESTIMATE);
  }
  // FFTW_ESTIMATE may clobber input during planning; restore it.
  std::copy(f.begin(), f.end(), in.begin());
  fftw_execute(fwd);
  for (auto& c : spec) c = std::norm(c);
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& v : out) v = std::round(v * inv);
  return out;
}

inline void check_direction(const std::array<int, 3>& d) {
  if (d[0] == 0 && d[1] == 0 && d[2] == 0)
    throw std::domain_error("covariance: zero direction vector");
}

}  // namespace detail

/// Two-point probability curve along a lattice direction.
inline Covariogram covariance(const VoxelGrid& grid,
                              const std::array<int, 3>& direction, int h_max,
                              CovEstimator estimator = CovEstimator::periodic) {
  detail::check_direction(direction);
  const int dims[3] = {grid.nx, grid.ny, grid.nz};
  for (int k = 0; k < 3; ++k)
    if (direction[k] != 0 && h_max * std::abs(direction[k]) >= dims[k] &&
        estimator == CovEstimator::truncated)
      throw EmptyPairError("covariance: h_max leaves zero valid pairs");
  if (h_max < 0) throw std::domain_error("covariance: h_max must be >= 0");

  int m[3];
  for (int k = 0; k < 3; ++k)
    m[k] = estimator == CovEstimator::periodic
               ? dims[k]
               : dims[k] + h_max * std::abs(direction[k]);

  std::vector<double> f(static_cast<std::size_t>(m[0]) * m[1] * m[2], 0.0);
  for (int z = 0; z < dims[2]; ++z)
    for (int y = 0; y < dims[1]; ++y)
      for (int x = 0; x < dims[0]; ++x)
        f[(static_cast<std::size_t>(z) * m[1] + y) * m[0] + x] =
            grid.label(x, y, z) ? 1.0 : 0.0;

  const auto counts = detail::autocorrelation_counts(f, m[0], m[1], m[2]);

  Covariogram cov;
  cov.direction = direction;
  cov.estimator = estimator;
  cov.p = volume_fraction(grid);
  const double total = static_cast<double>(grid.size());
  for (int h = 0; h <= h_max; ++h) {
    double pairs;
    if (estimator == CovEstimator::periodic) {
      pairs = total;
    } else {
      pairs = 1.0;
      for (int k = 0; k < 3; ++k)
        pairs *= dims[k] - h * std::abs(direction[k]);
      if (pairs <= 0.0)
        throw EmptyPairError("covariance: zero valid pairs at lag " +
                             std::to_string(h));
    }
    int ix[3];
    for (int k = 0; k < 3; ++k)
      ix[k] = ((h * direction[k]) % m[k] + m[k]) % m[k];
    const double c =
        counts[(static_cast<std::size_t>(ix[2]) * m[1] + ix[1]) * m[0] + ix[0]];
    cov.lags.push_back(h);
    cov.values.push_back(c / pairs);
  }
  return cov;
}

/// Direct pair-counting estimator, O(N * h_max). Reference implementation.
inline Covariogram covariance_direct(
    const VoxelGrid& grid, const std::array<int, 3>& direction, int h_max,
    CovEstimator estimator = CovEstimator::periodic) {
  detail::check_direction(direction);
  if (h_max < 0) throw std::domain_error("covariance: h_max must be >= 0");
  const int dims[3] = {grid.nx, grid.ny, grid.nz};

  Covariogram cov;
  cov.direction = direction;
  cov.estimator = estimator;
  cov.p = volume_fraction(grid);
  for (int h = 0; h <= h_max; ++h) {
    const int s[3] = {h * direction[0], h * direction[1], h * direction[2]};
    long long both = 0, pairs = 0;
    for (int z = 0; z < dims[2]; ++z)
      for (int y = 0; y < dims[1]; ++y)
        for (int x = 0; x < dims[0]; ++x) {
          int q[3] = {x + s[0], y + s[1], z + s[2]};
          if (estimator == CovEstimator::periodic) {
            for (int k = 0; k < 3; ++k) q[k] = ((q[k] % dims[k]) + dims[k]) % dims[k];
          } else {
            if (q[0] < 0 || q[0] >= dims[0] || q[1] < 0 || q[1] >= dims[1] ||
                q[2] < 0 || q[2] >= dims[2])
              continue;
          }
          ++pairs;
          if (grid.label(x, y, z) && grid.label(q[0], q[1], q[2])) ++both;
        }
    if (pairs == 0)
      throw EmptyPairError("covariance: zero valid pairs at lag " +
                           std::to_string(h));
    cov.lags.push_back(h);
    cov.values.push_back(static_cast<double>(both) /
                         static_cast<double>(pairs));
  }
  return cov;
}

namespace detail {

/// |C(h) - p^2| relative to the band; helper for crossing searches.
struct BandScan {
  const Covariogram& cov;
  double band;
  double dist(std::size_t i) const {
    return std::fabs(cov.values[i] - cov.p * cov.p);
  }
  bool inside(std::size_t i) const { return dist(i) <= band; }
  /// Interpolated lag where |C - p^2| crosses the band between i-1 and i.
  double cross(std::size_t i) const {
    const double d0 = dist(i - 1), d1 = dist(i);
    const double t = (d0 - band) / (d0 - d1);
    return cov.lags[i - 1] + t * (cov.lags[i] - cov.lags[i - 1]);
  }
};

}  // namespace detail

/// Correlation distance l0: first entry of C(h) into the asymptote band.
inline double correlation_length(const Covariogram& cov,
                                 double tol_factor = 0.05) {
  if (!(cov.p > 0.0 && cov.p < 1.0))
    throw DegenerateCovariogramError(
        "correlation_length: phase fraction must lie in (0,1), got p = " +
        std::to_string(cov.p));
  const double drop = cov.values[0] - cov.p * cov.p;
  if (!(drop > 0.0))
    throw DegenerateCovariogramError(
        "correlation_length: C(0) - p^2 is not positive");
  detail::BandScan scan{cov, tol_factor * drop};
  for (std::size_t i = 1; i < cov.values.size(); ++i)
    if (scan.inside(i)) return scan.cross(i);
  throw NoCrossingError(
      "correlation_length: C(h) never reaches the asymptote band; h_max too "
      "small");
}

struct RepulsionResult {
  double l1 = 0.0;
  bool fallback = false;  // true when l1 = 2*l0 (no second crossing found)
};

/// Repulsion distance l1: after the band contact at l0 the curve must leave
/// the band and come back; l1 is that re-entry. Fallback 2*l0, flagged, when
/// the curve never oscillates back.
inline RepulsionResult repulsion_distance(const Covariogram& cov,
                                          double tol_factor = 0.05) {
  const double l0 = correlation_length(cov, tol_factor);
  const double drop = cov.values[0] - cov.p * cov.p;
  detail::BandScan scan{cov, tol_factor * drop};

  std::size_t i = 1;
  while (i < cov.values.size() && !scan.inside(i)) ++i;  // first contact
  while (i < cov.values.size() && scan.inside(i)) ++i;   // band exit
  if (i >= cov.values.size()) return {2.0 * l0, true};
  while (i < cov.values.size() && !scan.inside(i)) ++i;  // re-entry
  if (i >= cov.values.size()) return {2.0 * l0, true};
  return {scan.cross(i), false};
}

struct CharacteristicLengths {
  double l0 = 0.0;
  double l1 = 0.0;
  std::vector<std::array<double, 2>> per_direction_values;  // averaged per dir
  double tolerance_used = 0.05;
  bool any_fallback = false;

  void validate() const {
    if (!(0.0 < l0 && l0 < l1))
      throw std::runtime_error(
          "CharacteristicLengths: expected 0 < l0 < l1, got l0 = " +
          std::to_string(l0) + ", l1 = " + std::to_string(l1));
  }
};

inline const std::vector<std::array<int, 3>>& axis_directions() {
  static const std::vector<std::array<int, 3>> dirs = {
      {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  return dirs;
}

/// Per-grid, per-direction l0/l1, averaged arithmetically over directions and
/// then over grids.
inline CharacteristicLengths characteristic_lengths(
    const std::vector<VoxelGrid>& grids,
    const std::vector<std::array<int, 3>>& directions, int h_max,
    double tol_factor = 0.05,
    CovEstimator estimator = CovEstimator::periodic) {
  if (grids.empty())
    throw std::invalid_argument("characteristic_lengths: no grids");
  if (directions.empty())
    throw std::invalid_argument("characteristic_lengths: no directions");

  CharacteristicLengths out;
  out.tolerance_used = tol_factor;
  std::vector<std::array<double, 2>> dir_sums(directions.size(), {0.0, 0.0});
  double sum_l0 = 0.0, sum_l1 = 0.0;
  for (std::size_t g = 0; g < grids.size(); ++g) {
    double g_l0 = 0.0, g_l1 = 0.0;
    for (std::size_t d = 0; d < directions.size(); ++d) {
      try {
        const auto cov = covariance(grids[g], directions[d], h_max, estimator);
        const double l0 = correlation_length(cov, tol_factor);
        const auto rep = repulsion_distance(cov, tol_factor);
        out.any_fallback = out.any_fallback || rep.fallback;
        g_l0 += l0;
        g_l1 += rep.l1;
        dir_sums[d][0] += l0;
        dir_sums[d][1] += rep.l1;
      } catch (const std::exception& e) {
        throw std::runtime_error(
            "characteristic_lengths: grid " + std::to_string(g) +
            ", direction (" + std::to_string(directions[d][0]) + "," +
            std::to_string(directions[d][1]) + "," +
            std::to_string(directions[d][2]) + "): " + e.what());
      }
    }
    sum_l0 += g_l0 / static_cast<double>(directions.size());
    sum_l1 += g_l1 / static_cast<double>(directions.size());
  }
  out.l0 = sum_l0 / static_cast<double>(grids.size());
  out.l1 = sum_l1 / static_cast<double>(grids.size());
  for (auto& s : dir_sums)
    out.per_direction_values.push_back(
        {s[0] / static_cast<double>(grids.size()),
         s[1] / static_cast<double>(grids.size())});
  out.validate();
  return out;
}

}  // namespace aeh
