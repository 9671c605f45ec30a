#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "aeh/covariogram.hpp"

using namespace aeh;

namespace {

VoxelGrid bernoulli_grid(int nx, int ny, int nz, double p,
                         std::uint64_t seed) {
  VoxelGrid g(nx, ny, nz);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  for (auto& v : g.labels) v = coin(rng) ? 1 : 0;
  return g;
}

/// Periodic lattice of spheres: one sphere of radius r on every node of a
/// cubic lattice of period T.
VoxelGrid sphere_lattice(int n, int T, double r) {
  VoxelGrid g(n, n, n);
  for (int z = 0; z < n; z += T)
    for (int y = 0; y < n; y += T)
      for (int x = 0; x < n; x += T)
        detail::rasterize_sphere(g, {x + 0.5, y + 0.5, z + 0.5}, r);
  return g;
}

}  // namespace

TEST_CASE("fft estimator equals direct pair counting") {
  // exhaustive over 50 seeds, grids up to 16^3, both estimators
  const std::array<std::array<int, 3>, 5> shapes = {{{8, 8, 8},
                                                     {16, 16, 16},
                                                     {16, 12, 10},
                                                     {5, 7, 9},
                                                     {12, 12, 12}}};
  int seed = 0;
  for (const auto& shape : shapes) {
    for (int rep = 0; rep < 10; ++rep) {
      const VoxelGrid g =
          bernoulli_grid(shape[0], shape[1], shape[2], 0.3, ++seed);
      const int h_max = std::min({shape[0], shape[1], shape[2]}) / 2 - 1;
      for (const auto& d : axis_directions())
        for (auto est : {CovEstimator::periodic, CovEstimator::truncated}) {
          const auto fft = covariance(g, d, h_max, est);
          const auto ref = covariance_direct(g, d, h_max, est);
          REQUIRE(fft.values.size() == ref.values.size());
          for (std::size_t i = 0; i < ref.values.size(); ++i)
            CHECK(std::fabs(fft.values[i] - ref.values[i]) <= 1e-10);
        }
    }
  }
}

TEST_CASE("C(0) equals the phase fraction") {
  const VoxelGrid g = bernoulli_grid(10, 10, 10, 0.25, 4);
  const auto cov = covariance(g, {1, 0, 0}, 4);
  CHECK(cov.values[0] == Catch::Approx(volume_fraction(g)).margin(1e-12));
}

TEST_CASE("Bernoulli voxels sit on the p^2 asymptote (Monte Carlo)") {
  // E[C(h)] = p^2 exactly for independent voxels at any nonzero lag.
  const double p = 0.3;
  const int n = 12, reps = 50;
  double mean = 0.0;
  for (int i = 0; i < reps; ++i) {
    const VoxelGrid g = bernoulli_grid(n, n, n, p, 100 + i);
    mean += covariance(g, {1, 0, 0}, 3).values[2] / reps;
  }
  const double sigma =
      std::sqrt(p * p * (1 - p * p) / (n * n * n * double(reps)));
  CHECK(std::fabs(mean - p * p) <= 3.0 * sigma);
}

TEST_CASE("Bernoulli voxels take the flagged l1 fallback") {
  const VoxelGrid g = bernoulli_grid(16, 16, 16, 0.3, 21);
  const auto cov = covariance(g, {1, 0, 0}, 7);
  const double l0 = correlation_length(cov);
  const auto rep = repulsion_distance(cov);
  CHECK(rep.fallback);
  CHECK(rep.l1 == Catch::Approx(2.0 * l0));
}

TEST_CASE("single-sphere medium: l0 tracks the sphere diameter") {
  // For an isolated ball of radius R the normalized covariogram
  // 1 - 3h/(4R) + h^3/(16 R^3) reaches the 5% band near h = 1.52 R.
  const double R = 6.0;
  VoxelGrid g(48, 48, 48);
  detail::rasterize_sphere(g, {24.0, 24.0, 24.0}, R);
  const auto cov = covariance(g, {1, 0, 0}, 23);
  const double l0 = correlation_length(cov);
  CHECK(l0 > 1.2 * R);
  CHECK(l0 < 1.9 * R);
}

TEST_CASE("periodic sphere lattice recovers the period as l1") {
  const int T = 4;
  const VoxelGrid g = sphere_lattice(32, T, 0.6);
  for (const auto& d : axis_directions()) {
    const auto cov = covariance(g, d, 8);
    const auto rep = repulsion_distance(cov);
    CHECK_FALSE(rep.fallback);
    CHECK(std::fabs(rep.l1 - T) <= 1.0);
    // brute-force estimator agrees
    const auto rep_direct = repulsion_distance(covariance_direct(g, d, 8));
    CHECK(rep.l1 == Catch::Approx(rep_direct.l1).margin(1e-10));
  }
}

TEST_CASE("degenerate and error paths") {
  VoxelGrid empty(8, 8, 8);
  CHECK_THROWS_AS(correlation_length(covariance(empty, {1, 0, 0}, 3)),
                  DegenerateCovariogramError);
  VoxelGrid full(8, 8, 8);
  for (auto& v : full.labels) v = 1;
  CHECK_THROWS_AS(correlation_length(covariance(full, {1, 0, 0}, 3)),
                  DegenerateCovariogramError);

  const VoxelGrid g = bernoulli_grid(8, 8, 8, 0.3, 2);
  CHECK_THROWS_AS(covariance(g, {0, 0, 0}, 3), std::domain_error);
  CHECK_THROWS_AS(covariance(g, {1, 0, 0}, 8, CovEstimator::truncated),
                  EmptyPairError);

  // curve that never reaches the band within h_max
  const double R = 6.0;
  VoxelGrid one(48, 48, 48);
  detail::rasterize_sphere(one, {24.0, 24.0, 24.0}, R);
  CHECK_THROWS_AS(correlation_length(covariance(one, {1, 0, 0}, 3)),
                  NoCrossingError);
}

TEST_CASE("characteristic lengths average directions and grids") {
  const int T = 4;
  std::vector<VoxelGrid> grids = {sphere_lattice(32, T, 0.6),
                                  sphere_lattice(32, T, 0.6)};
  const auto lengths =
      characteristic_lengths(grids, axis_directions(), 8, 0.05);
  CHECK(lengths.l0 > 0.0);
  CHECK(lengths.l0 < lengths.l1);
  CHECK(std::fabs(lengths.l1 - T) <= 1.0);
  REQUIRE(lengths.per_direction_values.size() == 3);
  // isotropic lattice: all directions agree
  for (const auto& dv : lengths.per_direction_values) {
    CHECK(dv[0] == Catch::Approx(lengths.l0));
    CHECK(dv[1] == Catch::Approx(lengths.l1));
  }

  CHECK_THROWS_AS(characteristic_lengths({}, axis_directions(), 8),
                  std::invalid_argument);
  // error message names the offending grid and direction
  grids.push_back(VoxelGrid(8, 8, 8));  // empty -> degenerate
  CHECK_THROWS_WITH(
      characteristic_lengths(grids, axis_directions(), 3),
      Catch::Matchers::ContainsSubstring("grid 2") &&
          Catch::Matchers::ContainsSubstring("direction (1,0,0)"));
}
