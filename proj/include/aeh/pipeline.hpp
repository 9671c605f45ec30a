////////////////////////////////////////////////////////////////////////////////
// pipeline.hpp
//
// End-to-end study: realizations -> characteristic lengths -> MREV0/MREV1 ->
// correctors and homogenized tensors -> macroscopic strain estimates ->
// two-term energy against the Voigt-Reuss spindle.
//
// Step list for the virtual mode (reconstruction; the per-fraction loop):
//   1. generate N periodic realizations of the pattern process,
//   2. covariogram -> averaged l0, l1,
//   3. MREV0 (cube of side l0) and MREV1 (side l1) freshly generated at the
//      same process parameters,
//   4. correctors + homogenized tensors on each MREV0 realization,
//   5. full-field check on MREV0 (imposed strain is E0 under periodic BC),
//   6. full-field on MREV1 realizations -> E1 via the windowed-deviation
//      estimator below,
//   7. ensemble average, two-term energy, bound gate.
//
// E1 estimator: the strain field of each MREV1 run is box-filtered over
// windows of side l0 (windows truncated at the boundary), the deviation of
// the filtered field from E0 is averaged over volume and ensemble, and the
// result is divided by eta = l0/l1. This reading of the order-eta strain
// correction is an interpretation and is flagged as such in the output
// metadata.
////////////////////////////////////////////////////////////////////////////////
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

#include "aeh/covariogram.hpp"
#include "aeh/homogenize.hpp"
#include "aeh/microstructure.hpp"

namespace aeh {

struct StudyConfig {
  IsotropicMaterial matrix{1.0, 0.3};
  IsotropicMaterial inclusion{100.0, 0.3};
  std::vector<double> fractions;
  int realizations = 10;  // virtual mode
  int extractions = 15;   // image mode
  std::uint64_t master_seed = 1;
  double covariogram_tolerance = 0.05;
  SolverSettings solver;
  std::string mode = "virtual";  // "virtual" | "image"
  std::string image_header, image_data;
  std::string out_dir;
  std::array<int, 3> domain_dims = {48, 48, 48};
  double pattern_big_radius = 2.0;
  int workers = 1;
  bool include_D = false;
  bool force = false;  // allow grids above the desk-scale cap
  int min_mrev_side = 8;
  int max_grid_side = 96;

  void validate() const {
    matrix.validate();
    inclusion.validate();
    if (mode == "virtual" && fractions.empty())
      throw std::invalid_argument("StudyConfig: no volume fractions");
    if (mode == "image" && (image_header.empty() || image_data.empty()))
      throw std::invalid_argument("StudyConfig: image mode needs header+data");
    for (double f : fractions)
      if (!(f >= 0.0 && f < 1.0))
        throw std::invalid_argument("StudyConfig: fractions must be in [0,1)");
    if (realizations < 1 || extractions < 1)
      throw std::invalid_argument("StudyConfig: realizations must be >= 1");
    if (mode != "virtual" && mode != "image")
      throw std::invalid_argument("StudyConfig: mode must be virtual|image");
    const int side = *std::max_element(domain_dims.begin(), domain_dims.end());
    if (side > max_grid_side && !force)
      throw std::invalid_argument(
          "StudyConfig: grid side " + std::to_string(side) +
          " above desk-scale cap " + std::to_string(max_grid_side) +
          " (use force to override)");
  }
};

inline json to_json(const StudyConfig& c) {
  return json{{"schema_version", 1},
              {"matrix", {{"E", c.matrix.young_modulus},
                          {"nu", c.matrix.poisson_ratio}}},
              {"inclusion", {{"E", c.inclusion.young_modulus},
                             {"nu", c.inclusion.poisson_ratio}}},
              {"fractions", c.fractions},
              {"realizations", c.realizations},
              {"extractions", c.extractions},
              {"master_seed", c.master_seed},
              {"covariogram_tolerance", c.covariogram_tolerance},
              {"solver", {{"cg_tolerance", c.solver.cg_tolerance},
                          {"max_iterations", c.solver.max_iterations},
                          {"preconditioner", c.solver.preconditioner}}},
              {"mode", c.mode},
              {"image_header", c.image_header},
              {"image_data", c.image_data},
              {"out_dir", c.out_dir},
              {"domain_dims", c.domain_dims},
              {"pattern_big_radius", c.pattern_big_radius},
              {"workers", c.workers},
              {"include_D", c.include_D},
              {"force", c.force}};
}

inline StudyConfig study_config_from_json(const json& j) {
  if (j.value("schema_version", 0) != 1)
    throw std::runtime_error("StudyConfig: unsupported schema_version");
  StudyConfig c;
  c.matrix = {j.at("matrix").at("E").get<double>(),
              j.at("matrix").at("nu").get<double>()};
  c.inclusion = {j.at("inclusion").at("E").get<double>(),
                 j.at("inclusion").at("nu").get<double>()};
  c.fractions = j.at("fractions").get<std::vector<double>>();
  c.realizations = j.value("realizations", 10);
  c.extractions = j.value("extractions", 15);
  c.master_seed = j.at("master_seed").get<std::uint64_t>();
  c.covariogram_tolerance = j.value("covariogram_tolerance", 0.05);
  if (j.contains("solver")) {
    c.solver.cg_tolerance = j["solver"].value("cg_tolerance", 1e-8);
    c.solver.max_iterations = j["solver"].value("max_iterations", 0);
    c.solver.preconditioner = j["solver"].value("preconditioner", "jacobi");
  }
  c.mode = j.value("mode", "virtual");
  c.image_header = j.value("image_header", "");
  c.image_data = j.value("image_data", "");
  c.out_dir = j.value("out_dir", "");
  if (j.contains("domain_dims")) {
    auto d = j["domain_dims"].get<std::vector<int>>();
    if (d.size() != 3) throw std::runtime_error("StudyConfig: bad domain_dims");
    c.domain_dims = {d[0], d[1], d[2]};
  }
  c.pattern_big_radius = j.value("pattern_big_radius", 2.0);
  c.workers = j.value("workers", 1);
  c.include_D = j.value("include_D", false);
  c.force = j.value("force", false);
  return c;
}

struct FractionRecord {
  double fraction = 0.0;
  CharacteristicLengths lengths;
  std::vector<HomogenizedSet> per_realization;
  HomogenizedSet ensemble;
  EnsembleVariance variance;
  SymTensor2 E0, E1;
  double full_field_check = 0.0;  // max |<eps> - E0| on MREV0
  EnergyReport energy;
  bool bounds_ok = false;
  std::string failure;  // non-empty when this fraction failed
};

struct StudyRecord {
  std::string mode;
  std::uint64_t master_seed = 0;
  std::vector<FractionRecord> fractions;

  bool all_bounds_ok() const {
    for (const auto& f : fractions)
      if (!f.failure.empty() || !f.bounds_ok) return false;
    return true;
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Stream of derived seeds: deterministic in (master, tags).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b, std::uint64_t c) {
  return splitmix64(splitmix64(splitmix64(master ^ a) ^ b) ^ c);
}

/// Index-ordered parallel map: results land by index, so the outcome is
/// independent of the worker count.
template <typename Fn>
inline void parallel_for_indexed(int n, int workers, Fn&& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex mu;
  std::exception_ptr err;
  std::atomic<int> next{0};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

/// Box-filtered element strain field (window of side w, truncated at the
/// boundary), volume-averaged deviation from E0.
inline SymTensor2 windowed_deviation(const std::vector<SymTensor2>& field,
                                     int nx, int ny, int nz, int w,
                                     const SymTensor2& E0) {
  const int hw = std::max(0, w / 2);
  SymTensor2 acc = SymTensor2::zero();
  for (int z = 0; z < nz; ++z)
    for (int y = 0; y < ny; ++y)
      for (int x = 0; x < nx; ++x) {
        SymTensor2 win = SymTensor2::zero();
        int cnt = 0;
        for (int dz = std::max(0, z - hw); dz <= std::min(nz - 1, z + hw); ++dz)
          for (int dy = std::max(0, y - hw); dy <= std::min(ny - 1, y + hw);
               ++dy)
            for (int dx = std::max(0, x - hw); dx <= std::min(nx - 1, x + hw);
                 ++dx) {
              win = win + field[(static_cast<std::size_t>(dz) * ny + dy) * nx +
                                dx];
              ++cnt;
            }
        acc = acc + (win * (1.0 / cnt) - E0);
      }
  return acc * (1.0 / (static_cast<double>(nx) * ny * nz));
}

/// Content-hash key for resumable per-realization artifacts.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string cache_path(const StudyConfig& cfg, const std::string& tag) {
  if (cfg.out_dir.empty()) return {};
  const std::string key =
      to_json(cfg).dump() + "|" + tag;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(key)));
  return cfg.out_dir + "/cache-" + buf + ".json";
}

/// Solve one MREV0 grid: correctors, localization-based assemblies, set
/// metadata. Cached by content hash when an output directory is configured.
inline HomogenizedSet solve_mrev0(const StudyConfig& cfg, const VoxelGrid& grid,
                                  const CharacteristicLengths& lengths,
                                  std::uint64_t seed, const std::string& tag) {
  const std::string cache = cache_path(cfg, tag);
  if (!cache.empty() && std::filesystem::exists(cache)) {
    std::ifstream in(cache);
    json j;
    in >> j;
    return homogenized_set_from_json(j);
  }
  const PeriodicMesh mesh = build_mesh(grid);
  CellSystem sys(mesh, isotropic_stiffness(cfg.matrix),
                 isotropic_stiffness(cfg.inclusion));
  const CorrectorChi0 chi0 = solve_chi0(sys, cfg.solver);
  const CorrectorChi1 chi1 = solve_chi1(sys, chi0, cfg.solver);
  HomogenizedSet set;
  set.A = assemble_A00(sys, chi0);
  set.B = assemble_B01(sys, chi0);
  set.C5 = assemble_C00(sys, chi0);
  set.D5 = assemble_D00(sys, chi0, chi1);
  set.volume_fraction = volume_fraction(grid);
  set.l0 = lengths.l0;
  set.l1 = lengths.l1;
  set.eta = lengths.l1 > 0 ? lengths.l0 / lengths.l1 : 0.0;
  set.matrix = cfg.matrix;
  set.inclusion = cfg.inclusion;
  set.realization_seeds = {seed};
  set.lengths_fallback = lengths.any_fallback;
  if (!cache.empty()) {
    std::ofstream out(cache);
    out << to_json(set).dump(2) << "\n";
  }
  return set;
}

inline int mrev_side(double length, const StudyConfig& cfg) {
  int side = static_cast<int>(std::ceil(length));
  side = std::max(side, cfg.min_mrev_side);
  if (side > cfg.max_grid_side && !cfg.force)
    throw std::runtime_error("pipeline: MREV side " + std::to_string(side) +
                             " above desk-scale cap");
  return side;
}

inline SymTensor2 uniaxial_E0() {
  SymTensor2 e;
  e.v[0] = 1.0;
  return e;
}

/// Common tail of both study modes: ensemble average, E1 from the MREV1
/// full-field runs, energy and bound gate.
inline void finish_fraction(const StudyConfig& cfg, FractionRecord& rec,
                            const std::vector<SymTensor2>& mrev1_deviations) {
  rec.ensemble = ensemble_average(rec.per_realization, &rec.variance);
  rec.E0 = uniaxial_E0();
  SymTensor2 dev = SymTensor2::zero();
  for (const auto& d : mrev1_deviations)
    dev = dev + d * (1.0 / std::max<std::size_t>(1, mrev1_deviations.size()));
  const double eta = rec.ensemble.eta;
  rec.E1 = eta > 0.0 ? dev * (1.0 / eta) : SymTensor2::zero();
  rec.energy = energy_total(rec.ensemble, rec.E0, rec.E1, GradTensor3::zero(),
                            cfg.include_D);
  rec.bounds_ok = rec.energy.reuss_energy <= rec.energy.total + 1e-12 &&
                  rec.energy.total <= rec.energy.voigt_energy + 1e-12;
}

}  // namespace detail

/// Virtual-pattern study over all configured volume fractions.
inline StudyRecord run_virtual_study(const StudyConfig& cfg) {
  cfg.validate();
  if (cfg.mode != "virtual")
    throw std::invalid_argument("run_virtual_study: mode must be 'virtual'");
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);

  StudyRecord record;
  record.mode = "virtual";
  record.master_seed = cfg.master_seed;

  for (std::size_t fi = 0; fi < cfg.fractions.size(); ++fi) {
    FractionRecord rec;
    rec.fraction = cfg.fractions[fi];
    try {
      if (rec.fraction == 0.0) {
        // Homogeneous limit: no statistics to gather.
        VoxelGrid grid(cfg.min_mrev_side, cfg.min_mrev_side, cfg.min_mrev_side);
        CharacteristicLengths lengths;
        lengths.l0 = lengths.l1 = 0.0;
        HomogenizedSet set = detail::solve_mrev0(
            cfg, grid, lengths, cfg.master_seed,
            "f0-homogeneous-" + std::to_string(cfg.min_mrev_side));
        rec.per_realization.push_back(set);
        detail::finish_fraction(cfg, rec, {});
        record.fractions.push_back(rec);
        continue;
      }

      const PatternSpec base =
          PatternSpec::with_big_radius(cfg.pattern_big_radius);
      // (1) full-size realizations for the statistics
      std::vector<VoxelGrid> grids(cfg.realizations);
      detail::parallel_for_indexed(cfg.realizations, cfg.workers, [&](int i) {
        PointProcessConfig pc;
        pc.target_volume_fraction = rec.fraction;
        pc.domain_dims = cfg.domain_dims;
        pc.rng_seed = detail::derive_seed(cfg.master_seed, fi, i, 0x01);
        grids[i] = generate_realization(pc, base);
      });

      // (2) characteristic lengths
      const int h_max =
          *std::min_element(cfg.domain_dims.begin(), cfg.domain_dims.end()) /
              2 - 1;
      rec.lengths = characteristic_lengths(grids, axis_directions(), h_max,
                                           cfg.covariogram_tolerance,
                                           CovEstimator::periodic);

      // (3) MREV sizes, scaled pattern from the realization provenance
      const int side0 = detail::mrev_side(rec.lengths.l0, cfg);
      const int side1 = detail::mrev_side(rec.lengths.l1, cfg);
      const double scale = grids[0].seed_provenance
                               ? grids[0].seed_provenance->pattern_scale
                               : 1.0;
      const PatternSpec scaled = base.scaled(scale);

      // (4) correctors + tensors on fresh MREV0 realizations
      rec.per_realization.resize(cfg.realizations);
      detail::parallel_for_indexed(cfg.realizations, cfg.workers, [&](int i) {
        PointProcessConfig pc;
        pc.target_volume_fraction = rec.fraction;
        pc.domain_dims = {side0, side0, side0};
        pc.rng_seed = detail::derive_seed(cfg.master_seed, fi, i, 0x02);
        const VoxelGrid g = generate_at_intensity(pc, scaled);
        rec.per_realization[i] = detail::solve_mrev0(
            cfg, g, rec.lengths, pc.rng_seed,
            "f" + std::to_string(rec.fraction) + "-mrev0-" +
                std::to_string(i));
      });

      // (5) full-field verification on the first MREV0 realization
      {
        PointProcessConfig pc;
        pc.target_volume_fraction = rec.fraction;
        pc.domain_dims = {side0, side0, side0};
        pc.rng_seed = detail::derive_seed(cfg.master_seed, fi, 0, 0x02);
        const VoxelGrid g = generate_at_intensity(pc, scaled);
        const PeriodicMesh mesh = build_mesh(g);
        const auto ff = full_field(mesh, isotropic_stiffness(cfg.matrix),
                                   isotropic_stiffness(cfg.inclusion),
                                   detail::uniaxial_E0(), cfg.solver);
        double dev = 0.0;
        const SymTensor2 E0 = detail::uniaxial_E0();
        for (int a = 0; a < 6; ++a)
          dev = std::max(dev, std::fabs(ff.mean_strain[a] - E0[a]));
        rec.full_field_check = dev;
      }

      // (6) E1 from MREV1 full-field runs
      std::vector<SymTensor2> deviations(cfg.realizations);
      const int window = std::max(1, static_cast<int>(std::lround(
                                         rec.lengths.l0)));
      detail::parallel_for_indexed(cfg.realizations, cfg.workers, [&](int i) {
        PointProcessConfig pc;
        pc.target_volume_fraction = rec.fraction;
        pc.domain_dims = {side1, side1, side1};
        pc.rng_seed = detail::derive_seed(cfg.master_seed, fi, i, 0x03);
        const VoxelGrid g = generate_at_intensity(pc, scaled);
        const PeriodicMesh mesh = build_mesh(g);
        const auto ff = full_field(mesh, isotropic_stiffness(cfg.matrix),
                                   isotropic_stiffness(cfg.inclusion),
                                   detail::uniaxial_E0(), cfg.solver);
        deviations[i] = detail::windowed_deviation(
            ff.elem_strain, side1, side1, side1, window,
            detail::uniaxial_E0());
      });

      // (7)-(8) ensemble, energy, bounds
      detail::finish_fraction(cfg, rec, deviations);
    } catch (const std::exception& e) {
      rec.failure = e.what();
    }
    record.fractions.push_back(rec);
  }
  return record;
}

/// Image-mode study: covariogram on the full image, seeded random MREV
/// extraction instead of fresh generation.
inline StudyRecord run_image_study(const StudyConfig& cfg) {
  cfg.validate();
  if (cfg.mode != "image")
    throw std::invalid_argument("run_image_study: mode must be 'image'");
  if (!cfg.out_dir.empty()) std::filesystem::create_directories(cfg.out_dir);

  const VoxelGrid image = load_voxel_image(cfg.image_header, cfg.image_data);
  const double f_image = volume_fraction(image);

  StudyRecord record;
  record.mode = "image";
  record.master_seed = cfg.master_seed;

  FractionRecord rec;
  rec.fraction = f_image;
  try {
    const int h_max =
        std::min({image.nx, image.ny, image.nz}) / 2 - 1;
    rec.lengths = characteristic_lengths({image}, axis_directions(), h_max,
                                         cfg.covariogram_tolerance,
                                         CovEstimator::truncated);
    const int side0 = detail::mrev_side(rec.lengths.l0, cfg);
    const int side1 = detail::mrev_side(rec.lengths.l1, cfg);
    if (side1 > std::min({image.nx, image.ny, image.nz}))
      throw std::runtime_error(
          "run_image_study: image smaller than the repulsion distance l1 = " +
          std::to_string(rec.lengths.l1));

    rec.per_realization.resize(cfg.extractions);
    detail::parallel_for_indexed(cfg.extractions, cfg.workers, [&](int i) {
      const std::uint64_t seed =
          detail::derive_seed(cfg.master_seed, 0, i, 0x12);
      const VoxelGrid g =
          extract_subvolume(image, {0, 0, 0}, {side0, side0, side0}, seed);
      rec.per_realization[i] = detail::solve_mrev0(
          cfg, g, rec.lengths, seed, "image-mrev0-" + std::to_string(i));
    });

    std::vector<SymTensor2> deviations(cfg.extractions);
    const int window =
        std::max(1, static_cast<int>(std::lround(rec.lengths.l0)));
    detail::parallel_for_indexed(cfg.extractions, cfg.workers, [&](int i) {
      const std::uint64_t seed =
          detail::derive_seed(cfg.master_seed, 0, i, 0x13);
      const VoxelGrid g =
          extract_subvolume(image, {0, 0, 0}, {side1, side1, side1}, seed);
      const PeriodicMesh mesh = build_mesh(g);
      const auto ff = full_field(mesh, isotropic_stiffness(cfg.matrix),
                                 isotropic_stiffness(cfg.inclusion),
                                 detail::uniaxial_E0(), cfg.solver);
      deviations[i] = detail::windowed_deviation(
          ff.elem_strain, side1, side1, side1, window, detail::uniaxial_E0());
    });

    detail::finish_fraction(cfg, rec, deviations);
  } catch (const std::exception& e) {
    rec.failure = e.what();
  }
  record.fractions.push_back(rec);
  return record;
}

inline StudyRecord run_study(const StudyConfig& cfg) {
  return cfg.mode == "image" ? run_image_study(cfg) : run_virtual_study(cfg);
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Spindle CSV: one row per fraction, directly plottable against the bounds.
inline void emit_spindle(const std::vector<StudyRecord>& records,
                         const std::string& path) {
  if (records.empty())
    throw std::invalid_argument("emit_spindle: no study records");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("emit_spindle: cannot write " + path);
  out << "fraction,W_total,W_Reuss,W_Voigt,flags\n";
  for (const auto& r : records)
    for (const auto& f : r.fractions) {
      std::string flags;
      if (!f.failure.empty()) flags = "failed";
      else {
        if (f.energy.lengths_fallback) flags += "fallback_l1;";
        if (f.energy.include_D) flags += "include_D;";
        if (!f.bounds_ok) flags += "bounds_violated;";
        if (flags.empty()) flags = "ok";
        else flags.pop_back();
      }
      out << detail::fmt_double(f.fraction) << ','
          << detail::fmt_double(f.energy.total) << ','
          << detail::fmt_double(f.energy.reuss_energy) << ','
          << detail::fmt_double(f.energy.voigt_energy) << ',' << flags << '\n';
    }
}

inline json to_json(const FractionRecord& f) {
  json pr = json::array();
  for (const auto& s : f.per_realization) pr.push_back(to_json(s));
  return json{{"fraction", f.fraction},
              {"l0", f.lengths.l0},
              {"l1", f.lengths.l1},
              {"lengths_fallback", f.lengths.any_fallback},
              {"per_realization", pr},
              {"ensemble", to_json(f.ensemble)},
              {"E0", to_json(f.E0)},
              {"E1", to_json(f.E1)},
              {"E1_estimator", "windowed-deviation (interpretation)"},
              {"full_field_check", f.full_field_check},
              {"energy", to_json(f.energy)},
              {"bounds_ok", f.bounds_ok},
              {"failure", f.failure}};
}

inline json to_json(const StudyRecord& r) {
  json fr = json::array();
  for (const auto& f : r.fractions) fr.push_back(to_json(f));
  return json{{"schema_version", 1},
              {"mode", r.mode},
              {"master_seed", r.master_seed},
              {"fractions", fr}};
}

inline StudyRecord study_record_from_json(const json& j) {
  if (j.value("schema_version", 0) != 1)
    throw std::runtime_error("StudyRecord: unsupported schema_version");
  StudyRecord r;
  r.mode = j.at("mode").get<std::string>();
  r.master_seed = j.at("master_seed").get<std::uint64_t>();
  for (const auto& jf : j.at("fractions")) {
    FractionRecord f;
    f.fraction = jf.at("fraction").get<double>();
    f.lengths.l0 = jf.at("l0").get<double>();
    f.lengths.l1 = jf.at("l1").get<double>();
    f.lengths.any_fallback = jf.at("lengths_fallback").get<bool>();
    for (const auto& js : jf.at("per_realization"))
      f.per_realization.push_back(homogenized_set_from_json(js));
    f.failure = jf.at("failure").get<std::string>();
    if (f.failure.empty()) {
      f.ensemble = homogenized_set_from_json(jf.at("ensemble"));
      f.E0 = sym_tensor2_from_json(jf.at("E0"));
      f.E1 = sym_tensor2_from_json(jf.at("E1"));
      f.full_field_check = jf.at("full_field_check").get<double>();
      f.energy = energy_report_from_json(jf.at("energy"));
      f.bounds_ok = jf.at("bounds_ok").get<bool>();
    }
    r.fractions.push_back(std::move(f));
  }
  return r;
}

}  // namespace aeh
