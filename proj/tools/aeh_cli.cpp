////////////////////////////////////////////////////////////////////////////////
// aeh_cli.cpp
//
// Multi-verb command line front end:
//   genmicro    generate voxel realizations of the sphere-pattern process
//   covario     covariograms + characteristic lengths of voxel images
//   correctors  solve the periodic cell problems, write corrector fields
//   homog       assemble homogenized tensors from saved correctors
//   energy      two-term energy report from a homogenized tensor set
//   pipeline    end-to-end study from a JSON config
//   spindle     CSV of energies vs bounds from study records
//
// Voxel images are stored as a JSON header plus a raw u8 file; the CLI pairs
// "name.json" with "name.raw". Corrector files are raw little-endian float64
// arrays (6 chi0 fields then 18 chi1 fields, 3 dofs per node) described by a
// "<name>.json" manifest.
////////////////////////////////////////////////////////////////////////////////
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "aeh/pipeline.hpp"

namespace fs = std::filesystem;
using aeh::json;

namespace {

std::string raw_path_for(const std::string& header_path) {
  fs::path p(header_path);
  p.replace_extension(".raw");
  return p.string();
}

aeh::VoxelGrid load_grid(const std::string& header_path) {
  return aeh::load_voxel_image(header_path, raw_path_for(header_path));
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

aeh::SymTensor2 parse_sym6(const std::vector<double>& v, const char* what) {
  if (v.size() != 6)
    throw CLI::ValidationError(std::string(what) + ": expected 6 components");
  aeh::SymTensor2 t;
  std::copy(v.begin(), v.end(), t.v.begin());
  return t;
}

// ---------------------------------------------------------------- genmicro

int cmd_genmicro(double vf, std::vector<int> dims, std::uint64_t seed,
                 int count, double big_radius, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const aeh::PatternSpec pat = aeh::PatternSpec::with_big_radius(big_radius);
  json summary = json::array();
  for (int i = 0; i < count; ++i) {
    aeh::PointProcessConfig pc;
    pc.target_volume_fraction = vf;
    pc.domain_dims = {dims[0], dims[1], dims[2]};
    pc.rng_seed = aeh::detail::derive_seed(seed, 0, i, 0x67);
    const aeh::VoxelGrid grid = aeh::generate_realization(pc, pat);
    char name[32];
    std::snprintf(name, sizeof(name), "real-%03d", i);
    const std::string base = out_dir + "/" + name;
    aeh::save_voxel_image(grid, base + ".json", base + ".raw");
    summary.push_back({{"header", base + ".json"},
                       {"seed", pc.rng_seed},
                       {"volume_fraction", aeh::volume_fraction(grid)},
                       {"pattern_scale",
                        grid.seed_provenance->pattern_scale}});
  }
  write_json_file(json{{"target_volume_fraction", vf},
                       {"dims", dims},
                       {"master_seed", seed},
                       {"realizations", summary}},
                  out_dir + "/genmicro.json");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ----------------------------------------------------------------- covario

int cmd_covario(const std::vector<std::string>& inputs, int h_max, double tol,
                const std::string& csv_path, bool truncated) {
  const auto estimator =
      truncated ? aeh::CovEstimator::truncated : aeh::CovEstimator::periodic;
  std::vector<aeh::VoxelGrid> grids;
  for (const auto& p : inputs) grids.push_back(load_grid(p));

  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + csv_path);
  csv << "grid,dx,dy,dz,lag,value\n";
  for (std::size_t g = 0; g < grids.size(); ++g)
    for (const auto& d : aeh::axis_directions()) {
      const auto cov = aeh::covariance(grids[g], d, h_max, estimator);
      for (std::size_t i = 0; i < cov.lags.size(); ++i)
        csv << g << ',' << d[0] << ',' << d[1] << ',' << d[2] << ','
            << cov.lags[i] << ',' << aeh::detail::fmt_double(cov.values[i])
            << '\n';
    }

  const auto lengths = aeh::characteristic_lengths(
      grids, aeh::axis_directions(), h_max, tol, estimator);
  json per_dir = json::array();
  for (std::size_t d = 0; d < lengths.per_direction_values.size(); ++d)
    per_dir.push_back({{"direction", aeh::axis_directions()[d]},
                       {"l0", lengths.per_direction_values[d][0]},
                       {"l1", lengths.per_direction_values[d][1]}});
  std::cout << json{{"l0", lengths.l0},
                    {"l1", lengths.l1},
                    {"tolerance", lengths.tolerance_used},
                    {"fallback", lengths.any_fallback},
                    {"per_direction", per_dir}}
                   .dump(2)
            << "\n";
  return 0;
}

// -------------------------------------------------------------- correctors

int cmd_correctors(const std::string& grid_path, double Em, double Ei,
                   double nu, double tol, const std::string& out_path) {
  const aeh::VoxelGrid grid = load_grid(grid_path);
  const aeh::PeriodicMesh mesh = aeh::build_mesh(grid);
  aeh::CellSystem sys(mesh, aeh::isotropic_stiffness({Em, nu}),
                      aeh::isotropic_stiffness({Ei, nu}));
  aeh::SolverSettings settings;
  settings.cg_tolerance = tol;
  const aeh::CorrectorChi0 chi0 = aeh::solve_chi0(sys, settings);
  const aeh::CorrectorChi1 chi1 = aeh::solve_chi1(sys, chi0, settings);

  std::ofstream bin(out_path, std::ios::binary);
  if (!bin) throw std::runtime_error("cannot write " + out_path);
  const auto dump = [&](const std::vector<double>& f) {
    bin.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
  };
  for (const auto& f : chi0.fields) dump(f);
  for (const auto& f : chi1.fields) dump(f);

  write_json_file(
      json{{"schema_version", 1},
           {"grid_header", grid_path},
           {"dims", {grid.nx, grid.ny, grid.nz}},
           {"spacing", grid.spacing},
           {"matrix", {{"E", Em}, {"nu", nu}}},
           {"inclusion", {{"E", Ei}, {"nu", nu}}},
           {"dofs_per_field", mesh.num_dofs()},
           {"layout", "chi0[6] then chi1[18], float64 le, 3 dofs per node"}},
      out_path + ".json");
  return 0;
}

// ------------------------------------------------------------------- homog

int cmd_homog(const std::string& chi_path, const std::string& out_path,
              double l0, double l1) {
  const json manifest = read_json_file(chi_path + ".json");
  if (manifest.value("schema_version", 0) != 1)
    throw std::runtime_error("corrector manifest: unsupported schema_version");
  const aeh::VoxelGrid grid =
      load_grid(manifest.at("grid_header").get<std::string>());
  const aeh::PeriodicMesh mesh = aeh::build_mesh(grid);
  const std::size_t n = mesh.num_dofs();
  if (manifest.at("dofs_per_field").get<std::size_t>() != n)
    throw std::runtime_error("corrector manifest: dof count does not match "
                             "the referenced grid");

  std::ifstream bin(chi_path, std::ios::binary | std::ios::ate);
  if (!bin) throw std::runtime_error("cannot open " + chi_path);
  if (static_cast<std::size_t>(bin.tellg()) != 24 * n * sizeof(double))
    throw std::runtime_error("corrector file size does not match manifest");
  bin.seekg(0);
  const auto slurp = [&](std::vector<double>& f) {
    f.resize(n);
    bin.read(reinterpret_cast<char*>(f.data()),
             static_cast<std::streamsize>(n * sizeof(double)));
  };
  aeh::CorrectorChi0 chi0;
  aeh::CorrectorChi1 chi1;
  for (auto& f : chi0.fields) slurp(f);
  for (auto& f : chi1.fields) slurp(f);

  const aeh::IsotropicMaterial mat{manifest.at("matrix").at("E").get<double>(),
                                   manifest.at("matrix").at("nu").get<double>()};
  const aeh::IsotropicMaterial inc{
      manifest.at("inclusion").at("E").get<double>(),
      manifest.at("inclusion").at("nu").get<double>()};
  aeh::CellSystem sys(mesh, aeh::isotropic_stiffness(mat),
                      aeh::isotropic_stiffness(inc));

  aeh::HomogenizedSet set;
  set.A = aeh::assemble_A00(sys, chi0);
  set.B = aeh::assemble_B01(sys, chi0);
  set.C5 = aeh::assemble_C00(sys, chi0);
  set.D5 = aeh::assemble_D00(sys, chi0, chi1);
  set.volume_fraction = aeh::volume_fraction(grid);
  set.l0 = l0;
  set.l1 = l1;
  set.eta = l1 > 0 ? l0 / l1 : 0.0;
  set.matrix = mat;
  set.inclusion = inc;
  if (grid.seed_provenance)
    set.realization_seeds = {grid.seed_provenance->rng_seed};
  write_json_file(aeh::to_json(set), out_path);
  return 0;
}

// ------------------------------------------------------------------ energy

int cmd_energy(const std::string& homog_path, const std::vector<double>& E0,
               const std::vector<double>& E1, bool include_D,
               const std::string& out_path) {
  const aeh::HomogenizedSet set =
      aeh::homogenized_set_from_json(read_json_file(homog_path));
  const aeh::SymTensor2 e0 = parse_sym6(E0, "--E0");
  const aeh::SymTensor2 e1 = parse_sym6(E1, "--E1");
  const aeh::EnergyReport r = aeh::energy_total(
      set, e0, e1, aeh::GradTensor3::zero(), include_D);
  const json j = aeh::to_json(r);
  write_json_file(j, out_path);
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- pipeline

int cmd_pipeline(const std::string& config_path, std::string out_dir,
                 int workers, bool force) {
  aeh::StudyConfig cfg = aeh::study_config_from_json(read_json_file(config_path));
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (cfg.out_dir.empty()) cfg.out_dir = ".";
  if (workers > 0) cfg.workers = workers;
  if (force) cfg.force = true;

  const aeh::StudyRecord record = aeh::run_study(cfg);
  fs::create_directories(cfg.out_dir);
  write_json_file(aeh::to_json(record), cfg.out_dir + "/record.json");
  aeh::emit_spindle({record}, cfg.out_dir + "/spindle.csv");
  for (const auto& f : record.fractions) {
    if (!f.failure.empty())
      std::cerr << "fraction " << f.fraction << " failed: " << f.failure
                << "\n";
    else if (!f.bounds_ok)
      std::cerr << "fraction " << f.fraction
                << " violates the Voigt-Reuss bounds\n";
  }
  return record.all_bounds_ok() ? 0 : 2;
}

// ----------------------------------------------------------------- spindle

int cmd_spindle(const std::vector<std::string>& record_paths,
                const std::string& out_path) {
  std::vector<aeh::StudyRecord> records;
  for (const auto& p : record_paths)
    records.push_back(aeh::study_record_from_json(read_json_file(p)));
  aeh::emit_spindle(records, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic homogenization toolkit for two-phase voxel media"};
  app.require_subcommand(1);

  // genmicro
  double vf = 0.05;
  std::vector<int> dims = {48, 48, 48};
  std::uint64_t seed = 1;
  int count = 1;
  double big_radius = 2.0;
  std::string out_dir = "out";
  auto* gen = app.add_subcommand("genmicro", "generate voxel realizations");
  gen->add_option("--vf", vf, "target inclusion volume fraction")->required();
  gen->add_option("--dims", dims, "grid dims nx ny nz")->expected(3);
  gen->add_option("--seed", seed, "master seed")->required();
  gen->add_option("--count", count, "number of realizations");
  gen->add_option("--big-radius", big_radius, "pattern big-sphere radius");
  gen->add_option("--out-dir", out_dir, "output directory")->required();

  // covario
  std::vector<std::string> cov_in;
  int h_max = 16;
  double tol = 0.05;
  std::string csv_path = "covario.csv";
  bool truncated = false;
  auto* cov = app.add_subcommand("covario",
                                 "covariograms and characteristic lengths");
  cov->add_option("--in", cov_in, "voxel header files")->required();
  cov->add_option("--hmax", h_max, "maximum lag in voxels");
  cov->add_option("--tol", tol, "asymptote band tolerance factor");
  cov->add_option("--csv", csv_path, "CSV output path")->required();
  cov->add_flag("--truncated", truncated,
                "non-periodic estimator (for windowed images)");

  // correctors
  std::string grid_path, chi_out = "chi.bin";
  double Em = 1.0, Ei = 100.0, nu = 0.3, cg_tol = 1e-8;
  auto* cor = app.add_subcommand("correctors", "solve the periodic cell "
                                               "problems");
  cor->add_option("--grid", grid_path, "voxel header file")->required();
  cor->add_option("--Em", Em, "matrix Young modulus, GPa");
  cor->add_option("--Ei", Ei, "inclusion Young modulus, GPa");
  cor->add_option("--nu", nu, "Poisson ratio of both phases");
  cor->add_option("--tol", cg_tol, "CG relative tolerance");
  cor->add_option("--out", chi_out, "corrector output file")->required();

  // homog
  std::string chi_in, homog_out = "homog.json";
  double opt_l0 = 0.0, opt_l1 = 0.0;
  auto* hom = app.add_subcommand("homog", "assemble homogenized tensors");
  hom->add_option("--chi", chi_in, "corrector file from 'correctors'")
      ->required();
  hom->add_option("--l0", opt_l0, "correlation length metadata");
  hom->add_option("--l1", opt_l1, "repulsion distance metadata");
  hom->add_option("--out", homog_out, "output JSON")->required();

  // energy
  std::string homog_in, energy_out = "energy.json";
  std::vector<double> E0 = {1, 0, 0, 0, 0, 0}, E1 = {0, 0, 0, 0, 0, 0};
  bool include_D = false;
  auto* ene = app.add_subcommand("energy", "two-term energy report");
  ene->add_option("--homog", homog_in, "homogenized tensor JSON")->required();
  ene->add_option("--E0", E0, "macroscopic strain, 6 components")->expected(6);
  ene->add_option("--E1", E1, "strain correction, 6 components")->expected(6);
  ene->add_flag("--include-D", include_D, "include the chi1 coupling term");
  ene->add_option("--out", energy_out, "output JSON")->required();

  // pipeline
  std::string config_path, pipe_out_dir;
  int workers = 0;
  bool force = false;
  auto* pipe = app.add_subcommand("pipeline", "end-to-end study");
  pipe->add_option("--config", config_path, "study config JSON")->required();
  pipe->add_option("--out-dir", pipe_out_dir, "output directory override");
  pipe->add_option("--workers", workers, "worker pool size override");
  pipe->add_flag("--force", force, "allow grids above the desk-scale cap");

  // spindle
  std::vector<std::string> record_paths;
  std::string spindle_out = "spindle.csv";
  auto* spin = app.add_subcommand("spindle", "energy-vs-bounds CSV");
  spin->add_option("--records", record_paths, "study record JSON files")
      ->required();
  spin->add_option("--out", spindle_out, "CSV output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_genmicro(vf, dims, seed, count, big_radius, out_dir);
    if (cov->parsed())
      return cmd_covario(cov_in, h_max, tol, csv_path, truncated);
    if (cor->parsed())
      return cmd_correctors(grid_path, Em, Ei, nu, cg_tol, chi_out);
    if (hom->parsed()) return cmd_homog(chi_in, homog_out, opt_l0, opt_l1);
    if (ene->parsed())
      return cmd_energy(homog_in, E0, E1, include_D, energy_out);
    if (pipe->parsed())
      return cmd_pipeline(config_path, pipe_out_dir, workers, force);
    if (spin->parsed()) return cmd_spindle(record_paths, spindle_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
