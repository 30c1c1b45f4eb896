#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "sfi/analysis.hpp"
#include "sfi/cache.hpp"
#include "sfi/config.hpp"
#include "sfi/io.hpp"
#include "sfi/laser.hpp"
#include "sfi/propagator.hpp"
#include "sfi/sweep.hpp"
#include "sfi/version.hpp"
#include "sfi/vibronic.hpp"

// Exit codes: 0 clean, 1 bad usage or configuration, 2 hard runtime
// failure, 3 finished but with failed points or warnings.

namespace {

namespace fs = std::filesystem;
using namespace sfi;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kRuntime = 2;
constexpr int kWarnings = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;  // 0: take from config, else 1
  bool resume = false;
  long max_points = -1;
};

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

fs::path resolve_cache_root(const config::Config& cfg) {
  if (const char* env = std::getenv("SFI_CACHE_ROOT"); env && *env) return env;
  return cfg.get("run", "cache_root", "sfi_cache");
}

int resolve_workers(const CommonArgs& args, const config::Config& cfg) {
  if (args.workers > 0) return args.workers;
  return cfg.get_int("run", "workers", 1);
}

analysis::ShiftModel parse_shift(const std::string& text) {
  if (text == "ponderomotive") return analysis::ShiftModel::ponderomotive();
  if (text.rfind("affine:", 0) == 0) {
    const auto rest = text.substr(7);
    const auto colon = rest.find(':');
    if (colon != std::string::npos)
      return analysis::ShiftModel::affine(io::parse_double(rest.substr(0, colon)),
                                          io::parse_double(rest.substr(colon + 1)));
  }
  throw std::runtime_error("shift must be 'ponderomotive' or 'affine:<slope>:<offset>'");
}

int cmd_basis(const CommonArgs& args) {
  const auto cfg = config::load_config(args.config_path);
  const auto settings = sweep::parse_settings(cfg);
  const auto root = resolve_cache_root(cfg);
  const long solves = sweep::warm_cache(settings, root);
  std::cout << "cache " << root.string() << ": " << solves << " eigensolves performed\n";
  return kOk;
}

int cmd_sweep(const CommonArgs& args) {
  const auto cfg = config::load_config(args.config_path);
  const auto settings = sweep::parse_settings(cfg);
  const auto plan = sweep::plan_points(settings);
  const std::string hash = hex16(cfg.hash());

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  const fs::path manifest_path = out / "manifest.json";
  const fs::path csv_path = out / "yields.csv";

  sweep::Manifest manifest;
  if (fs::exists(manifest_path)) {
    if (!args.resume) {
      std::cerr << manifest_path.string()
                << " exists; pass --resume to continue or remove it first\n";
      return kUsage;
    }
    manifest = sweep::Manifest::load(manifest_path);
    if (manifest.config_hash != hash) {
      std::cerr << "manifest was written by a different configuration (hash "
                << manifest.config_hash << ", config is " << hash << ")\n";
      return kUsage;
    }
  } else {
    manifest.config_hash = hash;
    manifest.version = kVersion;
  }

  sweep::RunOptions opt;
  opt.workers = resolve_workers(args, cfg);
  opt.max_new_points = args.max_points;
  opt.manifest_path = manifest_path;

  const auto runner = sweep::make_runner(settings, resolve_cache_root(cfg));
  const auto sum = sweep::run_sweep(plan, runner, manifest, opt);
  manifest.save(manifest_path);
  io::atomic_write(csv_path, sweep::render_csv(plan, manifest));

  std::cout << "points: " << plan.size() << " planned, " << sum.computed << " computed, "
            << sum.skipped << " already done, " << sum.failed << " failed\n";
  if (!sum.complete) std::cout << "sweep incomplete; rerun with --resume to finish\n";
  for (const auto& [key, reason] : manifest.failures)
    std::cerr << "failed: " << key << ": " << reason << "\n";
  return manifest.failures.empty() ? kOk : kWarnings;
}

struct YieldFile {
  // (orientation, intensity, n_cycles) -> sorted (R, yield) samples
  std::map<std::tuple<int, double, int>, std::vector<std::pair<double, double>>> groups;
  std::set<double> all_r;
  long failed_rows = 0;
};

YieldFile read_yield_csv(const fs::path& path) {
  const auto text = io::read_file(path);
  YieldFile out;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (header) {
      if (line != sweep::kYieldHeader)
        throw std::runtime_error(path.string() + ": unexpected header '" + line + "'");
      header = false;
      continue;
    }
    const auto rec = sweep::parse_record_row(line);
    if (rec.failed) {
      ++out.failed_rows;
      continue;
    }
    const auto key = std::make_tuple(static_cast<int>(rec.point.orientation),
                                     rec.point.intensity, rec.point.n_cycles);
    out.groups[key].emplace_back(rec.point.R, rec.yield);
    out.all_r.insert(rec.point.R);
  }
  if (header) throw std::runtime_error(path.string() + ": empty file");
  for (auto& [key, samples] : out.groups) std::sort(samples.begin(), samples.end());
  return out;
}

int cmd_vibav(const CommonArgs& args, const std::string& yields_path) {
  const auto cfg = config::load_config(args.config_path);
  const fs::path potential = cfg.get("vibav", "potential");
  const std::string isotope = cfg.get("vibav", "isotope", "H2");
  double mass = 0.0;
  if (cfg.has("vibav", "reduced_mass")) {
    mass = cfg.get_double("vibav", "reduced_mass");
  } else if (isotope == "H2") {
    mass = vibronic::kReducedMassH2;
  } else if (isotope == "D2") {
    mass = vibronic::kReducedMassD2;
  } else {
    throw std::runtime_error("config: isotope must be H2 or D2 (or set reduced_mass)");
  }

  const auto table = io::read_table(potential);
  vibronic::PotentialCurve curve;
  for (const auto& [r, v] : table) {
    curve.R.push_back(r);
    curve.V.push_back(v);
  }
  const auto state = vibronic::solve_vibrational(
      curve, mass, 0, cfg.get_double("vibav", "r_min", 0.4),
      cfg.get_double("vibav", "r_max", 6.0), cfg.get_double("vibav", "step", 0.005));

  const auto yields = read_yield_csv(yields_path);
  bool warned = yields.failed_rows > 0;
  if (yields.failed_rows > 0)
    std::cerr << "warning: " << yields.failed_rows << " failed rows skipped\n";

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  std::string csv = "orientation,intensity_Wcm2,n_cycles,isotope,yield\n";
  for (const auto& [key, samples] : yields.groups) {
    const auto& [orient, intensity, n_cycles] = key;
    const auto tag =
        sweep::orientation_tag(static_cast<laser::Orientation>(orient));
    if (samples.size() != yields.all_r.size()) {
      std::cerr << "warning: " << tag << " I=" << io::format_double(intensity) << " N="
                << n_cycles << " is missing " << yields.all_r.size() - samples.size()
                << " R rows\n";
      warned = true;
    }
    if (samples.size() < 4) {
      std::cerr << "warning: too few R samples, group skipped\n";
      warned = true;
      continue;
    }
    const auto wy = vibronic::weight_yield(samples, state);
    if (wy.coverage_warning) {
      std::cerr << "warning: " << io::format_double(100.0 * wy.excluded_mass)
                << "% of the nuclear density lies outside the sampled R range\n";
      warned = true;
    }
    if (wy.depletion_warning) {
      std::cerr << "warning: yields above 0.2; depletion of the initial state "
                   "makes the weighting approximate\n";
      warned = true;
    }
    const double y = vibronic::integrate_yield(wy);
    csv += std::string(tag) + "," + io::format_double(intensity) + "," +
           std::to_string(n_cycles) + "," + isotope + "," + io::format_double(y) + "\n";

    std::string wcsv = "R_bohr,weighted_yield\n";
    for (Eigen::Index i = 0; i < wy.R.size(); ++i)
      wcsv += io::format_double(wy.R[i]) + "," + io::format_double(wy.values[i]) + "\n";
    io::atomic_write(out / ("weighted_" + std::string(tag) + "_I" +
                            io::format_double(intensity) + "_N" +
                            std::to_string(n_cycles) + ".csv"),
                     wcsv);
  }
  io::atomic_write(out / "vibav.csv", csv);
  return warned ? kWarnings : kOk;
}

struct FitRow {
  double intensity = 0.0;
  int n_cycles = 0;
  double yield = 0.0;
};

//! Accepts either the sweep CSV (then all rows must share one R) or the
//! vibav CSV.
std::vector<FitRow> read_fit_rows(const fs::path& path) {
  const auto text = io::read_file(path);
  std::vector<FitRow> rows;
  std::size_t pos = 0;
  int format = 0;  // 1 sweep, 2 vibav
  std::set<double> r_seen;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    if (format == 0) {
      if (line == sweep::kYieldHeader) {
        format = 1;
      } else if (line == "orientation,intensity_Wcm2,n_cycles,isotope,yield") {
        format = 2;
      } else {
        throw std::runtime_error(path.string() + ": unrecognized header");
      }
      continue;
    }
    const auto f = io::split_csv(line);
    FitRow row;
    if (format == 1) {
      const auto rec = sweep::parse_record_row(line);
      if (rec.failed) continue;
      r_seen.insert(rec.point.R);
      row = {rec.point.intensity, rec.point.n_cycles, rec.yield};
    } else {
      row = {io::parse_double(f.at(1)),
             static_cast<int>(std::lround(io::parse_double(f.at(2)))),
             io::parse_double(f.at(4))};
    }
    rows.push_back(row);
  }
  if (r_seen.size() > 1)
    throw std::runtime_error(path.string() +
                             ": several R values; integrate over R first (vibav) or "
                             "filter to a single R");
  return rows;
}

int cmd_analyze(const CommonArgs& args, const std::string& yields_path,
                const std::string& perpendicular_path) {
  const auto cfg = config::load_config(args.config_path);
  const double wavelength = cfg.get_double("laser", "wavelength");
  const fs::path out(args.out_dir);
  fs::create_directories(out);
  bool warned = false;

  const auto rows = read_fit_rows(yields_path);
  if (rows.empty()) throw std::runtime_error("no usable rows in " + yields_path);

  // Fit Y = Omega T (I/I0)^k with T the intensity-FWHM of the pulse.
  std::string report;
  analysis::FitResult fit;
  bool have_fit = false;
  {
    std::vector<std::array<double, 3>> records;
    for (const auto& row : rows) {
      if (!(row.yield > 0.0)) continue;
      const auto pulse = laser::make_pulse(wavelength, row.intensity, row.n_cycles);
      records.push_back({row.intensity, pulse.fwhm_intensity(), row.yield});
    }
    try {
      fit = analysis::fit_power_law(records);
      have_fit = true;
      report = "power-law fit  Y = Omega * T_fwhm * (I / I0)^k\n";
      report += "records        " + std::to_string(records.size()) + "\n";
      report += "Omega          " + io::format_double(fit.omega_rate) + "  (1/a.u.)\n";
      report += "k              " + io::format_double(fit.exponent) + "\n";
      report += "log-residual   " + io::format_double(fit.residual_norm) + "\n";
    } catch (const std::exception& e) {
      report = std::string("fit failed: ") + e.what() + "\n";
      warned = true;
    }
  }
  io::atomic_write(out / "fit_report.txt", report);

  if (have_fit) {
    std::string scaled = "intensity_Wcm2,n_cycles,yield,fit,yield_over_fit\n";
    for (const auto& row : rows) {
      const auto pulse = laser::make_pulse(wavelength, row.intensity, row.n_cycles);
      const double f =
          analysis::power_law_yield(fit, row.intensity, pulse.fwhm_intensity());
      scaled += io::format_double(row.intensity) + "," + std::to_string(row.n_cycles) +
                "," + io::format_double(row.yield) + "," + io::format_double(f) + "," +
                io::format_double(row.yield / f) + "\n";
    }
    io::atomic_write(out / "scaled.csv", scaled);
  }

  if (!perpendicular_path.empty()) {
    const auto perp = read_fit_rows(perpendicular_path);
    if (perp.size() != rows.size())
      throw std::runtime_error("parallel and perpendicular files differ in size");
    std::vector<std::pair<double, double>> a, b;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      a.emplace_back(rows[i].intensity, rows[i].yield);
      b.emplace_back(perp[i].intensity, perp[i].yield);
    }
    const auto ratio = analysis::orientation_ratio(a, b);
    std::string csv = "intensity_Wcm2,ratio,valid\n";
    for (const auto& pt : ratio)
      csv += io::format_double(pt.intensity) + "," + io::format_double(pt.ratio) + "," +
             (pt.valid ? "1" : "0") + "\n";
    io::atomic_write(out / "ratio.csv", csv);
  }
  return warned ? kWarnings : kOk;
}

int cmd_predict(const CommonArgs& args) {
  const auto cfg = config::load_config(args.config_path);
  const std::string mode = cfg.get("predict", "mode");
  const fs::path out(args.out_dir);
  fs::create_directories(out);

  if (mode == "thresholds") {
    const auto table = io::read_table(cfg.get("predict", "ip_table"));
    const auto pulse = laser::make_pulse(cfg.get_double("laser", "wavelength"), 1e12, 10);
    const double omega = pulse.omega();
    double ip_min = table.front().second;
    for (const auto& [r, ip] : table) ip_min = std::min(ip_min, ip);
    const int n_lo = cfg.get_int("predict", "n_min",
                                 analysis::min_photons(ip_min, omega));
    const int n_hi = cfg.get_int("predict", "n_max", n_lo + 3);
    const auto curves = analysis::channel_thresholds(table, omega, n_lo, n_hi);
    std::string csv = "state,n_photons,R_bohr,intensity_Wcm2\n";
    for (const auto& c : curves)
      for (std::size_t i = 0; i < c.R.size(); ++i)
        csv += "threshold," + std::to_string(c.n_photons) + "," +
               io::format_double(c.R[i]) + "," + io::format_double(c.intensity[i]) + "\n";
    io::atomic_write(out / "predictions.csv", csv);
    return kOk;
  }

  const auto shift = parse_shift(cfg.get("predict", "shift", "ponderomotive"));
  const int n_photons = cfg.get_int("predict", "n_photons");
  const std::string label = cfg.get("predict", "label", "state");

  if (mode == "rempi_r") {
    const auto pulse = laser::make_pulse(cfg.get_double("laser", "wavelength"), 1e12, 10);
    std::vector<std::pair<double, double>> excitation;
    if (cfg.has("predict", "excitation_table")) {
      excitation = io::read_table(cfg.get("predict", "excitation_table"));
    } else {
      // Derive dE(R) from the two-centre eigenvalues along the sweep grid.
      const auto settings = sweep::parse_settings(cfg);
      if (settings.system != "two_center")
        throw std::runtime_error("excitation generation needs system = two_center");
      const auto root = resolve_cache_root(cfg);
      const int want_lambda = cfg.get_int("predict", "excitation_lambda", 0);
      const auto want_parity = cfg.get("predict", "excitation_parity", "u");
      const int want_state = cfg.get_int("predict", "excitation_state", 0);
      const auto orientation = want_lambda == 0 ? laser::Orientation::parallel
                                                : laser::Orientation::perpendicular;
      for (const double R : settings.r_values) {
        const auto basis = sweep::assemble_basis(settings, R, orientation, root);
        const double e0 = basis.energies[basis.ground_state()];
        for (const auto& blk : basis.blocks) {
          const bool parity_ok = (blk.label.parity > 0) == (want_parity == "g");
          if (blk.label.sym != want_lambda || !parity_ok) continue;
          if (want_state >= blk.count)
            throw std::runtime_error("excitation_state beyond the block");
          excitation.emplace_back(R, basis.energies[blk.offset + want_state] - e0);
          break;
        }
      }
      if (excitation.empty()) throw std::runtime_error("requested block not present");
    }
    const auto pred = analysis::rempi_locus_vs_r(excitation, n_photons, pulse.omega(),
                                                 shift, label);
    std::string csv = "state,n_photons,R_bohr,intensity_Wcm2\n";
    for (const auto& [R, intensity] : pred.locus)
      csv += pred.label + "," + std::to_string(pred.n_photons) + "," +
             io::format_double(R) + "," + io::format_double(intensity) + "\n";
    io::atomic_write(out / "predictions.csv", csv);
    return kOk;
  }

  if (mode == "rempi_wavelength") {
    double delta_e;
    if (cfg.has("predict", "delta_e")) {
      delta_e = cfg.get_double("predict", "delta_e");
    } else {
      // Pin dE to an observed resonance at a known wavelength and
      // (low) intensity, removing the shift it already contains.
      const double lam = cfg.get_double("predict", "calibrate_wavelength");
      const double cal_i = cfg.get_double("predict", "calibrate_intensity");
      const auto cal = laser::make_pulse(lam, cal_i, 10);
      delta_e = n_photons * cal.omega() - shift(cal_i, cal.omega());
    }
    const auto intensities = cfg.get_grid("predict", "intensity");
    const auto pred = analysis::rempi_locus_vs_wavelength(delta_e, n_photons,
                                                          intensities, shift, label);
    std::string csv = "state,n_photons,wavelength_nm,intensity_Wcm2\n";
    for (const auto& [lambda_nm, intensity] : pred.locus)
      csv += pred.label + "," + std::to_string(pred.n_photons) + "," +
             io::format_double(lambda_nm) + "," + io::format_double(intensity) + "\n";
    io::atomic_write(out / "predictions.csv", csv);
    return kOk;
  }

  throw std::runtime_error(
      "predict mode must be thresholds, rempi_r or rempi_wavelength");
}

int cmd_spectrum(const CommonArgs& args) {
  const auto cfg = config::load_config(args.config_path);
  const auto settings = sweep::parse_settings(cfg);
  const auto root = resolve_cache_root(cfg);

  const double R = cfg.get_double("spectrum", "R", settings.r_values.front());
  const double intensity =
      cfg.get_double("spectrum", "intensity", settings.intensities.front());
  const int n_cycles = cfg.get_int("spectrum", "n_cycles", settings.n_cycles.front());
  const auto orientation = sweep::parse_orientation(
      cfg.get("spectrum", "orientation",
              sweep::orientation_tag(settings.orientations.front())));
  const double bin_width = cfg.get_double("spectrum", "bin_width", 0.002);

  const auto basis = sweep::assemble_basis(settings, R, orientation, root);
  const double angle =
      orientation == laser::Orientation::perpendicular ? std::numbers::pi / 2 : 0.0;
  const auto pulse = laser::make_pulse(settings.wavelength_nm, intensity, n_cycles,
                                       angle, settings.carrier_phase);
  const auto prop =
      propagator::propagate(basis, pulse, -1, settings.rel_tol, settings.abs_tol);
  const auto spec = propagator::photoelectron_spectrum(prop.final, basis, bin_width);
  const auto yd = propagator::ionization_yield(prop.final, basis);

  std::string csv = "energy_hartree,density_per_hartree\n";
  for (Eigen::Index i = 0; i < spec.energy.size(); ++i)
    csv += io::format_double(spec.energy[i]) + "," + io::format_double(spec.density[i]) +
           "\n";
  const fs::path out(args.out_dir);
  fs::create_directories(out);
  io::atomic_write(out / "spectrum.csv", csv);
  std::cout << "yield " << io::format_double(yd.yield) << ", norm defect "
            << io::format_double(prop.norm_defect) << ", " << spec.energy.size()
            << " bins\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strong-field ionization toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonArgs args;
  std::string yields_path, perpendicular_path;

  const auto add_common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", args.config_path, "configuration file")->required();
    if (needs_out) sub->add_option("--out", args.out_dir, "output directory");
    return sub;
  };

  auto* basis = add_common(app.add_subcommand("basis", "solve and cache eigenbases"),
                           false);
  auto* sweep_cmd =
      add_common(app.add_subcommand("sweep", "run the yield sweep"), true);
  sweep_cmd->add_option("--workers", args.workers, "worker threads");
  sweep_cmd->add_flag("--resume", args.resume, "continue from an existing manifest");
  sweep_cmd->add_option("--max-points", args.max_points,
                        "stop after this many new points (testing aid)");
  auto* vibav =
      add_common(app.add_subcommand("vibav", "average yields over the nuclear density"),
                 true);
  vibav->add_option("--yields", yields_path, "sweep CSV to integrate")->required();
  auto* analyze = add_common(
      app.add_subcommand("analyze", "power-law fit, ratios, scaled yields"), true);
  analyze->add_option("--yields", yields_path, "yield CSV (parallel)")->required();
  analyze->add_option("--perpendicular", perpendicular_path,
                      "matching perpendicular CSV for the ratio");
  auto* predict = add_common(
      app.add_subcommand("predict", "REMPI loci and channel-closing thresholds"), true);
  auto* spectrum = add_common(
      app.add_subcommand("spectrum", "photoelectron spectrum of one grid point"), true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (basis->parsed()) return cmd_basis(args);
    if (sweep_cmd->parsed()) return cmd_sweep(args);
    if (vibav->parsed()) return cmd_vibav(args, yields_path);
    if (analyze->parsed()) return cmd_analyze(args, yields_path, perpendicular_path);
    if (predict->parsed()) return cmd_predict(args);
    if (spectrum->parsed()) return cmd_spectrum(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    const std::string what = e.what();
    const bool config_trouble = what.rfind("config", 0) == 0 ||
                                what.find("cannot open") != std::string::npos;
    return config_trouble ? kUsage : kRuntime;
  }
  return kUsage;
}
