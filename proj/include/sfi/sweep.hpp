#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sfi/config.hpp"
#include "sfi/laser.hpp"
#include "sfi/propagator.hpp"

//! Yield sweeps over (R, orientation, intensity, n_cycles) grids:
//! planning, a manifest that makes runs resumable and byte-deterministic,
//! a worker pool, and the runner that turns one grid point into a yield.
//! Eigenbases are cached on disk per symmetry block and shared in memory
//! between points at the same R.

namespace sfi::sweep {

struct SweepPoint {
  double R = 0.0;
  laser::Orientation orientation = laser::Orientation::parallel;
  double intensity = 0.0;  // W/cm^2
  int n_cycles = 0;
};

struct YieldRecord {
  SweepPoint point;
  double yield = 0.0;
  double norm_defect = 0.0;
  bool failed = false;
  std::string reason;
};

const char* orientation_tag(laser::Orientation o);
laser::Orientation parse_orientation(const std::string& tag);

inline constexpr const char* kYieldHeader =
    "R_bohr,orientation,intensity_Wcm2,n_cycles,yield,norm_defect";

//! Manifest key; doubles formatted shortest-round-trip so the key is
//! stable across runs.
std::string point_key(const SweepPoint& pt);

//! One CSV line (no newline). Failed points carry the literal word
//! `failed` in the yield and norm_defect columns.
std::string record_row(const YieldRecord& rec);
YieldRecord parse_record_row(const std::string& line);

//! Everything a sweep needs, parsed out of a config file. Defaults are
//! desk-scale; the shipped paper_scale.cfg selects the large basis.
struct Settings {
  std::string system;  // "model_atom" or "two_center"
  std::vector<double> r_values;
  std::vector<double> intensities;
  std::vector<laser::Orientation> orientations;
  std::vector<int> n_cycles;
  double wavelength_nm = 400.0;
  double carrier_phase = 0.0;

  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double cutoff = 10.0;  // hartree above the continuum edge

  // model_atom: potential calibrated per R from this Ip table
  std::filesystem::path ip_table;
  double atom_box = 200.0;
  int atom_splines = 300;
  int atom_order = 8;
  int atom_geometric = 40;
  double atom_progression = 1.06;
  int ell_max = 12;

  // two_center, desk-scale defaults; large-scale values go through [basis]
  double box = 150.0;
  int xi_splines = 120;
  int xi_order = 10;
  int eta_splines = 20;
  int eta_order = 8;
  int xi_geometric = 40;
  double xi_progression = 1.05;
  int lambda_max = 3;
  int eta_node_limit = 19;
};

Settings parse_settings(const config::Config& cfg);

//! All grid points, sorted by (R, orientation, intensity, n_cycles),
//! exact duplicates removed.
std::vector<SweepPoint> plan_points(const Settings& s);

//! Completed-point ledger persisted as JSON next to the output CSV.
struct Manifest {
  std::string config_hash;
  std::string version;
  std::map<std::string, std::string> rows;      // point key -> CSV row
  std::map<std::string, std::string> failures;  // point key -> reason

  static Manifest load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

using PointRunner = std::function<YieldRecord(const SweepPoint&)>;

struct RunOptions {
  int workers = 1;
  //! Stop after this many newly computed points (< 0: no limit). The
  //! manifest is saved after every point either way, so this is just a
  //! clean way to exercise interruption.
  long max_new_points = -1;
  std::filesystem::path manifest_path;
};

struct RunSummary {
  long computed = 0;
  long skipped = 0;  // already in the manifest
  long failed = 0;
  bool complete = false;
};

//! Run every planned point not yet in the manifest through the runner.
//! Exceptions escaping the runner are recorded as failed points.
RunSummary run_sweep(const std::vector<SweepPoint>& plan, const PointRunner& runner,
                     Manifest& manifest, const RunOptions& opt);

//! Header plus one row per planned point present in the manifest, in
//! plan order; content depends only on the manifest rows.
std::string render_csv(const std::vector<SweepPoint>& plan, const Manifest& manifest);

//! Field-free basis for one R and orientation, through the disk cache.
//! Newly solved blocks are written back; *solves counts eigensolves.
propagator::FieldFreeBasis assemble_basis(const Settings& s, double R,
                                          laser::Orientation orientation,
                                          const std::filesystem::path& cache_root,
                                          long* solves = nullptr);

//! Solve and cache every block the sweep will need; returns the number
//! of eigensolves performed (zero on a warm cache).
long warm_cache(const Settings& s, const std::filesystem::path& cache_root);

//! The real physics runner: cached bases, pulse from the settings,
//! propagation, yield extraction. Thread-safe; bases are shared through
//! a small in-memory pool keyed by (R, orientation).
PointRunner make_runner(const Settings& s, const std::filesystem::path& cache_root);

}  // namespace sfi::sweep
