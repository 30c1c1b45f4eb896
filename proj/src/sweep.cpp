#include "sfi/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <set>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sfi/cache.hpp"
#include "sfi/io.hpp"
#include "sfi/version.hpp"
#include "sfi/vibronic.hpp"

namespace sfi::sweep {

namespace fs = std::filesystem;

const char* orientation_tag(laser::Orientation o) {
  return o == laser::Orientation::parallel ? "parallel" : "perpendicular";
}

laser::Orientation parse_orientation(const std::string& tag) {
  if (tag == "parallel") return laser::Orientation::parallel;
  if (tag == "perpendicular") return laser::Orientation::perpendicular;
  throw std::runtime_error("unknown orientation: '" + tag + "'");
}

std::string point_key(const SweepPoint& pt) {
  return io::format_double(pt.R) + "|" + orientation_tag(pt.orientation) + "|" +
         io::format_double(pt.intensity) + "|" + std::to_string(pt.n_cycles);
}

std::string record_row(const YieldRecord& rec) {
  std::string row = io::format_double(rec.point.R);
  row += ",";
  row += orientation_tag(rec.point.orientation);
  row += ",";
  row += io::format_double(rec.point.intensity);
  row += ",";
  row += std::to_string(rec.point.n_cycles);
  if (rec.failed) {
    row += ",failed,failed";
  } else {
    row += "," + io::format_double(rec.yield) + "," + io::format_double(rec.norm_defect);
  }
  return row;
}

YieldRecord parse_record_row(const std::string& line) {
  const auto fields = io::split_csv(line);
  if (fields.size() != 6)
    throw std::runtime_error("yield row: expected 6 columns, got " +
                             std::to_string(fields.size()));
  YieldRecord rec;
  rec.point.R = io::parse_double(fields[0]);
  rec.point.orientation = parse_orientation(fields[1]);
  rec.point.intensity = io::parse_double(fields[2]);
  rec.point.n_cycles = static_cast<int>(std::lround(io::parse_double(fields[3])));
  if (fields[4] == "failed") {
    rec.failed = true;
  } else {
    rec.yield = io::parse_double(fields[4]);
    rec.norm_defect = io::parse_double(fields[5]);
  }
  return rec;
}

Settings parse_settings(const config::Config& cfg) {
  Settings s;
  s.system = cfg.get("sweep", "system");
  if (s.system != "model_atom" && s.system != "two_center")
    throw std::runtime_error("config: system must be model_atom or two_center");

  s.r_values = cfg.get_grid("sweep", "R");
  s.intensities = cfg.get_grid("sweep", "intensity");
  for (const auto& tag : cfg.get_list("sweep", "orientation"))
    s.orientations.push_back(parse_orientation(tag));
  if (s.orientations.empty()) throw std::runtime_error("config: no orientations");
  for (const double v : cfg.get_grid("sweep", "n_cycles")) {
    const int n = static_cast<int>(std::lround(v));
    if (std::abs(v - n) > 1e-9 || n < 2)
      throw std::runtime_error("config: n_cycles must be integers >= 2");
    s.n_cycles.push_back(n);
  }

  s.wavelength_nm = cfg.get_double("laser", "wavelength");
  s.carrier_phase = cfg.get_double("laser", "cep", 0.0);
  if (!(s.wavelength_nm > 0)) throw std::runtime_error("config: wavelength must be positive");

  s.rel_tol = cfg.get_double("propagation", "rel_tol", s.rel_tol);
  s.abs_tol = cfg.get_double("propagation", "abs_tol", s.abs_tol);
  s.cutoff = cfg.get_double("propagation", "cutoff", s.cutoff);
  if (!(s.cutoff > 0)) throw std::runtime_error("config: cutoff must be positive");

  if (s.system == "model_atom") {
    s.ip_table = cfg.get("basis", "ip_table");
    s.atom_box = cfg.get_double("basis", "box", s.atom_box);
    s.atom_splines = cfg.get_int("basis", "splines", s.atom_splines);
    s.atom_order = cfg.get_int("basis", "order", s.atom_order);
    s.atom_geometric = cfg.get_int("basis", "geometric", s.atom_geometric);
    s.atom_progression = cfg.get_double("basis", "progression", s.atom_progression);
    s.ell_max = cfg.get_int("basis", "ell_max", s.ell_max);
    if (s.ell_max < 1) throw std::runtime_error("config: ell_max must be >= 1");
  } else {
    s.box = cfg.get_double("basis", "box", s.box);
    s.xi_splines = cfg.get_int("basis", "xi_splines", s.xi_splines);
    s.xi_order = cfg.get_int("basis", "xi_order", s.xi_order);
    s.eta_splines = cfg.get_int("basis", "eta_splines", s.eta_splines);
    s.eta_order = cfg.get_int("basis", "eta_order", s.eta_order);
    s.xi_geometric = cfg.get_int("basis", "xi_geometric", s.xi_geometric);
    s.xi_progression = cfg.get_double("basis", "xi_progression", s.xi_progression);
    s.lambda_max = cfg.get_int("basis", "lambda_max", s.lambda_max);
    s.eta_node_limit = cfg.get_int("basis", "eta_node_limit", s.eta_node_limit);
    for (const double R : s.r_values)
      if (!(R > 0) || !(s.box > R))
        throw std::runtime_error("config: need 0 < R < box for two_center");
    const bool perp = std::count(s.orientations.begin(), s.orientations.end(),
                                 laser::Orientation::perpendicular) > 0;
    if (perp && s.lambda_max < 1)
      throw std::runtime_error("config: perpendicular runs need lambda_max >= 1");
  }
  return s;
}

std::vector<SweepPoint> plan_points(const Settings& s) {
  auto r = s.r_values;
  auto in = s.intensities;
  auto nc = s.n_cycles;
  auto ori = s.orientations;
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  std::sort(in.begin(), in.end());
  in.erase(std::unique(in.begin(), in.end()), in.end());
  std::sort(nc.begin(), nc.end());
  nc.erase(std::unique(nc.begin(), nc.end()), nc.end());
  std::sort(ori.begin(), ori.end());
  ori.erase(std::unique(ori.begin(), ori.end()), ori.end());

  std::vector<SweepPoint> plan;
  plan.reserve(r.size() * ori.size() * in.size() * nc.size());
  for (const double R : r)
    for (const auto o : ori)
      for (const double intensity : in)
        for (const int n : nc) plan.push_back({R, o, intensity, n});
  return plan;
}

Manifest Manifest::load(const fs::path& path) {
  const auto j = nlohmann::json::parse(io::read_file(path));
  Manifest m;
  m.config_hash = j.at("config_hash").get<std::string>();
  m.version = j.value("version", "");
  for (const auto& [k, v] : j.at("rows").items()) m.rows[k] = v.get<std::string>();
  if (j.contains("failures"))
    for (const auto& [k, v] : j.at("failures").items())
      m.failures[k] = v.get<std::string>();
  return m;
}

void Manifest::save(const fs::path& path) const {
  nlohmann::json j;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["rows"] = rows;
  j["failures"] = failures;
  io::atomic_write(path, j.dump(2) + "\n");
}

RunSummary run_sweep(const std::vector<SweepPoint>& plan, const PointRunner& runner,
                     Manifest& manifest, const RunOptions& opt) {
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  long started_new = 0;
  RunSummary sum;

  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.size()) return;
      const auto& pt = plan[i];
      const std::string key = point_key(pt);
      {
        std::lock_guard lock(mu);
        if (manifest.rows.count(key)) {
          ++sum.skipped;
          continue;
        }
        if (opt.max_new_points >= 0 && started_new >= opt.max_new_points) return;
        ++started_new;
      }
      YieldRecord rec;
      try {
        rec = runner(pt);
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.reason = e.what();
      } catch (...) {
        rec.failed = true;
        rec.reason = "unknown error";
      }
      rec.point = pt;
      {
        std::lock_guard lock(mu);
        manifest.rows[key] = record_row(rec);
        if (rec.failed) {
          manifest.failures[key] = rec.reason.empty() ? "failed" : rec.reason;
          ++sum.failed;
        }
        ++sum.computed;
        if (!opt.manifest_path.empty()) manifest.save(opt.manifest_path);
      }
    }
  };

  std::vector<std::thread> pool;
  const int n_workers = std::max(1, opt.workers);
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  sum.complete = std::all_of(plan.begin(), plan.end(), [&](const SweepPoint& pt) {
    return manifest.rows.count(point_key(pt)) > 0;
  });
  return sum;
}

std::string render_csv(const std::vector<SweepPoint>& plan, const Manifest& manifest) {
  std::string out = kYieldHeader;
  out += "\n";
  for (const auto& pt : plan) {
    const auto it = manifest.rows.find(point_key(pt));
    if (it != manifest.rows.end()) {
      out += it->second;
      out += "\n";
    }
  }
  return out;
}

namespace {

//! Directory holding blocks truncated for one state-selection policy;
//! changing the cutoff or node limit must never reuse old files.
fs::path selection_dir(const Settings& s, const fs::path& root) {
  if (s.system == "model_atom")
    return root / ("atom_cut" + io::format_double(s.cutoff));
  return root / ("mol_cut" + io::format_double(s.cutoff) + "_nodes" +
                 std::to_string(s.eta_node_limit));
}

//! alpha(ip) with the built-in calibration basis is pure root finding,
//! but each evaluation costs dozens of eigensolves, so the result is
//! memoized on disk next to the basis blocks.
double cached_alpha(double ip, const fs::path& root) {
  const auto file =
      root / ("alpha_ip" + io::format_double(ip) + "_calib1.txt");
  if (fs::exists(file)) {
    try {
      return io::parse_double(io::read_file(file));
    } catch (const std::exception&) {
      // unreadable; fall through and recompute
    }
  }
  const double alpha = model_atom::alpha_from_ip(ip);
  io::atomic_write(file, io::format_double(alpha) + "\n");
  return alpha;
}

vibronic::CubicSpline load_ip_spline(const Settings& s) {
  const auto table = io::read_table(s.ip_table);
  if (table.size() < 2)
    throw std::runtime_error("ip table too short: " + s.ip_table.string());
  std::vector<double> r, ip;
  for (const auto& [a, b] : table) {
    r.push_back(a);
    ip.push_back(b);
  }
  for (const double R : s.r_values)
    if (R < r.front() - 1e-12 || R > r.back() + 1e-12)
      throw std::runtime_error("ip table does not cover R = " + io::format_double(R));
  return vibronic::build_spline(r, ip);
}

model_atom::RadialEigenbasis load_or_solve_atom(double alpha, int ell,
                                                const bspline::BSplineBasis& basis,
                                                const fs::path& dir, double cutoff,
                                                long* solves) {
  const auto path = cache::atom_block_path(dir, alpha, ell, basis);
  if (fs::exists(path)) {
    try {
      double stored_alpha = 0.0;
      auto block = cache::read_atom_block(path, stored_alpha);
      if (stored_alpha == alpha && block.ell == ell &&
          block.basis.size() == basis.size())
        return block;
    } catch (const cache::CacheError&) {
      // corrupt or stale; rebuild below
    }
  }
  auto block = model_atom::solve_radial({alpha}, ell, basis);
  if (solves) ++*solves;
  Eigen::Index kept = 0;
  while (kept < block.energies.size() && block.energies[kept] < cutoff) ++kept;
  block.energies = block.energies.head(kept).eval();
  block.coefficients = block.coefficients.leftCols(kept).eval();
  cache::write_atom_block(path, alpha, block);
  return block;
}

two_center::OrbitalSet load_or_solve_molecule(const Settings& s, double R, int Lambda,
                                              two_center::Parity parity,
                                              const fs::path& dir, long* solves) {
  const auto basis = two_center::build_two_center_basis(
      R, Lambda, parity, s.box, s.xi_splines, s.xi_order, s.eta_splines, s.eta_order,
      s.xi_geometric, s.xi_progression);
  const auto path = cache::molecule_block_path(dir, basis);
  if (fs::exists(path)) {
    try {
      auto set = cache::read_molecule_block(path);
      if (set.basis.R == R && set.basis.Lambda == Lambda && set.basis.parity == parity)
        return set;
    } catch (const cache::CacheError&) {
    }
  }
  auto set = two_center::solve_orbitals(basis);
  if (solves) ++*solves;
  set = two_center::filter_by_eta_nodes(set, s.eta_node_limit);
  Eigen::Index kept = 0;
  while (kept < set.energies.size() && set.energies[kept] < s.cutoff) ++kept;
  set.energies = set.energies.head(kept).eval();
  set.coefficients = set.coefficients.leftCols(kept).eval();
  set.eta_node_counts.resize(kept);
  cache::write_molecule_block(path, set);
  return set;
}

//! Symmetry blocks an orientation can reach from the sigma_g ground
//! state: parallel light stays at Lambda = 0 and swaps parity;
//! perpendicular light climbs the Lambda ladder, flipping parity at
//! each step.
std::vector<std::pair<int, two_center::Parity>> blocks_for(
    const Settings& s, laser::Orientation orientation) {
  std::vector<std::pair<int, two_center::Parity>> out;
  if (orientation == laser::Orientation::parallel) {
    out.emplace_back(0, two_center::Parity::gerade);
    out.emplace_back(0, two_center::Parity::ungerade);
  } else {
    for (int L = 0; L <= s.lambda_max; ++L)
      out.emplace_back(L, L % 2 == 0 ? two_center::Parity::gerade
                                     : two_center::Parity::ungerade);
  }
  return out;
}

}  // namespace

propagator::FieldFreeBasis assemble_basis(const Settings& s, double R,
                                          laser::Orientation orientation,
                                          const fs::path& cache_root, long* solves) {
  const auto dir = selection_dir(s, cache_root);
  if (s.system == "model_atom") {
    const auto ip_spline = load_ip_spline(s);
    const double alpha = cached_alpha(ip_spline(R), cache_root);
    const auto basis = bspline::make_basis(s.atom_splines, s.atom_order, 0.0, s.atom_box,
                                           s.atom_geometric, s.atom_progression, true,
                                           true);
    std::vector<model_atom::RadialEigenbasis> blocks;
    blocks.reserve(s.ell_max + 1);
    for (int ell = 0; ell <= s.ell_max; ++ell)
      blocks.push_back(load_or_solve_atom(alpha, ell, basis, dir, s.cutoff, solves));
    return propagator::build_field_free_basis(blocks, s.cutoff);
  }

  std::vector<two_center::OrbitalSet> sets;
  for (const auto& [Lambda, parity] : blocks_for(s, orientation))
    sets.push_back(load_or_solve_molecule(s, R, Lambda, parity, dir, solves));
  const auto comp = orientation == laser::Orientation::parallel
                        ? two_center::DipoleComponent::parallel
                        : two_center::DipoleComponent::perpendicular;
  const auto dip = two_center::dipole_blocks(sets, comp);
  return propagator::build_field_free_basis(sets, dip, s.cutoff, orientation);
}

long warm_cache(const Settings& s, const fs::path& cache_root) {
  long solves = 0;
  const auto dir = selection_dir(s, cache_root);
  if (s.system == "model_atom") {
    const auto ip_spline = load_ip_spline(s);
    const auto basis = bspline::make_basis(s.atom_splines, s.atom_order, 0.0, s.atom_box,
                                           s.atom_geometric, s.atom_progression, true,
                                           true);
    for (const double R : s.r_values) {
      const double alpha = cached_alpha(ip_spline(R), cache_root);
      for (int ell = 0; ell <= s.ell_max; ++ell)
        load_or_solve_atom(alpha, ell, basis, dir, s.cutoff, &solves);
    }
    return solves;
  }

  std::set<std::pair<int, int>> wanted;  // (Lambda, parity sign)
  for (const auto o : s.orientations)
    for (const auto& [Lambda, parity] : blocks_for(s, o))
      wanted.emplace(Lambda, two_center::parity_sign(parity));
  for (const double R : s.r_values)
    for (const auto& [Lambda, sign] : wanted)
      load_or_solve_molecule(s, R, Lambda,
                             sign > 0 ? two_center::Parity::gerade
                                      : two_center::Parity::ungerade,
                             dir, &solves);
  return solves;
}

PointRunner make_runner(const Settings& s, const fs::path& cache_root) {
  constexpr std::size_t kPoolCapacity = 6;
  struct Pool {
    std::mutex mu;
    long tick = 0;
    std::map<std::string, std::pair<long, std::shared_ptr<const propagator::FieldFreeBasis>>>
        entries;
  };
  auto pool = std::make_shared<Pool>();

  return [s, cache_root, pool](const SweepPoint& pt) -> YieldRecord {
    YieldRecord rec;
    rec.point = pt;
    try {
      const std::string key =
          io::format_double(pt.R) + "|" + orientation_tag(pt.orientation);
      std::shared_ptr<const propagator::FieldFreeBasis> basis;
      {
        std::lock_guard lock(pool->mu);
        auto it = pool->entries.find(key);
        if (it != pool->entries.end()) {
          it->second.first = ++pool->tick;
          basis = it->second.second;
        } else {
          basis = std::make_shared<const propagator::FieldFreeBasis>(
              assemble_basis(s, pt.R, pt.orientation, cache_root, nullptr));
          pool->entries[key] = {++pool->tick, basis};
          while (pool->entries.size() > kPoolCapacity) {
            auto oldest = pool->entries.begin();
            for (auto jt = pool->entries.begin(); jt != pool->entries.end(); ++jt)
              if (jt->second.first < oldest->second.first) oldest = jt;
            pool->entries.erase(oldest);
          }
        }
      }
      const double angle =
          pt.orientation == laser::Orientation::perpendicular ? std::numbers::pi / 2 : 0.0;
      const auto pulse = laser::make_pulse(s.wavelength_nm, pt.intensity, pt.n_cycles,
                                           angle, s.carrier_phase);
      const auto prop = propagator::propagate(*basis, pulse, -1, s.rel_tol, s.abs_tol);
      const auto yd = propagator::ionization_yield(prop.final, *basis);
      rec.yield = yd.yield;
      rec.norm_defect = prop.norm_defect;
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.reason = e.what();
    }
    return rec;
  };
}

}  // namespace sfi::sweep
