#include "sfi/cache.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "sfi/config.hpp"
#include "sfi/io.hpp"

namespace sfi::cache {

namespace {

constexpr char kMagic[8] = {'S', 'F', 'I', 'B', 'A', 'S', 'E', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kAtom = 0;
constexpr std::uint8_t kMolecule = 1;

struct Writer {
  std::string buf;

  template <typename T>
  void put(T v) {
    char tmp[sizeof v];
    std::memcpy(tmp, &v, sizeof v);
    buf.append(tmp, sizeof v);
  }
  void put_doubles(const double* p, std::size_t n) {
    buf.append(reinterpret_cast<const char*>(p), n * sizeof(double));
  }
  void put_ints(const int* p, std::size_t n) {
    buf.append(reinterpret_cast<const char*>(p), n * sizeof(int));
  }
};

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  template <typename T>
  T get() {
    if (pos + sizeof(T) > buf.size()) throw CacheError("cache file truncated");
    T v;
    std::memcpy(&v, buf.data() + pos, sizeof v);
    pos += sizeof v;
    return v;
  }
  void get_doubles(double* p, std::size_t n) {
    if (pos + n * sizeof(double) > buf.size()) throw CacheError("cache file truncated");
    std::memcpy(p, buf.data() + pos, n * sizeof(double));
    pos += n * sizeof(double);
  }
  void get_ints(int* p, std::size_t n) {
    if (pos + n * sizeof(int) > buf.size()) throw CacheError("cache file truncated");
    std::memcpy(p, buf.data() + pos, n * sizeof(int));
    pos += n * sizeof(int);
  }
};

std::string hex16(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void check_knots(const std::vector<double>& stored, const std::vector<double>& rebuilt) {
  if (stored.size() != rebuilt.size()) throw CacheError("cache geometry mismatch");
  for (std::size_t i = 0; i < stored.size(); ++i)
    if (stored[i] != rebuilt[i]) throw CacheError("cache geometry mismatch");
}

void finish_and_write(const std::filesystem::path& path, const std::string& header,
                      const std::string& payload) {
  Writer w;
  w.buf.append(kMagic, sizeof kMagic);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(header.size()));
  w.buf += header;
  w.buf += payload;
  const std::uint64_t total = w.buf.size() + sizeof(std::uint64_t);
  w.put<std::uint64_t>(total);
  io::atomic_write(path, w.buf);
}

//! Returns the header reader positioned after the version/system tag,
//! having validated magic, lengths and trailer.
std::uint8_t open_checked(const std::string& raw, Reader& r) {
  if (raw.size() < sizeof kMagic + sizeof(std::uint32_t) + sizeof(std::uint64_t))
    throw CacheError("cache file truncated");
  if (std::memcmp(raw.data(), kMagic, sizeof kMagic) != 0)
    throw CacheError("not a cache file");
  r.pos = sizeof kMagic;
  const auto header_len = r.get<std::uint32_t>();
  if (r.pos + header_len + sizeof(std::uint64_t) > raw.size())
    throw CacheError("cache file truncated");
  std::uint64_t trailer;
  std::memcpy(&trailer, raw.data() + raw.size() - sizeof trailer, sizeof trailer);
  if (trailer != raw.size()) throw CacheError("cache file truncated");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) throw CacheError("unsupported cache version");
  return r.get<std::uint8_t>();
}

}  // namespace

std::filesystem::path default_root() {
  if (const char* env = std::getenv("SFI_CACHE_ROOT"); env && *env)
    return std::filesystem::path(env);
  return "sfi_cache";
}

std::filesystem::path atom_block_path(const std::filesystem::path& root, double alpha,
                                      int ell, const bspline::BSplineBasis& basis) {
  std::ostringstream key;
  key << "atom|" << io::format_double(alpha) << "|" << ell << "|"
      << basis.knots.num_splines() << "|" << basis.order() << "|"
      << io::format_double(basis.x_min()) << "|" << io::format_double(basis.x_max())
      << "|" << basis.knots.geometric_count << "|"
      << io::format_double(basis.knots.progression) << "|" << basis.drop_first << "|"
      << basis.drop_last;
  return root / ("atom_l" + std::to_string(ell) + "_" + hex16(config::fnv1a(key.str())) +
                 ".sfb");
}

std::filesystem::path molecule_block_path(const std::filesystem::path& root,
                                          const two_center::TwoCenterBasis& basis) {
  std::ostringstream key;
  key << "mol|" << io::format_double(basis.R) << "|" << io::format_double(basis.box)
      << "|" << basis.Lambda << "|" << two_center::parity_sign(basis.parity) << "|"
      << basis.xi.knots.num_splines() << "|" << basis.xi.order() << "|"
      << basis.xi.knots.geometric_count << "|"
      << io::format_double(basis.xi.knots.progression) << "|"
      << basis.eta.knots.num_splines() << "|" << basis.eta.order();
  return root / ("mol_R" + io::format_double(basis.R) + "_L" +
                 std::to_string(basis.Lambda) + two_center::parity_tag(basis.parity) +
                 "_" + hex16(config::fnv1a(key.str())) + ".sfb");
}

void write_atom_block(const std::filesystem::path& path, double alpha,
                      const model_atom::RadialEigenbasis& block) {
  const auto& ks = block.basis.knots;
  Writer header;
  header.put<std::uint32_t>(kVersion);
  header.put<std::uint8_t>(kAtom);
  header.put<double>(alpha);
  header.put<std::int32_t>(block.ell);
  header.put<std::int32_t>(ks.num_splines());
  header.put<std::int32_t>(ks.order);
  header.put<double>(ks.x_min());
  header.put<double>(ks.x_max());
  header.put<std::int32_t>(ks.geometric_count);
  header.put<double>(ks.progression);
  header.put<std::uint8_t>(block.basis.drop_first);
  header.put<std::uint8_t>(block.basis.drop_last);
  header.put<std::uint64_t>(ks.knots.size());
  header.put<std::uint64_t>(block.energies.size());
  header.put<std::uint64_t>(block.coefficients.rows());
  header.put<std::uint64_t>(block.coefficients.cols());

  Writer payload;
  payload.put_doubles(ks.knots.data(), ks.knots.size());
  payload.put_doubles(block.energies.data(), block.energies.size());
  payload.put_doubles(block.coefficients.data(), block.coefficients.size());
  finish_and_write(path, header.buf, payload.buf);
}

model_atom::RadialEigenbasis read_atom_block(const std::filesystem::path& path,
                                             double& alpha_out) {
  const std::string raw = io::read_file(path);
  Reader r{raw};
  if (open_checked(raw, r) != kAtom) throw CacheError("expected an atom block");

  alpha_out = r.get<double>();
  model_atom::RadialEigenbasis block;
  block.ell = r.get<std::int32_t>();
  const int n = r.get<std::int32_t>();
  const int order = r.get<std::int32_t>();
  const double x_min = r.get<double>();
  const double x_max = r.get<double>();
  const int geometric = r.get<std::int32_t>();
  const double progression = r.get<double>();
  const bool drop_first = r.get<std::uint8_t>() != 0;
  const bool drop_last = r.get<std::uint8_t>() != 0;
  const auto n_knots = r.get<std::uint64_t>();
  const auto n_states = r.get<std::uint64_t>();
  const auto rows = r.get<std::uint64_t>();
  const auto cols = r.get<std::uint64_t>();

  const std::uint64_t expected = raw.size();
  const std::uint64_t computed = r.pos + (n_knots + n_states + rows * cols) * 8 + 8;
  if (computed != expected) throw CacheError("cache file truncated");

  std::vector<double> knots(n_knots);
  r.get_doubles(knots.data(), n_knots);
  block.energies.resize(static_cast<Eigen::Index>(n_states));
  r.get_doubles(block.energies.data(), n_states);
  block.coefficients.resize(static_cast<Eigen::Index>(rows),
                            static_cast<Eigen::Index>(cols));
  r.get_doubles(block.coefficients.data(), rows * cols);

  block.basis = bspline::make_basis(n, order, x_min, x_max, geometric, progression,
                                    drop_first, drop_last);
  check_knots(knots, block.basis.knots.knots);
  if (block.coefficients.rows() != block.basis.size())
    throw CacheError("cache geometry mismatch");
  return block;
}

void write_molecule_block(const std::filesystem::path& path,
                          const two_center::OrbitalSet& set) {
  const auto& b = set.basis;
  Writer header;
  header.put<std::uint32_t>(kVersion);
  header.put<std::uint8_t>(kMolecule);
  header.put<double>(b.R);
  header.put<double>(b.box);
  header.put<std::int32_t>(b.Lambda);
  header.put<std::int32_t>(two_center::parity_sign(b.parity));
  header.put<std::int32_t>(b.xi.knots.num_splines());
  header.put<std::int32_t>(b.xi.order());
  header.put<std::int32_t>(b.xi.knots.geometric_count);
  header.put<double>(b.xi.knots.progression);
  header.put<std::int32_t>(b.eta.knots.num_splines());
  header.put<std::int32_t>(b.eta.order());
  header.put<std::uint64_t>(b.xi.knots.knots.size());
  header.put<std::uint64_t>(b.eta.knots.knots.size());
  header.put<std::uint64_t>(set.energies.size());
  header.put<std::uint64_t>(set.coefficients.rows());
  header.put<std::uint64_t>(set.coefficients.cols());
  header.put<std::uint64_t>(set.eta_node_counts.size());

  Writer payload;
  payload.put_doubles(b.xi.knots.knots.data(), b.xi.knots.knots.size());
  payload.put_doubles(b.eta.knots.knots.data(), b.eta.knots.knots.size());
  payload.put_doubles(set.energies.data(), set.energies.size());
  payload.put_doubles(set.coefficients.data(), set.coefficients.size());
  payload.put_ints(set.eta_node_counts.data(), set.eta_node_counts.size());
  finish_and_write(path, header.buf, payload.buf);
}

two_center::OrbitalSet read_molecule_block(const std::filesystem::path& path) {
  const std::string raw = io::read_file(path);
  Reader r{raw};
  if (open_checked(raw, r) != kMolecule) throw CacheError("expected a molecule block");

  const double R = r.get<double>();
  const double box = r.get<double>();
  const int Lambda = r.get<std::int32_t>();
  const int psign = r.get<std::int32_t>();
  const int xi_n = r.get<std::int32_t>();
  const int xi_order = r.get<std::int32_t>();
  const int xi_geometric = r.get<std::int32_t>();
  const double xi_progression = r.get<double>();
  const int eta_n = r.get<std::int32_t>();
  const int eta_order = r.get<std::int32_t>();
  const auto n_xi_knots = r.get<std::uint64_t>();
  const auto n_eta_knots = r.get<std::uint64_t>();
  const auto n_states = r.get<std::uint64_t>();
  const auto rows = r.get<std::uint64_t>();
  const auto cols = r.get<std::uint64_t>();
  const auto n_nodes = r.get<std::uint64_t>();

  const std::uint64_t computed =
      r.pos + (n_xi_knots + n_eta_knots + n_states + rows * cols) * 8 + n_nodes * 4 + 8;
  if (computed != raw.size()) throw CacheError("cache file truncated");

  std::vector<double> xi_knots(n_xi_knots), eta_knots(n_eta_knots);
  r.get_doubles(xi_knots.data(), n_xi_knots);
  r.get_doubles(eta_knots.data(), n_eta_knots);

  two_center::OrbitalSet set;
  set.energies.resize(static_cast<Eigen::Index>(n_states));
  r.get_doubles(set.energies.data(), n_states);
  set.coefficients.resize(static_cast<Eigen::Index>(rows),
                          static_cast<Eigen::Index>(cols));
  r.get_doubles(set.coefficients.data(), rows * cols);
  set.eta_node_counts.resize(n_nodes);
  r.get_ints(set.eta_node_counts.data(), n_nodes);

  set.basis = two_center::build_two_center_basis(
      R, Lambda, psign > 0 ? two_center::Parity::gerade : two_center::Parity::ungerade,
      box, xi_n, xi_order, eta_n, eta_order, xi_geometric, xi_progression);
  check_knots(xi_knots, set.basis.xi.knots.knots);
  check_knots(eta_knots, set.basis.eta.knots.knots);
  if (set.coefficients.rows() != set.basis.size() ||
      set.eta_node_counts.size() != static_cast<std::size_t>(set.energies.size()))
    throw CacheError("cache geometry mismatch");
  return set;
}

void export_text(const std::filesystem::path& cache_file,
                 const std::filesystem::path& text_file) {
  const std::string raw = io::read_file(cache_file);
  Reader probe{raw};
  const auto system = open_checked(raw, probe);

  std::ostringstream out;
  const auto dump_vector = [&out](const char* name, const double* p, std::size_t n) {
    out << name << " (" << n << ")\n";
    for (std::size_t i = 0; i < n; ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", p[i]);
      out << "  " << buf << "\n";
    }
  };

  if (system == kAtom) {
    double alpha;
    const auto block = read_atom_block(cache_file, alpha);
    out << "system atom\nalpha " << io::format_double(alpha) << "\nell " << block.ell
        << "\nsplines " << block.basis.knots.num_splines() << " order "
        << block.basis.order() << "\n";
    dump_vector("knots", block.basis.knots.knots.data(), block.basis.knots.knots.size());
    dump_vector("energies", block.energies.data(), block.energies.size());
    dump_vector("coefficients (column-major)", block.coefficients.data(),
                block.coefficients.size());
  } else {
    const auto set = read_molecule_block(cache_file);
    out << "system molecule\nR " << io::format_double(set.basis.R) << "\nbox "
        << io::format_double(set.basis.box) << "\nLambda " << set.basis.Lambda
        << "\nparity " << two_center::parity_tag(set.basis.parity) << "\n";
    dump_vector("xi knots", set.basis.xi.knots.knots.data(),
                set.basis.xi.knots.knots.size());
    dump_vector("eta knots", set.basis.eta.knots.knots.data(),
                set.basis.eta.knots.knots.size());
    dump_vector("energies", set.energies.data(), set.energies.size());
    out << "eta node counts (" << set.eta_node_counts.size() << ")\n";
    for (const int c : set.eta_node_counts) out << "  " << c << "\n";
    dump_vector("coefficients (column-major)", set.coefficients.data(),
                set.coefficients.size());
  }
  io::atomic_write(text_file, out.str());
}

}  // namespace sfi::cache
