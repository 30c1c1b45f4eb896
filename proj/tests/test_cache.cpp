#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "sfi/cache.hpp"
#include "sfi/io.hpp"
#include "sfi/model_atom.hpp"
#include "sfi/two_center.hpp"

using namespace sfi;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("sfi_cache_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

model_atom::RadialEigenbasis small_block(double alpha, int ell) {
  const auto basis = bspline::make_basis(40, 6, 0.0, 30.0, 10, 1.1, true, true);
  return model_atom::solve_radial({alpha}, ell, basis);
}

two_center::OrbitalSet small_set() {
  const auto basis = two_center::build_two_center_basis(
      2.0, 0, two_center::Parity::gerade, 30.0, 30, 6, 8, 4, 10, 1.1);
  return two_center::solve_orbitals(basis);
}

void truncate_file(const fs::path& p, std::uintmax_t keep) {
  fs::resize_file(p, keep);
}

}  // namespace

TEST_SUITE_BEGIN("cache");

TEST_CASE("atom blocks survive the disk round trip exactly") {
  const auto dir = fresh_dir("atom");
  const auto block = small_block(0.7, 1);
  const auto path = cache::atom_block_path(dir, 0.7, 1, block.basis);

  cache::write_atom_block(path, 0.7, block);
  double alpha = 0.0;
  const auto back = cache::read_atom_block(path, alpha);

  CHECK(alpha == 0.7);
  CHECK(back.ell == 1);
  REQUIRE(back.energies.size() == block.energies.size());
  CHECK((back.energies - block.energies).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.coefficients - block.coefficients).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.basis.knots.knots.size() == block.basis.knots.knots.size());
  for (std::size_t i = 0; i < block.basis.knots.knots.size(); ++i)
    CHECK(back.basis.knots.knots[i] == block.basis.knots.knots[i]);
  CHECK(back.basis.order() == block.basis.order());
}

TEST_CASE("molecule blocks survive the disk round trip exactly") {
  const auto dir = fresh_dir("mol");
  const auto set = small_set();
  const auto path = cache::molecule_block_path(dir, set.basis);

  cache::write_molecule_block(path, set);
  const auto back = cache::read_molecule_block(path);

  CHECK(back.basis.R == set.basis.R);
  CHECK(back.basis.box == set.basis.box);
  CHECK(back.basis.Lambda == set.basis.Lambda);
  CHECK(back.basis.parity == set.basis.parity);
  CHECK((back.energies - set.energies).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.coefficients - set.coefficients).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.eta_node_counts == set.eta_node_counts);
  CHECK((back.basis.eta_adapt - set.basis.eta_adapt).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("paths separate blocks by parameters") {
  const auto dir = fresh_dir("paths");
  const auto block = small_block(0.7, 1);
  const auto p = cache::atom_block_path(dir, 0.7, 1, block.basis);
  CHECK(p == cache::atom_block_path(dir, 0.7, 1, block.basis));
  CHECK(p != cache::atom_block_path(dir, 0.7, 2, block.basis));
  CHECK(p != cache::atom_block_path(dir, 0.8, 1, block.basis));

  const auto set = small_set();
  const auto q = cache::molecule_block_path(dir, set.basis);
  auto other = set.basis;
  other.R = 2.2;
  CHECK(q != cache::molecule_block_path(dir, other));
}

TEST_CASE("mangled files raise CacheError instead of garbage") {
  const auto dir = fresh_dir("mangle");
  const auto block = small_block(0.0, 0);
  const auto path = dir / "block.sfb";
  cache::write_atom_block(path, 0.0, block);
  const auto size = fs::file_size(path);
  double alpha = 0.0;

  SUBCASE("truncated payload") {
    truncate_file(path, size / 2);
    CHECK_THROWS_AS(cache::read_atom_block(path, alpha), cache::CacheError);
  }
  SUBCASE("truncated trailer") {
    truncate_file(path, size - 4);
    CHECK_THROWS_AS(cache::read_atom_block(path, alpha), cache::CacheError);
  }
  SUBCASE("truncated header") {
    truncate_file(path, 10);
    CHECK_THROWS_AS(cache::read_atom_block(path, alpha), cache::CacheError);
  }
  SUBCASE("wrong magic") {
    auto bytes = io::read_file(path);
    bytes[0] = 'X';
    io::atomic_write(path, bytes);
    CHECK_THROWS_AS(cache::read_atom_block(path, alpha), cache::CacheError);
  }
  SUBCASE("flipped payload byte trips the knot check") {
    auto bytes = io::read_file(path);
    // the payload opens with the knot vector; nudge a knot and the
    // comparison against the rebuilt basis must notice
    bytes[115] = static_cast<char>(bytes[115] ^ 0x01);
    io::atomic_write(path, bytes);
    CHECK_THROWS_AS(cache::read_atom_block(path, alpha), cache::CacheError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(cache::read_atom_block(dir / "nope.sfb", alpha),
                    std::runtime_error);
  }
}

TEST_CASE("reading an atom block as a molecule block is refused") {
  const auto dir = fresh_dir("crosstype");
  const auto block = small_block(0.0, 0);
  const auto path = dir / "block.sfb";
  cache::write_atom_block(path, 0.0, block);
  CHECK_THROWS_AS(cache::read_molecule_block(path), cache::CacheError);
}

TEST_CASE("text export reproduces the stored energies digit for digit") {
  const auto dir = fresh_dir("export");
  const auto block = small_block(0.3, 0);
  const auto path = dir / "block.sfb";
  cache::write_atom_block(path, 0.3, block);

  const auto text_path = dir / "block.txt";
  cache::export_text(path, text_path);
  const auto text = io::read_file(text_path);
  CHECK(!text.empty());
  // values are printed with 17 significant digits, enough to reparse
  // the exact double
  const auto printed = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  const auto e0 = printed(block.energies[0]);
  CHECK(text.find(e0) != std::string::npos);
  CHECK(text.find(printed(block.energies[block.energies.size() - 1])) !=
        std::string::npos);
  CHECK(io::parse_double(e0) == block.energies[0]);
}

TEST_SUITE_END();
