#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "sfi/model_atom.hpp"
#include "sfi/two_center.hpp"

//! Binary on-disk cache for solved eigenbases, one file per
//! (system, geometry, symmetry block). Layout, all little-endian:
//!
//!   bytes 0..7   magic "SFIBASE1"
//!   u32          header length in bytes
//!   header       format version, system tag, geometry and basis
//!                parameters, array extents
//!   payload      knot vectors, energies, coefficient matrix
//!                (column-major), eta node counts (molecule)
//!   u64          total file size, trailer
//!
//! A reader verifies magic, header length, the size implied by the
//! extents and the trailer; any mismatch (typically a truncated write)
//! raises CacheError and the caller rebuilds. Stored knots are compared
//! against a basis rebuilt from the parameters, so a file can never
//! smuggle in geometry that disagrees with its own header.

namespace sfi::cache {

struct CacheError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! $SFI_CACHE_ROOT, or "sfi_cache" under the working directory.
std::filesystem::path default_root();

std::filesystem::path atom_block_path(const std::filesystem::path& root, double alpha,
                                      int ell, const bspline::BSplineBasis& basis);

std::filesystem::path molecule_block_path(const std::filesystem::path& root,
                                          const two_center::TwoCenterBasis& basis);

void write_atom_block(const std::filesystem::path& path, double alpha,
                      const model_atom::RadialEigenbasis& block);

//! Reconstructs the basis from the stored parameters; alpha_out receives
//! the potential parameter the block was solved with.
model_atom::RadialEigenbasis read_atom_block(const std::filesystem::path& path,
                                             double& alpha_out);

void write_molecule_block(const std::filesystem::path& path,
                          const two_center::OrbitalSet& set);

two_center::OrbitalSet read_molecule_block(const std::filesystem::path& path);

//! Dump any cache file as text, every double printed with enough digits
//! to reparse bit-exactly.
void export_text(const std::filesystem::path& cache_file,
                 const std::filesystem::path& text_file);

}  // namespace sfi::cache
