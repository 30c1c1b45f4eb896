#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

//! Plain-text table and CSV plumbing shared by the command-line tools.
//! All numeric output goes through shortest-round-trip formatting so
//! files are byte-stable across runs and reparse to the same doubles.

namespace sfi::io {

//! Two-column numeric table, `#` starts a comment, blank lines skipped.
//! Columns may be separated by whitespace or a comma.
std::vector<std::pair<double, double>> read_table(const std::filesystem::path& path);

//! Shortest decimal string that parses back to exactly this double.
std::string format_double(double v);

double parse_double(const std::string& s);

//! Split a CSV line on commas; no quoting, fields are trimmed.
std::vector<std::string> split_csv(const std::string& line);

//! Write content to path via a temporary file in the same directory
//! followed by an atomic rename, so readers never see a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace sfi::io
