#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

//! Sectioned key = value configuration files. `#` starts a comment,
//! section headers are bracketed, keys are unique within a section.
//! The hash covers every section except [run], so bookkeeping knobs
//! (workers, output paths) never invalidate cached or resumable work.

namespace sfi::config {

class Config {
 public:
  void set(const std::string& section, const std::string& key, const std::string& value);
  bool has(const std::string& section, const std::string& key) const;

  std::string get(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;

  //! Comma-separated doubles, or a generated grid:
  //!   lin:a:b:n   n points from a to b inclusive
  //!   log:a:b:n   n points geometrically spaced from a to b
  std::vector<double> get_grid(const std::string& section, const std::string& key) const;

  //! Comma-separated words.
  std::vector<std::string> get_list(const std::string& section,
                                    const std::string& key) const;

  //! FNV-1a over the canonical dump (sorted sections and keys), with
  //! the [run] section left out.
  std::uint64_t hash() const;

  //! Canonical text form; stable under reordering of the input file.
  std::string dump() const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

std::vector<double> parse_grid(const std::string& text);

std::uint64_t fnv1a(const std::string& data);

}  // namespace sfi::config
