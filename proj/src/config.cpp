#include "sfi/config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sfi/io.hpp"

namespace sfi::config {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(trim(s.substr(start)));
      return out;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
}

}  // namespace

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  sections_[section][key] = value;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s != sections_.end()) {
    const auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  throw std::runtime_error("config: missing [" + section + "] " + key);
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  return io::parse_double(get(section, key));
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const double v = get_double(section, key);
  const int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-9)
    throw std::runtime_error("config: [" + section + "] " + key + " is not an integer");
  return i;
}

int Config::get_int(const std::string& section, const std::string& key,
                    int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw std::runtime_error("config: [" + section + "] " + key + " is not a boolean");
}

std::vector<double> Config::get_grid(const std::string& section,
                                     const std::string& key) const {
  return parse_grid(get(section, key));
}

std::vector<std::string> Config::get_list(const std::string& section,
                                          const std::string& key) const {
  auto items = split(get(section, key), ',');
  std::vector<std::string> out;
  for (auto& s : items)
    if (!s.empty()) out.push_back(std::move(s));
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.rfind("lin:", 0) == 0 || t.rfind("log:", 0) == 0) {
    const bool logspace = t[1] == 'o';
    const auto parts = split(t.substr(4), ':');
    if (parts.size() != 3) throw std::runtime_error("grid: expected lin:a:b:n");
    const double a = io::parse_double(parts[0]);
    const double b = io::parse_double(parts[1]);
    const int n = static_cast<int>(std::lround(io::parse_double(parts[2])));
    if (n < 1) throw std::runtime_error("grid: need at least one point");
    if (logspace && (a <= 0.0 || b <= 0.0))
      throw std::runtime_error("grid: log spacing needs positive endpoints");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
      const double f = (n == 1) ? 0.0 : static_cast<double>(i) / (n - 1);
      out[i] = logspace ? a * std::pow(b / a, f) : a + (b - a) * f;
    }
    return out;
  }
  std::vector<double> out;
  for (const auto& s : split(t, ','))
    if (!s.empty()) out.push_back(io::parse_double(s));
  if (out.empty()) throw std::runtime_error("grid: empty");
  return out;
}

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("config:" + std::to_string(lineno) + ": unclosed section");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw std::runtime_error("config:" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config:" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw std::runtime_error("config:" + std::to_string(lineno) + ": empty key");
    if (section.empty())
      throw std::runtime_error("config:" + std::to_string(lineno) + ": key outside a section");
    cfg.set(section, key, trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  return parse_config(io::read_file(path));
}

std::string Config::dump() const {
  std::string out;
  for (const auto& [name, kv] : sections_) {
    out += "[" + name + "]\n";
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  }
  return out;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t Config::hash() const {
  std::string canonical;
  for (const auto& [name, kv] : sections_) {
    if (name == "run") continue;
    canonical += "[" + name + "]\n";
    for (const auto& [k, v] : kv) canonical += k + "=" + v + "\n";
  }
  return fnv1a(canonical);
}

}  // namespace sfi::config
