#include "simbeam/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace simbeam {

namespace {

constexpr double kSpeedOfLight = 2.998e8;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Raw parsed document plus consumption tracking so leftovers can be
// reported as unknown keys.
class RawConfig {
 public:
  explicit RawConfig(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto comment = line.find_first_of("#;");
      if (comment != std::string::npos) line.erase(comment);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::invalid_argument("config line " + std::to_string(line_no) +
                                      ": malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty())
          throw std::invalid_argument("config line " + std::to_string(line_no) +
                                      ": empty section name");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": expected key = value");
      if (section.empty())
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": key outside any [section]");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty())
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": empty key");
      values_[section][key] = value;
    }
  }

  bool has(const std::string& section, const std::string& key) const {
    const auto s = values_.find(section);
    return s != values_.end() && s->second.count(key) > 0;
  }

  std::string get(const std::string& section, const std::string& key) {
    consumed_.insert(section + "." + key);
    return values_.at(section).at(key);
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) {
    if (!has(section, key)) return fallback;
    const std::string raw = get(section, key);
    std::size_t pos = 0;
    double out = 0;
    try {
      out = std::stod(raw, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != raw.size() || raw.empty())
      throw std::invalid_argument(section + "." + key +
                                  ": expected a number, got '" + raw + "'");
    return out;
  }

  long long get_int(const std::string& section, const std::string& key,
                    long long fallback) {
    if (!has(section, key)) return fallback;
    const std::string raw = get(section, key);
    std::size_t pos = 0;
    long long out = 0;
    try {
      out = std::stoll(raw, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != raw.size() || raw.empty())
      throw std::invalid_argument(section + "." + key +
                                  ": expected an integer, got '" + raw + "'");
    return out;
  }

  std::uint64_t get_seed(const std::string& section, const std::string& key,
                         std::uint64_t fallback) {
    if (!has(section, key)) return fallback;
    const std::string raw = get(section, key);
    std::size_t pos = 0;
    std::uint64_t out = 0;
    try {
      out = std::stoull(raw, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != raw.size() || raw.empty())
      throw std::invalid_argument(section + "." + key +
                                  ": expected an unsigned integer, got '" +
                                  raw + "'");
    return out;
  }

  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) {
    if (!has(section, key)) return fallback;
    const std::string raw = get(section, key);
    if (raw == "true" || raw == "on" || raw == "1") return true;
    if (raw == "false" || raw == "off" || raw == "0") return false;
    throw std::invalid_argument(section + "." + key +
                                ": expected a boolean, got '" + raw + "'");
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) {
    if (!has(section, key)) return fallback;
    return get(section, key);
  }

  void reject_unconsumed() const {
    for (const auto& [section, keys] : values_)
      for (const auto& [key, value] : keys)
        if (consumed_.count(section + "." + key) == 0)
          throw std::invalid_argument("config: unknown key " + section + "." +
                                      key);
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> values_;
  std::set<std::string> consumed_;
};

}  // namespace

void ExperimentConfig::validate() const {
  geometry.validate();
  if (num_streams < 1 || num_streams > geometry.num_tx_antennas ||
      num_streams > geometry.num_rx_antennas)
    throw std::invalid_argument(
        "signaling.num_streams must lie in [1, min(num_tx_antennas, "
        "num_rx_antennas)]");
  if (modulation_order < 2)
    throw std::invalid_argument("signaling.modulation_order must be >= 2");
  if (vector_cap < 2)
    throw std::invalid_argument("signaling.vector_cap must be >= 2");
  if (sigma2 <= 0) throw std::invalid_argument("noise.sigma2 must be positive");
  if (geometry.link_distance < path_loss.reference_distance)
    throw std::invalid_argument(
        "geometry.link_distance must be >= channel.reference_distance");
  if (correlation_model != "sinc" && correlation_model != "identity")
    throw std::invalid_argument("channel.correlation must be sinc or identity");
  if (!(optimizer.initial_step > 0))
    throw std::invalid_argument("optimizer.initial_step must be positive");
  if (optimizer.line_search.shrink <= 0 || optimizer.line_search.shrink >= 1)
    throw std::invalid_argument("optimizer.shrink must lie in (0, 1)");
  if (optimizer.line_search.sufficient_decrease <= 0)
    throw std::invalid_argument(
        "optimizer.sufficient_decrease must be positive");
  if (optimizer.line_search.growth < 1)
    throw std::invalid_argument("optimizer.growth must be >= 1");
  if (optimizer.line_search.max_backtracks < 0)
    throw std::invalid_argument("optimizer.max_backtracks must be >= 0");
  if (optimizer.tol < 0)
    throw std::invalid_argument("optimizer.tol must be >= 0");
  if (optimizer.patience < 1)
    throw std::invalid_argument("optimizer.patience must be >= 1");
  if (optimizer.max_iterations < 0)
    throw std::invalid_argument("optimizer.max_iterations must be >= 0");
  if (num_realizations < 1)
    throw std::invalid_argument("run.num_realizations must be >= 1");
  if (mi_samples < 0)
    throw std::invalid_argument("run.mi_samples must be >= 0");
  if (mi_every < 0) throw std::invalid_argument("run.mi_every must be >= 0");
}

ExperimentConfig parse_config(const std::string& text) {
  RawConfig raw(text);
  ExperimentConfig cfg;

  // Wavelength first; spacing and area defaults derive from it.
  const bool has_wavelength = raw.has("geometry", "wavelength");
  const bool has_frequency = raw.has("geometry", "frequency");
  if (has_wavelength && has_frequency)
    throw std::invalid_argument(
        "geometry: give either wavelength or frequency, not both");
  double wavelength = 0.05;
  if (has_frequency) {
    const double f = raw.get_double("geometry", "frequency", 0.0);
    if (f <= 0)
      throw std::invalid_argument("geometry.frequency must be positive");
    wavelength = kSpeedOfLight / f;
  } else {
    wavelength = raw.get_double("geometry", "wavelength", 0.05);
  }
  auto& g = cfg.geometry;
  g.wavelength = wavelength;
  g.num_tx_antennas =
      static_cast<int>(raw.get_int("geometry", "num_tx_antennas", 2));
  g.num_rx_antennas =
      static_cast<int>(raw.get_int("geometry", "num_rx_antennas", 2));
  g.atoms_per_tx_layer =
      static_cast<int>(raw.get_int("geometry", "atoms_per_tx_layer", 49));
  g.atoms_per_rx_layer =
      static_cast<int>(raw.get_int("geometry", "atoms_per_rx_layer", 49));
  g.tx_layers = static_cast<int>(raw.get_int("geometry", "tx_layers", 4));
  g.rx_layers = static_cast<int>(raw.get_int("geometry", "rx_layers", 4));
  g.layer_spacing =
      raw.get_double("geometry", "layer_spacing", wavelength / 2.0);
  g.antenna_spacing =
      raw.get_double("geometry", "antenna_spacing", wavelength / 2.0);
  g.atom_spacing =
      raw.get_double("geometry", "atom_spacing", wavelength / 2.0);
  g.atom_area = raw.get_double("geometry", "atom_area",
                               wavelength * wavelength / 4.0);
  g.link_distance = raw.get_double("geometry", "link_distance", 300.0);

  cfg.path_loss.wavelength = wavelength;
  cfg.path_loss.reference_distance =
      raw.get_double("channel", "reference_distance", 1.0);
  cfg.path_loss.exponent =
      raw.get_double("channel", "path_loss_exponent", 3.5);
  cfg.correlation_model = raw.get_string("channel", "correlation", "sinc");

  cfg.constellation = parse_constellation_kind(
      raw.get_string("signaling", "constellation", "qam"));
  cfg.modulation_order =
      static_cast<int>(raw.get_int("signaling", "modulation_order", 4));
  cfg.num_streams = static_cast<int>(raw.get_int("signaling", "num_streams", 2));
  cfg.vector_cap = static_cast<int>(raw.get_int("signaling", "vector_cap", 4096));

  const double sigma2_db = raw.get_double("noise", "sigma2_db", -110.0);
  cfg.sigma2 = std::pow(10.0, sigma2_db / 10.0);

  auto& opt = cfg.optimizer;
  opt.initial_step = raw.get_double("optimizer", "initial_step", 1000.0);
  opt.line_search.shrink = raw.get_double("optimizer", "shrink", 0.5);
  opt.line_search.sufficient_decrease =
      raw.get_double("optimizer", "sufficient_decrease", 1e-3);
  opt.line_search.growth = raw.get_double("optimizer", "growth", 2.0);
  opt.line_search.max_backtracks =
      static_cast<int>(raw.get_int("optimizer", "max_backtracks", 60));
  opt.tol = raw.get_double("optimizer", "tol", 1e-6);
  opt.patience = static_cast<int>(raw.get_int("optimizer", "patience", 5));
  opt.max_iterations =
      static_cast<int>(raw.get_int("optimizer", "max_iterations", 200));

  cfg.num_realizations =
      static_cast<int>(raw.get_int("run", "num_realizations", 30));
  cfg.master_seed = raw.get_seed("run", "master_seed", 1);
  cfg.mi_samples = static_cast<int>(raw.get_int("run", "mi_samples", 1000));
  cfg.mi_every = static_cast<int>(raw.get_int("run", "mi_every", 0));
  cfg.output_dir = raw.get_string("run", "output_dir", "out");
  opt.optimize_precoder = raw.get_bool("run", "precoding_enabled", true);

  raw.reject_unconsumed();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace simbeam
