#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dtil/solver.hpp"

namespace dtil {

/// Carries every problem found while parsing, one per line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::vector<std::string>& problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Flat `key = value` experiment description. Lines starting with '#'
/// and blank lines are ignored; lists are comma separated.
struct ExperimentConfig {
  LatticeSpec lattice{4, 1.0};
  std::uint64_t seed = 1;

  std::string init_kind = "smooth";  // zero | smooth | rough | bump
  double init_amplitude = 1e-2;
  int init_modes = 6;
  double init_width = 1.0;

  FlowConfig flow;

  double kappa = 1.0;
  double epsilon = 1.0;
  double epsilon_32 = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c_tol = 5.0;
  std::vector<double> radii;          // empty: the lattice radius ladder
  std::vector<double> radius_ladder;  // concentration ladder
  double mass_radius = 0.0;
  int center_stride = 2;

  double window_radius = 1.0;
  double refinement = 4.0;
  double higgs_weight = 1.0;
  double search_radius = 0.0;  // 0: as large as the lattice allows

  static ExperimentConfig parse(std::istream& is);
  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);

  /// Applies one assignment; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  /// Resolved key/value pairs in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  /// Writes `prefix key = value` per entry.
  void write(std::ostream& os, const std::string& prefix = "") const;

  /// Initial state described by the init.* keys.
  FieldState initial_state() const;
};

std::string format_double(double v);
std::vector<double> parse_double_list(const std::string& text);

}  // namespace dtil
