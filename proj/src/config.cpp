#include "dtil/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "dtil/synth.hpp"

namespace dtil {

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out = "invalid configuration:";
  for (const auto& l : lines) out += "\n  " + l;
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError({key + ": expected a number, got '" + v + "'"});
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError({key + ": expected an integer, got '" + v + "'"});
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) out += (k ? "," : "") + format_double(v[k]);
  return out;
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

Field real(double ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*m = to_double(k, v); },
          [m](const ExperimentConfig& c) { return format_double(c.*m); }};
}

Field flow_real(double FlowConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.flow.*m = to_double(k, v); },
          [m](const ExperimentConfig& c) { return format_double(c.flow.*m); }};
}

Field list(std::vector<double> ExperimentConfig::*m) {
  return {[m](ExperimentConfig& c, const std::string& k, const std::string& v) {
            try {
              c.*m = parse_double_list(v);
            } catch (const std::invalid_argument&) {
              throw ConfigError({k + ": expected a comma separated list of numbers, got '" + v + "'"});
            }
          },
          [m](const ExperimentConfig& c) { return list_text(c.*m); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"lattice.n",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          try {
            c.lattice = LatticeSpec(static_cast<int>(to_integer(k, v)), c.lattice.spacing);
          } catch (const std::invalid_argument& e) {
            throw ConfigError({k + ": " + e.what()});
          }
        },
        [](const ExperimentConfig& c) { return std::to_string(c.lattice.n_per_axis); }}},
      {"lattice.spacing",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          try {
            c.lattice = LatticeSpec(c.lattice.n_per_axis, to_double(k, v));
          } catch (const std::invalid_argument& e) {
            throw ConfigError({k + ": " + e.what()});
          }
        },
        [](const ExperimentConfig& c) { return format_double(c.lattice.spacing); }}},
      {"seed",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          c.seed = static_cast<std::uint64_t>(to_integer(k, v));
          c.flow.seed = c.seed;
        },
        [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
      {"init.kind",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          if (v != "zero" && v != "smooth" && v != "rough" && v != "bump")
            throw ConfigError({k + ": expected zero, smooth, rough or bump, got '" + v + "'"});
          c.init_kind = v;
        },
        [](const ExperimentConfig& c) { return c.init_kind; }}},
      {"init.amplitude", real(&ExperimentConfig::init_amplitude)},
      {"init.modes",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          c.init_modes = static_cast<int>(to_integer(k, v));
        },
        [](const ExperimentConfig& c) { return std::to_string(c.init_modes); }}},
      {"init.width", real(&ExperimentConfig::init_width)},
      {"flow.step_size", flow_real(&FlowConfig::step_size)},
      {"flow.max_steps",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) { c.flow.max_steps = to_integer(k, v); },
        [](const ExperimentConfig& c) { return std::to_string(c.flow.max_steps); }}},
      {"flow.grad_tol", flow_real(&FlowConfig::grad_tol)},
      {"flow.residual_tol", flow_real(&FlowConfig::residual_tol)},
      {"flow.energy_rtol", flow_real(&FlowConfig::energy_rtol)},
      {"flow.backtracking", flow_real(&FlowConfig::backtracking)},
      {"flow.step_growth", flow_real(&FlowConfig::step_growth)},
      {"flow.armijo", flow_real(&FlowConfig::armijo)},
      {"flow.min_step", flow_real(&FlowConfig::min_step)},
      {"flow.higgs_metric", flow_real(&FlowConfig::higgs_metric)},
      {"analysis.kappa", real(&ExperimentConfig::kappa)},
      {"analysis.epsilon", real(&ExperimentConfig::epsilon)},
      {"analysis.epsilon_32", real(&ExperimentConfig::epsilon_32)},
      {"analysis.c1", real(&ExperimentConfig::c1)},
      {"analysis.c2", real(&ExperimentConfig::c2)},
      {"analysis.c_tol", real(&ExperimentConfig::c_tol)},
      {"analysis.radii", list(&ExperimentConfig::radii)},
      {"analysis.radius_ladder", list(&ExperimentConfig::radius_ladder)},
      {"analysis.mass_radius", real(&ExperimentConfig::mass_radius)},
      {"analysis.center_stride",
       {[](ExperimentConfig& c, const std::string& k, const std::string& v) {
          c.center_stride = static_cast<int>(to_integer(k, v));
        },
        [](const ExperimentConfig& c) { return std::to_string(c.center_stride); }}},
      {"blowup.window_radius", real(&ExperimentConfig::window_radius)},
      {"blowup.refinement", real(&ExperimentConfig::refinement)},
      {"blowup.higgs_weight", real(&ExperimentConfig::higgs_weight)},
      {"blowup.search_radius", real(&ExperimentConfig::search_radius)},
  };
  return table;
}

}  // namespace

ConfigError::ConfigError(const std::vector<std::string>& problems)
    : std::runtime_error(join(problems)), problems_(problems) {}

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, p) : std::to_string(v);
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    double v = 0.0;
    const auto* end = item.data() + item.size();
    const auto [p, ec] = std::from_chars(item.data(), end, v);
    if (ec != std::errc() || p != end) throw std::invalid_argument("not a number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  for (const auto& [k, f] : fields())
    if (k == key) {
      f.set(*this, key, value);
      return;
    }
  throw ConfigError({"unknown key '" + key + "'"});
}

ExperimentConfig ExperimentConfig::parse(std::istream& is) {
  ExperimentConfig cfg;
  std::vector<std::string> problems;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    try {
      cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const ConfigError& e) {
      for (const auto& p : e.problems()) problems.push_back("line " + std::to_string(lineno) + ": " + p);
    }
  }
  try {
    cfg.flow.validate();
  } catch (const std::invalid_argument& e) {
    problems.push_back(std::string("flow: ") + e.what());
  }
  if (!problems.empty()) throw ConfigError(problems);
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  std::istringstream is(text);
  return parse(is);
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError({"cannot open " + path});
  return parse(is);
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, f] : fields()) out.emplace_back(k, f.get(*this));
  return out;
}

void ExperimentConfig::write(std::ostream& os, const std::string& prefix) const {
  for (const auto& [k, v] : entries()) os << prefix << k << " = " << v << '\n';
}

FieldState ExperimentConfig::initial_state() const {
  if (init_kind == "zero") return FieldState(lattice);
  if (init_kind == "rough") return random_rough_state(lattice, init_amplitude, seed);
  if (init_kind == "bump") {
    Point c{};
    for (auto& x : c) x = lattice.half_period();
    return field_bump(lattice, c, init_width, init_amplitude);
  }
  RandomFieldOptions opt;
  opt.amplitude = init_amplitude;
  opt.modes = init_modes;
  opt.seed = seed;
  return random_smooth_state(lattice, opt);
}

}  // namespace dtil
