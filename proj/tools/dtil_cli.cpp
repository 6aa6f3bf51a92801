// dtil: command-line front end for the lattice DT toolkit.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "dtil/dtil.hpp"

namespace {

using namespace dtil;

// exit codes: 0 ok, 1 check failed (violations, identity failures), 2 usage/input error
constexpr int kCheckFailed = 1;
constexpr int kInputError = 2;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : ExperimentConfig::from_file(config_path);
    std::vector<std::string> problems;
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        problems.push_back("--set " + kv + ": expected key=value");
        continue;
      }
      try {
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
      } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) problems.push_back("--set: " + p);
      }
    }
    if (!problems.empty()) throw ConfigError(problems);
    return cfg;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "key = value configuration file");
  app->add_option("--set", c.overrides, "override a configuration key (key=value), repeatable");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

void header(std::ostream& os, const ExperimentConfig& cfg, const std::string& input = {}) {
  cfg.write(os, "# ");
  if (!input.empty()) os << "# input = " << input << '\n';
}

SiteIndex parse_site(const LatticeSpec& spec, const std::string& text) {
  const auto v = parse_double_list(text);
  if (v.size() != kDim) throw std::invalid_argument("a site needs 6 integer coordinates, got '" + text + "'");
  SiteIndex s;
  for (int k = 0; k < kDim; ++k) {
    const int c = static_cast<int>(v[k]);
    if (c != v[k] || c < 0 || c >= spec.n_per_axis) throw std::invalid_argument("bad site coordinate in '" + text + "'");
    s.coords[k] = c;
  }
  return s;
}

Point parse_point(const std::string& text) {
  const auto v = parse_double_list(text);
  if (v.size() != kDim) throw std::invalid_argument("a point needs 6 coordinates, got '" + text + "'");
  Point p{};
  for (int k = 0; k < kDim; ++k) p[k] = v[k];
  return p;
}

SiteIndex densest_site(const DensityField& d) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < d.values.size(); ++i)
    if (d.values[i] > d.values[best]) best = i;
  return SiteIndex::from_linear(d.spec, best);
}

std::vector<double> radii_or_ladder(const std::string& text, const ExperimentConfig& cfg, const LatticeSpec& spec) {
  if (!text.empty()) return parse_double_list(text);
  if (!cfg.radii.empty()) return cfg.radii;
  return lattice_radius_ladder(spec);
}

// ---------------------------------------------------------------------------

int run_minimize(const Common& common, const std::string& out, const std::string& trace_path) {
  const ExperimentConfig cfg = common.resolve();
  const FieldState init = cfg.initial_state();
  FlowConfig fc = cfg.flow;
  fc.kappa = cfg.kappa;
  const FlowResult res = minimize(init, fc);
  if (!out.empty()) write_snapshot(out, res.state);
  if (!trace_path.empty()) {
    auto os = open_out(trace_path);
    header(os, cfg);
    os << "# status = " << to_string(res.trace.status) << '\n';
    res.trace.write_csv(os);
  }
  const auto& last = res.trace.records.back();
  std::cout << "status: " << to_string(res.trace.status) << '\n'
            << "steps: " << res.trace.steps() << '\n'
            << "L_initial: " << format_double(res.trace.records.front().energy.total) << '\n'
            << "L_final: " << format_double(last.energy.total) << '\n'
            << "grad_norm: " << format_double(last.grad_norm) << '\n'
            << "r1_norm: " << format_double(last.r1_norm) << '\n'
            << "r2_norm: " << format_double(last.r2_norm) << '\n';
  return 0;
}

int run_residuals(const Common& common, const std::string& in) {
  const ExperimentConfig cfg = common.resolve();
  const FieldState st = read_state(in);
  const Evaluation ev = evaluate(st, true);
  const ResidualPair r = dt_residuals(st, ev.curvature, cfg.kappa);
  std::cout << "L: " << format_double(ev.energy.total) << '\n'
            << "term1: " << format_double(ev.energy.curvature_term) << '\n'
            << "term2: " << format_double(ev.energy.dstar_term) << '\n'
            << "term3: " << format_double(ev.energy.bracket_term) << '\n'
            << "det_u_l2: " << format_double(ev.energy.det_u_l2) << '\n'
            << "grad_norm: " << format_double(ev.gradient.norm()) << '\n'
            << "r1_norm: " << format_double(r.r1_norm) << '\n'
            << "r2_norm: " << format_double(r.r2_norm) << '\n';
  return 0;
}

int run_epsreg(const Common& common, const std::string& in, const std::string& centers_arg,
               const std::string& radii_arg, const std::string& out) {
  const ExperimentConfig cfg = common.resolve();
  const Snapshot snap = read_snapshot(in);
  const DensityField d = snap.energy_density();
  std::vector<SiteIndex> centers;
  if (centers_arg == "auto") {
    centers = auto_centers(d, cfg.center_stride);
  } else {
    std::ifstream is(centers_arg);
    if (!is) throw std::runtime_error("cannot open centers file " + centers_arg);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ' ', ',');
      centers.push_back(parse_site(d.spec, line));
    }
  }
  const auto radii = radii_or_ladder(radii_arg, cfg, d.spec);
  EpsRegularityOptions opt{cfg.epsilon, cfg.epsilon_32, cfg.c1, cfg.c2};
  const EpsRegularityReport rep =
      snap.state ? eps_regularity_scan(*snap.state, centers, radii, opt, cfg.kappa) : eps_regularity_scan(d, centers, radii, opt);
  auto os = open_out(out);
  header(os, cfg, in);
  if (rep.r1_norm) os << "# r1_norm = " << format_double(*rep.r1_norm) << "\n# r2_norm = " << format_double(*rep.r2_norm) << '\n';
  rep.write_csv(os);
  std::cout << "probes: " << rep.probes.size() << '\n'
            << "max_implied_c1: " << format_double(rep.max_implied_c1) << '\n'
            << "max_implied_c2: " << format_double(rep.max_implied_c2) << '\n'
            << "all_pass: " << (rep.all_pass() ? "true" : "false") << '\n';
  return 0;
}

int run_monotonicity(const Common& common, const std::string& in, const std::string& center_arg,
                     const std::string& radii_arg, const std::string& out) {
  const ExperimentConfig cfg = common.resolve();
  const Snapshot snap = read_snapshot(in);
  const DensityField d = snap.energy_density();
  const SiteIndex c = center_arg == "max" ? densest_site(d) : parse_site(d.spec, center_arg);
  const auto radii = radii_or_ladder(radii_arg, cfg, d.spec);
  const MonotonicityReport rep =
      snap.state ? monotonicity_scan(*snap.state, c, radii, cfg.c_tol, cfg.kappa) : monotonicity_scan(d, c, radii, cfg.c_tol);
  if (!out.empty()) {
    auto os = open_out(out);
    header(os, cfg, in);
    if (rep.r1_norm) os << "# r1_norm = " << format_double(*rep.r1_norm) << "\n# r2_norm = " << format_double(*rep.r2_norm) << '\n';
    rep.write_csv(os);
  }
  std::cout << "radii: " << rep.radii.size() << '\n'
            << "violations: " << rep.violations.size() << '\n'
            << "strict_decreases: " << rep.strict_decreases << '\n'
            << "max_shell_discrepancy: " << format_double(rep.max_shell_discrepancy) << '\n';
  return rep.violations.empty() ? 0 : kCheckFailed;
}

int run_liouville(const Common& common, const std::string& in, const std::string& center_arg, double rho,
                  const std::string& taus, const std::string& sigmas, const std::string& out) {
  const ExperimentConfig cfg = common.resolve();
  const DensityField d = read_snapshot(in).energy_density();
  const SiteIndex c = center_arg == "max" ? densest_site(d) : parse_site(d.spec, center_arg);
  const auto rep = liouville_diagnostic(d, c, rho, parse_double_list(taus), parse_double_list(sigmas));
  auto os = open_out(out);
  header(os, cfg, in);
  os << "# gamma = " << format_double(rep.gamma) << '\n';
  rep.write_csv(os);
  std::cout << "gamma: " << format_double(rep.gamma) << '\n' << "entries: " << rep.entries.size() << '\n';
  return 0;
}

int run_concentrate(const Common& common, const std::string& seq_arg, const std::string& limit_arg, double epsilon,
                    const std::string& ladder_arg, const std::string& out, const std::string& sets_out) {
  ExperimentConfig cfg = common.resolve();
  if (epsilon > 0.0) cfg.epsilon = epsilon;
  std::vector<std::string> paths;
  {
    std::stringstream ss(seq_arg);
    std::string p;
    while (std::getline(ss, p, ','))
      if (!p.empty()) paths.push_back(p);
  }
  if (paths.empty()) throw std::invalid_argument("--seq needs at least one snapshot");
  std::optional<StateSequence> seq;
  for (const auto& p : paths) {
    const Snapshot s = read_snapshot(p);
    if (!seq) seq.emplace(s.spec);
    seq->add(s.energy_density());
  }
  std::optional<DensityField> limit;
  if (!limit_arg.empty()) limit = read_snapshot(limit_arg).energy_density();
  AtomOptions opt;
  opt.radius_ladder = !ladder_arg.empty() ? parse_double_list(ladder_arg) : cfg.radius_ladder;
  if (opt.radius_ladder.empty()) opt.radius_ladder = dyadic_ladder(2.0 * seq->spec().spacing, 2);
  opt.mass_radius = cfg.mass_radius;
  const ConcentrationReport rep = extract_atoms(*seq, limit, cfg.epsilon, opt);
  auto os = open_out(out);
  header(os, cfg);
  for (const auto& p : paths) os << "# sequence = " << p << '\n';
  if (!limit_arg.empty()) os << "# limit = " << limit_arg << '\n';
  rep.write_text(os);
  if (!sets_out.empty()) {
    auto cs = open_out(sets_out);
    header(cs, cfg);
    rep.sets.write_csv(cs);
  }
  std::cout << "atoms: " << rep.atoms.size() << '\n'
            << "rejected: " << rep.rejected.size() << '\n'
            << "unstable: " << rep.unstable.size() << '\n';
  for (const auto& a : rep.atoms) {
    std::cout << "atom theta=" << format_double(a.theta) << " at";
    for (double x : a.position) std::cout << ' ' << format_double(x);
    std::cout << '\n';
  }
  return 0;
}

int run_blowup(const Common& common, const std::string& in, double epsilon, const std::string& out) {
  ExperimentConfig cfg = common.resolve();
  if (epsilon > 0.0) cfg.epsilon = epsilon;
  const Snapshot snap = read_snapshot(in);
  const DensityField d = snap.energy_density();
  Ball search;
  search.center = densest_site(d).position(d.spec);
  search.radius = cfg.search_radius > 0.0 ? cfg.search_radius : d.spec.half_period() - 0.5 * d.spec.spacing;
  const BlowupScale sel = select_blowup_scale(d, search, cfg.epsilon);
  std::cout << "status: " << to_string(sel.status) << '\n' << "sup_mass: " << format_double(sel.sup_mass) << '\n';
  if (sel.status != BlowupStatus::found) return kCheckFailed;
  std::cout << "center:";
  for (double x : sel.center_point) std::cout << ' ' << format_double(x);
  std::cout << '\n'
            << "radius: " << format_double(sel.radius) << '\n'
            << "window_mass: " << format_double(sel.window_mass) << '\n'
            << "hard_mass: " << format_double(sel.hard_mass) << '\n';
  if (!out.empty()) {
    if (!snap.state) throw std::invalid_argument("blowup --out needs a snapshot with fields");
    RescaleOptions ro;
    ro.window_radius = cfg.window_radius;
    ro.refinement = cfg.refinement;
    ro.higgs_weight = cfg.higgs_weight;
    const double scale = std::min(1.0, sel.radius);
    write_snapshot(out, blowup_rescale(*snap.state, sel.center_point, scale, ro));
    std::cout << "scale: " << format_double(scale) << '\n';
  }
  return 0;
}

int run_synth_bump(int n, double h, const std::string& center, double width, double mass, bool field,
                   double amplitude, const std::string& out) {
  const LatticeSpec spec(n, h);
  Point c{};
  if (center.empty())
    for (auto& x : c) x = spec.half_period();
  else
    c = parse_point(center);
  if (field)
    write_snapshot(out, field_bump(spec, c, width, amplitude));
  else
    write_snapshot(out, density_bump(spec, c, width, mass));
  return 0;
}

int run_synth_sequence(int n, double h, const std::string& centers, const std::string& masses,
                       const std::string& widths, double background, const std::string& prefix) {
  const LatticeSpec spec(n, h);
  std::vector<PlantedBump> bumps;
  {
    std::stringstream ss(centers);
    std::string p;
    while (std::getline(ss, p, ';'))
      if (!p.empty()) bumps.push_back({parse_point(p), 0.0});
  }
  const auto m = parse_double_list(masses);
  if (m.size() != bumps.size()) throw std::invalid_argument("--masses needs one value per centre");
  for (std::size_t k = 0; k < m.size(); ++k) bumps[k].mass = m[k];
  const DensityField bg = smooth_background(spec, background);
  const auto seq = shrinking_sequence(bg, bumps, parse_double_list(widths));
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const std::string path = prefix + std::to_string(k) + ".snap";
    write_snapshot(path, seq[k]);
    std::cout << path << '\n';
  }
  write_snapshot(prefix + "limit.snap", bg);
  std::cout << prefix << "limit.snap\n";
  return 0;
}

int run_check_identities(long samples, unsigned long long seed) {
  const IdentitySweepResult r = identity_sweep(samples, seed);
  std::cout << "samples: " << r.samples << '\n'
            << "identity_failures: " << r.identity_failures << '\n'
            << "inequality_failures: " << r.inequality_failures << '\n'
            << "max_identity_rel_error: " << format_double(r.max_identity_rel_error) << '\n'
            << "min_inequality_slack: " << format_double(r.min_inequality_slack) << '\n';
  return r.identity_failures == 0 && r.inequality_failures == 0 ? 0 : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dtil: lattice Donaldson-Thomas toolkit on the flat 6-torus"};
  app.require_subcommand(1);
  int code = 0;

  Common c_min, c_res, c_eps, c_mono, c_liou, c_conc, c_blow;

  std::string out, trace, in, centers = "auto", radii, center = "max", taus, sigmas, seq, limit, ladder, sets_out;
  double epsilon = 0.0, rho = 1.0;

  auto* mn = app.add_subcommand("minimize", "gradient flow of L from the configured initial state");
  add_common(mn, c_min);
  mn->add_option("--out", out, "snapshot of the final state");
  mn->add_option("--trace", trace, "trace CSV");
  mn->callback([&] { code = run_minimize(c_min, out, trace); });

  auto* rs = app.add_subcommand("residuals", "energy breakdown and DT residual norms");
  add_common(rs, c_res);
  rs->add_option("--in", in, "snapshot")->required();
  rs->callback([&] { code = run_residuals(c_res, in); });

  auto* er = app.add_subcommand("epsreg", "epsilon-regularity scan");
  add_common(er, c_eps);
  er->add_option("--in", in, "snapshot")->required();
  er->add_option("--centers", centers, "auto or a file of site coordinates");
  er->add_option("--radii", radii, "comma separated radii (default: lattice ladder)");
  er->add_option("--out", out, "report CSV")->required();
  er->callback([&] { code = run_epsreg(c_eps, in, centers, radii, out); });

  auto* mo = app.add_subcommand("monotonicity", "rho^-2 ball energy along a radius ladder");
  add_common(mo, c_mono);
  mo->add_option("--in", in, "snapshot")->required();
  mo->add_option("--center", center, "site as i0,...,i5 or 'max'");
  mo->add_option("--radii", radii, "comma separated radii (default: lattice ladder)");
  mo->add_option("--out", out, "report CSV");
  mo->callback([&] { code = run_monotonicity(c_mono, in, center, radii, out); });

  auto* lv = app.add_subcommand("liouville", "core/tail decomposition of sigma^-2 ball energy");
  add_common(lv, c_liou);
  lv->add_option("--in", in, "snapshot")->required();
  lv->add_option("--center", center, "site as i0,...,i5 or 'max'");
  lv->add_option("--rho", rho, "radius defining gamma");
  lv->add_option("--taus", taus, "comma separated tau grid")->required();
  lv->add_option("--sigmas", sigmas, "comma separated sigma grid")->required();
  lv->add_option("--out", out, "report CSV")->required();
  lv->callback([&] { code = run_liouville(c_liou, in, center, rho, taus, sigmas, out); });

  auto* cc = app.add_subcommand("concentrate", "concentration sets and atoms of a sequence");
  add_common(cc, c_conc);
  cc->add_option("--seq", seq, "comma separated snapshots")->required();
  cc->add_option("--limit", limit, "limit snapshot");
  cc->add_option("--epsilon", epsilon, "threshold (default: analysis.epsilon)");
  cc->add_option("--ladder", ladder, "comma separated radius ladder");
  cc->add_option("--out", out, "report text file")->required();
  cc->add_option("--sets", sets_out, "CSV of |T_{i,r}|");
  cc->callback([&] { code = run_concentrate(c_conc, seq, limit, epsilon, ladder, out, sets_out); });

  auto* bu = app.add_subcommand("blowup", "select a blow-up scale and rescale");
  add_common(bu, c_blow);
  bu->add_option("--in", in, "snapshot")->required();
  bu->add_option("--epsilon", epsilon, "threshold (default: analysis.epsilon)");
  bu->add_option("--out", out, "rescaled window snapshot");
  bu->callback([&] { code = run_blowup(c_blow, in, epsilon, out); });

  auto* sy = app.add_subcommand("synth", "synthetic ground-truth snapshots");
  sy->require_subcommand(1);
  int n = 8;
  double h = 1.0, width = 2.0, mass = 1.0, amplitude = 0.5, background = 0.0;
  bool field = false;
  std::string masses, widths, prefix = "seq_";
  auto* sb = sy->add_subcommand("bump", "one radial bump");
  sb->add_option("--n", n, "points per axis");
  sb->add_option("--spacing", h, "lattice spacing");
  sb->add_option("--center", center, "point x0,...,x5 (default: torus centre)");
  sb->add_option("--width", width, "support radius");
  sb->add_option("--mass", mass, "L^{3/2}-mass (density bump)");
  sb->add_flag("--field", field, "write a field configuration instead of a density");
  sb->add_option("--amplitude", amplitude, "field amplitude (with --field)");
  sb->add_option("--out", out, "snapshot")->required();
  sb->callback([&] {
    code = run_synth_bump(n, h, center == "max" ? std::string{} : center, width, mass, field, amplitude, out);
  });
  auto* ss = sy->add_subcommand("sequence", "shrinking bumps on a smooth background");
  ss->add_option("--n", n, "points per axis");
  ss->add_option("--spacing", h, "lattice spacing");
  ss->add_option("--centers", centers, "points separated by ';'")->required();
  ss->add_option("--masses", masses, "L^{3/2}-mass per bump")->required();
  ss->add_option("--widths", widths, "bump width per entry")->required();
  ss->add_option("--background", background, "background level");
  ss->add_option("--prefix", prefix, "output prefix");
  ss->callback([&] { code = run_synth_sequence(n, h, centers, masses, widths, background, prefix); });

  auto* ck = app.add_subcommand("check", "self checks");
  ck->require_subcommand(1);
  long samples = 100000;
  unsigned long long seed = 7;
  auto* ci = ck->add_subcommand("identities", "random trace-free matrix identity and inequality sweep");
  ci->add_option("--samples", samples, "number of random matrices");
  ci->add_option("--seed", seed, "RNG seed");
  ci->callback([&] { code = run_check_identities(samples, seed); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kInputError;
  } catch (const SnapshotError& e) {
    std::cerr << "snapshot error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return code;
}
