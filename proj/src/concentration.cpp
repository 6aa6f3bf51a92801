#include "dtil/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "dtil/parallel.hpp"

namespace dtil {

void StateSequence::add(const FieldState& state) {
  if (!(state.spec() == spec_)) throw std::invalid_argument("sequence entries must share the lattice");
  entries_.push_back({state, density(state)});
}

void StateSequence::add(DensityField d) {
  if (!(d.spec == spec_)) throw std::invalid_argument("sequence entries must share the lattice");
  if (d.values.size() != spec_.sites()) throw std::invalid_argument("density size mismatch");
  entries_.push_back({std::nullopt, std::move(d)});
}

std::vector<double> dyadic_ladder(double r0, int levels) {
  if (!(r0 > 0.0) || levels <= 0) throw std::invalid_argument("dyadic ladder needs r0 > 0 and levels >= 1");
  std::vector<double> out;
  for (int k = levels - 1; k >= 0; --k) out.push_back(std::ldexp(r0, -k));
  return out;
}

namespace {

// offsets of the largest ball grouped by the first ladder radius that contains them
struct ShellStencil {
  std::vector<std::vector<Coords>> shells;

  ShellStencil(const LatticeSpec& spec, const std::vector<double>& radii) : shells(radii.size()) {
    const BallStencil outer(spec, radii.back());
    for (std::size_t k = 0; k < outer.size(); ++k) {
      std::size_t j = 0;
      while (j + 1 < radii.size() && outer.distances2()[k] > radii[j] * radii[j] * (1.0 + 1e-12)) ++j;
      shells[j].push_back(outer.offsets()[k]);
    }
  }
};

std::size_t shifted_index(const LatticeSpec& spec, const SiteIndex& s, const Coords& off) {
  const int n = spec.n_per_axis;
  std::size_t idx = 0;
  for (int k = 0; k < kDim; ++k) {
    int c = s.coords[k] + off[k];
    c %= n;
    if (c < 0) c += n;
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(c);
  }
  return idx;
}

// ball masses at every site for every radius; monotone in r by construction
// (each radius adds a non-negative shell to the previous one)
std::vector<std::vector<double>> ladder_masses(const LatticeSpec& spec, std::span<const double> d32,
                                               const std::vector<double>& radii) {
  const ShellStencil st(spec, radii);
  const std::size_t N = spec.sites();
  const double hv = spec.cell_volume();
  std::vector<std::vector<double>> out(radii.size(), std::vector<double>(N, 0.0));
  parallel::parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const SiteIndex s = SiteIndex::from_linear(spec, i);
      double acc = 0.0;
      for (std::size_t j = 0; j < radii.size(); ++j) {
        double shell = 0.0;
        for (const auto& off : st.shells[j]) shell += d32[shifted_index(spec, s, off)];
        acc += hv * shell;
        out[j][i] = acc;
      }
    }
  });
  return out;
}

std::vector<double> sorted_ladder(std::vector<double> radii, const LatticeSpec& spec) {
  if (radii.empty()) throw std::invalid_argument("radius ladder is empty");
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  for (double r : radii) validate_ball(spec, Ball{Point{}, r});
  return radii;
}

double site_distance(const LatticeSpec& spec, std::size_t a, std::size_t b) {
  return std::sqrt(minimal_image_distance2(spec, SiteIndex::from_linear(spec, a).position(spec),
                                           SiteIndex::from_linear(spec, b).position(spec)));
}

// greedy single linkage in site order; a site joins the first cluster that
// has a member within `link` and stays within `cap` of every member
std::vector<std::vector<std::size_t>> cluster_sites(const LatticeSpec& spec, const std::vector<std::size_t>& sites,
                                                    double link, double cap) {
  std::vector<std::vector<std::size_t>> clusters;
  const double tol = 1e-9 * spec.spacing;
  for (std::size_t s : sites) {
    bool placed = false;
    for (auto& c : clusters) {
      bool linked = false, within = true;
      for (std::size_t m : c) {
        const double d = site_distance(spec, s, m);
        linked = linked || d <= link + tol;
        within = within && d <= cap + tol;
      }
      if (linked && within) {
        c.push_back(s);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({s});
  }
  return clusters;
}

}  // namespace

ConcentrationSets concentration_sets(const StateSequence& seq, double epsilon, std::vector<double> radius_ladder) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const LatticeSpec& spec = seq.spec();
  ConcentrationSets out;
  out.epsilon = epsilon;
  out.radii = sorted_ladder(std::move(radius_ladder), spec);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto d32 = seq[i].density.power(1.5);
    const auto masses = ladder_masses(spec, d32, out.radii);
    std::vector<std::vector<std::size_t>> per_r(out.radii.size());
    for (std::size_t j = 0; j < out.radii.size(); ++j)
      for (std::size_t s = 0; s < spec.sites(); ++s)
        if (masses[j][s] >= epsilon) per_r[j].push_back(s);
    for (std::size_t j = 1; j < per_r.size(); ++j)
      if (!std::includes(per_r[j].begin(), per_r[j].end(), per_r[j - 1].begin(), per_r[j - 1].end()))
        throw std::logic_error("concentration sets are not nested in r");
    out.sets.push_back(std::move(per_r));
  }
  return out;
}

void ConcentrationSets::write_csv(std::ostream& os) const {
  os << "entry,r,count\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = 0; j < radii.size(); ++j) os << i << ',' << radii[j] << ',' << sets[i][j].size() << '\n';
}

ConcentrationReport extract_atoms(const StateSequence& seq, const std::optional<DensityField>& limit, double epsilon,
                                  const AtomOptions& opt) {
  if (seq.size() < 2) throw std::invalid_argument("extract_atoms needs at least two entries");
  const LatticeSpec& spec = seq.spec();
  if (limit && !(limit->spec == spec)) throw std::invalid_argument("limit lives on a different lattice");
  ConcentrationReport rep;
  rep.epsilon = epsilon;
  rep.sets = concentration_sets(seq, epsilon, opt.radius_ladder);
  rep.radii = rep.sets.radii;
  rep.mass_radius = opt.mass_radius > 0.0 ? opt.mass_radius : rep.radii.back();
  validate_ball(spec, Ball{Point{}, rep.mass_radius});
  rep.tail_start = opt.tail_start > 0 ? opt.tail_start : seq.size() / 2;
  if (rep.tail_start >= seq.size()) throw std::invalid_argument("tail_start beyond the sequence");
  const double r_min = rep.radii.front();
  const double cap = 2.0 * r_min;
  const std::size_t N = spec.sites();

  // tail data: L^{3/2} and r_min ball masses per entry
  std::vector<std::vector<double>> d32, m_min;
  rep.sequence_mass_liminf = std::numeric_limits<double>::infinity();
  for (std::size_t i = rep.tail_start; i < seq.size(); ++i) {
    d32.push_back(seq[i].density.power(1.5));
    m_min.push_back(BallStencil(spec, r_min).integrate_everywhere(d32.back()));
    rep.sequence_mass_liminf = std::min(rep.sequence_mass_liminf, lattice_integral(spec, d32.back()));
  }
  const std::size_t tail = d32.size();
  std::vector<double> mean32(N, 0.0), mean_min(N, 0.0);
  for (std::size_t k = 0; k < tail; ++k)
    for (std::size_t s = 0; s < N; ++s) {
      mean32[s] += d32[k][s] / static_cast<double>(tail);
      mean_min[s] += m_min[k][s] / static_cast<double>(tail);
    }
  std::vector<double> limit32;
  if (limit) {
    limit32 = limit->power(1.5);
    rep.limit_mass = lattice_integral(spec, limit32);
    rep.limit_density_32 = limit32;
  }

  // T = intersection over the tail of T_{i, r_min}; U = union
  std::vector<std::size_t> inter = rep.sets.sets[rep.tail_start][0], uni = inter;
  for (std::size_t i = rep.tail_start + 1; i < seq.size(); ++i) {
    const auto& t = rep.sets.sets[i][0];
    std::vector<std::size_t> a, b;
    std::set_intersection(inter.begin(), inter.end(), t.begin(), t.end(), std::back_inserter(a));
    std::set_union(uni.begin(), uni.end(), t.begin(), t.end(), std::back_inserter(b));
    inter.swap(a);
    uni.swap(b);
  }

  const BallStencil core(spec, r_min);
  const BallStencil mass_ball(spec, rep.mass_radius);
  const double search_r = std::min(2.0 * cap, spec.half_period());
  const BallStencil search(spec, search_r);
  for (const auto& cluster : cluster_sites(spec, inter, cap, cap)) {
    Atom atom;
    atom.cluster_size = cluster.size();
    std::size_t anchor = cluster.front();
    // ties in ball mass go to the denser site
    for (std::size_t s : cluster)
      if (mean_min[s] > mean_min[anchor] || (mean_min[s] == mean_min[anchor] && mean32[s] > mean32[anchor])) anchor = s;
    atom.site = SiteIndex::from_linear(spec, anchor);

    // centroid of the tail-mean L^{3/2} over B_{r_min}(anchor)
    const Point base = atom.site.position(spec);
    double wsum = 0.0;
    Point shift{};
    for (const auto& off : core.offsets()) {
      const double w = mean32[atom.site.shifted(spec, off).linear(spec)];
      wsum += w;
      for (int k = 0; k < kDim; ++k) shift[k] += w * off[k] * spec.spacing;
    }
    for (int k = 0; k < kDim; ++k) {
      double x = base[k] + (wsum > 0.0 ? shift[k] / wsum : 0.0);
      x = std::fmod(x, spec.period());
      if (x < 0.0) x += spec.period();
      atom.position[k] = x;
    }

    for (std::size_t k = 0; k < tail; ++k) {
      std::size_t peak = anchor;
      for (const auto& off : search.offsets()) {
        const std::size_t s = atom.site.shifted(spec, off).linear(spec);
        if (m_min[k][s] > m_min[k][peak]) peak = s;
      }
      atom.drift = std::max(atom.drift, site_distance(spec, peak, anchor));
      atom.sequence_mass += mass_ball.integrate(d32[k], anchor) / static_cast<double>(tail);
    }
    if (limit) atom.limit_mass = mass_ball.integrate(limit32, anchor);
    atom.theta = atom.sequence_mass - atom.limit_mass;

    if (atom.drift > cap + 1e-9 * spec.spacing) {
      rep.unstable.push_back({atom.site, "peak drifts " + std::to_string(atom.drift) + " across the tail"});
      continue;
    }
    if (atom.theta >= epsilon)
      rep.atoms.push_back(atom);
    else
      rep.rejected.push_back(atom);
  }

  // detections that do not persist through the whole tail
  std::vector<std::size_t> transient;
  for (std::size_t s : uni) {
    bool near = false;
    for (std::size_t t : inter) near = near || site_distance(spec, s, t) <= cap + 1e-9 * spec.spacing;
    if (!near) transient.push_back(s);
  }
  for (const auto& cluster : cluster_sites(spec, transient, cap, cap))
    rep.unstable.push_back({SiteIndex::from_linear(spec, cluster.front()), "not detected in every tail entry"});

  const double bound = std::floor(rep.sequence_mass_liminf / epsilon);
  rep.count_bound_ok = static_cast<double>(rep.atoms.size()) <= bound;
  return rep;
}

ConcentrationReport extract_atoms(const StateSequence& seq, const std::optional<FieldState>& limit, double epsilon,
                                  const AtomOptions& opt) {
  std::optional<DensityField> d;
  if (limit) d = density(*limit);
  return extract_atoms(seq, d, epsilon, opt);
}

void ConcentrationReport::write_text(std::ostream& os) const {
  os << std::setprecision(17);
  os << "epsilon: " << epsilon << '\n';
  os << "radii:";
  for (double r : radii) os << ' ' << r;
  os << '\n';
  os << "mass_radius: " << mass_radius << '\n';
  os << "tail_start: " << tail_start << '\n';
  os << "sequence_mass_liminf: " << sequence_mass_liminf << '\n';
  os << "limit_mass: " << limit_mass << '\n';
  os << "atom_count: " << atoms.size() << '\n';
  os << "count_bound_ok: " << (count_bound_ok ? "true" : "false") << '\n';
  auto block = [&os](const char* kind, const Atom& a) {
    os << '\n' << "[" << kind << "]\n";
    os << "position:";
    for (double x : a.position) os << ' ' << x;
    os << '\n' << "site:";
    for (int c : a.site.coords) os << ' ' << c;
    os << '\n';
    os << "theta: " << a.theta << '\n';
    os << "sequence_mass: " << a.sequence_mass << '\n';
    os << "limit_mass: " << a.limit_mass << '\n';
    os << "drift: " << a.drift << '\n';
    os << "cluster_size: " << a.cluster_size << '\n';
  };
  for (const auto& a : atoms) block("atom", a);
  for (const auto& a : rejected) block("rejected", a);
  for (const auto& u : unstable) {
    os << '\n' << "[unstable]\n" << "site:";
    for (int c : u.site.coords) os << ' ' << c;
    os << '\n' << "reason: " << u.reason << '\n';
  }
}

namespace {

struct Corners {
  std::array<std::size_t, 64> index{};
  std::array<double, 64> weight{};
};

Corners corners(const LatticeSpec& spec, const Point& x) {
  const int n = spec.n_per_axis;
  std::array<int, kDim> lo{};
  std::array<double, kDim> frac{};
  for (int k = 0; k < kDim; ++k) {
    const double u = x[k] / spec.spacing;
    const double f = std::floor(u);
    frac[k] = u - f;
    int c = static_cast<int>(f) % n;
    if (c < 0) c += n;
    lo[k] = c;
  }
  Corners out;
  for (int m = 0; m < 64; ++m) {
    std::size_t idx = 0;
    double w = 1.0;
    for (int k = 0; k < kDim; ++k) {
      const int bit = (m >> (kDim - 1 - k)) & 1;
      const int c = bit ? (lo[k] + 1) % n : lo[k];
      idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(c);
      w *= bit ? frac[k] : 1.0 - frac[k];
    }
    out.index[m] = idx;
    out.weight[m] = w;
  }
  return out;
}

struct Window {
  LatticeSpec spec;
  double h_rescaled;
  std::vector<Point> offsets_rescaled;  // x' for every window site
};

Window make_window(const LatticeSpec& spec, double scale, const RescaleOptions& opt) {
  if (!(scale > 0.0 && scale <= 1.0)) throw std::invalid_argument("scale must lie in (0, 1]");
  if (!(opt.refinement > 0.0) || !(opt.window_radius > 0.0)) throw std::invalid_argument("bad window options");
  if (opt.window_radius * scale > spec.half_period() * (1.0 + 1e-12))
    throw DomainError("rescaled window exceeds the half period");
  const double hp = spec.spacing / (opt.refinement * scale);
  const int n = std::max(4, static_cast<int>(std::lround(2.0 * opt.window_radius / hp)));
  if (n > opt.max_points_per_axis)
    throw std::invalid_argument("window needs " + std::to_string(n) + " points per axis (limit " +
                                std::to_string(opt.max_points_per_axis) + ")");
  Window w{LatticeSpec(n, hp), hp, {}};
  w.offsets_rescaled.resize(w.spec.sites());
  for (std::size_t i = 0; i < w.spec.sites(); ++i) {
    const SiteIndex s = SiteIndex::from_linear(w.spec, i);
    for (int k = 0; k < kDim; ++k) w.offsets_rescaled[i][k] = (s.coords[k] - n / 2) * hp;
  }
  return w;
}

Point image(const Point& center, double scale, const Point& xp) {
  Point x{};
  for (int k = 0; k < kDim; ++k) x[k] = center[k] + scale * xp[k];
  return x;
}

}  // namespace

double interpolate(const LatticeSpec& spec, std::span<const double> values, const Point& x) {
  if (values.size() != spec.sites()) throw std::invalid_argument("value size mismatch");
  const Corners c = corners(spec, x);
  double s = 0.0;
  for (int m = 0; m < 64; ++m) s += c.weight[m] * values[c.index[m]];
  return s;
}

FieldState blowup_rescale(const FieldState& state, const Point& center, double scale, const RescaleOptions& opt) {
  const LatticeSpec& spec = state.spec();
  const Window w = make_window(spec, scale, opt);
  FieldState out(w.spec);
  const double wphi = std::pow(scale, opt.higgs_weight);
  parallel::parallel_for(w.spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Corners c = corners(spec, image(center, scale, w.offsets_rescaled[i]));
      std::array<Mat2, kDim> a{};
      Mat2 p;
      for (int m = 0; m < 64; ++m) {
        if (c.weight[m] == 0.0) continue;
        for (int mu = 0; mu < kDim; ++mu) a[mu] += state.connection.at(c.index[m], mu) * c.weight[m];
        p += state.higgs.at(c.index[m], 0) * c.weight[m];
      }
      for (int mu = 0; mu < kDim; ++mu) out.connection.at(i, mu) = project_su2(a[mu] * scale);
      out.higgs.at(i, 0) = project_traceless(p * wphi);
    }
  });
  return out;
}

RescaleCheck rescale_invariance(const FieldState& state, const Point& center, double scale, double interior_radius,
                                const RescaleOptions& opt) {
  const Window w = make_window(state.spec(), scale, opt);
  if (!(interior_radius > 0.0) || interior_radius > opt.window_radius)
    throw std::invalid_argument("interior radius must lie in (0, window_radius]");
  RescaleOptions unit = opt;
  unit.window_radius = opt.window_radius * scale;
  const DensityField fine = density(blowup_rescale(state, center, scale, opt));
  const DensityField plain = density(blowup_rescale(state, center, 1.0, unit));
  if (!(plain.spec.n_per_axis == w.spec.n_per_axis)) throw std::logic_error("window size mismatch");
  const DensityField coarse = density(state);
  RescaleCheck out;
  out.window = w.spec;
  out.interior_radius = interior_radius;
  const double r2 = interior_radius * interior_radius * (1.0 + 1e-12);
  const double s4 = std::pow(scale, 4);
  double win = 0.0, ref = 0.0, crs = 0.0;
  for (std::size_t i = 0; i < w.spec.sites(); ++i) {
    double d2 = 0.0;
    for (double v : w.offsets_rescaled[i]) d2 += v * v;
    if (d2 > r2) continue;
    win += std::pow(std::max(0.0, fine.values[i]), 1.5);
    ref += std::pow(std::max(0.0, plain.values[i]), 1.5);
    const double l = interpolate(coarse.spec, coarse.values, image(center, scale, w.offsets_rescaled[i]));
    crs += std::pow(std::max(0.0, s4 * l), 1.5);
  }
  auto relative = [](double a, double b) { return b > 0.0 ? std::abs(a - b) / b : std::abs(a); };
  out.window_mass = w.spec.cell_volume() * win;
  // dV = scale^6 dV' on the unscaled window
  out.reference_mass = plain.spec.cell_volume() * ref;
  out.coarse_mass = w.spec.cell_volume() * crs;
  out.relative_error = relative(out.window_mass, out.reference_mass);
  out.coarse_relative_error = relative(out.window_mass, out.coarse_mass);
  return out;
}

const char* to_string(BlowupStatus s) {
  return s == BlowupStatus::found ? "found" : "no_concentration";
}

namespace {

struct SoftStencil {
  std::vector<Coords> offsets;
  std::vector<double> dist;
  SoftStencil(const LatticeSpec& spec, double reach) {
    const BallStencil b(spec, reach);
    offsets = b.offsets();
    for (double d2 : b.distances2()) dist.push_back(std::sqrt(d2));
  }
};

double soft_weight(double d, double rho, double h) {
  return std::clamp((rho - d) / h + 0.5, 0.0, 1.0) * std::min(1.0, 2.0 * rho / h);
}

double soft_mass(const LatticeSpec& spec, std::span<const double> values, const SoftStencil& st,
                 const SiteIndex& center, double rho) {
  const double h = spec.spacing;
  double s = 0.0;
  for (std::size_t k = 0; k < st.offsets.size(); ++k) {
    const double w = soft_weight(st.dist[k], rho, h);
    if (w > 0.0) s += w * values[shifted_index(spec, center, st.offsets[k])];
  }
  return spec.cell_volume() * s;
}

}  // namespace

double soft_ball_mass(const LatticeSpec& spec, std::span<const double> values, const SiteIndex& center, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("rho must be non-negative");
  if (rho == 0.0) return 0.0;
  const double reach = rho + 0.5 * spec.spacing;
  if (reach > spec.half_period() * (1.0 + 1e-12)) throw DomainError("soft ball reaches past the half period");
  return soft_mass(spec, values, SoftStencil(spec, reach), center, rho);
}

BlowupScale select_blowup_scale(const DensityField& density, const Ball& search, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const LatticeSpec& spec = density.spec;
  const double rho_max = std::min(search.radius, spec.half_period() - 0.5 * spec.spacing);
  if (!(rho_max > 0.0)) throw DomainError("search radius too small");
  const std::vector<double> d32 = density.power(1.5);
  const SoftStencil st(spec, rho_max + 0.5 * spec.spacing);
  std::vector<std::size_t> centers = sites_in_ball(spec, search);

  auto sup = [&](double rho, std::size_t* arg) {
    std::vector<double> m(centers.size());
    parallel::parallel_for(centers.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) m[k] = soft_mass(spec, d32, st, SiteIndex::from_linear(spec, centers[k]), rho);
    });
    std::size_t best = 0;
    for (std::size_t k = 1; k < m.size(); ++k)
      if (m[k] > m[best]) best = k;
    if (arg) *arg = centers[best];
    return m.empty() ? 0.0 : m[best];
  };

  BlowupScale out;
  std::size_t arg = 0;
  out.sup_mass = sup(rho_max, &arg);
  if (out.sup_mass < 0.75 * epsilon) return out;

  const double target = 0.5 * epsilon;
  double lo = 0.0, hi = rho_max, rho = rho_max, mass = out.sup_mass;
  for (int it = 0; it < 200; ++it) {
    rho = 0.5 * (lo + hi);
    mass = sup(rho, &arg);
    ++out.bisection_steps;
    if (std::abs(mass - target) <= 1e-3 * epsilon) break;
    if (mass < target) lo = rho; else hi = rho;
  }
  out.status = BlowupStatus::found;
  out.center = SiteIndex::from_linear(spec, arg);
  out.center_point = out.center.position(spec);
  out.radius = rho;
  out.window_mass = mass;
  out.hard_mass = BallStencil(spec, std::min(rho, spec.half_period())).integrate(d32, arg);
  return out;
}

BlowupScale select_blowup_scale(const FieldState& state, const Ball& search, double epsilon) {
  return select_blowup_scale(density(state), search, epsilon);
}

}  // namespace dtil
