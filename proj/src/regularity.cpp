#include "dtil/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <stdexcept>

#include "dtil/parallel.hpp"

namespace dtil {

namespace {

void check_radii(const LatticeSpec& spec, const std::vector<double>& radii, bool increasing) {
  if (radii.empty()) throw std::invalid_argument("radius list is empty");
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (!(radii[k] > 0.0) || !std::isfinite(radii[k])) throw DomainError("radii must be positive");
    if (radii[k] > spec.half_period() * (1.0 + 1e-12))
      throw DomainError("radius " + std::to_string(radii[k]) + " exceeds half period");
    if (increasing && k > 0 && !(radii[k] > radii[k - 1])) throw DomainError("radii must be strictly increasing");
  }
}

void write_site(std::ostream& os, const SiteIndex& s) {
  for (int k = 0; k < kDim; ++k) os << (k ? " " : "") << s.coords[k];
}

}  // namespace

bool EpsRegularityReport::all_pass() const {
  return std::all_of(probes.begin(), probes.end(), [](const EpsRegularityProbe& p) {
    return (!p.hypothesis1 || p.bound1) && (!p.hypothesis2 || p.bound2);
  });
}

void EpsRegularityReport::write_csv(std::ostream& os) const {
  os << "center,radius,local_energy,local_energy_32,center_density_sqrt,sup_density_sqrt,implied_c1,implied_c2,"
        "hypothesis1,bound1,hypothesis2,bound2\n";
  os << std::setprecision(17);
  for (const auto& p : probes) {
    write_site(os, p.center);
    os << ',' << p.radius << ',' << p.local_energy << ',' << p.local_energy_32 << ',' << p.center_density_sqrt << ','
       << p.sup_density_sqrt << ',' << p.implied_c1 << ',' << p.implied_c2 << ',' << p.hypothesis1 << ',' << p.bound1
       << ',' << p.hypothesis2 << ',' << p.bound2 << '\n';
  }
}

EpsRegularityReport eps_regularity_scan(const DensityField& density, const std::vector<SiteIndex>& centers,
                                        const std::vector<double>& radii, const EpsRegularityOptions& opt) {
  const LatticeSpec& spec = density.spec;
  check_radii(spec, radii, false);
  EpsRegularityReport rep;
  rep.options = opt;
  const std::vector<double> d32 = density.power(1.5);
  std::vector<double> root(density.values.size());
  for (std::size_t i = 0; i < root.size(); ++i) root[i] = std::sqrt(std::max(0.0, density.values[i]));

  for (double r : radii) {
    const BallStencil stencil(spec, r);
    std::vector<EpsRegularityProbe> row(centers.size());
    parallel::parallel_for(centers.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) {
        EpsRegularityProbe& p = row[k];
        p.center = centers[k];
        p.radius = r;
        const std::size_t site = centers[k].linear(spec);
        p.local_energy = stencil.integrate(density.values, site) / (r * r);
        p.local_energy_32 = stencil.integrate(d32, site);
        p.center_density_sqrt = root[site];
        for (const auto& off : stencil.offsets())
          p.sup_density_sqrt = std::max(p.sup_density_sqrt, root[centers[k].shifted(spec, off).linear(spec)]);
        const double r2 = r * r;
        if (p.center_density_sqrt > 0.0) {
          p.implied_c1 = p.center_density_sqrt * r2 / std::sqrt(p.local_energy);
          p.implied_c2 = p.center_density_sqrt * r2 / std::cbrt(p.local_energy_32);
        }
        p.hypothesis1 = p.local_energy <= opt.epsilon;
        p.bound1 = p.center_density_sqrt <= opt.c1 / r2 * std::sqrt(p.local_energy);
        p.hypothesis2 = p.local_energy_32 <= opt.epsilon_32;
        p.bound2 = p.center_density_sqrt <= opt.c2 / r2 * std::cbrt(p.local_energy_32);
      }
    });
    for (const auto& p : row) {
      rep.max_implied_c1 = std::max(rep.max_implied_c1, p.implied_c1);
      rep.max_implied_c2 = std::max(rep.max_implied_c2, p.implied_c2);
      rep.probes.push_back(p);
    }
  }
  return rep;
}

EpsRegularityReport eps_regularity_scan(const FieldState& state, const std::vector<SiteIndex>& centers,
                                        const std::vector<double>& radii, const EpsRegularityOptions& opt,
                                        double kappa) {
  const Evaluation ev = evaluate(state, false);
  EpsRegularityReport rep = eps_regularity_scan(ev.density, centers, radii, opt);
  const ResidualPair res = dt_residuals(state, ev.curvature, kappa);
  rep.r1_norm = res.r1_norm;
  rep.r2_norm = res.r2_norm;
  return rep;
}

std::vector<SiteIndex> auto_centers(const DensityField& density, int stride) {
  const LatticeSpec& spec = density.spec;
  if (stride <= 0) throw std::invalid_argument("stride must be positive");
  std::vector<SiteIndex> out;
  std::set<std::size_t> seen;
  const auto it = std::max_element(density.values.begin(), density.values.end());
  const std::size_t top = it == density.values.end() ? 0 : static_cast<std::size_t>(it - density.values.begin());
  out.push_back(SiteIndex::from_linear(spec, top));
  seen.insert(top);
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    const SiteIndex s = SiteIndex::from_linear(spec, i);
    bool on_grid = true;
    for (int c : s.coords) on_grid = on_grid && c % stride == 0;
    if (on_grid && seen.insert(i).second) out.push_back(s);
  }
  return out;
}

std::vector<double> lattice_radius_ladder(const LatticeSpec& spec) {
  const double h = spec.spacing;
  std::vector<double> out{h / std::sqrt(2.0)};
  const int half = spec.n_per_axis / 2;
  for (int k = 1; k <= half * half; ++k) out.push_back(h * std::sqrt(static_cast<double>(k)));
  return out;
}

void MonotonicityReport::write_csv(std::ostream& os) const {
  os << "radius,m,m_shell,violation\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    bool v = false;
    for (const auto& [a, b] : violations) v = v || b == static_cast<int>(k);
    os << radii[k] << ',' << values[k] << ',' << shell_values[k] << ',' << v << '\n';
  }
}

MonotonicityReport monotonicity_scan(const DensityField& density, const SiteIndex& center,
                                     const std::vector<double>& radii, double c_tol) {
  const LatticeSpec& spec = density.spec;
  check_radii(spec, radii, true);
  if (!(c_tol >= 0.0)) throw std::invalid_argument("c_tol must be non-negative");
  MonotonicityReport rep;
  rep.center = center;
  rep.spacing = spec.spacing;
  rep.c_tol = c_tol;
  rep.radii = radii;
  const std::size_t site = center.linear(spec);
  for (double r : radii) rep.values.push_back(BallStencil(spec, r).integrate(density.values, site) / (r * r));

  // cumulative shells from the largest stencil, visited in its fixed offset order
  const BallStencil outer(spec, radii.back());
  std::vector<double> shells(radii.size(), 0.0);
  for (std::size_t k = 0; k < outer.size(); ++k) {
    const double d2 = outer.distances2()[k];
    std::size_t j = 0;
    while (j + 1 < radii.size() && d2 > radii[j] * radii[j] * (1.0 + 1e-12)) ++j;
    shells[j] += density.values[center.shifted(spec, outer.offsets()[k]).linear(spec)];
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < radii.size(); ++j) {
    acc += shells[j];
    rep.shell_values.push_back(spec.cell_volume() * acc / (radii[j] * radii[j]));
    const double scale = std::max(std::abs(rep.values[j]), std::abs(rep.shell_values[j]));
    if (scale > 0.0)
      rep.max_shell_discrepancy =
          std::max(rep.max_shell_discrepancy, std::abs(rep.values[j] - rep.shell_values[j]) / scale);
  }

  for (std::size_t j = 0; j + 1 < radii.size(); ++j) {
    const double m = rep.values[j];
    const double next = rep.values[j + 1];
    if (next < m) ++rep.strict_decreases;
    if (next < m - c_tol * (spec.spacing / radii[j]) * m)
      rep.violations.emplace_back(static_cast<int>(j), static_cast<int>(j + 1));
  }
  return rep;
}

MonotonicityReport monotonicity_scan(const FieldState& state, const SiteIndex& center,
                                     const std::vector<double>& radii, double c_tol, double kappa) {
  const Evaluation ev = evaluate(state, false);
  MonotonicityReport rep = monotonicity_scan(ev.density, center, radii, c_tol);
  const ResidualPair res = dt_residuals(state, ev.curvature, kappa);
  rep.r1_norm = res.r1_norm;
  rep.r2_norm = res.r2_norm;
  return rep;
}

void LiouvilleReport::write_csv(std::ostream& os) const {
  os << "tau,sigma,gamma_sigma,core,shell,tail_32,z,tail_term,holds,tail_dominates\n";
  os << std::setprecision(17);
  for (const auto& e : entries)
    os << e.tau << ',' << e.sigma << ',' << e.gamma_sigma << ',' << e.core << ',' << e.shell << ',' << e.tail_32
       << ',' << e.z << ',' << e.tail_term << ',' << e.holds << ',' << e.tail_dominates << '\n';
}

LiouvilleReport liouville_diagnostic(const DensityField& density, const SiteIndex& center, double rho,
                                     const std::vector<double>& taus, const std::vector<double>& sigmas) {
  const LatticeSpec& spec = density.spec;
  check_radii(spec, {rho}, false);
  check_radii(spec, taus, false);
  check_radii(spec, sigmas, false);
  const std::size_t site = center.linear(spec);
  const std::vector<double> d32 = density.power(1.5);
  const double total32 = lattice_integral(spec, d32);

  LiouvilleReport rep;
  rep.center = center;
  rep.rho = rho;
  rep.gamma = BallStencil(spec, rho).integrate(density.values, site) / (rho * rho);
  for (double tau : taus) {
    const BallStencil bt(spec, tau);
    const double in_tau = bt.integrate(density.values, site);
    const double tail32 = std::max(0.0, total32 - bt.integrate(d32, site));
    for (double sigma : sigmas) {
      if (tau > sigma) continue;
      const BallStencil bs(spec, sigma);
      LiouvilleEntry e;
      e.tau = tau;
      e.sigma = sigma;
      const double s2 = sigma * sigma;
      e.gamma_sigma = bs.integrate(density.values, site) / s2;
      e.core = in_tau / s2;
      e.shell = e.gamma_sigma - e.core;
      e.tail_32 = tail32;
      e.z = std::cbrt(spec.cell_volume() * static_cast<double>(bs.size())) / s2;
      e.tail_term = e.z * std::pow(tail32, 2.0 / 3.0);
      e.holds = e.gamma_sigma <= (e.core + e.tail_term) * (1.0 + 1e-12) + 1e-300;
      e.tail_dominates = e.tail_term > e.core;
      rep.entries.push_back(e);
    }
  }
  return rep;
}

}  // namespace dtil
