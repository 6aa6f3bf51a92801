#pragma once

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "dtil/energy.hpp"

namespace dtil {

struct EpsRegularityOptions {
  double epsilon = 1.0;     // hypothesis threshold on rho^-2 int_B L
  double epsilon_32 = 1.0;  // hypothesis threshold on int_B L^{3/2}
  double c1 = 1.0;          // constant tested in the rho^-2 bound
  double c2 = 1.0;          // constant tested in the L^{3/2} bound
};

struct EpsRegularityProbe {
  SiteIndex center;
  double radius = 0.0;
  double local_energy = 0.0;     // rho^-2 int_{B_rho} L
  double local_energy_32 = 0.0;  // int_{B_rho} L^{3/2}
  double center_density_sqrt = 0.0;
  double sup_density_sqrt = 0.0;  // max of sqrt(L) over the ball sites
  // sqrt(L(y)) rho^2 / (local quantity)^{1/2 resp. 1/3}; 0 when L(y) = 0
  double implied_c1 = 0.0;
  double implied_c2 = 0.0;
  bool hypothesis1 = false;
  bool bound1 = true;
  bool hypothesis2 = false;
  bool bound2 = true;
};

struct EpsRegularityReport {
  EpsRegularityOptions options;
  std::vector<EpsRegularityProbe> probes;
  double max_implied_c1 = 0.0;
  double max_implied_c2 = 0.0;
  std::optional<double> r1_norm;
  std::optional<double> r2_norm;

  /// Every probe that meets a hypothesis also meets the matching bound.
  bool all_pass() const;
  void write_csv(std::ostream& os) const;
};

EpsRegularityReport eps_regularity_scan(const DensityField& density, const std::vector<SiteIndex>& centers,
                                        const std::vector<double>& radii, const EpsRegularityOptions& opt = {});
/// Same, attaching the state's residual norms.
EpsRegularityReport eps_regularity_scan(const FieldState& state, const std::vector<SiteIndex>& centers,
                                        const std::vector<double>& radii, const EpsRegularityOptions& opt = {},
                                        double kappa = 1.0);

/// The site of largest density followed by every site whose coordinates
/// are multiples of `stride` (duplicates removed).
std::vector<SiteIndex> auto_centers(const DensityField& density, int stride);

/// Radii sqrt(k) h, k = 1..(n/2)^2, preceded by h / sqrt(2) (the centre site alone).
std::vector<double> lattice_radius_ladder(const LatticeSpec& spec);

struct MonotonicityReport {
  SiteIndex center;
  double spacing = 0.0;
  double c_tol = 5.0;
  std::vector<double> radii;
  std::vector<double> values;        // m(rho) from direct ball sums
  std::vector<double> shell_values;  // m(rho) from cumulative shell sums
  std::vector<std::pair<int, int>> violations;  // adjacent index pairs beyond tolerance
  int strict_decreases = 0;                      // adjacent decreases with zero tolerance
  double max_shell_discrepancy = 0.0;           // relative
  std::optional<double> r1_norm;
  std::optional<double> r2_norm;

  void write_csv(std::ostream& os) const;
};

/// m(rho) = rho^-2 int_{B_rho(center)} L on strictly increasing radii,
/// each at most the half period. A violation is m_{i+1} < m_i - c_tol (h/rho_i) m_i.
MonotonicityReport monotonicity_scan(const DensityField& density, const SiteIndex& center,
                                     const std::vector<double>& radii, double c_tol = 5.0);
MonotonicityReport monotonicity_scan(const FieldState& state, const SiteIndex& center,
                                     const std::vector<double>& radii, double c_tol = 5.0, double kappa = 1.0);

struct LiouvilleEntry {
  double tau = 0.0;
  double sigma = 0.0;
  double gamma_sigma = 0.0;  // sigma^-2 int_{B_sigma} L
  double core = 0.0;         // sigma^-2 int_{B_tau} L
  double shell = 0.0;        // sigma^-2 int_{B_sigma \ B_tau} L
  double tail_32 = 0.0;      // int over the complement of B_tau of L^{3/2}
  double z = 0.0;            // (|B_sigma|)^{1/3} / sigma^2
  double tail_term = 0.0;    // z * tail_32^{2/3}, bounds `shell` by Hoelder
  bool holds = true;         // gamma_sigma <= core + tail_term
  bool tail_dominates = false;
};

struct LiouvilleReport {
  SiteIndex center;
  double rho = 0.0;
  double gamma = 0.0;  // rho^-2 int_{B_rho} L
  std::vector<LiouvilleEntry> entries;  // all (tau, sigma) with tau <= sigma

  void write_csv(std::ostream& os) const;
};

LiouvilleReport liouville_diagnostic(const DensityField& density, const SiteIndex& center, double rho,
                                     const std::vector<double>& taus, const std::vector<double>& sigmas);

}  // namespace dtil
