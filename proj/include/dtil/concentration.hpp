#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtil/energy.hpp"

namespace dtil {

/// Ordered snapshots on a common lattice. Entries may carry fields or
/// only an energy density (synthetic detector input); the density is
/// always present.
class StateSequence {
 public:
  struct Entry {
    std::optional<FieldState> state;
    DensityField density;
  };

  StateSequence() = default;
  explicit StateSequence(const LatticeSpec& spec) : spec_(spec) {}

  void add(const FieldState& state);
  void add(DensityField density);

  const LatticeSpec& spec() const { return spec_; }
  std::size_t size() const { return entries_.size(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }

 private:
  LatticeSpec spec_;
  std::vector<Entry> entries_;
};

/// r0, r0/2, ..., r0/2^(levels-1), returned in increasing order.
std::vector<double> dyadic_ladder(double r0, int levels);

struct ConcentrationSets {
  double epsilon = 0.0;
  std::vector<double> radii;                           // increasing
  std::vector<std::vector<std::vector<std::size_t>>> sets;  // [entry][radius] sorted sites

  void write_csv(std::ostream& os) const;
};

/// T_{i,r} = { y : int_{B_r(y)} L_i^{3/2} >= epsilon } for every entry and
/// radius. Throws std::invalid_argument on an empty ladder and
/// std::logic_error if a set fails to be nested in r.
ConcentrationSets concentration_sets(const StateSequence& seq, double epsilon, std::vector<double> radius_ladder);

struct AtomOptions {
  std::vector<double> radius_ladder;  // required
  double mass_radius = 0.0;           // ball for theta; 0 means the largest ladder radius
  std::size_t tail_start = 0;         // first entry of the tail; 0 means size()/2
};

struct Atom {
  Point position{};  // continuous location
  SiteIndex site;    // site of largest tail-mean mass in the cluster
  double theta = 0.0;
  double sequence_mass = 0.0;  // tail-mean ball mass
  double limit_mass = 0.0;     // same ball, limit density
  double drift = 0.0;          // largest distance of per-entry peaks from `site`
  std::size_t cluster_size = 0;
};

struct UnstableDetection {
  SiteIndex site;
  std::string reason;
};

struct ConcentrationReport {
  double epsilon = 0.0;
  std::vector<double> radii;
  double mass_radius = 0.0;
  std::size_t tail_start = 0;
  ConcentrationSets sets;
  std::vector<Atom> atoms;
  std::vector<Atom> rejected;  // theta < epsilon
  std::vector<UnstableDetection> unstable;
  double sequence_mass_liminf = 0.0;  // min over the tail of int L^{3/2}
  double limit_mass = 0.0;            // int of the limit L^{3/2}, if any
  std::vector<double> limit_density_32;  // the limit's L^{3/2}, if any
  bool count_bound_ok = true;         // atoms <= floor(liminf / epsilon)

  void write_text(std::ostream& os) const;
};

/// Intersects T_{i,r_min} over the tail, clusters the survivors by single
/// linkage (diameter at most 2 r_min) and assigns each cluster a mass.
ConcentrationReport extract_atoms(const StateSequence& seq, const std::optional<DensityField>& limit, double epsilon,
                                  const AtomOptions& opt);
ConcentrationReport extract_atoms(const StateSequence& seq, const std::optional<FieldState>& limit, double epsilon,
                                  const AtomOptions& opt);

/// Pullback by x = center + scale * x'. The window lattice has spacing
/// h / (refinement * scale) and n' = round(2 window_radius / h') points per
/// axis centred on `center`; fields are 6-linearly interpolated and
/// weighted A' = scale * A, phi' = scale^higgs_weight * phi.
struct RescaleOptions {
  double window_radius = 1.0;  // in rescaled units
  double refinement = 4.0;
  double higgs_weight = 1.0;
  int max_points_per_axis = 12;
};
FieldState blowup_rescale(const FieldState& state, const Point& center, double scale, const RescaleOptions& opt = {});

struct RescaleCheck {
  LatticeSpec window;
  double interior_radius = 0.0;  // rescaled units
  double window_mass = 0.0;      // int of L'^{3/2} over |x'| <= interior, from the rescaled fields
  double reference_mass = 0.0;   // the unscaled fields on the same refined points, over |x - center| <= scale * interior
  double relative_error = 0.0;
  double coarse_mass = 0.0;  // scale^6 * (interpolated coarse L)^{3/2} at the same points
  double coarse_relative_error = 0.0;
};
/// Compares the rescaled state's L^{3/2}-mass over the interior ball with
/// the unscaled state sampled at the same refined points (scale 1 window of
/// radius scale * window_radius). Also reports the coarse lattice density
/// carried to those points, which differs by the coarse discretization error.
RescaleCheck rescale_invariance(const FieldState& state, const Point& center, double scale, double interior_radius,
                                const RescaleOptions& opt = {});

/// 6-linear periodic interpolation of a site scalar at a point.
double interpolate(const LatticeSpec& spec, std::span<const double> values, const Point& x);

enum class BlowupStatus { found, no_concentration };

struct BlowupScale {
  BlowupStatus status = BlowupStatus::no_concentration;
  SiteIndex center;
  Point center_point{};
  double radius = 0.0;
  double window_mass = 0.0;  // soft-ball mass at (center, radius)
  double hard_mass = 0.0;    // plain ball sum at the same radius
  double sup_mass = 0.0;     // soft mass at the search radius
  int bisection_steps = 0;
};

/// Ball mass with a one-cell linear edge: sites at distance d get weight
/// clamp((rho - d)/h + 1/2, 0, 1) * min(1, 2 rho / h). Continuous and
/// non-decreasing in rho.
double soft_ball_mass(const LatticeSpec& spec, std::span<const double> values, const SiteIndex& center, double rho);

/// Picks the centre in the search ball maximizing the soft mass of
/// L^{3/2} and bisects rho until the mass is epsilon/2 (to 0.02 epsilon).
/// Returns no_concentration when the supremum at the search radius is
/// below 3 epsilon / 4.
BlowupScale select_blowup_scale(const DensityField& density, const Ball& search, double epsilon);
BlowupScale select_blowup_scale(const FieldState& state, const Ball& search, double epsilon);

const char* to_string(BlowupStatus s);

}  // namespace dtil
