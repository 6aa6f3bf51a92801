#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace dtil {

inline constexpr int kDim = 6;       // real dimension of the torus
inline constexpr int kComplexDim = 3;

/// Thrown when a geometric request falls outside the torus' valid range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

using Coords = std::array<int, kDim>;
using Point = std::array<double, kDim>;

/// Flat 6-torus with n sites per axis and spacing h. The complex
/// structure pairs real axes (2a, 2a+1) into z^a = x^{2a} + i x^{2a+1}.
struct LatticeSpec {
  int n_per_axis = 4;
  double spacing = 1.0;

  LatticeSpec() = default;
  LatticeSpec(int n, double h);

  std::size_t sites() const;
  double period() const { return n_per_axis * spacing; }
  double half_period() const { return 0.5 * period(); }
  double cell_volume() const;  // h^6
  double volume() const { return cell_volume() * static_cast<double>(sites()); }
  std::size_t stride(int axis) const;

  bool operator==(const LatticeSpec&) const = default;
};

/// Site coordinates modulo n; linear index increases lexicographically.
struct SiteIndex {
  Coords coords{};

  static SiteIndex from_linear(const LatticeSpec& spec, std::size_t idx);
  std::size_t linear(const LatticeSpec& spec) const;
  Point position(const LatticeSpec& spec) const;
  SiteIndex shifted(const LatticeSpec& spec, const Coords& by) const;

  bool operator==(const SiteIndex&) const = default;
};

/// Geodesic ball on the torus. Radii up to the half period are accepted;
/// radii of at least sqrt(6) half periods clamp to the whole torus.
struct Ball {
  Point center{};
  double radius = 0.0;

  static Ball at_site(const LatticeSpec& spec, const SiteIndex& s, double radius);
};

/// Minimal-image displacement x - y, each component in [-L/2, L/2].
Point minimal_image(const LatticeSpec& spec, const Point& x, const Point& y);
double minimal_image_distance2(const LatticeSpec& spec, const Point& x, const Point& y);

/// Throws DomainError for radius <= 0 or inside the forbidden band
/// (half period, sqrt(6) half period).
void validate_ball(const LatticeSpec& spec, const Ball& ball);
bool ball_covers_torus(const LatticeSpec& spec, const Ball& ball);

/// Sites within the ball (minimal image distance <= radius), sorted by
/// linear index, which is lexicographic order of coordinates.
std::vector<std::size_t> sites_in_ball(const LatticeSpec& spec, const Ball& ball);

/// h^6 * sum of density over sites_in_ball.
double ball_integral(const LatticeSpec& spec, std::span<const double> density, const Ball& ball);

/// Global integral h^6 * sum density.
double lattice_integral(const LatticeSpec& spec, std::span<const double> density);

/// Offsets of a site-centred ball, for repeated scans with a fixed radius.
class BallStencil {
 public:
  BallStencil(const LatticeSpec& spec, double radius);

  double radius() const { return radius_; }
  std::size_t size() const { return offsets_.size(); }
  const std::vector<Coords>& offsets() const { return offsets_; }
  const std::vector<double>& distances2() const { return dist2_; }

  /// h^6 * sum of density over the ball centred at `site`.
  double integrate(std::span<const double> density, std::size_t site) const;

  /// Ball integral at every site of the lattice.
  std::vector<double> integrate_everywhere(std::span<const double> density) const;

 private:
  LatticeSpec spec_;
  double radius_;
  std::vector<Coords> offsets_;
  std::vector<double> dist2_;
};

/// Cached nearest-neighbour table: entry [6*2*site + 2*axis + 0/1] is the
/// linear index of site -/+ e_axis.
class NeighborTable {
 public:
  static std::shared_ptr<const NeighborTable> get(const LatticeSpec& spec);

  std::uint32_t minus(std::size_t site, int axis) const { return table_[12 * site + 2 * axis]; }
  std::uint32_t plus(std::size_t site, int axis) const { return table_[12 * site + 2 * axis + 1]; }

  explicit NeighborTable(const LatticeSpec& spec);

 private:
  std::vector<std::uint32_t> table_;
};

}  // namespace dtil
