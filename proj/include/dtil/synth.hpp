#pragma once

#include <vector>

#include "dtil/energy.hpp"

namespace dtil {

/// Radial bump (1 - (d/width)^2)^3 for d < width, scaled so that its
/// lattice L^{3/2}-mass h^6 sum f^{3/2} equals `mass`. Radially
/// decreasing around `center`. Throws if no site lies within `width`.
DensityField density_bump(const LatticeSpec& spec, const Point& center, double width, double mass);

DensityField constant_density(const LatticeSpec& spec, double value);

/// Positive smooth background level * (1 + 0.5 prod_k cos(2 pi x_k / L)).
DensityField smooth_background(const LatticeSpec& spec, double level);

struct PlantedBump {
  Point center{};
  double mass = 0.0;  // L^{3/2}-mass of the bump alone
};

/// Entry k is background + sum of bumps of width widths[k].
std::vector<DensityField> shrinking_sequence(const DensityField& background, const std::vector<PlantedBump>& bumps,
                                             const std::vector<double>& widths);

/// Smooth compactly supported field configuration:
/// A_mu = amplitude g T_mu, phi = amplitude g N, g = (1 - (d/width)^2)^4,
/// with fixed su(2) generators T_mu and nilpotent N.
FieldState field_bump(const LatticeSpec& spec, const Point& center, double width, double amplitude);

}  // namespace dtil
