#include "dtil/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dtil {

DensityField density_bump(const LatticeSpec& spec, const Point& center, double width, double mass) {
  if (!(width > 0.0) || width > spec.half_period()) throw DomainError("bump width must lie in (0, half period]");
  if (!(mass >= 0.0)) throw std::invalid_argument("bump mass must be non-negative");
  DensityField f(spec);
  double raw = 0.0;
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    const double d = std::sqrt(minimal_image_distance2(spec, SiteIndex::from_linear(spec, i).position(spec), center));
    if (d >= width) continue;
    const double s = d / width;
    const double g = std::pow(1.0 - s * s, 3);
    f.values[i] = g;
    raw += std::pow(g, 1.5);
  }
  if (raw == 0.0) throw std::invalid_argument("bump narrower than the lattice near its centre");
  // f -> c f scales the 3/2-mass by c^{3/2}
  const double c = std::pow(mass / (spec.cell_volume() * raw), 2.0 / 3.0);
  for (auto& v : f.values) v *= c;
  return f;
}

DensityField constant_density(const LatticeSpec& spec, double value) {
  DensityField f(spec);
  for (auto& v : f.values) v = value;
  return f;
}

DensityField smooth_background(const LatticeSpec& spec, double level) {
  DensityField f(spec);
  const double L = spec.period();
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    const Point x = SiteIndex::from_linear(spec, i).position(spec);
    double p = 1.0;
    for (double xk : x) p *= std::cos(2.0 * std::numbers::pi * xk / L);
    f.values[i] = level * (1.0 + 0.5 * p);
  }
  return f;
}

std::vector<DensityField> shrinking_sequence(const DensityField& background, const std::vector<PlantedBump>& bumps,
                                             const std::vector<double>& widths) {
  std::vector<DensityField> out;
  for (double w : widths) {
    DensityField f = background;
    for (const auto& b : bumps) {
      const DensityField one = density_bump(background.spec, b.center, w, b.mass);
      for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += one.values[i];
    }
    out.push_back(std::move(f));
  }
  return out;
}

FieldState field_bump(const LatticeSpec& spec, const Point& center, double width, double amplitude) {
  if (!(width > 0.0) || width > spec.half_period()) throw DomainError("bump width must lie in (0, half period]");
  const cplx i{0.0, 1.0};
  // i sigma_1, i sigma_2, i sigma_3 cycled over the six directions
  const std::array<Mat2, 3> gen = {Mat2(0.0, i, i, 0.0), Mat2(0.0, 1.0, -1.0, 0.0), Mat2(i, 0.0, 0.0, -i)};
  const Mat2 nil(0.0, 1.0, 0.0, 0.0);
  FieldState st(spec);
  for (std::size_t k = 0; k < spec.sites(); ++k) {
    const double d = std::sqrt(minimal_image_distance2(spec, SiteIndex::from_linear(spec, k).position(spec), center));
    if (d >= width) continue;
    const double s = d / width;
    const double g = amplitude * std::pow(1.0 - s * s, 4);
    for (int mu = 0; mu < kDim; ++mu) st.connection.at(k, mu) = gen[mu % 3] * (g * (1.0 + 0.25 * mu));
    st.higgs.at(k, 0) = nil * g;
  }
  return st;
}

}  // namespace dtil
