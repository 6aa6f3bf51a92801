#pragma once

#include <vector>

#include "dtil/differential.hpp"

namespace dtil {

/// The three summands of L(A,u) (each carrying the global 1/2) and the
/// integral of |det u|^2.
struct EnergyBreakdown {
  double total = 0.0;
  double curvature_term = 0.0;
  double dstar_term = 0.0;
  double bracket_term = 0.0;
  double det_u_l2 = 0.0;
};

/// Per-site density |F|^2 + |D_A^* v|^2 + |[u,ubar]|^2, without the 1/2,
/// so that h^6 sum = 2 L.
struct DensityField {
  LatticeSpec spec;
  std::vector<double> values;

  DensityField() = default;
  explicit DensityField(const LatticeSpec& s) : spec(s), values(s.sites(), 0.0) {}

  /// Pointwise power, e.g. 1.5 for the scale-invariant density.
  std::vector<double> power(double p) const;
  double integral() const;
};

struct EnergyGradient {
  ConnectionField connection;
  HiggsField higgs;

  double norm() const;
};

struct Evaluation {
  EnergyBreakdown energy;
  DensityField density;
  CurvatureField curvature;
  RealForm dstar_v;         // D_A^* v
  EnergyGradient gradient;  // empty unless requested
  bool has_gradient = false;
};

/// Evaluates energy, density and (optionally) the exact gradient of the
/// discrete functional with respect to h^6 sum Re Tr(. .^+).
Evaluation evaluate(const FieldState& state, bool with_gradient);
/// Fills ev.gradient from the curvature and D_A^* v kept in ev.
void add_gradient(const FieldState& state, Evaluation& ev);

EnergyBreakdown energy(const FieldState& state);
DensityField density(const FieldState& state);
EnergyGradient energy_gradient(const FieldState& state);

/// Integral of density^power over the ball; power is 1 or 3/2.
double local_energy(const DensityField& density, const Ball& ball, double power);
double local_energy(const FieldState& state, const Ball& ball, double power);

}  // namespace dtil
