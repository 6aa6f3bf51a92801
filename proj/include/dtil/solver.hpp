#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dtil/energy.hpp"

namespace dtil {

struct FlowConfig {
  double step_size = 0.05;    // initial step
  long max_steps = 5000;
  double grad_tol = 1e-9;     // stop when |grad L| <= grad_tol
  double residual_tol = 1e-4; // reported only
  double energy_rtol = 0.0;   // also stop when L <= energy_rtol * L0 (0: off)
  double backtracking = 0.5;  // step factor on rejection, in (0,1)
  double step_growth = 1.25;  // step factor after an accepted step, >= 1
  double armijo = 1e-4;       // sufficient-decrease constant, in (0,1)
  double min_step = 1e-14;
  double kappa = 1.0;
  /// Weight of the Higgs block in the descent metric: the phi update is
  /// the L2 gradient divided by this value. 1 is plain gradient descent.
  double higgs_metric = 1.0;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct FlowRecord {
  long step = 0;
  EnergyBreakdown energy;
  double grad_norm = 0.0;
  double r1_norm = 0.0;
  double r2_norm = 0.0;
  double step_size = 0.0;  // step used to reach this record, 0 for the initial one
};

enum class FlowStatus { converged, max_steps, step_underflow };

const char* to_string(FlowStatus s);

struct FlowTrace {
  std::vector<FlowRecord> records;
  FlowStatus status = FlowStatus::max_steps;
  long evaluations = 0;

  long steps() const { return records.empty() ? 0 : records.back().step; }
  bool monotone() const;
  void write_csv(std::ostream& os) const;
};

struct FlowResult {
  FieldState state;
  FlowTrace trace;
};

/// Armijo-backtracked gradient descent on L. Only accepted steps enter
/// the trace, so L is non-increasing along it.
FlowResult minimize(const FieldState& initial, const FlowConfig& cfg);

/// d*A = -sum_mu d_mu A_mu with central differences.
MatrixField coulomb_divergence(const ConnectionField& a);

struct CoulombResult {
  GaugeTransform sigma;
  FieldState state;
  double initial_norm = 0.0;
  double final_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Repeats sigma <- exp(xi) sigma with d*d xi = d*A (mean(xi) = 0) until
/// |d*A| <= tol. The returned state is the gauge image of the input
/// after the sequence of transforms; sigma is their product.
CoulombResult coulomb_fix(const FieldState& state, double tol, int max_iters);

}  // namespace dtil
