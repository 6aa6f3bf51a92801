#include "dtil/solver.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "dtil/parallel.hpp"

namespace dtil {

void FlowConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
  if (max_steps < 0) throw std::invalid_argument("max_steps must be non-negative");
  if (!(grad_tol >= 0.0)) throw std::invalid_argument("grad_tol must be non-negative");
  if (!(residual_tol >= 0.0)) throw std::invalid_argument("residual_tol must be non-negative");
  if (!(energy_rtol >= 0.0)) throw std::invalid_argument("energy_rtol must be non-negative");
  if (!(backtracking > 0.0 && backtracking < 1.0)) throw std::invalid_argument("backtracking must lie in (0,1)");
  if (!(step_growth >= 1.0)) throw std::invalid_argument("step_growth must be >= 1");
  if (!(armijo > 0.0 && armijo < 1.0)) throw std::invalid_argument("armijo must lie in (0,1)");
  if (!(min_step > 0.0)) throw std::invalid_argument("min_step must be positive");
  if (!(higgs_metric > 0.0)) throw std::invalid_argument("higgs_metric must be positive");
}

const char* to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::converged: return "converged";
    case FlowStatus::max_steps: return "max_steps";
    case FlowStatus::step_underflow: return "step_underflow";
  }
  return "unknown";
}

bool FlowTrace::monotone() const {
  for (std::size_t k = 1; k < records.size(); ++k)
    if (records[k].energy.total > records[k - 1].energy.total) return false;
  return true;
}

void FlowTrace::write_csv(std::ostream& os) const {
  os << "step,L,term1,term2,term3,grad_norm,r1_norm,r2_norm,step_size\n";
  os << std::setprecision(17);
  for (const auto& r : records) {
    os << r.step << ',' << r.energy.total << ',' << r.energy.curvature_term << ',' << r.energy.dstar_term << ','
       << r.energy.bracket_term << ',' << r.grad_norm << ',' << r.r1_norm << ',' << r.r2_norm << ',' << r.step_size
       << '\n';
  }
}

namespace {

FlowRecord make_record(long step, const FieldState& s, const Evaluation& ev, double gnorm, double t, double kappa) {
  FlowRecord r;
  r.step = step;
  r.energy = ev.energy;
  r.grad_norm = gnorm;
  const ResidualPair res = dt_residuals(s, ev.curvature, kappa);
  r.r1_norm = res.r1_norm;
  r.r2_norm = res.r2_norm;
  r.step_size = t;
  return r;
}

}  // namespace

FlowResult minimize(const FieldState& initial, const FlowConfig& cfg) {
  cfg.validate();
  if (!initial.is_valid(1e-10)) throw std::invalid_argument("initial state is not su(2) / trace-free");
  FlowResult out{initial, {}};
  FieldState& x = out.state;
  FlowTrace& trace = out.trace;

  Evaluation ev = evaluate(x, true);
  ++trace.evaluations;
  double gnorm = ev.gradient.norm();
  trace.records.push_back(make_record(0, x, ev, gnorm, 0.0, cfg.kappa));

  const double inv_w = 1.0 / cfg.higgs_metric;
  double t = cfg.step_size;
  const double target = cfg.energy_rtol * ev.energy.total;
  long step = 0;
  while (true) {
    if (gnorm <= cfg.grad_tol || ev.energy.total <= target) {
      trace.status = FlowStatus::converged;
      break;
    }
    if (step >= cfg.max_steps) {
      trace.status = FlowStatus::max_steps;
      break;
    }
    // descent direction p = -M^-1 g, with |g|_{M^-1}^2 as the model decrease
    const double decrease = ev.gradient.connection.norm2() + inv_w * ev.gradient.higgs.norm2();
    bool accepted = false;
    while (t >= cfg.min_step) {
      FieldState trial = x;
      trial.connection.axpy(-t, ev.gradient.connection);
      trial.higgs.axpy(-t * inv_w, ev.gradient.higgs);
      Evaluation tev = evaluate(trial, false);
      ++trace.evaluations;
      if (tev.energy.total < ev.energy.total && tev.energy.total <= ev.energy.total - cfg.armijo * t * decrease) {
        x = std::move(trial);
        ev = std::move(tev);
        add_gradient(x, ev);
        accepted = true;
        break;
      }
      t *= cfg.backtracking;
    }
    if (!accepted) {
      trace.status = FlowStatus::step_underflow;
      break;
    }
    ++step;
    gnorm = ev.gradient.norm();
    trace.records.push_back(make_record(step, x, ev, gnorm, t, cfg.kappa));
    t *= cfg.step_growth;
  }
  return out;
}

MatrixField coulomb_divergence(const ConnectionField& a) {
  const LatticeSpec& spec = a.spec();
  const auto nb = NeighborTable::get(spec);
  const double inv2h = 0.5 / spec.spacing;
  MatrixField out(spec, 1);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Mat2 s;
      for (int mu = 0; mu < kDim; ++mu) s += a.at(nb->plus(i, mu), mu) - a.at(nb->minus(i, mu), mu);
      out.at(i, 0) = s * (-inv2h);
    }
  });
  return out;
}

namespace {

// d*d xi = -sum_mu d_mu d_mu xi (central differences, stencil width 2h)
MatrixField wide_laplacian(const MatrixField& xi) {
  const LatticeSpec& spec = xi.spec();
  const auto nb = NeighborTable::get(spec);
  const double c = 0.25 / (spec.spacing * spec.spacing);
  MatrixField out(spec, 1);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Mat2 s = xi.at(i, 0) * (2.0 * kDim);
      for (int mu = 0; mu < kDim; ++mu) {
        s -= xi.at(nb->plus(nb->plus(i, mu), mu), 0);
        s -= xi.at(nb->minus(nb->minus(i, mu), mu), 0);
      }
      out.at(i, 0) = s * c;
    }
  });
  return out;
}

void remove_mean(MatrixField& f) {
  Mat2 mean;
  for (const auto& x : f.values()) mean += x;
  mean *= 1.0 / static_cast<double>(f.sites());
  for (auto& x : f.values()) x -= mean;
}

// conjugate gradients for d*d xi = rhs on the complement of constants
MatrixField solve_poisson(const MatrixField& rhs, double rtol, int max_iters) {
  MatrixField x(rhs.spec(), 1);
  MatrixField r = rhs;
  remove_mean(r);
  MatrixField p = r;
  double rr = r.norm2();
  const double stop = rtol * rtol * rr;
  for (int it = 0; it < max_iters && rr > stop && rr > 0.0; ++it) {
    const MatrixField ap = wide_laplacian(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    x.axpy(alpha, p);
    r.axpy(-alpha, ap);
    const double rr_new = r.norm2();
    p *= rr_new / rr;
    p += r;
    rr = rr_new;
  }
  remove_mean(x);
  return x;
}

}  // namespace

CoulombResult coulomb_fix(const FieldState& state, double tol, int max_iters) {
  if (!state.is_valid(1e-10)) throw std::invalid_argument("state is not su(2) / trace-free");
  if (!(tol >= 0.0)) throw std::invalid_argument("tol must be non-negative");
  const LatticeSpec& spec = state.spec();
  CoulombResult res{GaugeTransform(spec), state, 0.0, 0.0, 0, false};
  MatrixField div = coulomb_divergence(res.state.connection);
  res.initial_norm = std::sqrt(div.norm2());
  res.final_norm = res.initial_norm;
  FieldState best = res.state;
  GaugeTransform best_sigma = res.sigma;
  double best_norm = res.final_norm;
  while (res.final_norm > tol && res.iterations < max_iters) {
    const MatrixField xi = solve_poisson(div, 1e-12, 500);
    GaugeTransform g(spec);
    for (std::size_t i = 0; i < spec.sites(); ++i) g.at(i, 0) = exp_su2(project_su2(xi.at(i, 0)));
    res.state = apply_gauge(g, res.state);
    for (std::size_t i = 0; i < spec.sites(); ++i) res.sigma.at(i, 0) = g.at(i, 0) * res.sigma.at(i, 0);
    div = coulomb_divergence(res.state.connection);
    res.final_norm = std::sqrt(div.norm2());
    ++res.iterations;
    if (res.final_norm < best_norm) {
      best = res.state;
      best_sigma = res.sigma;
      best_norm = res.final_norm;
    }
  }
  res.converged = res.final_norm <= tol;
  if (!res.converged) {
    res.state = std::move(best);
    res.sigma = std::move(best_sigma);
    res.final_norm = best_norm;
  }
  return res;
}

}  // namespace dtil
