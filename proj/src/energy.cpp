#include "dtil/energy.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "dtil/parallel.hpp"

namespace dtil {

std::vector<double> DensityField::power(double p) const {
  std::vector<double> out(values.size());
  if (p == 1.0) return values;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] <= 0.0 ? 0.0 : std::pow(values[i], p);
  return out;
}

double DensityField::integral() const { return lattice_integral(spec, values); }

double EnergyGradient::norm() const { return std::sqrt(connection.norm2() + higgs.norm2()); }

namespace {

// the eight non-zero components of v and, for each, the faces of D_A^*
struct VFaces {
  struct Entry {
    int upper;
    int lower;
    int axis;
    int sign;
  };
  std::vector<Entry> entries;
  VFaces() {
    const FormIndex& real3 = FormIndex::real(3);
    const auto& cof = FormIndex::real(2).cofaces();
    for (int c = 0; c < real3.count(); ++c) {
      // v lives on multi-indices with exactly one axis from each complex pair
      const unsigned m = real3.mask(c);
      bool one_per_pair = true;
      for (int a = 0; a < 3; ++a) one_per_pair = one_per_pair && std::popcount((m >> (2 * a)) & 3u) == 1;
      if (!one_per_pair) continue;
      for (const auto& f : cof[c]) entries.push_back({c, f.lower, f.axis, f.sign});
    }
  }
};

const VFaces& v_faces() {
  static const VFaces v;
  return v;
}

}  // namespace

Evaluation evaluate(const FieldState& state, bool with_gradient) {
  const LatticeSpec& spec = state.spec();
  const std::size_t N = spec.sites();
  Evaluation ev;
  ev.curvature = curvature(state.connection);
  ev.dstar_v = dA_star_v(state.connection, assemble_v(state.higgs));
  const CurvatureField& f = ev.curvature;
  const RealForm& w = ev.dstar_v;

  ev.density = DensityField(spec);
  std::vector<double> fterm(N), wterm(N), bterm(N), dterm(N);
  parallel::parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double sf = 0.0, sw = 0.0;
      for (int c = 0; c < 15; ++c) {
        sf += norm2(f.field.at(i, c));
        sw += norm2(w.field.at(i, c));
      }
      const Mat2& p = state.higgs.at(i, 0);
      const double sb = norm2(commutator_bracket(p));
      const double d = std::abs(det(p));
      fterm[i] = sf;
      wterm[i] = sw;
      bterm[i] = sb;
      dterm[i] = d * d;
      ev.density.values[i] = sf + sw + sb;
    }
  });
  const double hv = spec.cell_volume();
  ev.energy.curvature_term = 0.5 * hv * parallel::deterministic_sum(fterm);
  ev.energy.dstar_term = 0.5 * hv * parallel::deterministic_sum(wterm);
  ev.energy.bracket_term = 0.5 * hv * parallel::deterministic_sum(bterm);
  ev.energy.det_u_l2 = hv * parallel::deterministic_sum(dterm);
  ev.energy.total = ev.energy.curvature_term + ev.energy.dstar_term + ev.energy.bracket_term;
  if (with_gradient) add_gradient(state, ev);
  return ev;
}

void add_gradient(const FieldState& state, Evaluation& ev) {
  if (!(ev.curvature.field.spec() == state.spec())) throw std::invalid_argument("evaluation does not match state");
  const std::size_t N = state.spec().sites();
  const RealForm& w = ev.dstar_v;
  const RealForm v = assemble_v(state.higgs);
  // d/dA of 1/2 |F|^2 is D_A^* F
  RealForm ga = covariant_coexterior(state.connection, ev.curvature);
  // d/dphi of 1/2 |D_A^* v|^2 is V^T D_A w
  HiggsField gphi = v_transpose_exterior(state.connection, w);
  const auto& vf = v_faces();
  parallel::parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      // d/dA_mu of 1/2 |D_A^* v|^2: -sum sign [w_I, v_J^+] (v hermitian)
      std::array<Mat2, kDim> acc{};
      for (const auto& en : vf.entries) {
        const Mat2 c = commutator(w.field.at(i, en.lower), adjoint(v.field.at(i, en.upper)));
        if (en.sign > 0) acc[en.axis] -= c; else acc[en.axis] += c;
      }
      for (int mu = 0; mu < kDim; ++mu) ga.field.at(i, mu) = project_su2(ga.field.at(i, mu) + acc[mu]);
      // d/dphi of 1/2 |[phi, phi^+]|^2 is 2 [[phi, phi^+], phi]
      const Mat2& p = state.higgs.at(i, 0);
      gphi.at(i, 0) = project_traceless(gphi.at(i, 0) + commutator(commutator_bracket(p), p) * 2.0);
    }
  });
  ev.gradient.connection = ConnectionField(std::move(ga.field));
  ev.gradient.higgs = std::move(gphi);
  ev.has_gradient = true;
}

EnergyBreakdown energy(const FieldState& state) { return evaluate(state, false).energy; }

DensityField density(const FieldState& state) { return evaluate(state, false).density; }

EnergyGradient energy_gradient(const FieldState& state) { return evaluate(state, true).gradient; }

double local_energy(const DensityField& density, const Ball& ball, double power) {
  if (power != 1.0 && power != 1.5) throw std::invalid_argument("local_energy power must be 1 or 3/2");
  if (power == 1.0) return ball_integral(density.spec, density.values, ball);
  const auto p = density.power(power);
  return ball_integral(density.spec, p, ball);
}

double local_energy(const FieldState& state, const Ball& ball, double power) {
  return local_energy(density(state), ball, power);
}

}  // namespace dtil
