#include <doctest.h>

#include <cmath>
#include <random>

#include "dtil/differential.hpp"

using namespace dtil;

namespace {

template <class F>
void fill(MatrixField& f, std::uint64_t seed, F draw) {
  std::mt19937_64 rng(seed);
  for (auto& x : f.values()) x = draw(rng);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("form index bookkeeping") {
  CHECK(FormIndex::real(0).count() == 1);
  CHECK(FormIndex::real(2).count() == 15);
  CHECK(FormIndex::real(3).count() == 20);
  CHECK(FormIndex::antiholo(2).count() == 3);
  CHECK(FormIndex::real(2).component(0b11) == 0);
  CHECK(FormIndex::real(2).component(0b110000) == 14);
  CHECK(FormIndex::real(2).component(0b111) == -1);
}

TEST_CASE("dbar_A and D_A are adjoint to their lattice adjoints") {
  const LatticeSpec spec(4, 0.8);
  const FieldState s = random_rough_state(spec, 0.5, 17);
  for (int q = 0; q < 3; ++q) {
    AntiholomorphicForm a(spec, q), b(spec, q + 1);
    fill(a.field, 10 + q, [](auto& r) { return random_traceless(r); });
    fill(b.field, 20 + q, [](auto& r) { return random_traceless(r); });
    const double lhs = pairing(dbar_A(a, s.connection).field, b.field);
    const double rhs = pairing(a.field, dbar_A_adjoint(b, s.connection).field);
    CHECK(rel(lhs, rhs) < 1e-12);
  }
  for (int p = 0; p < 6; ++p) {
    RealForm a(spec, p), b(spec, p + 1);
    fill(a.field, 30 + p, [](auto& r) { return random_traceless(r); });
    fill(b.field, 40 + p, [](auto& r) { return random_traceless(r); });
    const double lhs = pairing(covariant_exterior(s.connection, a).field, b.field);
    const double rhs = pairing(a.field, covariant_coexterior(s.connection, b).field);
    CHECK(rel(lhs, rhs) < 1e-12);
  }
  CHECK_THROWS_AS(dbar_A(AntiholomorphicForm(spec, 3), s.connection), std::invalid_argument);
}

TEST_CASE("curvature of a constant connection is the commutator") {
  const LatticeSpec spec(4, 1.0);
  ConnectionField a(spec);
  std::mt19937_64 rng(5);
  std::array<Mat2, kDim> c;
  for (auto& x : c) x = random_su2(rng);
  for (std::size_t i = 0; i < spec.sites(); ++i)
    for (int mu = 0; mu < kDim; ++mu) a.at(i, mu) = c[mu];
  const CurvatureField f = curvature(a);
  const FormIndex& idx = FormIndex::real(2);
  for (int mu = 0; mu < kDim; ++mu)
    for (int nu = mu + 1; nu < kDim; ++nu) {
      const Mat2 expect = c[mu] * c[nu] - c[nu] * c[mu];
      const int k = idx.component((1u << mu) | (1u << nu));
      CHECK(max_abs_entry(f.field.at(77, k) - expect) < 1e-15);
    }
}

TEST_CASE("curvature of an abelian wave uses central differences") {
  const LatticeSpec spec(8, 0.5);
  ConnectionField a(spec);
  const double k = 2.0 * M_PI / spec.period();
  const Mat2 t = su2_generator(2);
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    const double x0 = SiteIndex::from_linear(spec, i).position(spec)[0];
    a.at(i, 1) = t * std::sin(k * x0);
  }
  const CurvatureField f = curvature(a);
  const double h = spec.spacing;
  for (std::size_t i = 0; i < spec.sites(); i += 97) {
    const double x0 = SiteIndex::from_linear(spec, i).position(spec)[0];
    const double d = (std::sin(k * (x0 + h)) - std::sin(k * (x0 - h))) / (2 * h);
    CHECK(max_abs_entry(f.field.at(i, 0) - t * d) < 1e-14);
  }
}

TEST_CASE("type decomposition round trip and reality") {
  const LatticeSpec spec(4, 1.0);
  const FieldState s = random_rough_state(spec, 0.4, 2);
  const CurvatureField f = curvature(s.connection);
  const TypeComponents t = type_decompose(f);
  const CurvatureField g = reassemble(t);
  double err = 0.0, conj = 0.0;
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    for (int c = 0; c < 15; ++c) err = std::max(err, max_abs_entry(f.field.at(i, c) - g.field.at(i, c)));
    // F is su(2)-valued, so F^{2,0} = -(F^{0,2})^+
    for (int c = 0; c < 3; ++c) conj = std::max(conj, max_abs_entry(t.f02.field.at(i, c) + adjoint(t.f20.at(i, c))));
  }
  CHECK(err < 1e-14);
  CHECK(conj < 1e-14);
}

TEST_CASE("v has eight non-zero real components") {
  const LatticeSpec spec(4, 1.0);
  const FieldState s = random_rough_state(spec, 1.0, 8);
  const RealForm v = assemble_v(s.higgs);
  int nonzero = 0;
  for (int c = 0; c < v.field.components(); ++c)
    if (max_abs_entry(v.field.at(3, c)) > 0) ++nonzero;
  CHECK(nonzero == 8);
  // sum_c (v_c + v_c^+) conj(gamma_c) = 16 phi since |gamma_c| = 1 and sum_c conj(gamma_c)^2 = 0
  const HiggsField back = assemble_v_transpose(v);
  CHECK(max_abs_entry(back.at(3, 0) - s.higgs.at(3, 0) * 16.0) < 1e-13);
  RealForm z(spec, 3);
  fill(z.field, 99, [](auto& r) { return random_traceless(r); });
  CHECK(rel(pairing(v.field, z.field), pairing(s.higgs, assemble_v_transpose(z))) < 1e-12);
  // the sparse D_A^* v agrees with the generic coexterior
  const RealForm w = dA_star_v(s.connection, v);
  const RealForm g = covariant_coexterior(s.connection, v);
  double err = 0.0;
  for (std::size_t i = 0; i < spec.sites(); ++i)
    for (int c = 0; c < 15; ++c) err = std::max(err, max_abs_entry(w.field.at(i, c) - g.field.at(i, c)));
  CHECK(err < 1e-13);
}

TEST_CASE("residuals of the trivial and of a constant abelian pair") {
  const LatticeSpec spec(4, 1.0);
  const ResidualPair z = dt_residuals(FieldState(spec));
  CHECK(z.r1_norm == 0.0);
  CHECK(z.r2_norm == 0.0);
  CHECK(lambda_su2() == 0.0);
  CHECK(lambda_constant(2.0, 2, 3.0) == doctest::Approx(1.0));

  // phi diagonal: [phi, phi^+] = 0, A = 0, so both residuals vanish
  FieldState s(spec);
  for (std::size_t i = 0; i < spec.sites(); ++i) s.higgs.at(i, 0) = Mat2(cplx(0.2, 0.1), 0.0, 0.0, cplx(-0.2, -0.1));
  const ResidualPair r = dt_residuals(s);
  CHECK(r.r1_norm < 1e-15);
  CHECK(r.r2_norm < 1e-15);

  // nilpotent phi: r2 = kappa [phi, phi^+]
  FieldState n(spec);
  for (std::size_t i = 0; i < spec.sites(); ++i) n.higgs.at(i, 0) = Mat2(0.0, 0.5, 0.0, 0.0);
  const ResidualPair rn = dt_residuals(n, 2.0);
  const double expect = 2.0 * std::sqrt(norm2(commutator_bracket(Mat2(0.0, 0.5, 0.0, 0.0))) * spec.volume());
  CHECK(rn.r2_norm == doctest::Approx(expect));
}

TEST_CASE("translation covariance of the curvature") {
  const LatticeSpec spec(4, 1.0);
  const FieldState s = random_rough_state(spec, 0.3, 4);
  const Coords by{1, 0, 2, 0, 0, 3};
  FieldState t(spec);
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    const std::size_t j = SiteIndex::from_linear(spec, i).shifted(spec, by).linear(spec);
    for (int mu = 0; mu < kDim; ++mu) t.connection.at(j, mu) = s.connection.at(i, mu);
    t.higgs.at(j, 0) = s.higgs.at(i, 0);
  }
  const CurvatureField fs = curvature(s.connection), ft = curvature(t.connection);
  for (std::size_t i = 0; i < spec.sites(); i += 13) {
    const std::size_t j = SiteIndex::from_linear(spec, i).shifted(spec, by).linear(spec);
    for (int c = 0; c < 15; ++c) CHECK(fs.field.at(i, c) == ft.field.at(j, c));
  }
}
