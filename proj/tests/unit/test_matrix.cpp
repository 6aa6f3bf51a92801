#include <doctest.h>

#include <random>

#include "dtil/matrix.hpp"

using namespace dtil;

namespace {

// plain 2x2 arithmetic on raw arrays, independent of Mat2
using Raw = std::array<std::complex<double>, 4>;

Raw raw_mul(const Raw& a, const Raw& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}
Raw raw_adj(const Raw& a) { return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])}; }
double raw_norm2(const Raw& a) {
  double s = 0;
  for (auto z : a) s += std::norm(z);
  return s;
}

}  // namespace

TEST_CASE("trace-free identity by direct expansion") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const std::complex<double> a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
    const Raw m{a, b, c, -a};
    const Raw mm = raw_mul(m, raw_adj(m));
    const Raw mdm = raw_mul(raw_adj(m), m);
    Raw br;
    for (int i = 0; i < 4; ++i) br[i] = mm[i] - mdm[i];
    const Raw sq = raw_mul(br, br);
    const double lhs = (sq[0] + sq[3]).real();
    const double trmm = (mm[0] + mm[3]).real();
    const Raw mm2 = raw_mul(mm, mm);
    const double d = std::abs(-a * a - b * c);
    // right side is Tr((M M^+)^2), not (Tr M M^+)^2
    const double rhs = 2 * (mm2[0] + mm2[3]).real() - 4 * d * d;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    // |M|^4 <= |[M,M^+]|^2 + 4 |det M|^2
    CHECK(trmm * trmm <= raw_norm2(br) + 4 * d * d + 1e-12 * trmm * trmm);

    const Mat2 M(a, b, c, -a);
    CHECK(norm2(commutator_bracket(M)) == doctest::Approx(raw_norm2(br)).epsilon(1e-13));
    CHECK(std::abs(det(M) - (-a * a - b * c)) < 1e-13);
  }
}

TEST_CASE("identity sweep reports no failures") {
  const auto r = identity_sweep(5000, 9);
  CHECK(r.samples == 5000);
  CHECK(r.identity_failures == 0);
  CHECK(r.inequality_failures == 0);
  CHECK(r.max_identity_rel_error < 1e-12);
  CHECK(r.min_inequality_slack >= 0.0);
}

TEST_CASE("nilpotent and normal extremes of the inequality") {
  const Mat2 n(0.0, 1.0, 0.0, 0.0);
  CHECK(norm2(n) == 1.0);
  CHECK(norm2(commutator_bracket(n)) == doctest::Approx(2.0));
  // normal matrices have [M, M^+] = 0, so all of |M|^4 comes from the determinant
  const Mat2 d(cplx(0.3, 0.4), 0.0, 0.0, cplx(-0.3, -0.4));
  CHECK(norm2(commutator_bracket(d)) == doctest::Approx(0.0));
  CHECK(norm2(d) * norm2(d) == doctest::Approx(4 * std::norm(det(d))));
}

TEST_CASE("su(2) exponential and projections") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    const Mat2 x = random_su2(rng) * 3.0;
    CHECK(is_su2(x, 1e-14));
    CHECK(is_special_unitary(exp_su2(x), 1e-12));
    const Mat2 y = random_traceless(rng);
    CHECK(is_traceless(project_traceless(y), 1e-14));
    const Mat2 p = project_su2(y);
    CHECK(max_abs_entry(project_su2(p) - p) < 1e-15);
    // projection residual is orthogonal to su(2)
    CHECK(std::abs(inner(y - p, random_su2(rng))) < 1e-13);
  }
  for (int a = 0; a < 3; ++a) CHECK(is_su2(su2_generator(a), 1e-15));
  // [T_0, T_1] = -T_2 for T_a = i sigma_a / 2
  CHECK(max_abs_entry(commutator(su2_generator(0), su2_generator(1)) + su2_generator(2)) < 1e-15);
}
