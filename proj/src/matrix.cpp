#include "dtil/matrix.hpp"

#include <algorithm>
#include <limits>

namespace dtil {

namespace {

void require_traceless(const Mat2& m) {
  if (!is_traceless(m, 1e-12)) throw std::invalid_argument("matrix is not trace-free");
}

}  // namespace

Mat2 commutator_bracket(const Mat2& phi) { return commutator(phi, adjoint(phi)); }

IdentitySides trace_free_identity_check(const Mat2& m) {
  require_traceless(m);
  const Mat2 c = commutator_bracket(m);
  const Mat2 mm = m * adjoint(m);
  const double d = std::abs(det(m));
  return {trace(c * c).real(), 2.0 * trace(mm * mm).real() - 4.0 * d * d};
}

IdentitySides quartic_inequality_check(const Mat2& m) {
  require_traceless(m);
  const double n2 = norm2(m);
  const double d = std::abs(det(m));
  return {n2 * n2, norm2(commutator_bracket(m)) + 4.0 * d * d};
}

IdentitySweepResult identity_sweep(long samples, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  IdentitySweepResult r;
  r.samples = samples;
  r.min_inequality_slack = std::numeric_limits<double>::infinity();
  for (long k = 0; k < samples; ++k) {
    const Mat2 m = random_traceless(rng);
    const auto id = trace_free_identity_check(m);
    const double rel = std::abs(id.lhs - id.rhs) / (1.0 + std::abs(id.lhs));
    r.max_identity_rel_error = std::max(r.max_identity_rel_error, rel);
    if (rel > 1e-10) ++r.identity_failures;
    const auto q = quartic_inequality_check(m);
    r.min_inequality_slack = std::min(r.min_inequality_slack, q.rhs - q.lhs);
    if (q.lhs > q.rhs + 1e-10) ++r.inequality_failures;
  }
  if (samples == 0) r.min_inequality_slack = 0.0;
  return r;
}

}  // namespace dtil
