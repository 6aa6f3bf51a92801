#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

namespace dtil {

using cplx = std::complex<double>;

// plain product; std::complex operator* goes through the inf/nan-safe
// library routine, which dominates the field kernels
inline cplx cmul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// Dense 2x2 complex matrix, row-major (a00, a01, a10, a11).
struct Mat2 {
  std::array<cplx, 4> m{};

  constexpr Mat2() = default;
  constexpr Mat2(cplx a00, cplx a01, cplx a10, cplx a11) : m{a00, a01, a10, a11} {}

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 zero() { return {}; }

  cplx& operator()(int r, int c) { return m[2 * r + c]; }
  const cplx& operator()(int r, int c) const { return m[2 * r + c]; }

  Mat2& operator+=(const Mat2& o) {
    for (int k = 0; k < 4; ++k) m[k] += o.m[k];
    return *this;
  }
  Mat2& operator-=(const Mat2& o) {
    for (int k = 0; k < 4; ++k) m[k] -= o.m[k];
    return *this;
  }
  Mat2& operator*=(cplx s) {
    for (auto& x : m) x = cmul(x, s);
    return *this;
  }
  Mat2& operator*=(double s) {
    for (auto& x : m) x *= s;
    return *this;
  }

  bool operator==(const Mat2&) const = default;
};

inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
inline Mat2 operator-(const Mat2& a) { return {-a.m[0], -a.m[1], -a.m[2], -a.m[3]}; }
inline Mat2 operator*(Mat2 a, double s) { return a *= s; }
inline Mat2 operator*(double s, Mat2 a) { return a *= s; }
inline Mat2 operator*(Mat2 a, cplx s) { return a *= s; }
inline Mat2 operator*(cplx s, Mat2 a) { return a *= s; }

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {cmul(a.m[0], b.m[0]) + cmul(a.m[1], b.m[2]), cmul(a.m[0], b.m[1]) + cmul(a.m[1], b.m[3]),
          cmul(a.m[2], b.m[0]) + cmul(a.m[3], b.m[2]), cmul(a.m[2], b.m[1]) + cmul(a.m[3], b.m[3])};
}

inline Mat2 adjoint(const Mat2& a) {
  return {std::conj(a.m[0]), std::conj(a.m[2]), std::conj(a.m[1]), std::conj(a.m[3])};
}

inline cplx trace(const Mat2& a) { return a.m[0] + a.m[3]; }
inline cplx det(const Mat2& a) { return cmul(a.m[0], a.m[3]) - cmul(a.m[1], a.m[2]); }

inline Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

/// Re Tr(X Y^dagger); the real inner product used for every field.
inline double inner(const Mat2& x, const Mat2& y) {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) s += x.m[k].real() * y.m[k].real() + x.m[k].imag() * y.m[k].imag();
  return s;
}

/// |X|^2 = Tr(X X^dagger).
inline double norm2(const Mat2& x) { return inner(x, x); }

inline double max_abs_entry(const Mat2& x) {
  double r = 0.0;
  for (const auto& z : x.m) r = std::max(r, std::abs(z));
  return r;
}

/// Orthogonal projection onto su(2): anti-hermitian, trace-free.
inline Mat2 project_su2(const Mat2& x) {
  Mat2 y = (x - adjoint(x)) * 0.5;
  const cplx t = 0.5 * trace(y);
  y.m[0] -= t;
  y.m[3] -= t;
  return y;
}

/// Orthogonal projection onto trace-free matrices.
inline Mat2 project_traceless(const Mat2& x) {
  Mat2 y = x;
  const cplx t = 0.5 * trace(x);
  y.m[0] -= t;
  y.m[3] -= t;
  return y;
}

inline bool is_traceless(const Mat2& x, double tol = 1e-12) {
  return std::abs(trace(x)) <= tol * (1.0 + max_abs_entry(x));
}

inline bool is_su2(const Mat2& x, double tol = 1e-12) {
  return max_abs_entry(x + adjoint(x)) <= tol * (1.0 + max_abs_entry(x)) && is_traceless(x, tol);
}

/// sigma^dagger sigma = I and det sigma = 1.
inline bool is_special_unitary(const Mat2& s, double tol = 1e-12) {
  return max_abs_entry(adjoint(s) * s - Mat2::identity()) <= tol && std::abs(det(s) - 1.0) <= tol;
}

/// Exponential of an su(2) element: cos(t) I + sin(t)/t X with t^2 = |X|^2 / 2.
inline Mat2 exp_su2(const Mat2& x) {
  const double t = std::sqrt(0.5 * norm2(x));
  const double c = std::cos(t);
  const double s = t < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  Mat2 r = x * s;
  r.m[0] += c;
  r.m[3] += c;
  return r;
}

/// Pauli-based basis T_a = i sigma_a / 2 of su(2).
inline Mat2 su2_generator(int a) {
  const cplx i{0.0, 1.0};
  switch (a) {
    case 0: return {0.0, 0.5 * i, 0.5 * i, 0.0};
    case 1: return {0.0, 0.5, -0.5, 0.0};
    case 2: return {0.5 * i, 0.0, 0.0, -0.5 * i};
    default: throw std::out_of_range("su2_generator index");
  }
}

/// Entries uniform in the complex unit square [-1,1]^2, projected trace-free.
template <class Rng>
Mat2 random_traceless(Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat2 x;
  for (auto& z : x.m) z = cplx(u(rng), u(rng));
  return project_traceless(x);
}

template <class Rng>
Mat2 random_su2(Rng& rng) {
  return project_su2(random_traceless(rng));
}

/// [phi, phi^dagger] = phi phi^dagger - phi^dagger phi (hermitian, trace-free).
Mat2 commutator_bracket(const Mat2& phi);

struct IdentitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Tr(M M^+ - M^+ M)^2 against 2 Tr((M M^+)^2) - 4 |det M|^2.
/// Throws std::invalid_argument unless Tr M = 0.
IdentitySides trace_free_identity_check(const Mat2& m);

/// |M|^4 against |[M, M^+]|^2 + 4 |det M|^2, |M|^2 = Tr(M M^+).
IdentitySides quartic_inequality_check(const Mat2& m);

struct IdentitySweepResult {
  long samples = 0;
  long identity_failures = 0;
  long inequality_failures = 0;
  double max_identity_rel_error = 0.0;
  double min_inequality_slack = 0.0;  // min over samples of rhs - lhs
};

/// Randomised sweep of both checks with the tolerances used throughout
/// (identity: 1e-10 relative, inequality: 1e-10 absolute slack).
IdentitySweepResult identity_sweep(long samples, unsigned long long seed);

}  // namespace dtil
