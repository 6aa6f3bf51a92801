#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dtil/lattice.hpp"
#include "dtil/matrix.hpp"

namespace dtil {

/// Site-major array of `components` matrices per site.
class MatrixField {
 public:
  MatrixField() = default;
  MatrixField(const LatticeSpec& spec, int components)
      : spec_(spec), components_(components), values_(spec.sites() * components) {}

  const LatticeSpec& spec() const { return spec_; }
  int components() const { return components_; }
  std::size_t sites() const { return spec_.sites(); }

  Mat2& at(std::size_t site, int c) { return values_[site * components_ + c]; }
  const Mat2& at(std::size_t site, int c) const { return values_[site * components_ + c]; }

  std::span<Mat2> values() { return values_; }
  std::span<const Mat2> values() const { return values_; }

  /// h^6 sum Re Tr(x y^+) over sites and components.
  double dot(const MatrixField& other) const;
  double norm2() const { return dot(*this); }
  double max_abs() const;

  MatrixField& operator+=(const MatrixField& o);
  MatrixField& operator-=(const MatrixField& o);
  MatrixField& operator*=(double s);
  /// this += s * o
  void axpy(double s, const MatrixField& o);

  bool operator==(const MatrixField&) const = default;

 private:
  LatticeSpec spec_;
  int components_ = 0;
  std::vector<Mat2> values_;
};

/// su(2)-valued real 1-form A_mu, mu = 0..5.
class ConnectionField : public MatrixField {
 public:
  ConnectionField() = default;
  explicit ConnectionField(const LatticeSpec& spec) : MatrixField(spec, kDim) {}
  explicit ConnectionField(MatrixField f);

  bool is_valid(double tol = 1e-12) const;
  void project();
};

/// Trace-free complex coefficient phi of u = phi dzbar^1 ^ dzbar^2 ^ dzbar^3.
class HiggsField : public MatrixField {
 public:
  HiggsField() = default;
  explicit HiggsField(const LatticeSpec& spec) : MatrixField(spec, 1) {}
  explicit HiggsField(MatrixField f);

  bool is_valid(double tol = 1e-12) const;
  void project();
};

/// Per-site SU(2) matrix.
class GaugeTransform : public MatrixField {
 public:
  GaugeTransform() = default;
  explicit GaugeTransform(const LatticeSpec& spec);  // identity everywhere

  static GaugeTransform constant(const LatticeSpec& spec, const Mat2& sigma);
  bool is_valid(double tol = 1e-12) const;
};

struct FieldState {
  ConnectionField connection;
  HiggsField higgs;

  FieldState() = default;
  explicit FieldState(const LatticeSpec& spec) : connection(spec), higgs(spec) {}
  FieldState(ConnectionField a, HiggsField phi);

  const LatticeSpec& spec() const { return connection.spec(); }
  bool is_valid(double tol = 1e-12) const { return connection.is_valid(tol) && higgs.is_valid(tol); }

  /// Combined inner product over A and phi.
  double dot(const FieldState& o) const { return connection.dot(o.connection) + higgs.dot(o.higgs); }
  void axpy(double s, const FieldState& o) {
    connection.axpy(s, o.connection);
    higgs.axpy(s, o.higgs);
  }

  bool operator==(const FieldState&) const = default;
};

/// A -> s A s^-1 - (ds) s^-1 with central-difference ds (projected to su(2)),
/// phi -> s phi s^-1. Throws std::invalid_argument for non-unitary s.
FieldState apply_gauge(const GaugeTransform& sigma, const FieldState& state);

/// Smooth random data: a few Fourier modes with integer wave vectors in
/// {-1,0,1}^6 (no zero mode, no Nyquist mode), fixed by the seed. The
/// same seed gives the same continuum field at every resolution. The
/// connection is made transverse (discrete d*A = 0).
struct RandomFieldOptions {
  double amplitude = 1e-2;
  int modes = 6;
  bool connection = true;
  bool higgs = true;
  std::uint64_t seed = 1;
};
FieldState random_smooth_state(const LatticeSpec& spec, const RandomFieldOptions& opt);

/// Independent random su(2)/trace-free values at every site (rough data,
/// for algebraic identities).
FieldState random_rough_state(const LatticeSpec& spec, double amplitude, std::uint64_t seed);

/// Smooth random gauge transform exp(xi), xi a band-limited su(2) field.
GaugeTransform random_smooth_gauge(const LatticeSpec& spec, double amplitude, std::uint64_t seed);

}  // namespace dtil
