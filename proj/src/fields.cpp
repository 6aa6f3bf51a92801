#include "dtil/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "dtil/parallel.hpp"

namespace dtil {

double MatrixField::dot(const MatrixField& other) const {
  if (other.values_.size() != values_.size()) throw std::invalid_argument("field shape mismatch");
  const std::size_t N = sites();
  std::vector<double> per_site(N, 0.0);
  parallel::parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      double s = 0.0;
      for (int c = 0; c < components_; ++c) s += inner(at(i, c), other.at(i, c));
      per_site[i] = s;
    }
  });
  return spec_.cell_volume() * parallel::deterministic_sum(per_site);
}

double MatrixField::max_abs() const {
  double r = 0.0;
  for (const auto& x : values_) r = std::max(r, max_abs_entry(x));
  return r;
}

MatrixField& MatrixField::operator+=(const MatrixField& o) {
  axpy(1.0, o);
  return *this;
}

MatrixField& MatrixField::operator-=(const MatrixField& o) {
  axpy(-1.0, o);
  return *this;
}

MatrixField& MatrixField::operator*=(double s) {
  for (auto& x : values_) x *= s;
  return *this;
}

void MatrixField::axpy(double s, const MatrixField& o) {
  if (o.values_.size() != values_.size()) throw std::invalid_argument("field shape mismatch");
  for (std::size_t k = 0; k < values_.size(); ++k)
    for (int j = 0; j < 4; ++j) values_[k].m[j] += s * o.values_[k].m[j];
}

ConnectionField::ConnectionField(MatrixField f) : MatrixField(std::move(f)) {
  if (components() != kDim) throw std::invalid_argument("connection needs 6 components per site");
}

bool ConnectionField::is_valid(double tol) const {
  return std::all_of(values().begin(), values().end(), [tol](const Mat2& x) { return is_su2(x, tol); });
}

void ConnectionField::project() {
  for (auto& x : values()) x = project_su2(x);
}

HiggsField::HiggsField(MatrixField f) : MatrixField(std::move(f)) {
  if (components() != 1) throw std::invalid_argument("higgs field needs 1 component per site");
}

bool HiggsField::is_valid(double tol) const {
  return std::all_of(values().begin(), values().end(),
                     [tol](const Mat2& x) { return is_traceless(x, tol); });
}

void HiggsField::project() {
  for (auto& x : values()) x = project_traceless(x);
}

GaugeTransform::GaugeTransform(const LatticeSpec& spec) : MatrixField(spec, 1) {
  for (auto& x : values()) x = Mat2::identity();
}

GaugeTransform GaugeTransform::constant(const LatticeSpec& spec, const Mat2& sigma) {
  GaugeTransform g(spec);
  for (auto& x : g.values()) x = sigma;
  return g;
}

bool GaugeTransform::is_valid(double tol) const {
  return std::all_of(values().begin(), values().end(),
                     [tol](const Mat2& x) { return is_special_unitary(x, tol); });
}

FieldState::FieldState(ConnectionField a, HiggsField phi) : connection(std::move(a)), higgs(std::move(phi)) {
  if (!(connection.spec() == higgs.spec())) throw std::invalid_argument("connection and higgs lattices differ");
}

FieldState apply_gauge(const GaugeTransform& sigma, const FieldState& state) {
  const LatticeSpec& spec = state.spec();
  if (!(sigma.spec() == spec)) throw std::invalid_argument("gauge transform lattice mismatch");
  if (!sigma.is_valid(1e-10)) throw std::invalid_argument("gauge transform is not special unitary");
  const auto nb = NeighborTable::get(spec);
  const double inv2h = 0.5 / spec.spacing;
  FieldState out(spec);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Mat2& s = sigma.at(i, 0);
      const Mat2 sinv = adjoint(s);
      for (int mu = 0; mu < kDim; ++mu) {
        const Mat2 ds = (sigma.at(nb->plus(i, mu), 0) - sigma.at(nb->minus(i, mu), 0)) * inv2h;
        Mat2 a = s * state.connection.at(i, mu) * sinv;
        if (!(ds == Mat2::zero())) a -= project_su2(ds * sinv);
        out.connection.at(i, mu) = a;
      }
      out.higgs.at(i, 0) = s * state.higgs.at(i, 0) * sinv;
    }
  });
  return out;
}

namespace {

struct Mode {
  std::array<int, kDim> m{};
};

std::vector<Mode> pick_modes(int count, std::mt19937_64& rng) {
  std::set<std::array<int, kDim>> seen;
  std::vector<Mode> modes;
  std::uniform_int_distribution<int> pick(-1, 1);
  while (static_cast<int>(modes.size()) < count) {
    Mode md;
    bool zero = true;
    for (auto& v : md.m) {
      v = pick(rng);
      zero = zero && v == 0;
    }
    if (zero) continue;
    auto neg = md.m;
    for (auto& v : neg) v = -v;
    if (seen.count(md.m) || seen.count(neg)) continue;
    seen.insert(md.m);
    modes.push_back(md);
  }
  return modes;
}

// phase of mode m at site s: 2 pi m.c / n
double mode_phase(const Mode& md, const SiteIndex& s, int n) {
  long acc = 0;
  for (int k = 0; k < kDim; ++k) acc += static_cast<long>(md.m[k]) * s.coords[k];
  return 2.0 * std::numbers::pi * static_cast<double>(acc) / n;
}

// remove the component of a vector-of-su(2) along the direction m
void make_transverse(std::array<Mat2, kDim>& a, const Mode& md) {
  double mm = 0.0;
  for (int v : md.m) mm += v * v;
  Mat2 proj;
  for (int mu = 0; mu < kDim; ++mu) proj += a[mu] * static_cast<double>(md.m[mu]);
  for (int mu = 0; mu < kDim; ++mu) a[mu] -= proj * (md.m[mu] / mm);
}

}  // namespace

FieldState random_smooth_state(const LatticeSpec& spec, const RandomFieldOptions& opt) {
  std::mt19937_64 rng(opt.seed);
  const auto modes = pick_modes(opt.modes, rng);
  const double scale = opt.amplitude / std::sqrt(static_cast<double>(std::max(1, opt.modes)));
  std::vector<std::array<Mat2, kDim>> ca(modes.size()), sa(modes.size());
  std::vector<Mat2> cp(modes.size()), sp(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    for (int mu = 0; mu < kDim; ++mu) {
      ca[k][mu] = random_su2(rng) * scale;
      sa[k][mu] = random_su2(rng) * scale;
    }
    make_transverse(ca[k], modes[k]);
    make_transverse(sa[k], modes[k]);
    cp[k] = random_traceless(rng) * scale;
    sp[k] = random_traceless(rng) * scale;
  }
  FieldState st(spec);
  parallel::parallel_for(spec.sites(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const SiteIndex s = SiteIndex::from_linear(spec, i);
      for (std::size_t k = 0; k < modes.size(); ++k) {
        const double ph = mode_phase(modes[k], s, spec.n_per_axis);
        const double c = std::cos(ph), sn = std::sin(ph);
        if (opt.connection)
          for (int mu = 0; mu < kDim; ++mu) st.connection.at(i, mu) += ca[k][mu] * c + sa[k][mu] * sn;
        if (opt.higgs) st.higgs.at(i, 0) += cp[k] * c + sp[k] * sn;
      }
    }
  });
  return st;
}

FieldState random_rough_state(const LatticeSpec& spec, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FieldState st(spec);
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    for (int mu = 0; mu < kDim; ++mu) st.connection.at(i, mu) = random_su2(rng) * amplitude;
    st.higgs.at(i, 0) = random_traceless(rng) * amplitude;
  }
  return st;
}

GaugeTransform random_smooth_gauge(const LatticeSpec& spec, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto modes = pick_modes(4, rng);
  std::vector<Mat2> c(modes.size()), s(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k) {
    c[k] = random_su2(rng) * amplitude;
    s[k] = random_su2(rng) * amplitude;
  }
  GaugeTransform g(spec);
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    const SiteIndex si = SiteIndex::from_linear(spec, i);
    Mat2 xi;
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double ph = mode_phase(modes[k], si, spec.n_per_axis);
      xi += c[k] * std::cos(ph) + s[k] * std::sin(ph);
    }
    g.at(i, 0) = exp_su2(project_su2(xi));
  }
  return g;
}

}  // namespace dtil
