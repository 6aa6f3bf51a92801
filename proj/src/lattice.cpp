#include "dtil/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "dtil/parallel.hpp"

namespace dtil {

LatticeSpec::LatticeSpec(int n, double h) : n_per_axis(n), spacing(h) {
  if (n < 4) throw std::invalid_argument("n_per_axis must be >= 4, got " + std::to_string(n));
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("spacing must be positive");
  if (std::pow(static_cast<double>(n), kDim) > 4.0e9) throw std::invalid_argument("lattice too large");
}

std::size_t LatticeSpec::sites() const {
  std::size_t s = 1;
  for (int k = 0; k < kDim; ++k) s *= static_cast<std::size_t>(n_per_axis);
  return s;
}

double LatticeSpec::cell_volume() const { return std::pow(spacing, kDim); }

std::size_t LatticeSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int k = axis + 1; k < kDim; ++k) s *= static_cast<std::size_t>(n_per_axis);
  return s;
}

SiteIndex SiteIndex::from_linear(const LatticeSpec& spec, std::size_t idx) {
  SiteIndex s;
  const auto n = static_cast<std::size_t>(spec.n_per_axis);
  for (int k = kDim - 1; k >= 0; --k) {
    s.coords[k] = static_cast<int>(idx % n);
    idx /= n;
  }
  return s;
}

std::size_t SiteIndex::linear(const LatticeSpec& spec) const {
  const int n = spec.n_per_axis;
  std::size_t idx = 0;
  for (int k = 0; k < kDim; ++k) {
    const int c = ((coords[k] % n) + n) % n;
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(c);
  }
  return idx;
}

Point SiteIndex::position(const LatticeSpec& spec) const {
  Point p{};
  const int n = spec.n_per_axis;
  for (int k = 0; k < kDim; ++k) p[k] = (((coords[k] % n) + n) % n) * spec.spacing;
  return p;
}

SiteIndex SiteIndex::shifted(const LatticeSpec& spec, const Coords& by) const {
  SiteIndex s;
  const int n = spec.n_per_axis;
  for (int k = 0; k < kDim; ++k) s.coords[k] = (((coords[k] + by[k]) % n) + n) % n;
  return s;
}

Ball Ball::at_site(const LatticeSpec& spec, const SiteIndex& s, double radius) {
  return Ball{s.position(spec), radius};
}

Point minimal_image(const LatticeSpec& spec, const Point& x, const Point& y) {
  const double L = spec.period();
  Point d{};
  for (int k = 0; k < kDim; ++k) {
    double v = std::fmod(x[k] - y[k], L);
    if (v > 0.5 * L) v -= L;
    if (v < -0.5 * L) v += L;
    d[k] = v;
  }
  return d;
}

double minimal_image_distance2(const LatticeSpec& spec, const Point& x, const Point& y) {
  const Point d = minimal_image(spec, x, y);
  double s = 0.0;
  for (double v : d) s += v * v;
  return s;
}

bool ball_covers_torus(const LatticeSpec& spec, const Ball& ball) {
  return ball.radius >= std::sqrt(static_cast<double>(kDim)) * spec.half_period();
}

void validate_ball(const LatticeSpec& spec, const Ball& ball) {
  if (!(ball.radius > 0.0) || !std::isfinite(ball.radius))
    throw DomainError("ball radius must be positive");
  if (ball.radius > spec.half_period() * (1.0 + 1e-12) && !ball_covers_torus(spec, ball))
    throw DomainError("ball radius " + std::to_string(ball.radius) + " exceeds half period " +
                      std::to_string(spec.half_period()));
}

std::vector<std::size_t> sites_in_ball(const LatticeSpec& spec, const Ball& ball) {
  validate_ball(spec, ball);
  std::vector<std::size_t> out;
  if (ball_covers_torus(spec, ball)) {
    out.resize(spec.sites());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    return out;
  }
  const double h = spec.spacing;
  const double r2 = ball.radius * ball.radius * (1.0 + 1e-12);
  std::array<int, kDim> lo{}, count{};
  for (int k = 0; k < kDim; ++k) {
    lo[k] = static_cast<int>(std::ceil((ball.center[k] - ball.radius) / h - 1e-9));
    const int hi = static_cast<int>(std::floor((ball.center[k] + ball.radius) / h + 1e-9));
    count[k] = std::min(hi - lo[k] + 1, spec.n_per_axis);
  }
  Coords c{};
  std::size_t total = 1;
  for (int k = 0; k < kDim; ++k) total *= static_cast<std::size_t>(std::max(count[k], 0));
  for (std::size_t t = 0; t < total; ++t) {
    std::size_t rem = t;
    for (int k = kDim - 1; k >= 0; --k) {
      c[k] = lo[k] + static_cast<int>(rem % static_cast<std::size_t>(count[k]));
      rem /= static_cast<std::size_t>(count[k]);
    }
    const SiteIndex s = SiteIndex{c}.shifted(spec, Coords{});
    if (minimal_image_distance2(spec, s.position(spec), ball.center) <= r2) out.push_back(s.linear(spec));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double ball_integral(const LatticeSpec& spec, std::span<const double> density, const Ball& ball) {
  if (density.size() != spec.sites()) throw std::invalid_argument("density size mismatch");
  double s = 0.0;
  for (std::size_t i : sites_in_ball(spec, ball)) s += density[i];
  return spec.cell_volume() * s;
}

double lattice_integral(const LatticeSpec& spec, std::span<const double> density) {
  if (density.size() != spec.sites()) throw std::invalid_argument("density size mismatch");
  return spec.cell_volume() * parallel::deterministic_sum(density);
}

BallStencil::BallStencil(const LatticeSpec& spec, double radius) : spec_(spec), radius_(radius) {
  const Ball probe{Point{}, radius};
  validate_ball(spec, probe);
  for (std::size_t idx : sites_in_ball(spec, probe)) {
    const SiteIndex s = SiteIndex::from_linear(spec, idx);
    Coords off{};
    double d2 = 0.0;
    for (int k = 0; k < kDim; ++k) {
      int o = s.coords[k];
      if (2 * o > spec.n_per_axis) o -= spec.n_per_axis;
      off[k] = o;
      d2 += (o * spec.spacing) * (o * spec.spacing);
    }
    offsets_.push_back(off);
    dist2_.push_back(d2);
  }
}

double BallStencil::integrate(std::span<const double> density, std::size_t site) const {
  const SiteIndex s = SiteIndex::from_linear(spec_, site);
  double sum = 0.0;
  for (const auto& off : offsets_) sum += density[s.shifted(spec_, off).linear(spec_)];
  return spec_.cell_volume() * sum;
}

std::vector<double> BallStencil::integrate_everywhere(std::span<const double> density) const {
  if (density.size() != spec_.sites()) throw std::invalid_argument("density size mismatch");
  const std::size_t N = spec_.sites();
  // linear offsets are site dependent only through wrap-around; handle with coordinates
  std::vector<double> out(N, 0.0);
  const int n = spec_.n_per_axis;
  parallel::parallel_for(N, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const SiteIndex s = SiteIndex::from_linear(spec_, i);
      double sum = 0.0;
      for (const auto& off : offsets_) {
        std::size_t idx = 0;
        for (int k = 0; k < kDim; ++k) {
          int c = s.coords[k] + off[k];
          if (c >= n) c -= n;
          if (c < 0) c += n;
          idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(c);
        }
        sum += density[idx];
      }
      out[i] = spec_.cell_volume() * sum;
    }
  });
  return out;
}

NeighborTable::NeighborTable(const LatticeSpec& spec) : table_(12 * spec.sites()) {
  const std::size_t N = spec.sites();
  const int n = spec.n_per_axis;
  for (std::size_t i = 0; i < N; ++i) {
    const SiteIndex s = SiteIndex::from_linear(spec, i);
    for (int mu = 0; mu < kDim; ++mu) {
      const std::size_t st = spec.stride(mu);
      const int c = s.coords[mu];
      const std::size_t base = i - static_cast<std::size_t>(c) * st;
      table_[12 * i + 2 * mu] = static_cast<std::uint32_t>(base + static_cast<std::size_t>((c + n - 1) % n) * st);
      table_[12 * i + 2 * mu + 1] = static_cast<std::uint32_t>(base + static_cast<std::size_t>((c + 1) % n) * st);
    }
  }
}

std::shared_ptr<const NeighborTable> NeighborTable::get(const LatticeSpec& spec) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const NeighborTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(spec.n_per_axis);
  if (it != cache.end()) return it->second;
  // keep memory bounded: large tables are not retained alongside others
  if (cache.size() > 3) cache.clear();
  auto t = std::make_shared<const NeighborTable>(spec);
  cache.emplace(spec.n_per_axis, t);
  return t;
}

}  // namespace dtil
