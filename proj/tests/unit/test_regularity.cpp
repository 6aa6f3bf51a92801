#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dtil/regularity.hpp"
#include "dtil/synth.hpp"

using namespace dtil;

namespace {

std::size_t brute_count(const LatticeSpec& spec, double radius) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < spec.sites(); ++i) {
    const Coords c = SiteIndex::from_linear(spec, i).coords;
    double s = 0.0;
    for (int k = 0; k < kDim; ++k) {
      const int d = std::min(c[k], spec.n_per_axis - c[k]);
      s += d * d * spec.spacing * spec.spacing;
    }
    if (std::sqrt(s) <= radius) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("lattice radius ladder") {
  const LatticeSpec spec(4, 0.5);
  const auto r = lattice_radius_ladder(spec);
  REQUIRE(r.size() == 5);
  CHECK(r[0] == doctest::Approx(0.5 / std::sqrt(2.0)));
  CHECK(r[1] == doctest::Approx(0.5));
  CHECK(r.back() == doctest::Approx(spec.half_period()));
}

TEST_CASE("monotonicity on a constant density matches brute-force counts") {
  const LatticeSpec spec(6, 1.0);
  const double c = 0.37;
  const DensityField d = constant_density(spec, c);
  const auto radii = lattice_radius_ladder(spec);
  const MonotonicityReport rep = monotonicity_scan(d, SiteIndex::from_linear(spec, 500), radii);
  REQUIRE(rep.values.size() == radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double expect = c * spec.cell_volume() * static_cast<double>(brute_count(spec, radii[k])) / (radii[k] * radii[k]);
    CHECK(rep.values[k] == doctest::Approx(expect).epsilon(1e-13));
    CHECK(rep.shell_values[k] == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(rep.violations.empty());
  CHECK(rep.strict_decreases == 0);
  CHECK(rep.max_shell_discrepancy < 1e-12);
}

TEST_CASE("monotonicity flags a decreasing profile") {
  const LatticeSpec spec(6, 1.0);
  DensityField d(spec);
  d.values[0] = 100.0;
  const MonotonicityReport rep = monotonicity_scan(d, SiteIndex{}, {1.0, 2.0, 3.0}, 0.1);
  // m = 100 / rho^2 falls by 3/4 and 5/9, far beyond 0.1 h / rho
  CHECK(rep.violations.size() == 2);
  CHECK(rep.strict_decreases == 2);
  CHECK_THROWS_AS(monotonicity_scan(d, SiteIndex{}, {1.0, 3.5}), DomainError);
  CHECK_THROWS_AS(monotonicity_scan(d, SiteIndex{}, {2.0, 1.0}), DomainError);
}

TEST_CASE("implied constants of a single spike") {
  const LatticeSpec spec(6, 0.5);
  DensityField d(spec);
  const SiteIndex c = SiteIndex::from_linear(spec, 777);
  d.values[777] = 9.0;
  const double r = 0.4;  // only the centre site
  const EpsRegularityReport rep = eps_regularity_scan(d, {c}, {r});
  REQUIRE(rep.probes.size() == 1);
  const auto& p = rep.probes[0];
  const double h = spec.spacing;
  CHECK(p.local_energy == doctest::Approx(std::pow(h, 6) * 9.0 / (r * r)));
  CHECK(p.local_energy_32 == doctest::Approx(std::pow(h, 6) * 27.0));
  CHECK(p.center_density_sqrt == doctest::Approx(3.0));
  CHECK(p.implied_c1 == doctest::Approx(std::pow(r / h, 3)));
  CHECK(p.implied_c2 == doctest::Approx(std::pow(r / h, 2)));
  CHECK(rep.max_implied_c1 == p.implied_c1);
}

TEST_CASE("eps-regularity on the trivial state") {
  const LatticeSpec spec(4, 1.0);
  const FieldState s(spec);
  const DensityField d = density(s);
  const EpsRegularityReport rep = eps_regularity_scan(s, auto_centers(d, 2), {1.0, 2.0});
  CHECK(rep.all_pass());
  CHECK(rep.max_implied_c1 == 0.0);
  CHECK(rep.r1_norm.value() == 0.0);
  CHECK(auto_centers(d, 2).size() == 64);
  std::ostringstream os;
  rep.write_csv(os);
  CHECK(os.str().rfind("center,radius,", 0) == 0);
}

TEST_CASE("eps-regularity bounds follow the constants") {
  const LatticeSpec spec(6, 1.0);
  const DensityField d = density_bump(spec, Point{3, 3, 3, 3, 3, 3}, 2.5, 1.0);
  EpsRegularityOptions opt;
  opt.epsilon = 1e9;
  opt.epsilon_32 = 1e9;
  opt.c1 = 1e9;
  opt.c2 = 1e9;
  const auto centers = auto_centers(d, 3);
  CHECK(eps_regularity_scan(d, centers, {1.0, 2.0}, opt).all_pass());
  opt.c1 = 1e-9;
  CHECK_FALSE(eps_regularity_scan(d, centers, {1.0, 2.0}, opt).all_pass());
}

TEST_CASE("liouville decomposition") {
  const LatticeSpec spec(6, 1.0);
  const DensityField d = density_bump(spec, Point{3, 3, 3, 3, 3, 3}, 2.5, 1.0);
  const SiteIndex c = SiteIndex::from_linear(spec, SiteIndex{{3, 3, 3, 3, 3, 3}}.linear(spec));
  const LiouvilleReport rep = liouville_diagnostic(d, c, 2.0, {1.0, 2.0}, {1.0, 2.0, 3.0});
  CHECK(rep.entries.size() == 5);
  for (const auto& e : rep.entries) {
    CHECK(e.tau <= e.sigma);
    CHECK(e.gamma_sigma == doctest::Approx(e.core + e.shell));
    CHECK(e.holds);
  }
  const Ball b = Ball::at_site(spec, c, 2.0);
  CHECK(rep.gamma == doctest::Approx(ball_integral(spec, d.values, b) / 4.0));
}
