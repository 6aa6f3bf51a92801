#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dtil/concentration.hpp"
#include "dtil/synth.hpp"

using namespace dtil;

namespace {

const Point kMid{3, 3, 3, 3, 3, 3};

}  // namespace

TEST_CASE("dyadic ladder") {
  const auto r = dyadic_ladder(2.0, 3);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == 0.5);
  CHECK(r[1] == 1.0);
  CHECK(r[2] == 2.0);
}

TEST_CASE("density bump normalization and shape") {
  const LatticeSpec spec(6, 1.0);
  const DensityField d = density_bump(spec, kMid, 2.0, 1.7);
  CHECK(lattice_integral(spec, d.power(1.5)) == doctest::Approx(1.7).epsilon(1e-12));
  const SiteIndex c{{3, 3, 3, 3, 3, 3}};
  SiteIndex n1 = c, n2 = c;
  n1.coords[0] = 4;
  n2.coords[0] = 5;
  CHECK(d.values[c.linear(spec)] > d.values[n1.linear(spec)]);
  CHECK(d.values[n2.linear(spec)] == 0.0);
  CHECK_THROWS(density_bump(spec, Point{3.5, 3.5, 3.5, 3.5, 3.5, 3.5}, 0.5, 1.0));
}

TEST_CASE("single atom on a zero limit is recovered exactly") {
  const LatticeSpec spec(6, 1.0);
  const double theta = 2.5;
  const auto seq_d = shrinking_sequence(constant_density(spec, 0.0), {{kMid, theta}}, {2.0, 1.5, 1.0, 0.75, 0.5});
  StateSequence seq(spec);
  for (const auto& d : seq_d) seq.add(d);
  AtomOptions opt;
  opt.radius_ladder = {1.0, 2.0};
  const ConcentrationReport rep = extract_atoms(seq, std::optional<DensityField>(constant_density(spec, 0.0)), 1.0, opt);
  REQUIRE(rep.atoms.size() == 1);
  CHECK(rep.rejected.empty());
  CHECK(rep.unstable.empty());
  const Atom& a = rep.atoms[0];
  CHECK(a.theta == doctest::Approx(theta).epsilon(1e-12));
  for (int k = 0; k < kDim; ++k) CHECK(a.position[k] == doctest::Approx(3.0));
  CHECK(a.site.coords == Coords{3, 3, 3, 3, 3, 3});
  CHECK(rep.count_bound_ok);
  CHECK(rep.sequence_mass_liminf == doctest::Approx(theta));

  // nested in r for every entry
  for (const auto& per_entry : rep.sets.sets)
    CHECK(std::includes(per_entry[1].begin(), per_entry[1].end(), per_entry[0].begin(), per_entry[0].end()));
  std::ostringstream os;
  rep.write_text(os);
  CHECK(os.str().find("theta") != std::string::npos);
}

TEST_CASE("sub-threshold bumps are not atoms") {
  const LatticeSpec spec(6, 1.0);
  const auto seq_d = shrinking_sequence(constant_density(spec, 0.0), {{kMid, 0.4}}, {1.0, 0.75, 0.5});
  StateSequence seq(spec);
  for (const auto& d : seq_d) seq.add(d);
  AtomOptions opt;
  opt.radius_ladder = {1.0, 2.0};
  const ConcentrationReport rep = extract_atoms(seq, std::optional<DensityField>{}, 1.0, opt);
  CHECK(rep.atoms.empty());
  CHECK(rep.sets.sets[2][0].empty());
  CHECK_THROWS_AS(concentration_sets(seq, 1.0, {}), std::invalid_argument);
}

TEST_CASE("interpolation reproduces site values and multilinear data") {
  const LatticeSpec spec(4, 0.5);
  std::vector<double> v(spec.sites());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto c = SiteIndex::from_linear(spec, i).coords;
    v[i] = c[0] + 10.0 * c[3];
  }
  CHECK(interpolate(spec, v, SiteIndex::from_linear(spec, 300).position(spec)) == v[300]);
  // inside one cell, away from the periodic seam, the data is linear
  CHECK(interpolate(spec, v, Point{0.625, 0.2, 0.0, 0.3, 0.0, 0.0}) == doctest::Approx(1.25 + 10.0 * 0.6));
}

TEST_CASE("soft ball mass is continuous and non-decreasing") {
  const LatticeSpec spec(6, 1.0);
  const DensityField d = density_bump(spec, kMid, 2.5, 1.0);
  const auto d32 = d.power(1.5);
  const SiteIndex c{{3, 3, 3, 3, 3, 3}};
  double prev = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double rho = 2.4 * k / 200.0;
    const double m = soft_ball_mass(spec, d32, c, rho);
    CHECK(m >= prev);
    CHECK(m - prev < 0.05);
    prev = m;
  }
  CHECK_THROWS_AS(soft_ball_mass(spec, d32, c, 2.8), DomainError);
}

TEST_CASE("blow-up scale selection hits half epsilon") {
  const LatticeSpec spec(6, 1.0);
  const DensityField d = density_bump(spec, Point{3.2, 2.9, 3, 3, 3, 3.1}, 2.5, 1.0);
  Ball search{kMid, 2.0};
  const double eps = 1.0;
  const BlowupScale s = select_blowup_scale(d, search, eps);
  REQUIRE(s.status == BlowupStatus::found);
  CHECK(std::abs(s.window_mass - 0.5 * eps) <= 1e-3 * eps);
  CHECK(s.radius > 0.0);
  CHECK(s.center.coords == Coords{3, 3, 3, 3, 3, 3});
  CHECK(select_blowup_scale(d, search, 4.0).status == BlowupStatus::no_concentration);
}

TEST_CASE("blow-up rescaling") {
  const LatticeSpec spec(6, 1.0);
  CHECK(blowup_rescale(FieldState(spec), kMid, 0.5).higgs.max_abs() == 0.0);
  const FieldState s = field_bump(spec, kMid, 2.5, 0.3);
  CHECK(s.is_valid(1e-12));
  RescaleOptions opt;
  const FieldState w = blowup_rescale(s, kMid, 1.0, opt);
  CHECK(w.spec().n_per_axis == 8);
  CHECK(w.spec().spacing == doctest::Approx(0.25));
  CHECK(w.is_valid(1e-12));
  // the window centre sits on the coarse site, so values carry over scaled
  const std::size_t mid = SiteIndex{{4, 4, 4, 4, 4, 4}}.linear(w.spec());
  const std::size_t cmid = SiteIndex{{3, 3, 3, 3, 3, 3}}.linear(spec);
  CHECK(max_abs_entry(w.higgs.at(mid, 0) - s.higgs.at(cmid, 0)) < 1e-14);
  const FieldState half = blowup_rescale(s, kMid, 0.5, opt);
  CHECK(max_abs_entry(half.connection.at(SiteIndex{{2, 2, 2, 2, 2, 2}}.linear(half.spec()), 0) -
                      s.connection.at(cmid, 0) * 0.5) < 1e-14);
  opt.max_points_per_axis = 6;
  CHECK_THROWS_AS(blowup_rescale(s, kMid, 1.0, opt), std::invalid_argument);
}
