#include <doctest.h>

#include <cmath>
#include <complex>

#include "pfh/fft.hpp"
#include "pfh/field_ops.hpp"
#include "pfh/grid.hpp"
#include "pfh/io.hpp"
#include "test_helpers.hpp"

using namespace pfh;

TEST_SUITE("grid_spectral") {

TEST_CASE("grid invariants are enforced") {
  CHECK_THROWS_AS((GridSpec{2, 100, 4.0, -2.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{2, 4, 4.0, -2.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{2, 64, -1.0, -2.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((GridSpec{3, 64, 4.0, -2.0}).validate(), std::invalid_argument);
  GridSpec g{2, 64, 4.0, -2.0};
  g.validate();
  CHECK(g.spacing() == doctest::Approx(0.0625));
  CHECK(g.node_count() == 4096);
}

TEST_CASE("constant field transforms to the zero mode only") {
  const GridSpec g{2, 32, 4.0, -2.0};
  const Spectrum s = forward_transform(ScalarField::constant(g, 1.0));
  CHECK(std::abs(s.coefficients[0] - 1.0) < 1e-14);
  double rest = 0.0;
  for (std::size_t i = 1; i < s.coefficients.size(); ++i) rest = std::max(rest, std::abs(s.coefficients[i]));
  CHECK(rest < 1e-14);
}

TEST_CASE("single cosine lands on the +-1 modes with weight 1/2") {
  const GridSpec g{1, 64, 4.0, -2.0};
  ScalarField f = ScalarField::zeros(g);
  for (int i = 0; i < g.n; ++i) f.values[i] = std::cos(2.0 * pi * (g.coord(i) - g.origin) / g.length);
  const Spectrum s = forward_transform(f);
  CHECK(std::abs(s.coefficients[1] - 0.5) < 1e-14);          // k = +1
  CHECK(std::abs(s.coefficients[g.n - 1] - 0.5) < 1e-14);    // k = -1
  double rest = 0.0;
  for (int i = 0; i < g.n; ++i)
    if (i != 1 && i != g.n - 1) rest = std::max(rest, std::abs(s.coefficients[i]));
  CHECK(rest < 1e-13);
}

TEST_CASE("random field round trip is exact to 1e-12") {
  for (int dim : {1, 2}) {
    const GridSpec g{dim, 64, 4.0, -2.0};
    const ScalarField f = pfh_test::random_smooth_field(g, 7, 6, 1.0);
    const ScalarField back = inverse_transform(forward_transform(f));
    double err = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
      err = std::max(err, std::fabs(back.values[i] - f.values[i]));
    CHECK(err < 1e-12);
  }
}

TEST_CASE("Parseval: mean of f^2 equals the coefficient power") {
  const GridSpec g{2, 64, 4.0, -2.0};
  const ScalarField f = pfh_test::random_smooth_field(g, 11, 5, 1.0);
  std::vector<double> sq(f.values.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = f.values[i] * f.values[i];
  const double mean_sq = pairwise_sum(sq) / static_cast<double>(sq.size());
  const Spectrum s = forward_transform(f);
  double power = 0.0;
  for (const auto& c : s.coefficients) power += std::norm(c);
  CHECK(mean_sq == doctest::Approx(power).epsilon(1e-12));
}

TEST_CASE("laplacian symbol values and symmetry") {
  const GridSpec g{2, 32, 4.0, -2.0};
  const auto sym = laplacian_symbol(g);
  CHECK(sym[0] == 0.0);
  // k = (1, 0) on L = 4: -4 pi^2 / 16
  CHECK(sym[1 * g.n + 0] == doctest::Approx(-4.0 * pi * pi / 16.0).epsilon(1e-14));
  for (int k0 = -g.n / 2 + 1; k0 < g.n / 2; ++k0)
    for (int k1 = -g.n / 2 + 1; k1 < g.n / 2; ++k1) {
      const auto idx = [&](int a, int b) {
        return static_cast<std::size_t>((a + g.n) % g.n) * g.n + static_cast<std::size_t>((b + g.n) % g.n);
      };
      CHECK(sym[idx(k0, k1)] == sym[idx(-k0, -k1)]);
    }
}

TEST_CASE("spectral Laplacian is exact on single modes") {
  const GridSpec g{1, 128, 4.0, -2.0};
  const auto sym = laplacian_symbol(g);
  for (int m : {1, 2, 5}) {
    ScalarField f = ScalarField::zeros(g);
    for (int i = 0; i < g.n; ++i)
      f.values[i] = std::sin(2.0 * pi * m * (g.coord(i) - g.origin) / g.length);
    Spectrum s = forward_transform(f);
    for (std::size_t i = 0; i < s.coefficients.size(); ++i) s.coefficients[i] *= sym[i];
    const ScalarField lap = inverse_transform(s);
    const double factor = -std::pow(2.0 * pi * m / g.length, 2);
    double err = 0.0;
    for (int i = 0; i < g.n; ++i) err = std::max(err, std::fabs(lap.values[i] - factor * f.values[i]));
    CHECK(err < 1e-11 * std::fabs(factor));
  }
}

TEST_CASE("gradient_squared: constants, analytic modes, O(h^2) convergence") {
  const GridSpec g{2, 64, 4.0, -2.0};
  SUBCASE("constant field has zero gradient") {
    const ScalarField c = ScalarField::constant(g, 3.5);
    const ScalarField gs = gradient_squared(c);
    for (double v : gs.values) CHECK(v == 0.0);
  }
  SUBCASE("sine mode matches the analytic derivative at second order") {
    double errs[2];
    int idx = 0;
    for (int n : {64, 128}) {
      const GridSpec gg{1, n, 4.0, -2.0};
      ScalarField f = ScalarField::zeros(gg);
      for (int i = 0; i < n; ++i) f.values[i] = std::sin(2.0 * pi * (gg.coord(i) - gg.origin) / gg.length);
      const ScalarField gs = gradient_squared(f);
      double err = 0.0;
      const double w = 2.0 * pi / gg.length;
      for (int i = 0; i < n; ++i) {
        const double exact = std::pow(w * std::cos(w * (gg.coord(i) - gg.origin)), 2);
        err = std::max(err, std::fabs(gs.values[i] - exact));
      }
      errs[idx++] = err;
    }
    const double order = std::log2(errs[0] / errs[1]);
    CHECK(order > 1.9);
    CHECK(order < 2.1);
  }
  SUBCASE("sawtooth stays finite across the wrap") {
    ScalarField f = ScalarField::zeros(g);
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = static_cast<double>(i % g.n);
    const ScalarField gs = gradient_squared(f);
    for (double v : gs.values) CHECK(std::isfinite(v));
  }
}

TEST_CASE("PFH1 snapshots round trip bit-exactly") {
  const auto dir = pfh_test::scratch_dir("pfh1");
  const GridSpec g{2, 16, 4.0, -2.0};
  ScalarField f = ScalarField::zeros(g);
  SplitMix64 rng(123);
  for (double& v : f.values) v = 2.0 * rng.next_u01() - 1.0;
  f.values[0] = -0.0;
  f.values[1] = 1e-308;
  const auto path = dir / "field.pfh";
  write_field_pfh1(path, f);
  const ScalarField back = read_field_pfh1(path);
  REQUIRE(back.grid == f.grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    std::uint64_t a, b;
    std::memcpy(&a, &f.values[i], 8);
    std::memcpy(&b, &back.values[i], 8);
    CHECK(a == b);
  }
  std::filesystem::remove_all(dir);
}

} // TEST_SUITE
