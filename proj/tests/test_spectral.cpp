#include <doctest.h>

#include <cmath>
#include <vector>

#include <fractal_heat/laplacian.hpp>
#include <fractal_heat/spectral.hpp>

using namespace fractal_heat;
using doctest::Approx;

TEST_CASE("decimation map and its inverse branches") {
  CHECK(phi_forward(3, 5.0) == 0.0);
  CHECK(phi_forward(4, 3.0) == 9.0);
  CHECK(phi_inverse(3, 25.0 / 4.0, Branch::minus) == Approx(2.5).epsilon(1e-15));
  CHECK(phi_inverse(3, 2.0, Branch::minus) ==
        Approx((5.0 - std::sqrt(17.0)) / 2.0).epsilon(1e-15));
  for (int d : {3, 4}) {
    const double peak = (d + 2.0) * (d + 2.0) / 4.0;
    for (int k = 0; k <= 40; ++k) {
      const double x = peak * k / 40.0;
      for (Branch b : {Branch::minus, Branch::plus}) {
        const double y = phi_inverse(d, x, b);
        CHECK(phi_forward(d, y) == Approx(x).epsilon(1e-12));
      }
    }
    // fixed points of the two branches
    CHECK(phi_inverse(d, 0.0, Branch::minus) == Approx(0.0).epsilon(1e-12));
    CHECK(phi_inverse(d, d + 1.0, Branch::plus) == Approx(d + 1.0).epsilon(1e-12));
    CHECK_THROWS_AS(phi_inverse(d, peak * 1.01, Branch::minus), argument_error);
  }
}

TEST_CASE("phi_inverse(minus) contracts on [0, 2d]") {
  for (int d : {3, 4}) {
    std::vector<double> xs;
    for (double x = 0.0; x <= 2.0 * d + 1e-9; x += 0.25) xs.push_back(x);
    for (std::size_t i = 0; i < xs.size(); ++i)
      for (std::size_t j = i + 1; j < xs.size(); ++j) {
        const double num = std::fabs(phi_inverse(d, xs[i], Branch::minus) -
                                     phi_inverse(d, xs[j], Branch::minus));
        CHECK(num < std::fabs(xs[i] - xs[j]));
      }
  }
}

TEST_CASE("scaling constants") {
  CHECK(time_scale(3, 0) == 1.5);
  CHECK(time_scale(3, 2) == 37.5);
  CHECK(time_scale(4, 1) == 12.0);
  CHECK(cfl_max_step(3, 0) == Approx(2.0 / 9.0).epsilon(1e-15));
  CHECK(cfl_max_step(3, 6) == Approx(2.0 / 140625.0).epsilon(1e-15));
  CHECK(cfl_max_step(4, 1) == Approx(1.0 / 48.0).epsilon(1e-15));
  CHECK(spectral_bound(3) == 6.0);
  CHECK(spectral_bound(4) == 8.0);
}

TEST_CASE("smallest decimated eigenvalue") {
  CHECK(lambda_min_decimated(3, 1) == 2.0);
  CHECK(lambda_min_decimated(3, 6) ==
        Approx(0.0007174568805212722).epsilon(1e-12));
  // agrees with the dense solve at m=3
  const auto R = dirichlet_restrict(assemble_canonical({3, 3}));
  const auto vals = direct_spectrum(R);
  REQUIRE(!vals.empty());
  CHECK(vals.front() == Approx(lambda_min_decimated(3, 3)).epsilon(1e-9));
}

TEST_CASE("level-1 spectra are the textbook sets") {
  const auto g = direct_spectrum(dirichlet_restrict(assemble_canonical({3, 1})));
  REQUIRE(g.size() == 3);
  CHECK(g[0] == Approx(2.0).epsilon(1e-12));
  CHECK(g[1] == Approx(5.0).epsilon(1e-12));
  CHECK(g[2] == Approx(5.0).epsilon(1e-12));

  const auto t = direct_spectrum(dirichlet_restrict(assemble_canonical({4, 1})));
  REQUIRE(t.size() == 6);
  const double want[6] = {2, 6, 6, 6, 8, 8};
  for (int i = 0; i < 6; ++i) CHECK(t[static_cast<std::size_t>(i)] == Approx(want[i]).epsilon(1e-9));

  CHECK(decimation_spectrum(3, 1) == std::vector<double>{2.0, 5.0});
  const auto dt = decimation_spectrum(4, 1);
  REQUIRE(dt.size() == 3);
  CHECK(dt[0] == Approx(2.0).epsilon(1e-12));
  CHECK(dt[1] == Approx(6.0).epsilon(1e-12));
  CHECK(dt[2] == Approx(8.0).epsilon(1e-12));
}

TEST_CASE("direct spectrum is contained in the decimation set") {
  for (int d : {3, 4})
    for (int m = 1; m <= 3; ++m) {
      if (d == 4 && m == 3) continue;  // 514 interior vertices: still fine, but slow in debug
      const auto R = dirichlet_restrict(assemble_canonical({d, m}));
      const auto direct = direct_spectrum(R);
      const auto dec = decimation_spectrum(d, m);
      const auto rep = check_containment(direct, dec, 1e-8);
      CHECK(rep.contained);
      CHECK(rep.max_distance <= 1e-8);
      for (double v : direct) {
        CHECK(v > 0.0);
        CHECK(v <= spectral_bound(d) + 1e-9);
      }
    }
}

TEST_CASE("direct eigenvalues map down one level under phi") {
  for (int d : {3, 4})
    for (int m = 2; m <= (d == 3 ? 3 : 2); ++m) {
      const auto fine = direct_spectrum(dirichlet_restrict(assemble_canonical({d, m})));
      const auto coarse = decimation_spectrum(d, m - 1);
      const std::vector<double> seeds = d == 3
          ? std::vector<double>{2.0, 5.0, 6.0}
          : std::vector<double>{2.0, 6.0, 8.0};
      for (double v : fine) {
        const double down = phi_forward(d, v);
        bool ok = false;
        for (double s : seeds) ok = ok || std::fabs(v - s) <= 1e-8;
        for (double c : coarse) ok = ok || std::fabs(down - c) <= 1e-7;
        CHECK(ok);
      }
    }
}

TEST_CASE("direct_spectrum guards") {
  CHECK_THROWS_AS(direct_spectrum(assemble_canonical({3, 1})), argument_error);
  const auto empty = dirichlet_restrict(assemble_canonical({3, 0}));
  CHECK(direct_spectrum(empty).empty());
}

TEST_CASE("eigenvalue grouping") {
  const auto groups = group_eigenvalues({2.0, 5.0, 5.0 + 1e-10}, 1e-8);
  REQUIRE(groups.size() == 2);
  CHECK(groups[0].first == 2.0);
  CHECK(groups[0].second == 1);
  CHECK(groups[1].first == 5.0);
  CHECK(groups[1].second == 2);
}
