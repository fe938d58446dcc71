#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nlbiharm/problems.hpp"

using namespace nlbiharm;

TEST_CASE("poly10 problem") {
  const auto p = builtin_poly10();
  CHECK(p.dim == 1);
  CHECK(p.f({1.0, 0.0}) == 5040.0);
  CHECK(p.f({0.0, 0.0}) == 0.0);
  CHECK(p.a({0.0, 0.0}) == 0.0);
  CHECK(p.a({1.0, 0.0}) == 1.0);
  CHECK(p.b_end(0) == 0.0);   // -u'(0)
  CHECK(p.b_end(1) == 10.0);  // +u'(1)
}

TEST_CASE("xlog problem") {
  const auto p = builtin_xlog();
  CHECK(p.dim == 2);
  CHECK(p.f({1.0, 0.0}) == -6.0);
  for (double x2 : {0.0, 0.3, 1.0}) {
    CHECK(p.f({0.0, x2}) == 0.0);
  }
  CHECK(p.b_edge(1, 0.5) ==
        Catch::Approx(0.40546510810816438).epsilon(1e-14));
  // bottom edge, outward normal (0,-1): -du/dx2 = -x1/(1+0)
  CHECK(p.b_edge(2, 0.25) == Catch::Approx(-0.25).epsilon(1e-14));
  // left edge, outward normal (-1,0): -du/dx1 = -ln(1+x2)
  CHECK(p.b_edge(0, 1.0) ==
        Catch::Approx(-std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("builtins pass a finite-difference bilaplacian check") {
  const double step = 1e-2;
  for (const auto& p : {builtin_poly10(), builtin_xlog()}) {
    double max_f = 0.0;
    double max_err = 0.0;
    for (double sx : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      for (double sy : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const Point x = {sx, p.dim == 2 ? sy : 0.0};
        const double fd = detail::fd_bilaplacian(p.u_gt, x, p.dim, step);
        max_err = std::max(max_err, std::abs(fd - p.f(x)));
        max_f = std::max(max_f, std::abs(p.f(x)));
        if (p.dim == 1) break;
      }
    }
    CHECK(max_err <= 1e-2 * std::max(max_f, 1.0));
  }
}

TEST_CASE("custom problems") {
  // a cubic has vanishing bilaplacian
  const auto cubic = custom_problem(
      "cubic", 1,
      [](const Point& x) { return x[0] * x[0] * x[0] - 0.5 * x[0]; },
      [](const Point& x) {
        return std::array<double, 2>{3.0 * x[0] * x[0] - 0.5, 0.0};
      },
      [](const Point&) { return 0.0; });
  CHECK(cubic.f({0.4, 0.0}) == 0.0);

  const auto quartic = custom_problem(
      "quartic", 1,
      [](const Point& x) { return std::pow(x[0], 4); },
      [](const Point& x) {
        return std::array<double, 2>{4.0 * std::pow(x[0], 3), 0.0};
      },
      [](const Point&) { return 24.0; });
  CHECK(quartic.b_end(1) == 4.0);

  // inconsistent pair is rejected
  CHECK_THROWS_AS(
      custom_problem(
          "bad", 1, [](const Point& x) { return std::pow(x[0], 4); },
          [](const Point& x) {
            return std::array<double, 2>{4.0 * std::pow(x[0], 3), 0.0};
          },
          [](const Point&) { return 0.0; }),
      InconsistentProblemError);

  CHECK_THROWS_AS(custom_problem(
                      "baddim", 3, [](const Point&) { return 0.0; },
                      [](const Point&) {
                        return std::array<double, 2>{0.0, 0.0};
                      },
                      [](const Point&) { return 0.0; }),
                  std::invalid_argument);
}
