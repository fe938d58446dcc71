#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "nlbiharm/assembly.hpp"
#include "nlbiharm/solve.hpp"
#include "support/oracles.hpp"

using namespace nlbiharm;

namespace {

ManufacturedProblem constant_problem(double value) {
  ManufacturedProblem p;
  p.name = "constant";
  p.dim = 1;
  p.u_gt = [value](const Point&) { return value; };
  p.grad_u_gt = [](const Point&) { return std::array<double, 2>{0.0, 0.0}; };
  p.f = [](const Point&) { return 0.0; };
  return p;
}

ManufacturedProblem constant_problem_2d(double value) {
  ManufacturedProblem p = constant_problem(value);
  p.dim = 2;
  return p;
}

ManufacturedProblem affine_problem_1d(double alpha, double beta) {
  ManufacturedProblem p;
  p.name = "affine";
  p.dim = 1;
  p.u_gt = [=](const Point& x) { return alpha + beta * x[0]; };
  p.grad_u_gt = [=](const Point&) { return std::array<double, 2>{beta, 0.0}; };
  p.f = [](const Point&) { return 0.0; };
  return p;
}

}  // namespace

TEST_CASE("basis kernel integrals") {
  const TensorMesh mesh(5, 1);

  // partition of unity against the closed-form whole-domain moment
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double eta : {5.0, 40.0}) {
    for (int t = 0; t < 50; ++t) {
      const double s = unif(rng);
      double sum = 0.0;
      for (int j = 0; j <= 15; ++j) {
        sum += basis_kernel_integral(mesh, j, s, eta);
      }
      const double exact = 0.5 * std::sqrt(M_PI) / eta *
                           (std::erf(eta * s) + std::erf(eta * (1.0 - s)));
      CHECK(sum == Catch::Approx(exact).margin(1e-12));
    }
  }

  // far tail underflows to zero
  const TensorMesh fine(10, 1);
  CHECK(basis_kernel_integral(fine, 0, 0.9, 100.0) == 0.0);

  // adaptive-quadrature oracle on random samples
  for (int t = 0; t < 60; ++t) {
    const int j = std::uniform_int_distribution<int>(0, 15)(rng);
    const double s = unif(rng);
    const double eta = std::uniform_real_distribution<double>(2.0, 120.0)(rng);
    double ref = 0.0;
    const int hi = j / 3;
    for (int cell : {hi - 1, hi}) {
      if (cell < 0 || cell >= 5) continue;
      if (j < 3 * cell || j > 3 * cell + 3) continue;
      ref += oracles::integrate(
          [&](double y) {
            return std::exp(-eta * eta * (s - y) * (s - y)) *
                   detail::lagrange_on_cell(mesh, j, cell, y);
          },
          mesh.cell_left(cell), mesh.cell_right(cell), 1e-14);
    }
    CHECK(basis_kernel_integral(mesh, j, s, eta) ==
          Catch::Approx(ref).margin(1e-12));
  }
}

TEST_CASE("inner tables") {
  const TensorMesh mesh(6, 1);
  const KernelParams kernel(0.03, 1);
  const auto prob = builtin_poly10();
  const InnerTables T = build_inner_tables(mesh, kernel, prob);

  REQUIRE(T.coords.size() == 6 * 15 + 2);
  REQUIRE(T.n_interior() == 90);
  CHECK(T.coords[T.idx_zero] == 0.0);
  CHECK(T.coords[T.idx_one] == 1.0);
  CHECK(T.I.allFinite());

  for (int r = 0; r < static_cast<int>(T.coords.size()); ++r) {
    const double s = T.coords[r];
    const double exact =
        gaussian_moment(0, kernel.eta, s - 1.0, s);
    CHECK(T.I.row(r).sum() == Catch::Approx(exact).margin(1e-12));
  }

  // weights per cell sum to h
  for (int i = 0; i < 6; ++i) {
    double sum = 0.0;
    for (int q = 0; q < 15; ++q) sum += T.weights[i * 15 + q];
    CHECK(sum == Catch::Approx(mesh.h()).epsilon(1e-13));
  }
}

TEST_CASE("boundary source values") {
  const TensorMesh mesh(4, 1);

  // zero normal-derivative data produces a vanishing source
  {
    const KernelParams kernel(0.1, 1);
    const auto T = build_inner_tables(mesh, kernel, constant_problem(3.0));
    for (int r = 0; r < T.n_interior(); ++r) {
      CHECK(detail::boundary_source_at(T, kernel, r, 0) == 0.0);
    }
  }

  // x^10 data: G_b(1) = 2 * Rbar(1,1) * b(1) = 5 * c_delta
  {
    const KernelParams kernel(0.1, 1);
    const auto T = build_inner_tables(mesh, kernel, builtin_poly10());
    const auto row = eval_g_row(T, kernel, mesh, {1.0, 0.0});
    CHECK(row.source == Catch::Approx(112.83791670955126).epsilon(1e-13));
  }
}

TEST_CASE("2D product form matches the 2D adaptive oracle") {
  const TensorMesh mesh(5, 2);
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> cells(0, 4);
  std::uniform_int_distribution<int> dofs(0, 15);
  for (double delta : {0.1, 0.01}) {
    const KernelParams kernel(delta, 2);
    for (int t = 0; t < 12; ++t) {
      const Point x = {unif(rng), unif(rng)};
      const int i1 = cells(rng), i2 = cells(rng);
      int j1 = dofs(rng), j2 = dofs(rng);
      j1 = std::clamp(j1, 3 * i1, 3 * i1 + 3);  // keep the dof on the cell
      j2 = std::clamp(j2, 3 * i2, 3 * i2 + 3);
      const double product =
          kernel.c_delta *
          basis_kernel_integral_cell(mesh, j1, i1, x[0], kernel.eta) *
          basis_kernel_integral_cell(mesh, j2, i2, x[1], kernel.eta);
      const double ref = oracles::integrate_2d(
          [&](double y1, double y2) {
            const std::array<double, 2> y = {y1, y2};
            return kernel_eval(kernel, x, y) *
                   detail::lagrange_on_cell(mesh, j1, i1, y1) *
                   detail::lagrange_on_cell(mesh, j2, i2, y2);
          },
          mesh.cell_left(i1), mesh.cell_right(i1), mesh.cell_left(i2),
          mesh.cell_right(i2), 1e-11);
      CHECK(product == Catch::Approx(ref).margin(1e-8));
    }
  }
}

TEST_CASE("g rows") {
  const TensorMesh mesh(8, 1);
  const KernelParams kernel(0.04, 1);

  // constant field with zero data: u(x) - u(y) vanishes identically
  {
    const auto prob = constant_problem(2.5);
    const auto T = build_inner_tables(mesh, kernel, prob);
    const auto u = interpolate(mesh, prob.u_gt);
    const double scale = kernel.c_delta / (kernel.delta * kernel.delta);
    for (int r = 0; r < T.n_interior(); ++r) {
      const auto g = eval_g_row(T, kernel, mesh, {T.coords[r], 0.0});
      CHECK(std::abs(g.row.dot(u) - g.source) <= 1e-12 * scale);
    }
  }

  // affine field with matching outward-normal data: g vanishes analytically
  {
    const auto prob = affine_problem_1d(0.4, -1.3);
    const auto T = build_inner_tables(mesh, kernel, prob);
    const auto u = interpolate(mesh, prob.u_gt);
    const double scale = kernel.c_delta / (kernel.delta * kernel.delta);
    double worst = 0.0;
    for (int r = 0; r < T.n_interior(); ++r) {
      const auto g = eval_g_row(T, kernel, mesh, {T.coords[r], 0.0});
      worst = std::max(worst, std::abs(g.row.dot(u) - g.source));
    }
    CHECK(worst <= 1e-9 * scale);
  }

  const auto T =
      build_inner_tables(mesh, kernel, constant_problem(0.0));
  CHECK_THROWS_AS(eval_g_row(T, kernel, mesh, {0.5, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("interior laplacian consistency of g") {
  const TensorMesh mesh(10, 1);
  const KernelParams kernel(0.02, 1);
  ManufacturedProblem prob;
  prob.name = "square";
  prob.dim = 1;
  prob.u_gt = [](const Point& x) { return x[0] * x[0]; };
  prob.grad_u_gt = [](const Point& x) {
    return std::array<double, 2>{2.0 * x[0], 0.0};
  };
  prob.f = [](const Point&) { return 0.0; };

  const auto T = build_inner_tables(mesh, kernel, prob);
  const auto u = interpolate(mesh, prob.u_gt);
  // probe the registered outer point closest to the midpoint
  int best = 0;
  for (int r = 0; r < T.n_interior(); ++r) {
    if (std::abs(T.coords[r] - 0.5) < std::abs(T.coords[best] - 0.5)) best = r;
  }
  const auto g = eval_g_row(T, kernel, mesh, {T.coords[best], 0.0});
  CHECK(g.row.dot(u) - g.source == Catch::Approx(-2.0).margin(1e-6));
}

TEST_CASE("h rows") {
  const TensorMesh mesh(6, 1);
  const KernelParams kernel(0.05, 1);
  const auto prob = constant_problem(1.7);
  const auto T = build_inner_tables(mesh, kernel, prob);
  const auto u = interpolate(mesh, prob.u_gt);

  for (double end : {0.0, 1.0}) {
    const auto h = eval_h_row(T, kernel, mesh, {end, 0.0});
    // matching constants: h = a*k - sum u H = 0
    CHECK(std::abs(prob.a({end, 0.0}) * h.mass - h.row.dot(u)) <=
          1e-12 * kernel.c_delta);
    // partition of unity: the row sums to the mass
    CHECK(h.row.sum() == Catch::Approx(h.mass).epsilon(1e-12));
  }
  const auto h0 = eval_h_row(T, kernel, mesh, {0.0, 0.0});
  CHECK(h0.mass == Catch::Approx(2.0).epsilon(1e-13));

  CHECK_THROWS_AS(eval_h_row(T, kernel, mesh, {0.3, 0.0}),
                  std::invalid_argument);

  // 2D: rows on each edge sum to the boundary mass
  const TensorMesh mesh2(3, 2);
  const KernelParams kernel2(0.07, 2);
  const auto prob2 = constant_problem_2d(0.0);
  const auto T2 = build_inner_tables(mesh2, kernel2, prob2);
  for (const Point& x : {Point{0.0, T2.coords[7]}, Point{1.0, T2.coords[20]},
                         Point{T2.coords[3], 0.0}, Point{T2.coords[40], 1.0}}) {
    const auto h = eval_h_row(T2, kernel2, mesh2, x);
    CHECK(h.row.sum() == Catch::Approx(h.mass).epsilon(1e-12));
    const std::array<double, 2> xs = {x[0], x[1]};
    CHECK(h.mass == Catch::Approx(domain_mass(kernel2, xs)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(eval_h_row(T2, kernel2, mesh2, {0.5, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("assembly basics") {
  // zero data: the minimizer is identically zero
  {
    const TensorMesh mesh(4, 1);
    const KernelParams kernel(0.05, 1);
    const auto sys = assemble_system(mesh, kernel, constant_problem(0.0),
                                     0.05 / 1000.0);
    CHECK(sys.rhs.norm() == 0.0);
    CHECK(sys.constant == 0.0);
    const auto sol = solve_spd(sys);
    CHECK(sol.coefficients.norm() == 0.0);
  }

  // smallest mesh: 4x4, exactly symmetric, SPD
  {
    const TensorMesh mesh(1, 1);
    const KernelParams kernel(0.1, 1);
    const auto sys =
        assemble_system(mesh, kernel, builtin_poly10(), 0.1 / 1000.0);
    REQUIRE(sys.matrix.rows() == 4);
    CHECK((sys.matrix.array() == sys.matrix.transpose().array()).all());
    CHECK_NOTHROW(solve_spd(sys));
  }

  // wide kernel (delta > domain size) stays valid
  {
    const TensorMesh mesh(4, 1);
    const KernelParams kernel(1.5, 1);
    const auto sys =
        assemble_system(mesh, kernel, builtin_poly10(), 1.5 / 1000.0);
    const auto sol = solve_spd(sys);
    CHECK(sol.residual_norm <= 1e-10);
  }

  const TensorMesh mesh(4, 1);
  const KernelParams kernel(0.05, 1);
  CHECK_THROWS_AS(
      assemble_system(mesh, kernel, builtin_poly10(), 0.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      assemble_system(mesh, kernel, builtin_xlog(), 1e-4),
      std::invalid_argument);
}

TEST_CASE("assembly rejects non-finite boundary data") {
  ManufacturedProblem bad;
  bad.name = "bad";
  bad.dim = 1;
  bad.u_gt = [](const Point& x) { return x[0]; };
  bad.grad_u_gt = [](const Point& x) {
    return std::array<double, 2>{
        x[0] == 0.0 ? std::numeric_limits<double>::quiet_NaN() : 1.0, 0.0};
  };
  bad.f = [](const Point&) { return 0.0; };
  const TensorMesh mesh(4, 1);
  const KernelParams kernel(0.05, 1);
  CHECK_THROWS_AS(assemble_system(mesh, kernel, bad, 1e-4), InvalidDataError);
}

TEST_CASE("assembled matrices are deterministic") {
  const TensorMesh mesh(3, 2);
  const KernelParams kernel(0.08, 2);
  const auto a = assemble_system(mesh, kernel, builtin_xlog(), 0.08 / 10.0);
  const auto b = assemble_system(mesh, kernel, builtin_xlog(), 0.08 / 10.0);
  CHECK((a.matrix.array() == b.matrix.array()).all());
  CHECK((a.rhs.array() == b.rhs.array()).all());
  CHECK(a.constant == b.constant);
  CHECK((a.matrix.array() == a.matrix.transpose().array()).all());
}

TEST_CASE("quadratic form reproduces the quadratured functional") {
  std::mt19937 rng(12);
  std::normal_distribution<double> gauss;

  {
    const TensorMesh mesh(8, 1);
    const KernelParams kernel(0.03, 1);
    const double xi = 0.03 / 1000.0;
    const auto prob = builtin_poly10();
    const auto sys = assemble_system(mesh, kernel, prob, xi);
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd u(mesh.n_dofs());
      for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = gauss(rng);
      const double direct = evaluate_functional(mesh, kernel, prob, xi, u);
      CHECK(functional_value(sys, u) ==
            Catch::Approx(direct).epsilon(1e-12));
    }
  }
  {
    const TensorMesh mesh(3, 2);
    const KernelParams kernel(0.09, 2);
    const double xi = 0.09 / 10.0;
    const auto prob = builtin_xlog();
    const auto sys = assemble_system(mesh, kernel, prob, xi);
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd u(mesh.n_dofs());
      for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = gauss(rng);
      const double direct = evaluate_functional(mesh, kernel, prob, xi, u);
      CHECK(functional_value(sys, u) ==
            Catch::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("ground-truth energy bounds the minimum") {
  const TensorMesh mesh(20, 1);
  const KernelParams kernel(0.0125, 1);
  const auto prob = builtin_poly10();
  const auto sys = assemble_system(mesh, kernel, prob, 0.0125 / 1000.0);
  const auto sol = solve_spd(sys);
  const auto u_gt = interpolate(mesh, prob.u_gt);
  const double at_gt = functional_value(sys, u_gt);
  const double at_min = functional_value(sys, sol.coefficients);
  CHECK(std::isfinite(at_gt));
  CHECK(at_gt >= at_min);
}

TEST_CASE("system dump format") {
  const TensorMesh mesh(1, 1);
  const KernelParams kernel(0.1, 1);
  const auto sys =
      assemble_system(mesh, kernel, builtin_poly10(), 0.1 / 1000.0);
  const std::string path = "dump_test.txt";
  dump_system(sys, path);

  std::ifstream in(path);
  REQUIRE(in.good());
  int dim = 0;
  long n = 0;
  in >> dim >> n;
  CHECK(dim == 1);
  REQUIRE(n == 4);
  for (long i = 0; i < n; ++i) {
    double v = 0.0;
    in >> v;
    CHECK(v == sys.rhs[i]);  // 17 significant digits round-trip exactly
  }
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j <= i; ++j) {
      double v = 0.0;
      in >> v;
      CHECK(v == sys.matrix(i, j));
    }
  }
  double extra = 0.0;
  CHECK_FALSE(static_cast<bool>(in >> extra));
  std::remove(path.c_str());

  CHECK_THROWS_AS(dump_system(sys, "/nonexistent_dir/x.txt"), IoError);
}
