#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qclab/conservation.hpp"
#include "qclab/oracle.hpp"

using namespace qclab;

TEST_CASE("dense correlator trivial values") {
  const ModeSet ms = build_mode_set(2.0 * M_PI, {{Vec3i(0, 0, 1), 1}});
  const FockSpace space = build_fock_space(1, {6});
  const SlotPattern e22{{{FieldKind::E, FreqSign::Minus},
                         {FieldKind::E, FreqSign::Minus},
                         {FieldKind::E, FreqSign::Plus},
                         {FieldKind::E, FreqSign::Plus}}};
  const std::vector<SpacetimePoint> pts(4);

  const DensityOperator vac = make_state(space, StateSpec::vacuum());
  CHECK(dense_correlator(vac, space, ms, e22, pts).frobenius_norm() == 0.0);

  const DensityOperator f1 = make_state(space, StateSpec::fock({1}));
  CHECK(dense_correlator(f1, space, ms, e22, pts).frobenius_norm() < 1e-15);
}

TEST_CASE("finite differences") {
  const SpacetimePoint p{Vec3(0.3, 0.4, 0.5), 0.2};

  // constant field
  auto constant = [](const SpacetimePoint&) {
    Tensor t(0);
    t[0] = Complex{2.5, -1.0};
    return t;
  };
  const FDResult c2 = fd_derivative(constant, p, Axis::Z, FDScheme{2, 0.01, false});
  CHECK(c2.value.frobenius_norm() < 1e-12);

  // single plane wave, error halving ratio ~ 4 for the order-2 scheme
  const double kz = 2.0;
  auto wave = [&](const SpacetimePoint& q) {
    Tensor t(0);
    t[0] = std::exp(kI * (kz * q.r.z() - 1.3 * q.t));
    return t;
  };
  const Complex exact = kI * kz * std::exp(kI * (kz * p.r.z() - 1.3 * p.t));
  const double e1 =
      std::abs(fd_derivative(wave, p, Axis::Z, FDScheme{2, 0.05, false}).value[0] - exact);
  const double e2 =
      std::abs(fd_derivative(wave, p, Axis::Z, FDScheme{2, 0.025, false}).value[0] - exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.075));

  // richardson improves and reports an estimate
  const FDResult rich = fd_derivative(wave, p, Axis::Z, FDScheme{2, 0.05, true});
  REQUIRE(rich.error_estimate.has_value());
  CHECK(std::abs(rich.value[0] - exact) < e2);

  // fourth order beats second order at the same step
  const double e4 =
      std::abs(fd_derivative(wave, p, Axis::Z, FDScheme{4, 0.05, false}).value[0] - exact);
  CHECK(e4 < e1);

  // oversized step is flagged
  const double lambda_min = 2.0 * M_PI / kz;
  CHECK(fd_derivative(wave, p, Axis::Z, FDScheme{2, lambda_min, false}, lambda_min).h_too_large);
  CHECK(!fd_derivative(wave, p, Axis::Z, FDScheme{2, lambda_min / 100.0, false}, lambda_min)
             .h_too_large);
}

TEST_CASE("grid integration over the periodic box") {
  const double L = 2.0 * M_PI;
  const Complex full =
      grid_integral([](const Vec3&) { return Complex{1.0, 0.0}; }, L, 8);
  CHECK(std::abs(full - Complex{L * L * L, 0.0}) < 1e-10);

  const Complex osc =
      grid_integral([](const Vec3& r) { return std::exp(kI * r.z()); }, L, 8);
  CHECK(std::abs(osc) < 1e-13 * L * L * L);

  // band-limited integrand: already exact, stable under refinement
  auto f = [](const Vec3& r) {
    return std::exp(kI * (2.0 * r.x() - r.y())) + Complex{0.7, 0.0};
  };
  const Complex a = grid_integral(f, L, 8);
  const Complex b = grid_integral(f, L, 10);
  CHECK(std::abs(a - b) < 1e-12 * std::abs(a));

  CHECK_THROWS_AS(grid_integral(f, L, 1), std::invalid_argument);
}

TEST_CASE("finite differences approach the analytic slot-1 derivative") {
  const ModeSet ms =
      build_mode_set(2.0 * M_PI, {{Vec3i(0, 0, 1), 1}, {Vec3i(1, 1, 0), 2}});
  const FockSpace space = build_fock_space(2, {6, 6});
  const DensityOperator rho =
      make_state(space, StateSpec::coherent({Complex{0.4, 0.1}, Complex{0.0, 0.3}}));
  const std::vector<SpacetimePoint> fixed{{Vec3(0.7, 1.9, 2.3), 0.15},
                                          {Vec3(3.1, 0.4, 5.2), -0.4},
                                          {Vec3(4.9, 2.6, 1.1), 0.55}};
  const SlotPattern pattern{{{FieldKind::E, FreqSign::Minus},
                             {FieldKind::E, FreqSign::Plus},
                             {FieldKind::E, FreqSign::Plus},
                             {FieldKind::E, FreqSign::Plus}}};
  const CorrelatorField cf = correlator_field(rho, space, ms, pattern, fixed);
  auto eval = [&](const SpacetimePoint& p) { return cf.evaluate(p); };

  const SpacetimePoint p{Vec3(1.1, 0.6, 2.9), 0.35};
  for (Axis axis : {Axis::X, Axis::Z, Axis::T}) {
    const Tensor exact = slot1_derivative(cf, axis).evaluate(p);
    const double scale = std::max(exact.frobenius_norm(), 1e-300);
    const double h = 1e-2;
    const Tensor fd2 = fd_derivative(eval, p, axis, FDScheme{2, h, false}).value;
    const Tensor fd2h = fd_derivative(eval, p, axis, FDScheme{2, 0.5 * h, false}).value;
    const double e1 = (fd2 - exact).frobenius_norm();
    const double e2 = (fd2h - exact).frobenius_norm();
    CHECK(e1 < 1e-3 * scale);  // O(h^2) truncation at h = 1e-2
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("grid quadrature matches the exact box integral of the energy density") {
  const ModeSet ms =
      build_mode_set(2.0 * M_PI, {{Vec3i(0, 0, 1), 1}, {Vec3i(1, 1, 0), 1}});
  const FockSpace space = build_fock_space(2, {6, 6});
  const DensityOperator rho =
      make_state(space, StateSpec::coherent({Complex{0.5, 0.0}, Complex{0.0, 0.3}}));
  const std::vector<SpacetimePoint> fixed{{Vec3(0.7, 1.9, 2.3), 0.15},
                                          {Vec3(3.1, 0.4, 5.2), -0.4},
                                          {Vec3(4.9, 2.6, 1.1), 0.55}};
  const ConservationFields cf = build_conservation_fields(
      Convention::Derivation13, rho, space, ms, fixed);

  // N_g at the band-limit rule 4 max|n| + 2 makes the rectangle rule exact
  const int n_g = 4 * 1 + 2;
  const double t1 = 0.4;
  const Complex grid = grid_integral(
      [&](const Vec3& r) {
        return cf.W.evaluate(SpacetimePoint{r, t1})[0];
      },
      ms.box_length, n_g);
  const Complex exact = cf.W.integral_over_box(ms.box_length, ms.box_length, t1);
  CHECK(std::abs(grid - exact) < 1e-12 * std::max(std::abs(exact), 1e-300));
}

TEST_CASE("convergence order fitting") {
  std::vector<std::pair<double, double>> h2;
  std::vector<std::pair<double, double>> h4;
  for (double h : {0.1, 0.05, 0.025, 0.0125}) {
    h2.push_back({h, 3.0 * h * h});
    h4.push_back({h, 0.4 * h * h * h * h});
  }
  CHECK(convergence_order(h2).slope == doctest::Approx(2.0).epsilon(0.025));
  CHECK(convergence_order(h4).slope == doctest::Approx(4.0).epsilon(0.0125));

  const OrderFit floor = convergence_order({{0.1, 1e-16}, {0.05, 1e-16}, {0.025, 1e-16}});
  CHECK(floor.floor_reached);

  CHECK_THROWS_AS(convergence_order({{0.1, 1.0}, {0.2, 0.5}, {0.05, 0.2}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(convergence_order({{0.1, 1.0}, {0.05, 0.5}}), std::invalid_argument);
}
