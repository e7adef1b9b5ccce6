#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qclab/fock.hpp"

using namespace qclab;

TEST_CASE("fock space dimensions and basis order") {
  const FockSpace s1 = build_fock_space(1, {3});
  CHECK(s1.dim() == 4);

  const FockSpace s2 = build_fock_space(2, {3, 3});
  CHECK(s2.dim() == 16);
  // lexicographic, mode 0 most significant
  CHECK(s2.occupation(0) == std::vector<int>{0, 0});
  CHECK(s2.occupation(1) == std::vector<int>{0, 1});
  CHECK(s2.occupation(4) == std::vector<int>{1, 0});
  for (int i = 0; i < s2.dim(); ++i) CHECK(s2.index_of(s2.occupation(i)) == i);

  // 51 * 51 = 2601 still fits the default 4096 bound; 65 * 65 does not
  CHECK(build_fock_space(2, {50, 50}).dim() == 2601);
  CHECK_THROWS_WITH_AS(build_fock_space(2, {64, 64}), "space too large", std::runtime_error);
  CHECK_THROWS_WITH_AS(build_fock_space(2, {50, 50}, 2048), "space too large",
                       std::runtime_error);
  CHECK_THROWS_AS(build_fock_space(1, {0}), std::invalid_argument);
  CHECK_THROWS_AS(build_fock_space(0, {}), std::invalid_argument);
}

TEST_CASE("ladder operators") {
  const FockSpace s = build_fock_space(1, {2});
  const LadderPair lp = ladder(s, 0);
  // a|1> = |0>, a|2> = sqrt(2)|1>
  CHECK(std::abs(lp.annihilate(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(lp.annihilate(1, 2) - std::sqrt(2.0)) < 1e-15);
  CHECK((lp.create - lp.annihilate.adjoint()).norm() == 0.0);
  CHECK_THROWS_AS(ladder(s, 1), std::out_of_range);

  // commutator is the identity away from the truncation edge
  const FockSpace s5 = build_fock_space(1, {5});
  const LadderPair l5 = ladder(s5, 0);
  const Matrix comm = l5.annihilate * l5.create - l5.create * l5.annihilate;
  for (int n = 0; n <= 4; ++n)
    for (int m = 0; m <= 4; ++m)
      CHECK(std::abs(comm(n, m) - (n == m ? 1.0 : 0.0)) < 1e-14);
}

TEST_CASE("vacuum and fock states") {
  const FockSpace s = build_fock_space(2, {3, 3});
  const DensityOperator vac = make_state(s, StateSpec::vacuum());
  CHECK(std::abs(vac.matrix(0, 0) - 1.0) < 1e-15);
  CHECK(vac.matrix.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-15));

  const LadderPair lp = ladder(s, 0);
  const Matrix number = lp.create * lp.annihilate;
  CHECK(std::abs(trace_expect(vac, number)) < 1e-15);

  const DensityOperator f1 = make_state(s, StateSpec::fock({1, 0}));
  CHECK(std::abs(trace_expect(f1, number) - 1.0) < 1e-14);
  // fock states have no off-diagonal elements at all
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j)
      if (i != j) CHECK(f1.matrix(i, j) == Complex{0.0, 0.0});
}

TEST_CASE("coherent state expectation") {
  const FockSpace s = build_fock_space(1, {10});
  const DensityOperator rho = make_state(s, StateSpec::coherent({Complex{0.5, 0.0}}));
  const LadderPair lp = ladder(s, 0);
  CHECK(std::abs(trace_expect(rho, lp.annihilate) - Complex{0.5, 0.0}) < 1e-7);
  CHECK(std::abs(rho.matrix.trace() - Complex{1.0, 0.0}) < 1e-12);

  // truncation guard: alpha far too large for the cutoff
  CHECK_THROWS_WITH_AS(make_state(s, StateSpec::coherent({Complex{3.0, 0.0}})),
                       "cutoff too small", std::runtime_error);
}

TEST_CASE("thermal state occupation") {
  const FockSpace s = build_fock_space(1, {12});
  const DensityOperator rho = make_state(s, StateSpec::thermal({0.2}));
  const LadderPair lp = ladder(s, 0);
  const Matrix number = lp.create * lp.annihilate;
  CHECK(std::abs(trace_expect(rho, number) - 0.2) < 1e-6);
  // second factorial moment of the geometric distribution: <n(n-1)> = 2 nbar^2
  CHECK(std::abs(trace_expect(rho, lp.create * lp.create * lp.annihilate * lp.annihilate) -
                 2.0 * 0.2 * 0.2) < 1e-6);
}

TEST_CASE("mixtures and superpositions") {
  const FockSpace s = build_fock_space(1, {8});
  const StateSpec mix = StateSpec::mixture_of(
      {{0.5, StateSpec::coherent({Complex{0.5, 0.0}})}, {0.5, StateSpec::thermal({0.2})}});
  const DensityOperator rho = make_state(s, mix);
  const DensityOperator coh = make_state(s, StateSpec::coherent({Complex{0.5, 0.0}}));
  const DensityOperator th = make_state(s, StateSpec::thermal({0.2}));
  CHECK((rho.matrix - 0.5 * coh.matrix - 0.5 * th.matrix).cwiseAbs().maxCoeff() < 1e-15);

  StateSpec bad = mix;
  bad.mixture[0].weight = 0.6;
  CHECK_THROWS_AS(make_state(s, bad), std::invalid_argument);

  const StateSpec sup = StateSpec::superposition_of(
      {{{0}, Complex{1.0, 0.0}}, {{2}, Complex{1.0, 0.0}}});
  const DensityOperator psi = make_state(s, sup);
  const LadderPair lp = ladder(s, 0);
  CHECK(std::abs(trace_expect(psi, lp.create * lp.annihilate) - 1.0) < 1e-14);
  CHECK(std::abs(psi.matrix(0, 2) - 0.5) < 1e-14);
}

TEST_CASE("trace_expect adjoint symmetry") {
  const FockSpace s = build_fock_space(2, {4, 4});
  const DensityOperator rho = make_state(
      s, StateSpec::mixture_of({{0.3, StateSpec::fock({1, 0})},
                                {0.7, StateSpec::coherent({Complex{0.3, 0.0},
                                                           Complex{0.0, 0.2}})}}));
  std::mt19937_64 eng(42);
  auto u = [&]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53 - 0.5; };
  Matrix a = Matrix::Zero(s.dim(), s.dim());
  for (int i = 0; i < s.dim(); ++i)
    for (int j = 0; j < s.dim(); ++j) a(i, j) = Complex{u(), u()};
  const Complex lhs = trace_expect(rho, Matrix(a.adjoint()));
  const Complex rhs = std::conj(trace_expect(rho, a));
  CHECK(std::abs(lhs - rhs) < 1e-12);

  Matrix wrong = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(trace_expect(rho, wrong), std::invalid_argument);
}
