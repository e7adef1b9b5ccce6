#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qclab/modes.hpp"

using namespace qclab;

namespace {

std::vector<Mode> random_modes(std::mt19937_64& eng, double L, double c,
                               AmplitudeConvention conv, int count) {
  std::vector<ModeEntry> entries;
  while (static_cast<int>(entries.size()) < count) {
    ModeEntry e;
    e.n = Vec3i(static_cast<int>(eng() % 5) - 2, static_cast<int>(eng() % 5) - 2,
                static_cast<int>(eng() % 5) - 2);
    e.pol_index = static_cast<int>(eng() % 2) + 1;
    if (e.n == Vec3i(0, 0, 0)) continue;
    bool dup = false;
    for (const auto& p : entries)
      if (p.n == e.n && p.pol_index == e.pol_index) dup = true;
    if (!dup) entries.push_back(e);
  }
  return build_mode_set(L, entries, c, 1.0, conv).modes;
}

Vec3c curl_of(const ModeSet& ms, const Mode& m, FieldKind f, FreqSign s,
              const SpacetimePoint& p) {
  std::array<Vec3c, 3> d = {mode_derivative(ms, m, f, s, p, Axis::X),
                            mode_derivative(ms, m, f, s, p, Axis::Y),
                            mode_derivative(ms, m, f, s, p, Axis::Z)};
  Vec3c out;
  for (int j = 0; j < 3; ++j) {
    const int k = (j + 1) % 3, l = (j + 2) % 3;
    out(j) = d[static_cast<std::size_t>(k)](l) - d[static_cast<std::size_t>(l)](k);
  }
  return out;
}

}  // namespace

TEST_CASE("mode construction basics") {
  const ModeSet ms = build_mode_set(2.0 * M_PI, {{Vec3i(0, 0, 1), 1}});
  CHECK(ms.modes[0].omega == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((ms.modes[0].pol - Vec3(1, 0, 0)).norm() < 1e-15);
  CHECK(ms.modes[0].amplitude == 1.0);

  const ModeSet diag = build_mode_set(2.0 * M_PI, {{Vec3i(1, 1, 0), 1}});
  CHECK(diag.modes[0].omega == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  CHECK_THROWS_AS(build_mode_set(2.0 * M_PI, {{Vec3i(0, 0, 0), 1}}), std::invalid_argument);
  CHECK_THROWS_AS(build_mode_set(2.0 * M_PI, {{Vec3i(0, 0, 1), 1}, {Vec3i(0, 0, 1), 1}}),
                  std::invalid_argument);
}

TEST_CASE("polarization geometry invariants") {
  std::mt19937_64 eng(7);
  for (double c : {1.0, 2.0}) {
    const ModeSet ms{2.0 * M_PI, c, 1.0, AmplitudeConvention::Unit,
                     random_modes(eng, 2.0 * M_PI, c, AmplitudeConvention::Unit, 8)};
    for (const auto& m : ms.modes) {
      CHECK(std::abs(m.pol.norm() - 1.0) < 1e-14);
      CHECK(std::abs(m.pol.dot(m.k)) < 1e-14 * m.k.norm());
      CHECK(std::abs(m.omega - c * m.k.norm()) < 1e-14 * m.omega);
    }
  }
  // the two polarizations of one k are orthogonal
  const ModeSet pair =
      build_mode_set(2.0 * M_PI, {{Vec3i(1, 2, -1), 1}, {Vec3i(1, 2, -1), 2}});
  CHECK(std::abs(pair.modes[0].pol.dot(pair.modes[1].pol)) < 1e-14);
}

TEST_CASE("mode function values at the origin") {
  const ModeSet ms = build_mode_set(2.0 * M_PI, {{Vec3i(0, 0, 1), 1}});
  const Mode& m = ms.modes[0];
  const SpacetimePoint origin;
  const Vec3c e = mode_function(ms, m, FieldKind::E, FreqSign::Plus, origin);
  CHECK((e - Vec3c(Complex{0, 1}, Complex{0, 0}, Complex{0, 0})).norm() < 1e-15);
  const Vec3c b = mode_function(ms, m, FieldKind::B, FreqSign::Plus, origin);
  CHECK((b - Vec3c(Complex{0, 0}, Complex{0, 1}, Complex{0, 0})).norm() < 1e-15);
  const Vec3c a = mode_function(ms, m, FieldKind::A, FreqSign::Plus, origin);
  CHECK((a - Vec3c(Complex{1, 0}, Complex{0, 0}, Complex{0, 0})).norm() < 1e-15);
}

TEST_CASE("exact derivatives") {
  const ModeSet ms = build_mode_set(2.0 * M_PI, {{Vec3i(0, 0, 1), 1}});
  const Mode& m = ms.modes[0];
  const SpacetimePoint origin;
  const Vec3c dz = mode_derivative(ms, m, FieldKind::E, FreqSign::Plus, origin, Axis::Z);
  CHECK((dz - Vec3c(Complex{-1, 0}, Complex{0, 0}, Complex{0, 0})).norm() < 1e-15);
  const Vec3c dt = mode_derivative(ms, m, FieldKind::E, FreqSign::Plus, origin, Axis::T);
  CHECK((dt - Vec3c(Complex{1, 0}, Complex{0, 0}, Complex{0, 0})).norm() < 1e-15);
  const Vec3c dx = mode_derivative(ms, m, FieldKind::E, FreqSign::Plus, origin, Axis::X);
  CHECK(dx.norm() == 0.0);
}

TEST_CASE("mode-level Maxwell, transversality and potential consistency") {
  std::mt19937_64 eng(11);
  auto u = [&]() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  for (double c : {1.0, 2.0}) {
    for (AmplitudeConvention conv : {AmplitudeConvention::Unit, AmplitudeConvention::Physical}) {
      ModeSet ms;
      ms.box_length = 2.0 * M_PI;
      ms.c = c;
      ms.convention = conv;
      ms.modes = random_modes(eng, ms.box_length, c, conv, 6);
      for (const auto& m : ms.modes) {
        for (int pt = 0; pt < 20; ++pt) {
          SpacetimePoint p;
          p.r = Vec3(u() * ms.box_length, u() * ms.box_length, u() * ms.box_length);
          p.t = (u() - 0.5) * 4.0;
          for (FreqSign sign : {FreqSign::Plus, FreqSign::Minus}) {
            const Vec3c fe = mode_function(ms, m, FieldKind::E, sign, p);
            const double scale = fe.norm();
            const Vec3c faraday =
                curl_of(ms, m, FieldKind::E, sign, p) +
                mode_derivative(ms, m, FieldKind::B, sign, p, Axis::T) / c;
            CHECK(faraday.norm() < 1e-13 * scale);
            const Vec3c ampere =
                curl_of(ms, m, FieldKind::B, sign, p) -
                mode_derivative(ms, m, FieldKind::E, sign, p, Axis::T) / c;
            CHECK(ampere.norm() < 1e-13 * scale);
            for (FieldKind f : {FieldKind::E, FieldKind::B, FieldKind::A}) {
              Complex div{0.0, 0.0};
              for (int ax = 0; ax < 3; ++ax)
                div += mode_derivative(ms, m, f, sign, p, static_cast<Axis>(ax))(ax);
              CHECK(std::abs(div) < 1e-13 * scale);
            }
            const Vec3c e_from_a =
                -mode_derivative(ms, m, FieldKind::A, sign, p, Axis::T) / c;
            CHECK((e_from_a - fe).norm() < 1e-13 * scale);
            const Vec3c b_from_a = curl_of(ms, m, FieldKind::A, sign, p);
            CHECK((b_from_a - mode_function(ms, m, FieldKind::B, sign, p)).norm() <
                  1e-13 * scale);
          }
        }
      }
    }
  }
}

TEST_CASE("physical amplitude convention") {
  const double L = 5.0, c = 2.0, hbar = 3.0;
  const ModeSet ms =
      build_mode_set(L, {{Vec3i(0, 0, 2), 1}}, c, hbar, AmplitudeConvention::Physical);
  const double omega = c * (2.0 * M_PI / L) * 2.0;
  CHECK(ms.modes[0].amplitude ==
        doctest::Approx(std::sqrt(2.0 * M_PI * hbar * omega / (L * L * L))).epsilon(1e-14));
}
