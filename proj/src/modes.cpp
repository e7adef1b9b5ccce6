#include "qclab/modes.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

namespace qclab {

namespace {

std::pair<Vec3, Vec3> polarization_pair(const Vec3& k) {
  const Vec3 zhat(0.0, 0.0, 1.0);
  const Vec3 khat = k.normalized();
  Vec3 cross = k.cross(zhat);
  if (cross.norm() < 1e-12 * k.norm()) {
    return {Vec3(1.0, 0.0, 0.0), Vec3(0.0, 1.0, 0.0)};
  }
  const Vec3 pol1 = cross.normalized();
  const Vec3 pol2 = khat.cross(pol1);
  return {pol1, pol2};
}

}  // namespace

ModeSet build_mode_set(double box_length, const std::vector<ModeEntry>& entries,
                       double c, double hbar, AmplitudeConvention convention) {
  if (box_length <= 0.0) throw std::invalid_argument("box length must be positive");
  if (c <= 0.0) throw std::invalid_argument("speed of light must be positive");
  ModeSet ms;
  ms.box_length = box_length;
  ms.c = c;
  ms.hbar = hbar;
  ms.convention = convention;

  std::set<std::tuple<int, int, int, int>> seen;
  for (const auto& e : entries) {
    if (e.n == Vec3i(0, 0, 0)) throw std::invalid_argument("zero wavevector");
    if (e.pol_index != 1 && e.pol_index != 2)
      throw std::invalid_argument("polarization index must be 1 or 2");
    if (!seen.insert({e.n.x(), e.n.y(), e.n.z(), e.pol_index}).second)
      throw std::invalid_argument("duplicate mode entry");

    Mode m;
    m.n = e.n;
    m.k = (2.0 * M_PI / box_length) * e.n.cast<double>();
    // |k| from the integer norm so equal |n|^2 gives bit-identical omega
    m.omega = c * (2.0 * M_PI / box_length) *
              std::sqrt(static_cast<double>(e.n.squaredNorm()));
    m.pol_index = e.pol_index;
    const auto [pol1, pol2] = polarization_pair(m.k);
    m.pol = (e.pol_index == 1) ? pol1 : pol2;
    m.amplitude = (convention == AmplitudeConvention::Unit)
                      ? 1.0
                      : std::sqrt(2.0 * M_PI * hbar * m.omega /
                                  (box_length * box_length * box_length));
    ms.modes.push_back(m);
  }
  return ms;
}

Vec3c mode_coefficient(const ModeSet& ms, const Mode& mode, FieldKind field) {
  switch (field) {
    case FieldKind::E:
      return kI * mode.amplitude * mode.pol.cast<Complex>();
    case FieldKind::B: {
      const Vec3 bdir = mode.k.normalized().cross(mode.pol);
      return kI * mode.amplitude * bdir.cast<Complex>();
    }
    case FieldKind::A:
      return (ms.c * mode.amplitude / mode.omega) * mode.pol.cast<Complex>();
  }
  throw std::logic_error("unreachable");
}

Vec3c mode_function(const ModeSet& ms, const Mode& mode, FieldKind field,
                    FreqSign sign, const SpacetimePoint& point) {
  const Complex phase =
      std::exp(kI * (mode.k.dot(point.r) - mode.omega * point.t));
  const Vec3c plus = mode_coefficient(ms, mode, field) * phase;
  return sign == FreqSign::Plus ? plus : plus.conjugate().eval();
}

Vec3c mode_derivative(const ModeSet& ms, const Mode& mode, FieldKind field,
                      FreqSign sign, const SpacetimePoint& point, Axis axis) {
  // plus: d/dx_j -> i k_j, d/dt -> -i omega; minus: conjugate factors
  Complex factor;
  if (axis == Axis::T) {
    factor = -kI * mode.omega;
  } else {
    factor = kI * mode.k(static_cast<int>(axis));
  }
  if (sign == FreqSign::Minus) factor = std::conj(factor);
  return factor * mode_function(ms, mode, field, sign, point);
}

}  // namespace qclab
