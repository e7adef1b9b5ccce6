#pragma once

#include <vector>

#include "qclab/geometry.hpp"

namespace qclab {

enum class AmplitudeConvention { Physical, Unit };

/// One plane-wave mode of the periodic box: integer wavevector n,
/// k = (2 pi / L) n, omega = c |k|, a unit polarization vector
/// orthogonal to k, and the field amplitude for the chosen convention.
struct Mode {
  Vec3i n{0, 0, 0};
  Vec3 k{0.0, 0.0, 0.0};
  double omega = 0.0;
  int pol_index = 1;  // 1 or 2
  Vec3 pol{0.0, 0.0, 0.0};
  double amplitude = 1.0;
};

struct ModeEntry {
  Vec3i n;
  int pol_index;
};

struct ModeSet {
  double box_length = 2.0 * M_PI;
  double c = 1.0;
  double hbar = 1.0;
  AmplitudeConvention convention = AmplitudeConvention::Unit;
  std::vector<Mode> modes;

  double volume() const { return box_length * box_length * box_length; }
  int size() const { return static_cast<int>(modes.size()); }
};

/// Deterministic polarization rule: for k not parallel to z,
/// pol1 = normalize(k x z), pol2 = normalize(k) x pol1; for k parallel
/// to z, pol1 = x, pol2 = y.
ModeSet build_mode_set(double box_length, const std::vector<ModeEntry>& entries,
                       double c = 1.0, double hbar = 1.0,
                       AmplitudeConvention convention = AmplitudeConvention::Unit);

/// Constant coefficient vector of the positive-frequency mode function:
/// mode_function(+) = coefficient * exp(i (k.r - omega t)).
Vec3c mode_coefficient(const ModeSet& ms, const Mode& mode, FieldKind field);

/// Coefficient 3-vector multiplying the mode's ladder operator at `point`.
/// Sign Minus is the complex conjugate of the Plus function.
Vec3c mode_function(const ModeSet& ms, const Mode& mode, FieldKind field,
                    FreqSign sign, const SpacetimePoint& point);

/// Exact analytic derivative of mode_function along `axis`.
Vec3c mode_derivative(const ModeSet& ms, const Mode& mode, FieldKind field,
                      FreqSign sign, const SpacetimePoint& point, Axis axis);

}  // namespace qclab
