#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qclab {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using Vec3i = Eigen::Vector3i;

inline constexpr Complex kI{0.0, 1.0};

/// A point (r, t) in the box; slot coordinates of field operators.
struct SpacetimePoint {
  Vec3 r{0.0, 0.0, 0.0};
  double t = 0.0;
};

enum class FieldKind { E, B, A };
enum class FreqSign { Plus, Minus };
enum class Axis { X = 0, Y = 1, Z = 2, T = 3 };

inline const char* to_string(FieldKind f) {
  switch (f) {
    case FieldKind::E: return "E";
    case FieldKind::B: return "B";
    case FieldKind::A: return "A";
  }
  return "?";
}

inline const char* to_string(FreqSign s) {
  return s == FreqSign::Plus ? "+" : "-";
}

/// Levi-Civita symbol eps_{ijk} for indices in {0,1,2}.
inline int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  // even permutations of (0,1,2)
  if ((i == 0 && j == 1) || (i == 1 && j == 2) || (i == 2 && j == 0)) return 1;
  return -1;
}

}  // namespace qclab
