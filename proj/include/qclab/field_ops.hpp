#pragma once

#include <array>

#include "qclab/fock.hpp"
#include "qclab/modes.hpp"

namespace qclab {

/// Cartesian components of a field operator at one spacetime point,
/// as Fock-space matrices.  field_operator(F, +, p) is componentwise
/// the adjoint of field_operator(F, -, p).
struct OperatorVector {
  std::array<Matrix, 3> comp;
  FieldKind field = FieldKind::E;
  FreqSign sign = FreqSign::Plus;
  SpacetimePoint point;

  const Matrix& operator[](int i) const { return comp[static_cast<std::size_t>(i)]; }
  Matrix& operator[](int i) { return comp[static_cast<std::size_t>(i)]; }
};

/// Full field operator: sum over modes of mode_function * ladder operator.
OperatorVector field_operator(const FockSpace& space, const ModeSet& ms,
                              FieldKind field, FreqSign sign,
                              const SpacetimePoint& p);

/// Exact derivative operator along `axis` (analytic mode coefficients).
OperatorVector field_operator_derivative(const FockSpace& space, const ModeSet& ms,
                                         FieldKind field, FreqSign sign,
                                         const SpacetimePoint& p, Axis axis);

/// eps_jkl d_k F_l as an OperatorVector (exact derivatives).
OperatorVector operator_curl(const FockSpace& space, const ModeSet& ms,
                             FieldKind field, FreqSign sign,
                             const SpacetimePoint& p);

/// sum_j d_j F_j as a single matrix (exact derivatives).
Matrix operator_divergence(const FockSpace& space, const ModeSet& ms,
                           FieldKind field, FreqSign sign,
                           const SpacetimePoint& p);

}  // namespace qclab
