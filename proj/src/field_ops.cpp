#include "qclab/field_ops.hpp"

#include <functional>
#include <stdexcept>

namespace qclab {

namespace {

void check_counts(const FockSpace& space, const ModeSet& ms) {
  if (space.mode_count() != ms.size())
    throw std::invalid_argument("mode count mismatch between space and mode set");
}

OperatorVector assemble(const FockSpace& space, const ModeSet& ms, FieldKind field,
                        FreqSign sign, const SpacetimePoint& p,
                        const std::function<Vec3c(const Mode&)>& coefficient) {
  check_counts(space, ms);
  const int dim = space.dim();
  OperatorVector out;
  out.field = field;
  out.sign = sign;
  out.point = p;
  for (auto& c : out.comp) c = Matrix::Zero(dim, dim);
  for (int m = 0; m < ms.size(); ++m) {
    const Vec3c f = coefficient(ms.modes[static_cast<std::size_t>(m)]);
    const LadderPair lp = ladder(space, m);
    const Matrix& op = (sign == FreqSign::Plus) ? lp.annihilate : lp.create;
    for (int j = 0; j < 3; ++j) out[j] += f(j) * op;
  }
  return out;
}

}  // namespace

OperatorVector field_operator(const FockSpace& space, const ModeSet& ms,
                              FieldKind field, FreqSign sign,
                              const SpacetimePoint& p) {
  return assemble(space, ms, field, sign, p, [&](const Mode& mode) {
    return mode_function(ms, mode, field, sign, p);
  });
}

OperatorVector field_operator_derivative(const FockSpace& space, const ModeSet& ms,
                                         FieldKind field, FreqSign sign,
                                         const SpacetimePoint& p, Axis axis) {
  return assemble(space, ms, field, sign, p, [&](const Mode& mode) {
    return mode_derivative(ms, mode, field, sign, p, axis);
  });
}

OperatorVector operator_curl(const FockSpace& space, const ModeSet& ms,
                             FieldKind field, FreqSign sign,
                             const SpacetimePoint& p) {
  std::array<OperatorVector, 3> d = {
      field_operator_derivative(space, ms, field, sign, p, Axis::X),
      field_operator_derivative(space, ms, field, sign, p, Axis::Y),
      field_operator_derivative(space, ms, field, sign, p, Axis::Z)};
  OperatorVector out;
  out.field = field;
  out.sign = sign;
  out.point = p;
  for (int j = 0; j < 3; ++j) {
    const int k = (j + 1) % 3, l = (j + 2) % 3;
    out[j] = d[static_cast<std::size_t>(k)][l] - d[static_cast<std::size_t>(l)][k];
  }
  return out;
}

Matrix operator_divergence(const FockSpace& space, const ModeSet& ms,
                           FieldKind field, FreqSign sign,
                           const SpacetimePoint& p) {
  Matrix out = Matrix::Zero(space.dim(), space.dim());
  for (int j = 0; j < 3; ++j)
    out += field_operator_derivative(space, ms, field, sign, p,
                                     static_cast<Axis>(j))[j];
  return out;
}

}  // namespace qclab
