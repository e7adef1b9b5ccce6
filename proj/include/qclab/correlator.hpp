#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qclab/field_ops.hpp"
#include "qclab/planewave.hpp"

namespace qclab {

/// One operator position of a correlator: field kind and frequency sign.
struct Slot {
  FieldKind field;
  FreqSign sign;
};

/// Ordered slot list; valid patterns are normal ordered (every minus slot
/// before every plus slot) with rank 2 or 4.
struct SlotPattern {
  std::vector<Slot> slots;

  int rank() const { return static_cast<int>(slots.size()); }
  int minus_count() const;
  bool normal_ordered() const;
  std::string label() const;

  static SlotPattern of(std::initializer_list<Slot> s) { return SlotPattern{s}; }
};

/// The two candidate slot-sign families for the second-order tensors:
/// (-,-,+,+) as printed in the definitions, and (-,+,+,+) as used by the
/// curl-system derivation.
enum class Convention { Printed22, Derivation13 };

inline const char* to_string(Convention c) {
  return c == Convention::Printed22 ? "printed_22" : "derivation_13";
}

/// A correlation tensor as a function of its slot-1 spacetime point,
/// with all other slots fixed; stored as an exact plane-wave sum.
struct CorrelatorField {
  std::string label;
  std::optional<SlotPattern> pattern;
  std::vector<SpacetimePoint> fixed_points;
  PlaneWaveField field;

  int rank() const { return field.rank(); }
  Tensor evaluate(const SpacetimePoint& p1) const { return field.evaluate(p1); }
};

CorrelatorField correlator_field(const DensityOperator& rho, const FockSpace& space,
                                 const ModeSet& ms, const SlotPattern& pattern,
                                 const std::vector<SpacetimePoint>& fixed_points);

/// The four named second-order tensors of the chosen convention.
struct NamedTensors {
  CorrelatorField E;  // electric
  CorrelatorField H;  // magnetic
  CorrelatorField M;  // electric-magnetic
  CorrelatorField N;  // magnetic-electric
};

NamedTensors named_tensors(Convention convention, const DensityOperator& rho,
                           const FockSpace& space, const ModeSet& ms,
                           const std::vector<SpacetimePoint>& fixed_points);

/// Combined energy / energy-flow coherence tensors: energy = E + H,
/// flow = M - N.
struct CombinedTensors {
  CorrelatorField energy;  // double-struck E
  CorrelatorField flow;    // double-struck S
};

CombinedTensors combined_ES(Convention convention, const DensityOperator& rho,
                            const FockSpace& space, const ModeSet& ms,
                            const std::vector<SpacetimePoint>& fixed_points);

/// First-order tensors E_jk = <E-_j E+_k> + <B-_j B+_k> and
/// S_jk = <E-_j B+_k> - <B-_j E+_k>, as rank-2 fields of slot 1.
struct FirstOrderTensors {
  CorrelatorField E;
  CorrelatorField S;
};

FirstOrderTensors first_order_tensors(const DensityOperator& rho, const FockSpace& space,
                                      const ModeSet& ms, const SpacetimePoint& fixed_point);

/// Independent analytic path for coherent product states: the correlator
/// factorizes into classical analytic-signal vectors.
Tensor coherent_factorized(const std::vector<Complex>& alphas, const ModeSet& ms,
                           const SlotPattern& pattern,
                           const std::vector<SpacetimePoint>& points);

/// First-order correlator matrix for a (minus slot, plus slot) pair,
/// g[j, k] = <F-_j(p_a) G+_k(p_b)>.
using PairCorrelator = std::function<Eigen::Matrix3cd(int minus_slot, int plus_slot)>;

/// Independent path for zero-mean Gaussian states: sum over pairings of
/// minus slots with plus slots.  Unbalanced patterns give exactly zero.
Tensor wick_gaussian(const PairCorrelator& pair, const SlotPattern& pattern,
                     const std::vector<SpacetimePoint>& points);

CorrelatorField slot1_derivative(const CorrelatorField& cf, Axis axis);
CorrelatorField slot1_curl(const CorrelatorField& cf);
CorrelatorField slot1_divergence(const CorrelatorField& cf);

/// Inverse curl on the first index, divergence-free gauge: per term
/// a = i (q x f) / |q|^2.  Requires every term transverse in the first
/// index and q != 0.
CorrelatorField slot1_inverse_curl(const CorrelatorField& cf);

}  // namespace qclab
