#include "qclab/correlator.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qclab {

int SlotPattern::minus_count() const {
  int n = 0;
  for (const auto& s : slots)
    if (s.sign == FreqSign::Minus) ++n;
  return n;
}

bool SlotPattern::normal_ordered() const {
  bool seen_plus = false;
  for (const auto& s : slots) {
    if (s.sign == FreqSign::Plus) seen_plus = true;
    else if (seen_plus) return false;
  }
  return true;
}

std::string SlotPattern::label() const {
  std::string out;
  for (const auto& s : slots) {
    out += to_string(s.field);
    out += to_string(s.sign);
  }
  return out;
}

namespace {

void validate_pattern(const SlotPattern& pattern) {
  if (pattern.slots.empty()) throw std::invalid_argument("pattern needs at least one slot");
  if (!pattern.normal_ordered()) throw std::invalid_argument("normal ordering violated");
  if (pattern.rank() != 2 && pattern.rank() != 4)
    throw std::invalid_argument("rank must be 2 or 4");
}

}  // namespace

CorrelatorField correlator_field(const DensityOperator& rho, const FockSpace& space,
                                 const ModeSet& ms, const SlotPattern& pattern,
                                 const std::vector<SpacetimePoint>& fixed_points) {
  validate_pattern(pattern);
  const int rank = pattern.rank();
  if (static_cast<int>(fixed_points.size()) != rank - 1)
    throw std::invalid_argument("fixed point count must be rank - 1");
  if (space.mode_count() != ms.size())
    throw std::invalid_argument("mode count mismatch between space and mode set");

  // Fixed-slot operators in slot order 2..rank.
  std::vector<OperatorVector> fixed_ops;
  fixed_ops.reserve(static_cast<std::size_t>(rank - 1));
  for (int s = 1; s < rank; ++s) {
    const Slot& slot = pattern.slots[static_cast<std::size_t>(s)];
    fixed_ops.push_back(field_operator(space, ms, slot.field, slot.sign,
                                       fixed_points[static_cast<std::size_t>(s - 1)]));
  }

  // Right-product chains over all fixed-slot Cartesian multi-indices.
  const std::size_t tail_size = Tensor::size_for(rank - 1);
  std::vector<Matrix> chain(tail_size);
  if (rank == 2) {
    for (int i = 0; i < 3; ++i) chain[static_cast<std::size_t>(i)] = fixed_ops[0][i];
  } else {
    std::vector<Matrix> right(9);
    for (int n = 0; n < 3; ++n)
      for (int o = 0; o < 3; ++o)
        right[static_cast<std::size_t>(n * 3 + o)] = fixed_ops[1][n] * fixed_ops[2][o];
    for (int m = 0; m < 3; ++m)
      for (int no = 0; no < 9; ++no)
        chain[static_cast<std::size_t>(m * 9 + no)] =
            fixed_ops[0][m] * right[static_cast<std::size_t>(no)];
  }

  const Slot& slot1 = pattern.slots[0];
  const double sign_factor = (slot1.sign == FreqSign::Plus) ? 1.0 : -1.0;

  CorrelatorField cf;
  cf.label = pattern.label();
  cf.pattern = pattern;
  cf.fixed_points = fixed_points;
  cf.field = PlaneWaveField(rank);

  for (int mu = 0; mu < ms.size(); ++mu) {
    const Mode& mode = ms.modes[static_cast<std::size_t>(mu)];
    const LadderPair lp = ladder(space, mu);
    const Matrix rho_l =
        rho.matrix * ((slot1.sign == FreqSign::Plus) ? lp.annihilate : lp.create);

    Vec3c coef = mode_coefficient(ms, mode, slot1.field);
    if (slot1.sign == FreqSign::Minus) coef = coef.conjugate().eval();

    Tensor coeff(rank);
    bool nonzero = false;
    for (std::size_t tail = 0; tail < tail_size; ++tail) {
      const Complex tr = trace_of_product(rho_l, chain[tail]);
      if (tr == Complex{0.0, 0.0}) continue;
      nonzero = true;
      for (int j = 0; j < 3; ++j)
        coeff[static_cast<std::size_t>(j) * tail_size + tail] = coef(j) * tr;
    }
    if (!nonzero) continue;
    cf.field.add_term(sign_factor * mode.k, sign_factor * mode.omega, coeff);
  }
  return cf;
}

namespace {

SlotPattern four_pattern(FieldKind first, FieldKind rest, Convention convention) {
  if (convention == Convention::Printed22) {
    return SlotPattern{{{first, FreqSign::Minus},
                        {first, FreqSign::Minus},
                        {rest, FreqSign::Plus},
                        {rest, FreqSign::Plus}}};
  }
  return SlotPattern{{{first, FreqSign::Minus},
                      {rest, FreqSign::Plus},
                      {rest, FreqSign::Plus},
                      {rest, FreqSign::Plus}}};
}

}  // namespace

NamedTensors named_tensors(Convention convention, const DensityOperator& rho,
                           const FockSpace& space, const ModeSet& ms,
                           const std::vector<SpacetimePoint>& fixed_points) {
  NamedTensors out;
  out.E = correlator_field(rho, space, ms, four_pattern(FieldKind::E, FieldKind::E, convention),
                           fixed_points);
  out.H = correlator_field(rho, space, ms, four_pattern(FieldKind::B, FieldKind::B, convention),
                           fixed_points);
  out.M = correlator_field(rho, space, ms, four_pattern(FieldKind::E, FieldKind::B, convention),
                           fixed_points);
  out.N = correlator_field(rho, space, ms, four_pattern(FieldKind::B, FieldKind::E, convention),
                           fixed_points);
  return out;
}

CombinedTensors combined_ES(Convention convention, const DensityOperator& rho,
                            const FockSpace& space, const ModeSet& ms,
                            const std::vector<SpacetimePoint>& fixed_points) {
  const NamedTensors nt = named_tensors(convention, rho, space, ms, fixed_points);
  CombinedTensors out;
  out.energy.label = "energy_coherence";
  out.energy.fixed_points = fixed_points;
  out.energy.field = nt.E.field + nt.H.field;
  out.flow.label = "flow_coherence";
  out.flow.fixed_points = fixed_points;
  out.flow.field = nt.M.field - nt.N.field;
  return out;
}

FirstOrderTensors first_order_tensors(const DensityOperator& rho, const FockSpace& space,
                                      const ModeSet& ms, const SpacetimePoint& fixed_point) {
  const std::vector<SpacetimePoint> fixed{fixed_point};
  auto cf = [&](FieldKind a, FieldKind b) {
    return correlator_field(rho, space, ms,
                            SlotPattern{{{a, FreqSign::Minus}, {b, FreqSign::Plus}}}, fixed);
  };
  const CorrelatorField ee = cf(FieldKind::E, FieldKind::E);
  const CorrelatorField bb = cf(FieldKind::B, FieldKind::B);
  const CorrelatorField eb = cf(FieldKind::E, FieldKind::B);
  const CorrelatorField be = cf(FieldKind::B, FieldKind::E);
  FirstOrderTensors out;
  out.E.label = "E_jk";
  out.E.fixed_points = fixed;
  out.E.field = ee.field + bb.field;
  out.S.label = "S_jk";
  out.S.fixed_points = fixed;
  out.S.field = eb.field - be.field;
  return out;
}

Tensor coherent_factorized(const std::vector<Complex>& alphas, const ModeSet& ms,
                           const SlotPattern& pattern,
                           const std::vector<SpacetimePoint>& points) {
  if (static_cast<int>(alphas.size()) != ms.size())
    throw std::invalid_argument("one classical amplitude per mode required");
  if (points.size() != pattern.slots.size())
    throw std::invalid_argument("one point per slot required");
  std::vector<Vec3c> vectors;
  vectors.reserve(pattern.slots.size());
  for (std::size_t s = 0; s < pattern.slots.size(); ++s) {
    Vec3c v = Vec3c::Zero();
    for (int mu = 0; mu < ms.size(); ++mu)
      v += alphas[static_cast<std::size_t>(mu)] *
           mode_function(ms, ms.modes[static_cast<std::size_t>(mu)],
                         pattern.slots[s].field, FreqSign::Plus, points[s]);
    if (pattern.slots[s].sign == FreqSign::Minus) v = v.conjugate().eval();
    vectors.push_back(v);
  }
  return Tensor::outer(vectors);
}

Tensor wick_gaussian(const PairCorrelator& pair, const SlotPattern& pattern,
                     const std::vector<SpacetimePoint>& points) {
  if (points.size() != pattern.slots.size())
    throw std::invalid_argument("one point per slot required");
  const int rank = pattern.rank();
  Tensor out(rank);

  std::vector<int> minus_slots, plus_slots;
  for (int s = 0; s < rank; ++s) {
    if (pattern.slots[static_cast<std::size_t>(s)].sign == FreqSign::Minus)
      minus_slots.push_back(s);
    else
      plus_slots.push_back(s);
  }
  // odd moments of a zero-mean Gaussian state vanish exactly
  if (minus_slots.size() != plus_slots.size()) return out;

  std::vector<int> perm(plus_slots.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::sort(perm.begin(), perm.end());
  do {
    // one pairing: minus_slots[i] <-> plus_slots[perm[i]]
    std::vector<Eigen::Matrix3cd> g(minus_slots.size());
    for (std::size_t i = 0; i < minus_slots.size(); ++i)
      g[i] = pair(minus_slots[i], plus_slots[static_cast<std::size_t>(perm[i])]);

    std::array<int, 4> idx{0, 0, 0, 0};
    for (std::size_t f = 0; f < out.size(); ++f) {
      std::size_t rem = f;
      for (int s = rank - 1; s >= 0; --s) {
        idx[static_cast<std::size_t>(s)] = static_cast<int>(rem % 3);
        rem /= 3;
      }
      Complex v{1.0, 0.0};
      for (std::size_t i = 0; i < minus_slots.size(); ++i)
        v *= g[i](idx[static_cast<std::size_t>(minus_slots[i])],
                  idx[static_cast<std::size_t>(plus_slots[static_cast<std::size_t>(perm[i])])]);
      out[f] += v;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

namespace {

CorrelatorField with_field(const CorrelatorField& cf, PlaneWaveField f, const char* suffix) {
  CorrelatorField out;
  out.label = cf.label + suffix;
  out.fixed_points = cf.fixed_points;
  out.field = std::move(f);
  return out;
}

}  // namespace

CorrelatorField slot1_derivative(const CorrelatorField& cf, Axis axis) {
  return with_field(cf, cf.field.derivative(axis), "_d");
}

CorrelatorField slot1_curl(const CorrelatorField& cf) {
  return with_field(cf, cf.field.curl_first(), "_curl");
}

CorrelatorField slot1_divergence(const CorrelatorField& cf) {
  return with_field(cf, cf.field.divergence_first(), "_div");
}

CorrelatorField slot1_inverse_curl(const CorrelatorField& cf) {
  PlaneWaveField out(cf.rank());
  for (const auto& term : cf.field.terms()) {
    const double qnorm2 = term.q.squaredNorm();
    if (qnorm2 == 0.0) throw std::invalid_argument("inverse curl: zero wavevector term");
    const Vec3c qc = term.q.cast<Complex>();
    const Tensor div = term.coeff.contract_first(qc);
    if (div.frobenius_norm() >
        1e-12 * std::sqrt(qnorm2) * term.coeff.frobenius_norm())
      throw std::invalid_argument("inverse curl: non-transverse term");
    // a = i (q x f) / |q|^2 ; applying the slot-1 curl gives back f
    out.add_term(term.q, term.nu,
                 term.coeff.cross_first(qc) * (kI / qnorm2));
  }
  return with_field(cf, std::move(out), "_invcurl");
}

}  // namespace qclab
