#include "qclab/conservation.hpp"

#include <cmath>
#include <stdexcept>

#include "qclab/oracle.hpp"

namespace qclab {

const char* to_string(CheckId id) {
  switch (id) {
    case CheckId::Eq7: return "eq7";
    case CheckId::Eq8: return "eq8";
    case CheckId::Eq9: return "eq9";
    case CheckId::Eq10: return "eq10";
    case CheckId::Eq11: return "eq11";
    case CheckId::Eq12: return "eq12";
    case CheckId::Eq13: return "eq13";
    case CheckId::Eq14: return "eq14";
    case CheckId::Eq15: return "eq15";
    case CheckId::Eq16: return "eq16";
    case CheckId::Eq17: return "eq17";
    case CheckId::Eq18: return "eq18";
    case CheckId::Eq23: return "eq23";
    case CheckId::Eq27: return "eq27";
    case CheckId::Eq36: return "eq36";
    case CheckId::Eq24: return "eq24";
    case CheckId::Eq28: return "eq28";
    case CheckId::SlotwiseE: return "slotwise_E";
    case CheckId::SlotwiseH: return "slotwise_H";
    case CheckId::SlotwiseM: return "slotwise_M";
    case CheckId::SlotwiseN: return "slotwise_N";
  }
  return "?";
}

std::optional<CheckId> check_id_from_string(const std::string& name) {
  static const std::pair<const char*, CheckId> table[] = {
      {"eq7", CheckId::Eq7},   {"eq8", CheckId::Eq8},   {"eq9", CheckId::Eq9},
      {"eq10", CheckId::Eq10}, {"eq11", CheckId::Eq11}, {"eq12", CheckId::Eq12},
      {"eq13", CheckId::Eq13}, {"eq14", CheckId::Eq14}, {"eq15", CheckId::Eq15},
      {"eq16", CheckId::Eq16}, {"eq17", CheckId::Eq17}, {"eq18", CheckId::Eq18},
      {"eq23", CheckId::Eq23}, {"eq27", CheckId::Eq27}, {"eq36", CheckId::Eq36},
      {"eq24", CheckId::Eq24}, {"eq28", CheckId::Eq28},
      {"slotwise_E", CheckId::SlotwiseE}, {"slotwise_H", CheckId::SlotwiseH},
      {"slotwise_M", CheckId::SlotwiseM}, {"slotwise_N", CheckId::SlotwiseN},
  };
  for (const auto& [s, id] : table)
    if (name == s) return id;
  return std::nullopt;
}

const char* describe(CheckId id) {
  switch (id) {
    case CheckId::Eq7: return "curl E + (1/c) dt N = 0";
    case CheckId::Eq8: return "curl M + (1/c) dt H = 0";
    case CheckId::Eq9: return "curl N - (1/c) dt E = 0";
    case CheckId::Eq10: return "curl H - (1/c) dt M = 0";
    case CheckId::Eq11: return "div E = 0";
    case CheckId::Eq12: return "div H = 0";
    case CheckId::Eq13: return "div M = 0";
    case CheckId::Eq14: return "div N = 0";
    case CheckId::Eq15: return "curl EE - (1/c) dt SS = 0 (combined tensors)";
    case CheckId::Eq16: return "curl SS + (1/c) dt EE = 0 (combined tensors)";
    case CheckId::Eq17: return "div EE = 0";
    case CheckId::Eq18: return "div SS = 0";
    case CheckId::Eq23: return "dt W + div T = 0 (energy continuity)";
    case CheckId::Eq27: return "dt Tm + div Wstress = 0 (momentum continuity)";
    case CheckId::Eq36: return "dt L + div M = 0 (angular momentum continuity)";
    case CheckId::Eq24: return "volume energy balance across the box";
    case CheckId::Eq28: return "volume momentum balance across the box";
    case CheckId::SlotwiseE: return "curl relation inside printed E tensor, first slot converted";
    case CheckId::SlotwiseH: return "curl relation inside printed H tensor, first slot converted";
    case CheckId::SlotwiseM: return "curl relation inside printed M tensor, first slot converted";
    case CheckId::SlotwiseN: return "curl relation inside printed N tensor, first slot converted";
  }
  return "?";
}

namespace {

constexpr double kTiny = 1e-300;

double relative_of(double residual, double scale) {
  if (residual == 0.0) return 0.0;
  return residual / std::max(scale, kTiny);
}

Verdict verdict_of(bool pass_fail_mode, double relative, double tolerance) {
  if (!pass_fail_mode) return Verdict::ReportedOnly;
  return relative <= tolerance ? Verdict::Pass : Verdict::Fail;
}

void finalize(ResidualReport& r) {
  r.relative = relative_of(r.residual_norm, r.scale);
  r.verdict = verdict_of(r.pass_fail_mode, r.relative, r.tolerance);
}

PlaneWaveField slice1(const PlaneWaveField& f, int i) {
  PlaneWaveField out(0);
  for (const auto& t : f.terms()) {
    Tensor c(0);
    c[0] = t.coeff.at({i});
    out.add_term(t.q, t.nu, c);
  }
  return out;
}

PlaneWaveField slice2(const PlaneWaveField& f, int p, int i) {
  PlaneWaveField out(0);
  for (const auto& t : f.terms()) {
    Tensor c(0);
    c[0] = t.coeff.at({p, i});
    out.add_term(t.q, t.nu, c);
  }
  return out;
}

PlaneWaveField diag_embed(const PlaneWaveField& scalar) {
  PlaneWaveField out(2);
  for (const auto& t : scalar.terms()) {
    Tensor c(2);
    for (int p = 0; p < 3; ++p) c.at({p, p}) = t.coeff[0];
    out.add_term(t.q, t.nu, c);
  }
  return out;
}

// residual of lhs against pointwise constituent scales
ResidualReport pointwise_report(const PlaneWaveField& lhs,
                                const std::vector<const PlaneWaveField*>& constituents,
                                const std::vector<SpacetimePoint>& sample_points) {
  ResidualReport r;
  for (const auto& p : sample_points) {
    PointResidual pr;
    pr.residual = lhs.evaluate(p).frobenius_norm();
    for (const auto* c : constituents)
      pr.scale = std::max(pr.scale, c->evaluate(p).frobenius_norm());
    r.points.push_back(pr);
    r.residual_norm = std::max(r.residual_norm, pr.residual);
    r.scale = std::max(r.scale, pr.scale);
  }
  return r;
}

// termwise transversality residual of a slot-1 divergence
ResidualReport termwise_divergence_report(const PlaneWaveField& field,
                                          const std::vector<SpacetimePoint>& sample_points) {
  ResidualReport r;
  const PlaneWaveField div = field.divergence_first();
  double term_residual = 0.0, term_scale = 0.0;
  for (const auto& t : field.terms()) {
    const Vec3c iq = kI * t.q.cast<Complex>();
    term_residual = std::max(term_residual, t.coeff.contract_first(iq).frobenius_norm());
    term_scale = std::max(term_scale, t.q.norm() * t.coeff.frobenius_norm());
  }
  r.residual_norm = term_residual;
  r.scale = term_scale;
  for (const auto& p : sample_points)
    r.points.push_back(PointResidual{div.evaluate(p).frobenius_norm(), term_scale});
  return r;
}

SlotPattern printed_pattern_for(CheckId id) {
  auto pat = [](FieldKind a, FieldKind b) {
    return SlotPattern{{{a, FreqSign::Minus},
                        {a, FreqSign::Minus},
                        {b, FreqSign::Plus},
                        {b, FreqSign::Plus}}};
  };
  switch (id) {
    case CheckId::SlotwiseE: return pat(FieldKind::E, FieldKind::E);
    case CheckId::SlotwiseH: return pat(FieldKind::B, FieldKind::B);
    case CheckId::SlotwiseM: return pat(FieldKind::E, FieldKind::B);
    case CheckId::SlotwiseN: return pat(FieldKind::B, FieldKind::E);
    default: throw std::invalid_argument("not a slotwise check id");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// context
// ---------------------------------------------------------------------------

IdentityContext::IdentityContext(const DensityOperator& rho, const FockSpace& space,
                                 const ModeSet& ms,
                                 std::vector<SpacetimePoint> fixed_points,
                                 MomentumSign momentum_sign)
    : rho_(&rho), space_(&space), ms_(&ms), fixed_points_(std::move(fixed_points)),
      momentum_sign_(momentum_sign) {}

const CorrelatorField& IdentityContext::correlator(const SlotPattern& pattern) const {
  const std::string key = pattern.label();
  auto it = correlators_.find(key);
  if (it == correlators_.end())
    it = correlators_
             .emplace(key, correlator_field(*rho_, *space_, *ms_, pattern, fixed_points_))
             .first;
  return it->second;
}

const NamedTensors& IdentityContext::named(Convention convention) const {
  const int key = static_cast<int>(convention);
  auto it = named_.find(key);
  if (it == named_.end())
    it = named_.emplace(key, named_tensors(convention, *rho_, *space_, *ms_, fixed_points_))
             .first;
  return it->second;
}

const CombinedTensors& IdentityContext::combined(Convention convention) const {
  const int key = static_cast<int>(convention);
  auto it = combined_.find(key);
  if (it == combined_.end()) {
    const NamedTensors& nt = named(convention);
    CombinedTensors ct;
    ct.energy.label = "energy_coherence";
    ct.energy.fixed_points = fixed_points_;
    ct.energy.field = nt.E.field + nt.H.field;
    ct.flow.label = "flow_coherence";
    ct.flow.fixed_points = fixed_points_;
    ct.flow.field = nt.M.field - nt.N.field;
    it = combined_.emplace(key, std::move(ct)).first;
  }
  return it->second;
}

const ConservationFields& IdentityContext::conserved(Convention convention) const {
  const int key = static_cast<int>(convention);
  auto it = conserved_.find(key);
  if (it == conserved_.end()) {
    const CombinedTensors& ct = combined(convention);
    ConservationFields out;
    out.energy = ct.energy;
    out.flow = ct.flow;
    out.c = ms_->c;

    const PlaneWaveField& E = ct.energy.field;
    const PlaneWaveField& S = ct.flow.field;
    out.W = contract_all_bilinear(E, E) + contract_all_bilinear(S, S);

    const PlaneWaveField eps = eps_contract_bilinear(S, E);
    const PlaneWaveField eps_sym = eps + eps.conjugate();
    out.T = eps_sym.scaled(Complex{ms_->c, 0.0});
    const double momentum_factor =
        (momentum_sign_ == MomentumSign::FixedVsPrinted) ? -1.0 : 1.0;
    out.Tm = eps_sym.scaled(Complex{momentum_factor / ms_->c, 0.0});

    const PlaneWaveField p_e = contract_tail_bilinear(E, E);
    const PlaneWaveField p_s = contract_tail_bilinear(S, S);
    out.Wstress =
        (p_e + p_e.conjugate()) + (p_s + p_s.conjugate()) - diag_embed(out.W);
    it = conserved_.emplace(key, std::move(out)).first;
  }
  return it->second;
}

ConservationFields build_conservation_fields(Convention convention,
                                             const DensityOperator& rho,
                                             const FockSpace& space, const ModeSet& ms,
                                             const std::vector<SpacetimePoint>& fixed_points,
                                             MomentumSign momentum_sign) {
  const IdentityContext ctx(rho, space, ms, fixed_points, momentum_sign);
  return ctx.conserved(convention);
}

// ---------------------------------------------------------------------------
// differential identities
// ---------------------------------------------------------------------------

ResidualReport curl_divergence_residual(CheckId id, Convention convention,
                                        const IdentityContext& ctx,
                                        const std::vector<SpacetimePoint>& sample_points,
                                        double tolerance) {
  const double inv_c = 1.0 / ctx.mode_set().c;
  ResidualReport r;

  const bool divergence_id =
      id == CheckId::Eq11 || id == CheckId::Eq12 || id == CheckId::Eq13 ||
      id == CheckId::Eq14 || id == CheckId::Eq17 || id == CheckId::Eq18;
  const bool curl_id =
      id == CheckId::Eq7 || id == CheckId::Eq8 || id == CheckId::Eq9 ||
      id == CheckId::Eq10 || id == CheckId::Eq15 || id == CheckId::Eq16;
  if (!divergence_id && !curl_id)
    throw std::invalid_argument("curl_divergence_residual handles eq7..eq18 only");

  if (divergence_id) {
    const PlaneWaveField* f = nullptr;
    switch (id) {
      case CheckId::Eq11: f = &ctx.named(convention).E.field; break;
      case CheckId::Eq12: f = &ctx.named(convention).H.field; break;
      case CheckId::Eq13: f = &ctx.named(convention).M.field; break;
      case CheckId::Eq14: f = &ctx.named(convention).N.field; break;
      case CheckId::Eq17: f = &ctx.combined(convention).energy.field; break;
      case CheckId::Eq18: f = &ctx.combined(convention).flow.field; break;
      default: break;
    }
    r = termwise_divergence_report(*f, sample_points);
    r.pass_fail_mode = true;  // transversality holds in both conventions
  } else {
    const PlaneWaveField* curl_of = nullptr;
    const PlaneWaveField* dt_of = nullptr;
    double sign = 1.0;
    switch (id) {
      case CheckId::Eq7:
        curl_of = &ctx.named(convention).E.field;
        dt_of = &ctx.named(convention).N.field;
        sign = 1.0;
        break;
      case CheckId::Eq8:
        curl_of = &ctx.named(convention).M.field;
        dt_of = &ctx.named(convention).H.field;
        sign = 1.0;
        break;
      case CheckId::Eq9:
        curl_of = &ctx.named(convention).N.field;
        dt_of = &ctx.named(convention).E.field;
        sign = -1.0;
        break;
      case CheckId::Eq10:
        curl_of = &ctx.named(convention).H.field;
        dt_of = &ctx.named(convention).M.field;
        sign = -1.0;
        break;
      case CheckId::Eq15:
        curl_of = &ctx.combined(convention).energy.field;
        dt_of = &ctx.combined(convention).flow.field;
        sign = -1.0;
        break;
      case CheckId::Eq16:
        curl_of = &ctx.combined(convention).flow.field;
        dt_of = &ctx.combined(convention).energy.field;
        sign = 1.0;
        break;
      default: break;
    }
    const PlaneWaveField curl_part = curl_of->curl_first();
    const PlaneWaveField dt_part =
        dt_of->derivative(Axis::T).scaled(Complex{sign * inv_c, 0.0});
    const PlaneWaveField lhs = curl_part + dt_part;
    r = pointwise_report(lhs, {&curl_part, &dt_part}, sample_points);
    r.pass_fail_mode = (convention == Convention::Derivation13);
  }

  r.identity = to_string(id);
  r.convention = convention;
  r.tolerance = tolerance;
  finalize(r);
  return r;
}

ResidualReport curl_divergence_residual(CheckId id, Convention convention,
                                        const DensityOperator& rho, const FockSpace& space,
                                        const ModeSet& ms,
                                        const std::vector<SpacetimePoint>& fixed_points,
                                        const std::vector<SpacetimePoint>& sample_points,
                                        double tolerance) {
  const IdentityContext ctx(rho, space, ms, fixed_points);
  return curl_divergence_residual(id, convention, ctx, sample_points, tolerance);
}

ResidualReport slotwise_residual(CheckId id, const IdentityContext& ctx,
                                 const std::vector<SpacetimePoint>& sample_points,
                                 double tolerance) {
  const SlotPattern pattern = printed_pattern_for(id);
  SlotPattern converted = pattern;
  const FieldKind first = pattern.slots[0].field;
  converted.slots[0].field = (first == FieldKind::E) ? FieldKind::B : FieldKind::E;
  // an E first slot converts with + sign; a B first slot with - sign
  const double sign = (first == FieldKind::E) ? 1.0 : -1.0;

  const CorrelatorField& orig = ctx.correlator(pattern);
  const CorrelatorField& conv = ctx.correlator(converted);

  const PlaneWaveField curl_part = orig.field.curl_first();
  const PlaneWaveField dt_part =
      conv.field.derivative(Axis::T).scaled(Complex{sign / ctx.mode_set().c, 0.0});
  const PlaneWaveField lhs = curl_part + dt_part;

  ResidualReport r = pointwise_report(lhs, {&curl_part, &dt_part}, sample_points);
  r.identity = to_string(id);
  r.convention = Convention::Printed22;
  r.tolerance = tolerance;
  r.pass_fail_mode = true;
  finalize(r);
  return r;
}

ResidualReport slotwise_residual(CheckId id, const DensityOperator& rho,
                                 const FockSpace& space, const ModeSet& ms,
                                 const std::vector<SpacetimePoint>& fixed_points,
                                 const std::vector<SpacetimePoint>& sample_points,
                                 double tolerance) {
  const IdentityContext ctx(rho, space, ms, fixed_points);
  return slotwise_residual(id, ctx, sample_points, tolerance);
}

// ---------------------------------------------------------------------------
// densities
// ---------------------------------------------------------------------------

namespace {

double checked_real(Complex v, double scale) {
  if (std::abs(v.imag()) > 1e-12 * std::max(scale, 1.0e-12))
    throw std::runtime_error("density expected to be real");
  return v.real();
}

}  // namespace

DensityBundle density_bundle(const ConservationFields& cf, const SpacetimePoint& p1,
                             const Vec3& r0) {
  DensityBundle out;

  // W from the tensors directly: nonnegative by construction
  const Tensor e = cf.energy.field.evaluate(p1);
  const Tensor s = cf.flow.field.evaluate(p1);
  const double we = e.frobenius_norm(), ws = s.frobenius_norm();
  out.W = we * we + ws * ws;

  const double scale_t = cf.T.max_term_norm() * static_cast<double>(cf.T.terms().size());
  const Tensor tval = cf.T.evaluate(p1);
  const Tensor tmval = cf.Tm.evaluate(p1);
  for (int i = 0; i < 3; ++i) {
    out.T(i) = checked_real(tval[static_cast<std::size_t>(i)], scale_t);
    out.Tm(i) = checked_real(tmval[static_cast<std::size_t>(i)], scale_t / (cf.c * cf.c));
  }

  const double scale_w =
      cf.Wstress.max_term_norm() * static_cast<double>(cf.Wstress.terms().size());
  const Tensor wval = cf.Wstress.evaluate(p1);
  for (int p = 0; p < 3; ++p)
    for (int i = 0; i < 3; ++i)
      out.Wstress(p, i) = checked_real(wval.at({p, i}), scale_w);
  const double asym = (out.Wstress - out.Wstress.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale_w, 1e-12))
    throw std::runtime_error("stress tensor expected symmetric");

  const Vec3 x = p1.r - r0;
  for (int p = 0; p < 3; ++p) {
    const int j = (p + 1) % 3, i = (p + 2) % 3;
    out.Lp(p) = x(j) * out.Tm(i) - x(i) * out.Tm(j);
    for (int k = 0; k < 3; ++k)
      out.Mpk(p, k) = x(j) * out.Wstress(i, k) - x(i) * out.Wstress(j, k);
  }
  return out;
}

DensityBundle density_bundle(Convention convention, const DensityOperator& rho,
                             const FockSpace& space, const ModeSet& ms,
                             const std::vector<SpacetimePoint>& fixed_points,
                             const SpacetimePoint& p1, const Vec3& r0,
                             MomentumSign momentum_sign) {
  const IdentityContext ctx(rho, space, ms, fixed_points, momentum_sign);
  return density_bundle(ctx.conserved(convention), p1, r0);
}

// ---------------------------------------------------------------------------
// continuity and integral balances
// ---------------------------------------------------------------------------

ResidualReport continuity_residual(CheckId id, Convention convention,
                                   const IdentityContext& ctx,
                                   const std::vector<SpacetimePoint>& sample_points,
                                   const Vec3& r0, double tolerance) {
  const ConservationFields& cf = ctx.conserved(convention);
  ResidualReport r;

  if (id == CheckId::Eq23) {
    const PlaneWaveField dt_w = cf.W.derivative(Axis::T);
    const PlaneWaveField div_t = cf.T.divergence_first();
    const PlaneWaveField lhs = dt_w + div_t;
    r = pointwise_report(lhs, {&dt_w, &div_t}, sample_points);
  } else if (id == CheckId::Eq27) {
    const PlaneWaveField dt_tm = cf.Tm.derivative(Axis::T);
    const PlaneWaveField div_w = cf.Wstress.divergence_first();
    const PlaneWaveField lhs = dt_tm + div_w;
    r = pointwise_report(lhs, {&dt_tm, &div_w}, sample_points);
  } else if (id == CheckId::Eq36) {
    const PlaneWaveField dt_tm = cf.Tm.derivative(Axis::T);
    const PlaneWaveField div_w = cf.Wstress.divergence_first();
    for (const auto& p : sample_points) {
      const Tensor dtv = dt_tm.evaluate(p);
      const Tensor dvv = div_w.evaluate(p);
      const Tensor wst = cf.Wstress.evaluate(p);
      const Vec3 x = p.r - r0;
      double res = 0.0, dl_norm = 0.0, dm_norm = 0.0;
      for (int pp = 0; pp < 3; ++pp) {
        const int j = (pp + 1) % 3, i = (pp + 2) % 3;
        const Complex dt_l = x(j) * dtv[static_cast<std::size_t>(i)] -
                             x(i) * dtv[static_cast<std::size_t>(j)];
        const Complex div_m = (wst.at({i, j}) - wst.at({j, i})) +
                              x(j) * dvv[static_cast<std::size_t>(i)] -
                              x(i) * dvv[static_cast<std::size_t>(j)];
        res += std::norm(dt_l + div_m);
        dl_norm += std::norm(dt_l);
        dm_norm += std::norm(div_m);
      }
      PointResidual pr;
      pr.residual = std::sqrt(res);
      pr.scale = std::max(std::sqrt(dl_norm), std::sqrt(dm_norm));
      r.points.push_back(pr);
      r.residual_norm = std::max(r.residual_norm, pr.residual);
      r.scale = std::max(r.scale, pr.scale);
    }
  } else {
    throw std::invalid_argument("continuity_residual handles eq23, eq27, eq36");
  }

  r.identity = to_string(id);
  r.convention = convention;
  r.tolerance = tolerance;
  r.pass_fail_mode = (convention == Convention::Derivation13);
  finalize(r);
  return r;
}

ResidualReport continuity_residual(CheckId id, Convention convention,
                                   const DensityOperator& rho, const FockSpace& space,
                                   const ModeSet& ms,
                                   const std::vector<SpacetimePoint>& fixed_points,
                                   const std::vector<SpacetimePoint>& sample_points,
                                   const Vec3& r0, MomentumSign momentum_sign,
                                   double tolerance) {
  const IdentityContext ctx(rho, space, ms, fixed_points, momentum_sign);
  return continuity_residual(id, convention, ctx, sample_points, r0, tolerance);
}

ResidualReport integral_balance(CheckId id, Convention convention,
                                const IdentityContext& ctx, IntegralVolume volume,
                                const std::vector<double>& times, const Vec3& r0,
                                double tolerance, std::pair<double, double> order_window) {
  (void)r0;
  if (id != CheckId::Eq24 && id != CheckId::Eq28)
    throw std::invalid_argument("integral_balance handles eq24 and eq28");
  if (times.size() < 3) throw std::invalid_argument("need at least 3 time samples");

  const ConservationFields& cf = ctx.conserved(convention);
  const double L = ctx.mode_set().box_length;

  // volume densities and matching surface fluxes through z = const planes
  std::vector<PlaneWaveField> density, flux_z;
  if (id == CheckId::Eq24) {
    density.push_back(cf.W);
    flux_z.push_back(slice1(cf.T, 2));
  } else {
    for (int i = 0; i < 3; ++i) {
      density.push_back(slice1(cf.Tm, i));
      flux_z.push_back(slice2(cf.Wstress, 2, i));
    }
  }

  ResidualReport r;
  r.identity = to_string(id);
  r.convention = convention;
  r.tolerance = tolerance;
  r.pass_fail_mode = (convention == Convention::Derivation13);

  if (volume == IntegralVolume::FullBox) {
    // periodic surface flux vanishes: the volume integral must not drift
    std::vector<double> values0;
    double drift = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
      double point_drift = 0.0;
      for (std::size_t c = 0; c < density.size(); ++c) {
        const Complex v = density[c].integral_over_box(L, L, times[j]);
        if (j == 0) values0.push_back(v.real());
        point_drift = std::max(point_drift,
                               std::abs(v.real() - values0[c]) + std::abs(v.imag()));
        scale = std::max(scale, std::abs(v.real()));
      }
      r.points.push_back(PointResidual{point_drift, scale});
      drift = std::max(drift, point_drift);
    }
    r.residual_norm = drift;
    r.scale = scale;
    finalize(r);
    return r;
  }

  // half box z in [0, L/2]: d/dt of the volume integral must equal the
  // inward flux through the two cut planes
  const double z_hi = 0.5 * L;
  double nu_max = 0.0;
  for (const auto& f : density)
    for (const auto& t : f.terms()) nu_max = std::max(nu_max, std::abs(t.nu));
  const double h0 = nu_max > 0.0 ? (2.0 * M_PI / nu_max) / 40.0 : 0.1;

  auto mismatch_at = [&](double h) {
    double worst = 0.0;
    for (double t : times) {
      for (std::size_t c = 0; c < density.size(); ++c) {
        const Complex fp = density[c].integral_over_box(L, z_hi, t + h);
        const Complex fm = density[c].integral_over_box(L, z_hi, t - h);
        const Complex dfdt = (fp - fm) / (2.0 * h);
        const Complex flux = flux_z[c].plane_integral_z(L, z_hi, t) -
                             flux_z[c].plane_integral_z(L, 0.0, t);
        worst = std::max(worst, std::abs(dfdt + flux));
      }
    }
    return worst;
  };

  double scale = 0.0;
  for (double t : times)
    for (std::size_t c = 0; c < density.size(); ++c)
      scale = std::max(scale, std::abs(flux_z[c].plane_integral_z(L, z_hi, t) -
                                       flux_z[c].plane_integral_z(L, 0.0, t)));

  std::vector<std::pair<double, double>> samples;
  for (double h : {h0, 0.5 * h0, 0.25 * h0}) {
    const double m = mismatch_at(h);
    samples.push_back({h, m});
    r.points.push_back(PointResidual{m, scale});
  }
  r.residual_norm = samples.back().second;
  r.scale = scale;
  const OrderFit fit = convergence_order(samples);
  r.floor_reached = fit.floor_reached;
  if (!fit.floor_reached) r.convergence_order = fit.slope;

  r.relative = relative_of(r.residual_norm, r.scale);
  if (r.pass_fail_mode) {
    const bool order_ok = fit.floor_reached || (fit.slope >= order_window.first &&
                                                fit.slope <= order_window.second);
    r.verdict = order_ok ? Verdict::Pass : Verdict::Fail;
  } else {
    r.verdict = Verdict::ReportedOnly;
  }
  return r;
}

ResidualReport integral_balance(CheckId id, Convention convention,
                                const DensityOperator& rho, const FockSpace& space,
                                const ModeSet& ms,
                                const std::vector<SpacetimePoint>& fixed_points,
                                IntegralVolume volume, const std::vector<double>& times,
                                const Vec3& r0, MomentumSign momentum_sign,
                                double tolerance, std::pair<double, double> order_window) {
  const IdentityContext ctx(rho, space, ms, fixed_points, momentum_sign);
  return integral_balance(id, convention, ctx, volume, times, r0, tolerance, order_window);
}

// ---------------------------------------------------------------------------
// angular momentum split
// ---------------------------------------------------------------------------

AngularSplit angular_split(Convention convention, const IdentityContext& ctx,
                           const Vec3& r0, double t1) {
  const ConservationFields& cf = ctx.conserved(convention);
  const double L = ctx.mode_set().box_length;
  const double c = ctx.mode_set().c;
  const double sgn = (ctx.momentum_sign() == MomentumSign::FixedVsPrinted) ? -1.0 : 1.0;

  const CorrelatorField potential = slot1_inverse_curl(cf.energy);
  const PlaneWaveField& S = cf.flow.field;
  const PlaneWaveField a_conj = potential.field.conjugate();

  AngularSplit out;

  // total: integral of eps_pji (r - r0)_j Tm_i
  for (int p = 0; p < 3; ++p) {
    const int j = (p + 1) % 3, i = (p + 2) % 3;
    const Complex v = slice1(cf.Tm, i).first_moment_integral(L, r0, j, t1) -
                      slice1(cf.Tm, j).first_moment_integral(L, r0, i, t1);
    out.total(p) = v.real();
  }

  auto contract_all_combiner = [](const Tensor& a, const Tensor& b) {
    Tensor c0(0);
    c0[0] = a.contract_all(b);
    return c0;
  };

  // orbital: (1/c) * 2 Re integral of S . ((r - r0) x grad) conj(A)
  std::array<PlaneWaveField, 3> grad_contracted;
  for (int beta = 0; beta < 3; ++beta)
    grad_contracted[static_cast<std::size_t>(beta)] = bilinear_map(
        S, a_conj.derivative(static_cast<Axis>(beta)), 0, contract_all_combiner);
  for (int p = 0; p < 3; ++p) {
    Complex acc{0.0, 0.0};
    for (int alpha = 0; alpha < 3; ++alpha)
      for (int beta = 0; beta < 3; ++beta) {
        const int eps = levi_civita(p, alpha, beta);
        if (eps == 0) continue;
        acc += static_cast<double>(eps) *
               grad_contracted[static_cast<std::size_t>(beta)].first_moment_integral(
                   L, r0, alpha, t1);
      }
    out.orbital(p) = sgn * 2.0 * acc.real() / c;
  }

  // spin: (1/c) integral of eps_pti (S_t conj(A)_i + c.c.)
  const PlaneWaveField x_half = bilinear_map(
      S, a_conj, 2, [](const Tensor& a, const Tensor& b) { return Tensor::contract_tail(a, b); });
  const PlaneWaveField x_full = x_half + x_half.conjugate();
  for (int p = 0; p < 3; ++p) {
    const int t = (p + 1) % 3, i = (p + 2) % 3;
    const Complex v = slice2(x_full, t, i).integral_over_box(L, L, t1) -
                      slice2(x_full, i, t).integral_over_box(L, L, t1);
    out.spin(p) = sgn * v.real() / c;
  }

  // middle term of the split, integrated exactly: one bulk piece per term
  // plus the first moments that survive the non-periodic (r - r0) weight
  for (int p = 0; p < 3; ++p) {
    Complex acc{0.0, 0.0};
    for (const auto& term : x_full.terms()) {
      PlaneWaveField probe(0);
      Tensor one(0);
      one[0] = Complex{1.0, 0.0};
      probe.add_term(term.q, term.nu, one);
      const Complex i0 = probe.integral_over_box(L, L, t1);
      std::array<Complex, 3> fmi;
      for (int b = 0; b < 3; ++b)
        fmi[static_cast<std::size_t>(b)] = probe.first_moment_integral(L, r0, b, t1);
      for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) {
          const int eps = levi_civita(p, j, i);
          if (eps == 0) continue;
          Complex qdotx{0.0, 0.0};
          for (int a = 0; a < 3; ++a)
            qdotx += kI * term.q(a) * term.coeff.at({a, i});
          acc += static_cast<double>(eps) *
                 (term.coeff.at({j, i}) * i0 + qdotx * fmi[static_cast<std::size_t>(j)]);
        }
    }
    out.boundary(p) = -sgn * acc.real() / c;
  }

  const double v_scale = L * L * L * x_full.max_term_norm() / c;
  out.scale = std::max({out.total.cwiseAbs().maxCoeff(), out.orbital.cwiseAbs().maxCoeff(),
                        out.spin.cwiseAbs().maxCoeff(), out.boundary.cwiseAbs().maxCoeff(),
                        v_scale});
  return out;
}

AngularSplit angular_split(Convention convention, const DensityOperator& rho,
                           const FockSpace& space, const ModeSet& ms,
                           const std::vector<SpacetimePoint>& fixed_points,
                           const Vec3& r0, double t1, MomentumSign momentum_sign) {
  const IdentityContext ctx(rho, space, ms, fixed_points, momentum_sign);
  return angular_split(convention, ctx, r0, t1);
}

}  // namespace qclab
