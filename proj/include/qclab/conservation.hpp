#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qclab/correlator.hpp"

namespace qclab {

/// Identity ids runnable against a state/convention pair.  eq7..eq36 carry
/// the source equation numbering; the slotwise checks are the curl
/// relations applied inside the printed (-,-,+,+) tensors with the first
/// slot converted between E and B.
enum class CheckId {
  Eq7, Eq8, Eq9, Eq10, Eq11, Eq12, Eq13, Eq14, Eq15, Eq16, Eq17, Eq18,
  Eq23, Eq27, Eq36,
  Eq24, Eq28,
  SlotwiseE, SlotwiseH, SlotwiseM, SlotwiseN,
};

const char* to_string(CheckId id);
std::optional<CheckId> check_id_from_string(const std::string& name);
/// Human description, e.g. "curl E + (1/c) dt N = 0".
const char* describe(CheckId id);

enum class Verdict { Pass, Fail, ReportedOnly };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::ReportedOnly: return "reported-only";
  }
  return "?";
}

/// Momentum-density sign choice.  FixedVsPrinted negates the printed
/// bilinear so the momentum continuity closes; Printed keeps the original
/// sign for archival runs.
enum class MomentumSign { FixedVsPrinted, Printed };

struct PointResidual {
  double residual = 0.0;
  double scale = 0.0;
};

struct ResidualReport {
  std::string identity;
  Convention convention = Convention::Derivation13;
  std::vector<PointResidual> points;
  double residual_norm = 0.0;  // max over points (termwise for divergences)
  double scale = 0.0;          // norm of the largest constituent term
  double relative = 0.0;
  double tolerance = 0.0;
  bool pass_fail_mode = true;
  Verdict verdict = Verdict::Pass;
  std::optional<double> convergence_order;  // integral-balance half-box runs
  bool floor_reached = false;
};

/// Densities evaluated at one slot-1 point.
struct DensityBundle {
  double W = 0.0;                          // correlation-energy density, >= 0
  Vec3 T{0.0, 0.0, 0.0};                   // flow density
  Vec3 Tm{0.0, 0.0, 0.0};                  // momentum density
  Eigen::Matrix3d Wstress = Eigen::Matrix3d::Zero();  // stress tensor
  Vec3 Lp{0.0, 0.0, 0.0};                  // angular momentum density about r0
  Eigen::Matrix3d Mpk = Eigen::Matrix3d::Zero();      // angular momentum flux
};

struct AngularSplit {
  Vec3 total{0.0, 0.0, 0.0};
  Vec3 orbital{0.0, 0.0, 0.0};
  Vec3 spin{0.0, 0.0, 0.0};
  /// Exact box integral of the total-derivative middle term; zero for
  /// decaying fields but generally nonzero on the periodic box.
  Vec3 boundary{0.0, 0.0, 0.0};
  double scale = 0.0;
};

/// Time-stationary bilinear machinery shared by the checks below: the
/// combined tensors and the density/flux fields built from them.
struct ConservationFields {
  CorrelatorField energy;  // rank 4
  CorrelatorField flow;    // rank 4
  PlaneWaveField W;        // rank 0
  PlaneWaveField T;        // rank 1
  PlaneWaveField Tm;       // rank 1
  PlaneWaveField Wstress;  // rank 2
  double c = 1.0;
};

ConservationFields build_conservation_fields(Convention convention,
                                             const DensityOperator& rho,
                                             const FockSpace& space, const ModeSet& ms,
                                             const std::vector<SpacetimePoint>& fixed_points,
                                             MomentumSign momentum_sign = MomentumSign::FixedVsPrinted);

/// Caches the correlator fields and bilinears for one (state, fixed points)
/// configuration so a suite of identity checks does not rebuild them.
/// Holds references; the inputs must outlive the context.  The lazy caches
/// make a single instance unsafe to share across threads; use one context
/// per thread.
class IdentityContext {
 public:
  IdentityContext(const DensityOperator& rho, const FockSpace& space, const ModeSet& ms,
                  std::vector<SpacetimePoint> fixed_points,
                  MomentumSign momentum_sign = MomentumSign::FixedVsPrinted);

  const DensityOperator& rho() const { return *rho_; }
  const FockSpace& space() const { return *space_; }
  const ModeSet& mode_set() const { return *ms_; }
  const std::vector<SpacetimePoint>& fixed_points() const { return fixed_points_; }
  MomentumSign momentum_sign() const { return momentum_sign_; }

  /// Correlator field for an arbitrary rank-4 pattern, cached by pattern.
  const CorrelatorField& correlator(const SlotPattern& pattern) const;
  const NamedTensors& named(Convention convention) const;
  const CombinedTensors& combined(Convention convention) const;
  const ConservationFields& conserved(Convention convention) const;

 private:
  const DensityOperator* rho_;
  const FockSpace* space_;
  const ModeSet* ms_;
  std::vector<SpacetimePoint> fixed_points_;
  MomentumSign momentum_sign_;
  mutable std::map<std::string, CorrelatorField> correlators_;
  mutable std::map<int, NamedTensors> named_;
  mutable std::map<int, CombinedTensors> combined_;
  mutable std::map<int, ConservationFields> conserved_;
};

ResidualReport curl_divergence_residual(CheckId id, Convention convention,
                                        const DensityOperator& rho, const FockSpace& space,
                                        const ModeSet& ms,
                                        const std::vector<SpacetimePoint>& fixed_points,
                                        const std::vector<SpacetimePoint>& sample_points,
                                        double tolerance = 1e-12);

/// Curl relations under the trace with the printed fixed slots: converts
/// the first slot between E and B.  Exact for any state.
ResidualReport slotwise_residual(CheckId id, const DensityOperator& rho,
                                 const FockSpace& space, const ModeSet& ms,
                                 const std::vector<SpacetimePoint>& fixed_points,
                                 const std::vector<SpacetimePoint>& sample_points,
                                 double tolerance = 1e-12);

DensityBundle density_bundle(Convention convention, const DensityOperator& rho,
                             const FockSpace& space, const ModeSet& ms,
                             const std::vector<SpacetimePoint>& fixed_points,
                             const SpacetimePoint& p1, const Vec3& r0,
                             MomentumSign momentum_sign = MomentumSign::FixedVsPrinted);

ResidualReport continuity_residual(CheckId id, Convention convention,
                                   const DensityOperator& rho, const FockSpace& space,
                                   const ModeSet& ms,
                                   const std::vector<SpacetimePoint>& fixed_points,
                                   const std::vector<SpacetimePoint>& sample_points,
                                   const Vec3& r0,
                                   MomentumSign momentum_sign = MomentumSign::FixedVsPrinted,
                                   double tolerance = 1e-10);

enum class IntegralVolume { FullBox, HalfBox };

/// Full box: the volume integral must be constant in t1 (periodic surface
/// flux vanishes); reports the max relative drift.  Half box (z in
/// [0, L/2]): compares a central-difference d/dt of the volume integral
/// against the exact cut-plane flux at steps h, h/2, h/4 and reports the
/// mismatch convergence order.
ResidualReport integral_balance(CheckId id, Convention convention,
                                const DensityOperator& rho, const FockSpace& space,
                                const ModeSet& ms,
                                const std::vector<SpacetimePoint>& fixed_points,
                                IntegralVolume volume, const std::vector<double>& times,
                                const Vec3& r0,
                                MomentumSign momentum_sign = MomentumSign::FixedVsPrinted,
                                double tolerance = 1e-10,
                                std::pair<double, double> order_window = {1.8, 2.2});

/// Orbital/spin decomposition of the correlation angular momentum at
/// slot-1 time t1, with all integrals exact.
AngularSplit angular_split(Convention convention, const DensityOperator& rho,
                           const FockSpace& space, const ModeSet& ms,
                           const std::vector<SpacetimePoint>& fixed_points,
                           const Vec3& r0, double t1 = 0.0,
                           MomentumSign momentum_sign = MomentumSign::FixedVsPrinted);

// Context-based variants: identical results, shared intermediate fields.

ResidualReport curl_divergence_residual(CheckId id, Convention convention,
                                        const IdentityContext& ctx,
                                        const std::vector<SpacetimePoint>& sample_points,
                                        double tolerance = 1e-12);

ResidualReport slotwise_residual(CheckId id, const IdentityContext& ctx,
                                 const std::vector<SpacetimePoint>& sample_points,
                                 double tolerance = 1e-12);

DensityBundle density_bundle(const ConservationFields& fields, const SpacetimePoint& p1,
                             const Vec3& r0);

ResidualReport continuity_residual(CheckId id, Convention convention,
                                   const IdentityContext& ctx,
                                   const std::vector<SpacetimePoint>& sample_points,
                                   const Vec3& r0, double tolerance = 1e-10);

ResidualReport integral_balance(CheckId id, Convention convention,
                                const IdentityContext& ctx, IntegralVolume volume,
                                const std::vector<double>& times, const Vec3& r0,
                                double tolerance = 1e-10,
                                std::pair<double, double> order_window = {1.8, 2.2});

AngularSplit angular_split(Convention convention, const IdentityContext& ctx,
                           const Vec3& r0, double t1 = 0.0);

}  // namespace qclab
