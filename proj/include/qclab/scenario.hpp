#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qclab/conservation.hpp"

namespace qclab {

inline constexpr const char* kVersion = "1.0.0";

/// Configuration or validation failure; the CLI maps it to exit code 2.
struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct NamedStateSpec {
  std::string name;
  StateSpec spec;
};

struct ToleranceSet {
  double curl = 1e-12;
  double divergence = 1e-12;
  double slotwise = 1e-12;
  double continuity = 1e-10;
  double integral = 1e-10;
  double potential = 1e-13;
  double angular = 1e-12;   // closure of the split, exact identity
  double oracle_dense = 1e-12;
  double oracle_coherent = 1e-10;
  double oracle_wick = 1e-6;
  double maxwell = 1e-12;
  double density = 1e-12;
  std::pair<double, double> fd_order_window{1.8, 2.2};
};

/// Harness-level checks beyond the per-identity residuals.
enum class SuiteCheck {
  MaxwellOps,      // operator-level Maxwell identities on random mode sets
  Identity,        // one CheckId (eq7..eq18, eq23/27/36, slotwise)
  Eq24Full, Eq24Half, Eq28Full, Eq28Half,
  Potential,       // inverse curl roundtrip and gauge divergence
  AngularSplit,
  DensityChecks,   // W >= 0, stress symmetry, T vs -c^2 Tm
  OracleDense,
  OracleCoherent,
  OracleWick,
  FdConvergence,
};

struct CheckRequest {
  SuiteCheck kind;
  CheckId identity = CheckId::Eq7;  // when kind == Identity
};

struct Scenario {
  std::string name;
  double box_length = 2.0 * M_PI;
  double c = 1.0;
  double hbar = 1.0;
  AmplitudeConvention convention = AmplitudeConvention::Unit;
  std::vector<ModeEntry> mode_entries;
  std::vector<int> cutoffs;
  int max_dim = FockSpace::kDefaultMaxDim;
  std::vector<NamedStateSpec> states;
  std::vector<SpacetimePoint> fixed_points;  // slots 2..4
  std::vector<SpacetimePoint> sample_points; // explicit, or generated
  std::uint64_t seed = 1;
  int sample_count = 20;
  bool explicit_samples = false;
  std::vector<CheckRequest> checks;
  bool checks_all = true;
  std::vector<Convention> conventions{Convention::Derivation13};
  std::optional<Vec3> r0;  // default: box center
  MomentumSign momentum_sign = MomentumSign::FixedVsPrinted;
  ToleranceSet tolerances;
  std::vector<double> integral_times;  // default: 9 over one fundamental period

  Vec3 origin() const {
    return r0.value_or(Vec3(0.5 * box_length, 0.5 * box_length, 0.5 * box_length));
  }
};

/// One row of the suite report.
struct CheckResult {
  std::string identity;
  std::string convention;  // "-" for convention-independent checks
  std::string state;       // "-" for state-independent checks
  ResidualReport report;
  std::map<std::string, double> extra;  // named scalars (angular components, ...)
};

struct SuiteReport {
  std::string scenario;
  Scenario config;
  std::vector<CheckResult> checks;
  bool overall_pass = true;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

/// Deterministic slot-1 sample points: r uniform over the box, t in [-3, 3).
std::vector<SpacetimePoint> generate_sample_points(std::uint64_t seed, int count,
                                                   double box_length);

SuiteReport run_suite(const Scenario& s);

enum class ReportFormat { Json, Csv };

std::string render_report(const SuiteReport& r, ReportFormat format);
void emit_report(const SuiteReport& r, ReportFormat format, const std::string& out_path);

/// Bundled scenarios (name -> JSON text), in a fixed order.
const std::vector<std::pair<std::string, std::string>>& bundled_scenarios();

/// All identity names with their descriptions, for `list-identities`.
std::vector<std::pair<std::string, std::string>> identity_catalog();

}  // namespace qclab
