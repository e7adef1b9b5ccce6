#include "qclab/scenario.hpp"

namespace qclab {

namespace {

// Cutoffs are sized to the states: the thermal/coherent mode at index 0
// carries cutoff 10..12 so the Wick and factorization cross-paths meet
// their tolerances; identity residuals are truncation-independent.

const char* kPaperDerivation13 = R"json({
  "name": "paper_derivation13",
  "mode_set": {
    "box_length": 6.283185307179586,
    "c": 1.0,
    "hbar": 1.0,
    "amplitude_convention": "unit",
    "modes": [{"n": [0, 0, 1], "pol": 1}, {"n": [1, 1, 0], "pol": 1}]
  },
  "cutoffs": [12, 8],
  "states": [
    {"name": "vacuum", "kind": "vacuum"},
    {"name": "fock_1", "kind": "fock", "occupations": [1, 0]},
    {"name": "fock_2", "kind": "fock", "occupations": [2, 0]},
    {"name": "coherent_05", "kind": "coherent", "alphas": [[0.5, 0.0], [0.0, 0.0]]},
    {"name": "thermal_02", "kind": "thermal", "nbar": [0.2, 0.0]},
    {"name": "two_mode_coherent", "kind": "coherent", "alphas": [[0.5, 0.0], [0.0, 0.2]]},
    {"name": "mixture_50_50", "kind": "mixture", "components": [
      {"weight": 0.5, "state": {"kind": "coherent", "alphas": [[0.5, 0.0], [0.0, 0.0]]}},
      {"weight": 0.5, "state": {"kind": "thermal", "nbar": [0.2, 0.0]}}
    ]}
  ],
  "fixed_points": [
    {"r": [0.7, 1.9, 2.3], "t": 0.15},
    {"r": [3.1, 0.4, 5.2], "t": -0.4},
    {"r": [4.9, 2.6, 1.1], "t": 0.55}
  ],
  "sample_points": {"seed": 20250808, "count": 20},
  "identities": ["maxwell_ops",
                 "eq7", "eq8", "eq9", "eq10", "eq11", "eq12", "eq13", "eq14",
                 "eq15", "eq16", "eq17", "eq18",
                 "eq23", "eq27", "eq36",
                 "eq24_full", "eq24_half", "eq28_full", "eq28_half",
                 "potential", "angular_split", "density_checks",
                 "oracle_dense", "oracle_coherent", "fd_convergence"],
  "conventions": "derivation_13"
})json";

const char* kPaperPrinted22 = R"json({
  "name": "paper_printed22",
  "mode_set": {
    "box_length": 6.283185307179586,
    "c": 1.0,
    "hbar": 1.0,
    "amplitude_convention": "unit",
    "modes": [{"n": [0, 0, 1], "pol": 1}, {"n": [1, 1, 0], "pol": 1}]
  },
  "cutoffs": [12, 8],
  "states": [
    {"name": "vacuum", "kind": "vacuum"},
    {"name": "fock_1", "kind": "fock", "occupations": [1, 0]},
    {"name": "fock_2", "kind": "fock", "occupations": [2, 0]},
    {"name": "coherent_05", "kind": "coherent", "alphas": [[0.5, 0.0], [0.0, 0.0]]},
    {"name": "thermal_02", "kind": "thermal", "nbar": [0.2, 0.0]},
    {"name": "two_mode_coherent", "kind": "coherent", "alphas": [[0.5, 0.0], [0.0, 0.2]]},
    {"name": "mixture_50_50", "kind": "mixture", "components": [
      {"weight": 0.5, "state": {"kind": "coherent", "alphas": [[0.5, 0.0], [0.0, 0.0]]}},
      {"weight": 0.5, "state": {"kind": "thermal", "nbar": [0.2, 0.0]}}
    ]}
  ],
  "fixed_points": [
    {"r": [0.7, 1.9, 2.3], "t": 0.15},
    {"r": [3.1, 0.4, 5.2], "t": -0.4},
    {"r": [4.9, 2.6, 1.1], "t": 0.55}
  ],
  "sample_points": {"seed": 20250808, "count": 20},
  "identities": ["eq7", "eq8", "eq9", "eq10", "eq11", "eq12", "eq13", "eq14",
                 "eq15", "eq16", "eq17", "eq18",
                 "slotwise_E", "slotwise_H", "slotwise_M", "slotwise_N",
                 "eq23", "eq27", "eq36",
                 "eq24_full", "eq28_full",
                 "potential", "density_checks", "oracle_dense", "oracle_coherent"],
  "conventions": "printed_22"
})json";

const char* kUnitsC2 = R"json({
  "name": "units_c2",
  "mode_set": {
    "box_length": 6.283185307179586,
    "c": 2.0,
    "hbar": 1.0,
    "amplitude_convention": "physical",
    "modes": [{"n": [0, 0, 1], "pol": 1}, {"n": [1, 1, 0], "pol": 1}]
  },
  "cutoffs": [12, 8],
  "states": [
    {"name": "vacuum", "kind": "vacuum"},
    {"name": "fock_2", "kind": "fock", "occupations": [2, 0]},
    {"name": "coherent_05", "kind": "coherent", "alphas": [[0.5, 0.0], [0.0, 0.0]]},
    {"name": "thermal_02", "kind": "thermal", "nbar": [0.2, 0.0]},
    {"name": "two_mode_coherent", "kind": "coherent", "alphas": [[0.5, 0.0], [0.0, 0.2]]}
  ],
  "fixed_points": [
    {"r": [0.7, 1.9, 2.3], "t": 0.15},
    {"r": [3.1, 0.4, 5.2], "t": -0.4},
    {"r": [4.9, 2.6, 1.1], "t": 0.55}
  ],
  "sample_points": {"seed": 20250808, "count": 20},
  "identities": ["maxwell_ops",
                 "eq7", "eq8", "eq9", "eq10", "eq11", "eq12", "eq13", "eq14",
                 "eq15", "eq16", "eq17", "eq18",
                 "eq23", "eq27", "eq36",
                 "eq24_full", "eq28_full",
                 "potential", "angular_split", "density_checks",
                 "oracle_dense", "oracle_coherent", "fd_convergence"],
  "conventions": "derivation_13"
})json";

const char* kAngularCircular = R"json({
  "name": "angular_circular",
  "mode_set": {
    "box_length": 6.283185307179586,
    "c": 1.0,
    "hbar": 1.0,
    "amplitude_convention": "unit",
    "modes": [{"n": [0, 0, 1], "pol": 1}, {"n": [0, 0, 1], "pol": 2}]
  },
  "cutoffs": [8, 8],
  "states": [
    {"name": "circular_plus", "kind": "coherent", "alphas": [[0.4, 0.0], [0.0, 0.4]]},
    {"name": "circular_minus", "kind": "coherent", "alphas": [[0.4, 0.0], [0.0, -0.4]]},
    {"name": "elliptic_plus", "kind": "coherent", "alphas": [[0.4, 0.0], [0.0, 0.24]]},
    {"name": "elliptic_minus", "kind": "coherent", "alphas": [[0.4, 0.0], [0.0, -0.24]]}
  ],
  "fixed_points": [
    {"r": [0.7, 1.9, 2.3], "t": 0.15},
    {"r": [3.1, 0.4, 5.2], "t": -0.4},
    {"r": [4.9, 2.6, 1.1], "t": 0.55}
  ],
  "sample_points": {"seed": 20250808, "count": 20},
  "identities": ["angular_split", "potential", "eq17", "eq18", "eq23", "eq27", "eq36",
                 "density_checks", "oracle_dense"],
  "conventions": "derivation_13"
})json";

const char* kOracleCrosscheck = R"json({
  "name": "oracle_crosscheck",
  "mode_set": {
    "box_length": 6.283185307179586,
    "c": 1.0,
    "hbar": 1.0,
    "amplitude_convention": "unit",
    "modes": [{"n": [0, 0, 1], "pol": 1}, {"n": [0, 0, 2], "pol": 1}]
  },
  "cutoffs": [12, 10],
  "states": [
    {"name": "vacuum", "kind": "vacuum"},
    {"name": "two_mode_coherent", "kind": "coherent", "alphas": [[0.5, 0.0], [0.3, 0.2]]},
    {"name": "thermal_pair", "kind": "thermal", "nbar": [0.2, 0.1]},
    {"name": "fock_11", "kind": "fock", "occupations": [1, 1]}
  ],
  "fixed_points": [
    {"r": [0.7, 1.9, 2.3], "t": 0.15},
    {"r": [3.1, 0.4, 5.2], "t": -0.4},
    {"r": [4.9, 2.6, 1.1], "t": 0.55}
  ],
  "sample_points": {"seed": 20250808, "count": 20},
  "identities": ["oracle_dense", "oracle_coherent", "oracle_wick", "fd_convergence",
                 "eq23", "eq24_full", "eq24_half", "eq28_full", "eq28_half",
                 "density_checks"],
  "conventions": "derivation_13"
})json";

}  // namespace

const std::vector<std::pair<std::string, std::string>>& bundled_scenarios() {
  static const std::vector<std::pair<std::string, std::string>> scenarios = {
      {"paper_derivation13", kPaperDerivation13},
      {"paper_printed22", kPaperPrinted22},
      {"units_c2", kUnitsC2},
      {"angular_circular", kAngularCircular},
      {"oracle_crosscheck", kOracleCrosscheck},
  };
  return scenarios;
}

}  // namespace qclab
