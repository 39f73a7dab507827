#pragma once

// Macrorealism conditions on scenarios and operator-level classicality tests.
//
// Distribution conditions compare two experiments and report the sup-norm
// of the density difference (verdict) together with the total variation.
// Operator conditions report operator norms.

#include <cstdint>
#include <string>
#include <vector>

#include "macroreal/scenario.hpp"

namespace macroreal {

struct ConditionReport {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool holds = true;
  double total_variation = 0.0;
  Json context = Json::object();

  Json to_json() const;
};

/// Exact algebraic scenarios use 1e-9, grid-discretized ones 1e-6.
constexpr double kExactThreshold = 1e-9;
constexpr double kGridThreshold = 1e-6;

struct Difference {
  double sup = 0.0;
  double total_variation = 0.0;
};
/// Tables must have identical axes.
Difference compare_tables(const ProbabilityTable& p, const ProbabilityTable& q);

/// NSIT_(i)j: P_j against the j-marginal of P_ij.
ConditionReport nsit_two_time(const Scenario& s, std::size_t i, std::size_t j, double threshold = kExactThreshold);
/// NSIT_0(1)2: P_02 against the (0,2)-marginal of P_012.
ConditionReport nsit_sandwich(const Scenario& s, double threshold = kExactThreshold);
/// NSIT_(0)12: P_12 against the (1,2)-marginal of P_012.
ConditionReport nsit_leading(const Scenario& s, double threshold = kExactThreshold);
/// AoT: P_i against the i-marginal of P_ij.
ConditionReport aot_check(const Scenario& s, std::size_t i, std::size_t j, double threshold = kExactThreshold);
/// C01 + C12 - C02 <= 1 with each correlation from its own two-slot
/// experiment; residual max(0, K - 1).
ConditionReport lgi_012(const Scenario& s, double threshold = kExactThreshold);
/// |C02 - C02|1|.
ConditionReport nic_012(const Scenario& s, double threshold = kExactThreshold);

struct Mr012Bundle {
  /// NSIT_(1)2, NSIT_0(1)2, NSIT_(0)12, AoT.
  std::vector<ConditionReport> members;
  /// Largest sup-norm mismatch between the marginals of P_012 and the seven
  /// experiments P_0, P_1, P_2, P_01, P_02, P_12, P_012.
  double marginal_mismatch = 0.0;
  ConditionReport verdict;

  Json to_json() const;
};
Mr012Bundle mr012_check(const Scenario& s, double threshold = kExactThreshold);

/// max_b || sum_a w_a A_a^dag E_b A_a - B~_b^dag S_A B~_b ||, with
/// B~_b = U^dag B_b U, E_b = B~_b^dag B~_b and S_A = sum_a w_a A_a^dag A_a.
double nsit_operator_residual(const KrausFamily& a, const KrausFamily& b, const Operator& u,
                              double completeness_tol = 1e-6);

struct CommutatorTests {
  double pairwise = 0.0;  // max ||[A_a, B~_b]||
  double sandwich = 0.0;  // max ||[A_a B~_b, B~_b A_a]||
};
CommutatorTests commutator_tests(const KrausFamily& a, const KrausFamily& b, const Operator& u);

/// For projective families the operator residual vanishes exactly when every
/// A_a commutes with every B~_b. The report's verdict is the NSIT side; the
/// context carries the commutator and whether both sides agree.
ConditionReport projective_necessity_check(const KrausFamily& a, const KrausFamily& b, const Operator& u,
                                           double tol = 1e-10, double commutator_tol = 1e-8);

/// Max over reference members and both orderings of the operator residual
/// with U = 1.
ConditionReport classical_operator(const KrausFamily& candidate, const std::vector<KrausFamily>& reference,
                                   double threshold = kGridThreshold);
/// Max over ordered reference pairs and times of the operator residual with
/// U = exp(-i H T).
ConditionReport classical_hamiltonian(const Operator& h, const std::vector<KrausFamily>& reference,
                                      const std::vector<double>& times, double threshold = kGridThreshold);

// ---------------------------------------------------------------------------
// Randomized qubit/qutrit scenario sweep for the sufficiency relations.

struct SweepOptions {
  std::size_t count = 10000;
  std::uint64_t seed = 1;
  /// Fraction of scenarios built to satisfy the NSIT conditions exactly
  /// (commuting instruments and evolutions); the rest are generic.
  double structured_fraction = 0.5;
  double exact_tol = 1e-10;
};

struct SweepRecord {
  std::size_t dim = 0;
  bool structured = false;
  double nsit_12 = 0.0;
  double nsit_0_1_2 = 0.0;  // NSIT_0(1)2
  double nsit_0_12 = 0.0;   // NSIT_(0)12
  double aot = 0.0;
  double lgi_excess = 0.0;  // K - 1, may be negative
  double nic = 0.0;
  double mismatch = 0.0;
};

struct SweepSummary {
  std::size_t scenarios = 0;
  std::size_t all_nsit_hold = 0;
  std::size_t eq16_forward_failures = 0;   // all NSIT + AoT hold but mismatch >= 1e-8
  std::size_t eq16_converse_failures = 0;  // some NSIT residual >= 2 * mismatch
  double eq16_converse_worst_ratio = 0.0;  // max NSIT residual / mismatch
  std::size_t eq9_premise = 0;
  std::size_t eq9_failures = 0;            // premise holds but K > 1 + 1e-8
  std::size_t nic_failures = 0;            // NIC > 4 * NSIT_0(1)2 (+ 1e-12)
  double nic_worst_ratio = 0.0;

  Json to_json() const;
};

/// Random scenario i of the sweep; deterministic in (seed, i).
Scenario random_sweep_scenario(const SweepOptions& options, std::size_t i, bool* structured = nullptr);
SweepRecord evaluate_sweep_scenario(const Scenario& s);
SweepSummary random_scenario_sweep(const SweepOptions& options, std::vector<SweepRecord>* records = nullptr);

}  // namespace macroreal
