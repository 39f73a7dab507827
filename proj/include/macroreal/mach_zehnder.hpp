#pragma once

// Qubit Mach-Zehnder testbed: which-path measurements before the first
// beamsplitter (t0), between the splitters (t1) and after the second (t2).

#include <iosfwd>
#include <string>
#include <vector>

#include "macroreal/conditions.hpp"

namespace macroreal {

/// [[sqrt R, i sqrt(1-R)], [i sqrt(1-R), sqrt R]].
Operator beamsplitter(double reflectivity);
/// diag(exp(i phi), 1): phase on arm 0.
Operator phase_plate(double phi);

/// Matrix conventions for the interferometer. Tried in this order by
/// resolve_convention; the first one that reproduces the analytic table wins.
enum class MzConvention {
  SymmetricI,          // symmetric-i splitters, Q = +1 on path 0 at every slot
  SwappedInputLabels,  // same splitters, Q0 = +1 on path 1
  CrossingFirstSplitter,  // first splitter [[i sqrt(1-R), sqrt R], [sqrt R, i sqrt(1-R)]]
  RealRotation,        // real rotations [[sqrt R, -sqrt(1-R)], [sqrt(1-R), sqrt R]]
};
const char* to_string(MzConvention c);
std::vector<MzConvention> all_conventions();
/// The convention that matches the analytic table (see resolve_convention).
constexpr MzConvention kDefaultConvention = MzConvention::SwappedInputLabels;

struct MzParams {
  enum class State { Mix, Sup };
  double r1 = 0.5;
  double r2 = 0.5;
  double phi = 0.0;
  State state = State::Mix;
  double q = 0.5;
  Complex c = 0.0;  // coherence of the sup state

  static MzParams mix(double r1, double r2, double phi, double q);
  static MzParams sup(double r1, double r2, double phi, double q, Complex c);

  double alpha() const;
  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
  Matrix density() const;
  Json to_json() const;
};

Scenario mz_scenario(const MzParams& p, MzConvention convention = kDefaultConvention);

/// Closed-form predicates for the four conditions. Each carries the defect
/// function whose vanishing (or sign, for LGI) decides the verdict.
struct PredicateValue {
  bool holds = false;
  double defect = 0.0;
};
struct Table1Predicates {
  PredicateValue lgi;         // holds iff R1 + alpha cos(phi) - R1 R2 >= 0
  PredicateValue nsit_1_2;    // NSIT_(1)2
  PredicateValue nsit_0_1_2;  // NSIT_0(1)2
  PredicateValue nsit_0_12;   // NSIT_(0)12
};
Table1Predicates table1_predicates(const MzParams& p, double eps = 1e-12);

struct Table1Lattice {
  std::vector<double> r1;
  std::vector<double> r2;
  std::vector<double> phi;
  std::vector<double> q_mix;      // mixed states
  std::vector<Complex> c_sup;     // sup states (with q_sup)
  double q_sup = 0.5;

  /// 11 x 11 x 12 over (R1, R2, phi) with q in {0, 0.3, 0.5} for mixed
  /// states and c in {0.2, 0.2i, 0.1+0.1i} at q = 1/2 for sup states.
  static Table1Lattice standard();
  std::vector<MzParams> points() const;
};

struct Table1Row {
  MzParams params;
  std::string condition;
  double residual = 0.0;
  double defect = 0.0;
  bool analytic = false;
  bool numeric = false;
  bool guarded = false;  // inside the boundary guard band, excluded
  bool agree() const { return guarded || analytic == numeric; }
};

struct Table1Report {
  MzConvention convention = kDefaultConvention;
  double threshold = kExactThreshold;
  double guard_band = 1e-6;
  std::size_t points = 0;
  std::size_t checks = 0;
  std::size_t guarded = 0;
  std::size_t mismatches = 0;
  std::vector<Table1Row> rows;

  void write_csv(std::ostream& os) const;
  Json summary() const;
};

Table1Report verify_table1(const std::vector<MzParams>& points, double threshold = kExactThreshold,
                           MzConvention convention = kDefaultConvention, double guard_band = 1e-6);

struct ConventionResolution {
  MzConvention chosen = kDefaultConvention;
  std::vector<std::pair<MzConvention, std::size_t>> mismatches;  // per tried convention
  bool found = false;
};
/// Tries the conventions in order on the lattice and stops at the first
/// with zero mismatches.
ConventionResolution resolve_convention(const std::vector<MzParams>& points, double threshold = kExactThreshold);

/// C01 + C12 - C02 for the interferometer.
double mz_lgi_value(const MzParams& p, MzConvention convention = kDefaultConvention);

struct LgiSearchResult {
  MzParams params;
  double value = 0.0;
  std::size_t evaluations = 0;
};
/// Grid search over (R1, R2, phi) followed by coordinate refinement.
/// pure_only restricts the initial states to pure sup states.
LgiSearchResult lgi_max_search(bool pure_only = false, MzConvention convention = kDefaultConvention);

}  // namespace macroreal
