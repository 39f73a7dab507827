#pragma once

// Sequential measurement experiments.
//
// A scenario is an initial state, an ordered list of measurement slots and
// the unitaries between consecutive slots. Which slots are actually measured
// is chosen per call of joint_distribution; an unmeasured slot acts as the
// identity, so different subsets reproduce the different experiments P_i,
// P_ij, P_012.

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "macroreal/hilbert.hpp"
#include "macroreal/instruments.hpp"

namespace macroreal {

struct Slot {
  double time = 0.0;
  std::shared_ptr<const KrausFamily> instrument;  // null: nothing can be measured here
};

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Scenario {
 public:
  /// evolutions[i] acts between slot i and slot i+1.
  Scenario(DensityState initial, std::vector<Slot> slots, std::vector<Operator> evolutions, double tol = 1e-10);
  /// Evolutions exp(-i H (t_{i+1} - t_i)).
  static Scenario from_hamiltonian(DensityState initial, std::vector<Slot> slots, const Operator& h,
                                   double tol = 1e-10);

  const DensityState& initial() const { return initial_; }
  const std::vector<Slot>& slots() const { return slots_; }
  const std::vector<Operator>& evolutions() const { return evolutions_; }
  std::size_t slot_count() const { return slots_.size(); }
  std::size_t dim() const { return initial_.dim(); }

  /// Copy with slot i's instrument replaced (null removes it).
  Scenario with_instrument(std::size_t i, std::shared_ptr<const KrausFamily> family) const;

  Json descriptor() const;

 private:
  DensityState initial_;
  std::vector<Slot> slots_;
  std::vector<Operator> evolutions_;
};

struct Axis {
  std::size_t slot = 0;
  std::vector<Outcome> outcomes;
  std::vector<double> weights;
};

/// Joint outcome density over the measured slots, row-major with the last
/// axis fastest. Probability of a cell = value * product of axis weights.
class ProbabilityTable {
 public:
  ProbabilityTable(std::vector<Axis> axes, std::vector<double> values);

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<std::size_t> slots() const;
  std::size_t size() const { return values_.size(); }

  /// Product of axis weights for a flat index.
  double cell_weight(std::size_t flat) const;
  /// Multi-index of a flat index.
  std::vector<std::size_t> unravel(std::size_t flat) const;
  double mass() const;
  double min_value() const;

  void write_csv(std::ostream& os) const;
  Json to_json() const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> values_;
};

/// Probabilities of every outcome tuple of the measured slots.
ProbabilityTable joint_distribution(const Scenario& scenario, std::vector<std::size_t> measured_slots);

/// Sums the dropped axes (weighted) out. keep_slots must be a subset of the
/// table's slots; the result keeps the table's axis order.
ProbabilityTable marginalize(const ProbabilityTable& table, const std::vector<std::size_t>& keep_slots);

/// <Q_i Q_j> for two dichotomic slots labeled +1/-1.
double correlation(const ProbabilityTable& table, std::size_t slot_i, std::size_t slot_j);

/// Scenario descriptor in the JSON file format (matrices as nested [re, im]
/// pairs). Instruments: {"kind": "kraus", "outcomes", "kraus", "weights"} or
/// {"kind": "projective", "projectors", "values"}. Evolutions either as
/// "evolutions" (unitaries) or "hamiltonian".
Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& scenario);

Matrix matrix_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);

}  // namespace macroreal
