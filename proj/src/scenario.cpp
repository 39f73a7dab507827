#include "macroreal/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <locale>
#include <ostream>
#include <sstream>

namespace macroreal {

Scenario::Scenario(DensityState initial, std::vector<Slot> slots, std::vector<Operator> evolutions, double tol)
    : initial_(std::move(initial)), slots_(std::move(slots)), evolutions_(std::move(evolutions)) {
  if (slots_.empty()) throw ScenarioError("scenario needs at least one slot");
  if (evolutions_.size() + 1 != slots_.size())
    throw ScenarioError("scenario needs one evolution between each pair of consecutive slots");
  for (std::size_t i = 1; i < slots_.size(); ++i)
    if (!(slots_[i].time > slots_[i - 1].time)) throw ScenarioError("slot times must be strictly increasing");
  for (const auto& u : evolutions_) {
    if (u.dim() != dim()) throw DimensionError("evolution dimension does not match the state");
    if (!u.is_unitary(tol)) throw ScenarioError("evolution is not unitary");
  }
  for (const auto& s : slots_)
    if (s.instrument && s.instrument->dim() != dim())
      throw DimensionError("instrument dimension does not match the state");
}

Scenario Scenario::from_hamiltonian(DensityState initial, std::vector<Slot> slots, const Operator& h, double tol) {
  std::vector<Operator> us;
  for (std::size_t i = 1; i < slots.size(); ++i)
    us.push_back(unitary_from_hamiltonian(h, slots[i].time - slots[i - 1].time, tol));
  return Scenario(std::move(initial), std::move(slots), std::move(us), tol);
}

Scenario Scenario::with_instrument(std::size_t i, std::shared_ptr<const KrausFamily> family) const {
  if (i >= slots_.size()) throw ScenarioError("slot index out of range");
  if (family && family->dim() != dim()) throw DimensionError("instrument dimension does not match the state");
  Scenario s = *this;
  s.slots_[i].instrument = std::move(family);
  return s;
}

Json Scenario::descriptor() const {
  Json j;
  j["dim"] = dim();
  j["slots"] = Json::array();
  for (const auto& s : slots_)
    j["slots"].push_back({{"time", s.time}, {"instrument", s.instrument ? s.instrument->descriptor() : Json()}});
  return j;
}

// ---------------------------------------------------------------------------

ProbabilityTable::ProbabilityTable(std::vector<Axis> axes, std::vector<double> values)
    : axes_(std::move(axes)), values_(std::move(values)) {
  std::size_t n = 1;
  for (const auto& a : axes_) {
    if (a.outcomes.size() != a.weights.size()) throw std::invalid_argument("axis outcome/weight length mismatch");
    n *= a.outcomes.size();
  }
  if (n != values_.size()) throw std::invalid_argument("table size does not match its axes");
}

std::vector<std::size_t> ProbabilityTable::slots() const {
  std::vector<std::size_t> s;
  for (const auto& a : axes_) s.push_back(a.slot);
  return s;
}

std::vector<std::size_t> ProbabilityTable::unravel(std::size_t flat) const {
  std::vector<std::size_t> idx(axes_.size());
  for (std::size_t k = axes_.size(); k-- > 0;) {
    const std::size_t n = axes_[k].outcomes.size();
    idx[k] = flat % n;
    flat /= n;
  }
  return idx;
}

double ProbabilityTable::cell_weight(std::size_t flat) const {
  double w = 1.0;
  for (std::size_t k = axes_.size(); k-- > 0;) {
    const std::size_t n = axes_[k].outcomes.size();
    w *= axes_[k].weights[flat % n];
    flat /= n;
  }
  return w;
}

double ProbabilityTable::mass() const {
  double m = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) m += values_[i] * cell_weight(i);
  return m;
}

double ProbabilityTable::min_value() const { return *std::min_element(values_.begin(), values_.end()); }

namespace {

void write_outcome(std::ostream& os, const Outcome& o) {
  std::visit(
      [&os](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Complex>)
          os << v.real() << ',' << v.imag();
        else
          os << v;
      },
      o);
}

}  // namespace

void ProbabilityTable::write_csv(std::ostream& os) const {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(17);
  for (const auto& a : axes_) {
    if (std::holds_alternative<Complex>(a.outcomes.front()))
      buf << "q" << a.slot << "_re,q" << a.slot << "_im,";
    else
      buf << "q" << a.slot << ',';
  }
  buf << "weight,probability\n";
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const auto idx = unravel(i);
    for (std::size_t k = 0; k < axes_.size(); ++k) {
      write_outcome(buf, axes_[k].outcomes[idx[k]]);
      buf << ',';
    }
    const double w = cell_weight(i);
    buf << w << ',' << values_[i] * w << '\n';
  }
  os << buf.str();
}

Json ProbabilityTable::to_json() const {
  Json j;
  j["axes"] = Json::array();
  for (const auto& a : axes_) {
    Json ax;
    ax["slot"] = a.slot;
    ax["outcomes"] = Json::array();
    for (const auto& o : a.outcomes) ax["outcomes"].push_back(outcome_to_json(o));
    ax["weights"] = a.weights;
    j["axes"].push_back(ax);
  }
  j["values"] = values_;
  j["mass"] = mass();
  return j;
}

// ---------------------------------------------------------------------------

ProbabilityTable joint_distribution(const Scenario& scenario, std::vector<std::size_t> measured) {
  if (measured.empty()) throw ScenarioError("joint_distribution: no slots selected");
  std::sort(measured.begin(), measured.end());
  if (std::adjacent_find(measured.begin(), measured.end()) != measured.end())
    throw ScenarioError("joint_distribution: duplicate slot");
  if (measured.back() >= scenario.slot_count()) throw ScenarioError("joint_distribution: slot out of range");

  std::vector<Axis> axes;
  std::vector<const KrausFamily*> families;
  for (std::size_t s : measured) {
    const auto& inst = scenario.slots()[s].instrument;
    if (!inst) throw ScenarioError("joint_distribution: slot " + std::to_string(s) + " has no instrument");
    if (inst->dim() != scenario.dim()) throw DimensionError("instrument dimension does not match the state");
    axes.push_back({s, inst->outcomes(), inst->weights()});
    families.push_back(inst.get());
  }
  std::size_t total = 1;
  for (const auto* f : families) total *= f->size();
  std::vector<double> values(total, 0.0);

  const auto& us = scenario.evolutions();
  auto evolve = [&us](Matrix rho, std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) rho = us[k].matrix() * rho * us[k].matrix().adjoint();
    return rho;
  };

  // Depth-first over the measured slots, carrying the unnormalized
  // conditional state; the last measured slot only needs densities.
  const std::size_t depth = measured.size();
  auto recurse = [&](auto&& self, const Matrix& rho, std::size_t level, std::size_t slot_pos,
                     std::size_t offset) -> void {
    const Matrix here = evolve(rho, slot_pos, measured[level]);
    const KrausFamily& f = *families[level];
    if (level + 1 == depth) {
      const RealVector d = f.densities(here);
      for (std::size_t a = 0; a < f.size(); ++a) values[offset * f.size() + a] = d(static_cast<Eigen::Index>(a));
      return;
    }
    for (std::size_t a = 0; a < f.size(); ++a) {
      const Matrix b = f.branch(a, here);
      if (b.trace().real() <= 0.0) continue;
      self(self, b, level + 1, measured[level], offset * f.size() + a);
    }
  };
  recurse(recurse, scenario.initial().matrix(), 0, 0, 0);
  return ProbabilityTable(std::move(axes), std::move(values));
}

ProbabilityTable marginalize(const ProbabilityTable& table, const std::vector<std::size_t>& keep_slots) {
  const auto& axes = table.axes();
  std::vector<bool> keep(axes.size(), false);
  for (std::size_t s : keep_slots) {
    auto it = std::find_if(axes.begin(), axes.end(), [s](const Axis& a) { return a.slot == s; });
    if (it == axes.end()) throw ScenarioError("marginalize: slot " + std::to_string(s) + " not in table");
    keep[static_cast<std::size_t>(it - axes.begin())] = true;
  }
  std::vector<Axis> kept;
  for (std::size_t k = 0; k < axes.size(); ++k)
    if (keep[k]) kept.push_back(axes[k]);
  std::size_t n = 1;
  for (const auto& a : kept) n *= a.outcomes.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto idx = table.unravel(i);
    std::size_t flat = 0;
    double w = 1.0;
    for (std::size_t k = 0; k < axes.size(); ++k) {
      if (keep[k])
        flat = flat * axes[k].outcomes.size() + idx[k];
      else
        w *= axes[k].weights[idx[k]];
    }
    out[flat] += w * table.values()[i];
  }
  return ProbabilityTable(std::move(kept), std::move(out));
}

namespace {

std::vector<double> dichotomic_values(const Axis& a) {
  if (a.outcomes.size() != 2) throw ScenarioError("correlation: slot is not dichotomic");
  std::vector<double> v;
  for (std::size_t k = 0; k < 2; ++k) {
    const double x = outcome_real(a.outcomes[k]);
    if (std::abs(std::abs(x) - 1.0) > 1e-12) throw ScenarioError("correlation: outcomes must be +1/-1");
    v.push_back(x);
  }
  return v;
}

}  // namespace

double correlation(const ProbabilityTable& table, std::size_t slot_i, std::size_t slot_j) {
  const ProbabilityTable m = marginalize(table, {slot_i, slot_j});
  if (m.axes().size() != 2) throw ScenarioError("correlation: needs two distinct slots");
  const auto qa = dichotomic_values(m.axes()[0]);
  const auto qb = dichotomic_values(m.axes()[1]);
  double c = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto idx = m.unravel(i);
    c += qa[idx[0]] * qb[idx[1]] * m.values()[i] * m.cell_weight(i);
  }
  return c;
}

// ---------------------------------------------------------------------------

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ScenarioError("matrix must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ScenarioError("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      if (e.is_number())
        m(r, c) = e.get<double>();
      else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      else
        throw ScenarioError("matrix entries must be numbers or [re, im] pairs");
    }
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    j.push_back(row);
  }
  return j;
}

namespace {

std::shared_ptr<const KrausFamily> instrument_from_json(const Json& j, std::size_t index) {
  if (j.is_null()) return nullptr;
  const std::string label = j.value("label", "slot" + std::to_string(index));
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "projective") {
    std::vector<Matrix> ps;
    for (const auto& p : j.at("projectors")) ps.push_back(matrix_from_json(p));
    return std::make_shared<const KrausFamily>(
        projective_family(label, ps, j.at("values").get<std::vector<double>>()));
  }
  if (kind == "kraus") {
    std::vector<Matrix> ks;
    for (const auto& k : j.at("kraus")) ks.push_back(matrix_from_json(k));
    std::vector<Outcome> outcomes;
    for (const auto& o : j.at("outcomes")) outcomes.push_back(outcome_from_json(o));
    std::vector<double> weights =
        j.contains("weights") ? j["weights"].get<std::vector<double>>() : std::vector<double>(ks.size(), 1.0);
    auto f = KrausFamily::dense(label, std::move(outcomes), std::move(weights), std::move(ks), {{"kind", "kraus"}});
    if (f.completeness_defect() > j.value("defect_ceiling", 1e-8))
      throw ScenarioError("instrument '" + label + "' is not complete");
    return std::make_shared<const KrausFamily>(std::move(f));
  }
  throw ScenarioError("unknown instrument kind '" + kind + "'");
}

}  // namespace

Scenario scenario_from_json(const Json& j) {
  try {
    DensityState rho(matrix_from_json(j.at("initial")), j.value("tol", 1e-10));
    std::vector<Slot> slots;
    std::size_t index = 0;
    for (const auto& s : j.at("slots")) {
      Slot slot;
      slot.time = s.at("time").get<double>();
      slot.instrument = instrument_from_json(s.contains("instrument") ? s["instrument"] : Json(), index++);
      slots.push_back(std::move(slot));
    }
    if (j.contains("hamiltonian"))
      return Scenario::from_hamiltonian(std::move(rho), std::move(slots),
                                        Operator(matrix_from_json(j["hamiltonian"])));
    std::vector<Operator> us;
    if (j.contains("evolutions"))
      for (const auto& u : j["evolutions"]) us.emplace_back(matrix_from_json(u));
    return Scenario(std::move(rho), std::move(slots), std::move(us));
  } catch (const Json::exception& e) {
    throw ScenarioError(std::string("scenario schema: ") + e.what());
  } catch (const std::domain_error& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
}

Json scenario_to_json(const Scenario& scenario) {
  Json j;
  j["initial"] = matrix_to_json(scenario.initial().matrix());
  j["slots"] = Json::array();
  for (const auto& s : scenario.slots()) {
    Json slot{{"time", s.time}};
    if (s.instrument) {
      const KrausFamily& f = *s.instrument;
      Json inst{{"kind", "kraus"}, {"label", f.label()}};
      inst["outcomes"] = Json::array();
      inst["kraus"] = Json::array();
      for (std::size_t a = 0; a < f.size(); ++a) {
        inst["outcomes"].push_back(outcome_to_json(f.outcomes()[a]));
        inst["kraus"].push_back(matrix_to_json(f.kraus(a)));
      }
      inst["weights"] = f.weights();
      slot["instrument"] = inst;
    } else {
      slot["instrument"] = nullptr;
    }
    j["slots"].push_back(slot);
  }
  j["evolutions"] = Json::array();
  for (const auto& u : scenario.evolutions()) j["evolutions"].push_back(matrix_to_json(u.matrix()));
  return j;
}

}  // namespace macroreal
