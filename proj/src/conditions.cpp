#include "macroreal/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace macroreal {

Json ConditionReport::to_json() const {
  return {{"name", name},       {"residual", residual},
          {"threshold", threshold}, {"holds", holds},
          {"total_variation", total_variation}, {"context", context}};
}

namespace {

ConditionReport make_report(std::string name, double residual, double threshold, double tv = 0.0,
                            Json context = Json::object()) {
  ConditionReport r;
  r.name = std::move(name);
  r.residual = std::max(residual, 0.0);
  r.threshold = threshold;
  r.holds = r.residual <= threshold;
  r.total_variation = tv;
  r.context = std::move(context);
  return r;
}

void require_three_slots(const Scenario& s, const char* what) {
  if (s.slot_count() != 3) throw ScenarioError(std::string(what) + ": scenario must have exactly three slots");
}

double hermitian_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Difference compare_tables(const ProbabilityTable& p, const ProbabilityTable& q) {
  if (p.slots() != q.slots() || p.size() != q.size())
    throw ScenarioError("compare_tables: tables are over different axes");
  Difference d;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double diff = std::abs(p.values()[i] - q.values()[i]);
    d.sup = std::max(d.sup, diff);
    d.total_variation += 0.5 * diff * p.cell_weight(i);
  }
  return d;
}

ConditionReport nsit_two_time(const Scenario& s, std::size_t i, std::size_t j, double threshold) {
  if (!(i < j)) throw ScenarioError("nsit_two_time: requires i < j");
  const auto pj = joint_distribution(s, {j});
  const auto pij = marginalize(joint_distribution(s, {i, j}), {j});
  const auto d = compare_tables(pj, pij);
  return make_report("NSIT_(" + std::to_string(i) + ")" + std::to_string(j), d.sup, threshold, d.total_variation,
                     s.descriptor());
}

ConditionReport nsit_sandwich(const Scenario& s, double threshold) {
  require_three_slots(s, "nsit_sandwich");
  const auto d = compare_tables(joint_distribution(s, {0, 2}), marginalize(joint_distribution(s, {0, 1, 2}), {0, 2}));
  return make_report("NSIT_0(1)2", d.sup, threshold, d.total_variation, s.descriptor());
}

ConditionReport nsit_leading(const Scenario& s, double threshold) {
  require_three_slots(s, "nsit_leading");
  const auto d = compare_tables(joint_distribution(s, {1, 2}), marginalize(joint_distribution(s, {0, 1, 2}), {1, 2}));
  return make_report("NSIT_(0)12", d.sup, threshold, d.total_variation, s.descriptor());
}

ConditionReport aot_check(const Scenario& s, std::size_t i, std::size_t j, double threshold) {
  if (!(i < j)) throw ScenarioError("aot_check: requires i < j");
  const auto d = compare_tables(joint_distribution(s, {i}), marginalize(joint_distribution(s, {i, j}), {i}));
  return make_report("AoT_" + std::to_string(i) + "(" + std::to_string(j) + ")", d.sup, threshold,
                     d.total_variation, s.descriptor());
}

ConditionReport lgi_012(const Scenario& s, double threshold) {
  require_three_slots(s, "lgi_012");
  const double c01 = correlation(joint_distribution(s, {0, 1}), 0, 1);
  const double c12 = correlation(joint_distribution(s, {1, 2}), 1, 2);
  const double c02 = correlation(joint_distribution(s, {0, 2}), 0, 2);
  const double k = c01 + c12 - c02;
  Json ctx = s.descriptor();
  ctx["C01"] = c01;
  ctx["C12"] = c12;
  ctx["C02"] = c02;
  ctx["K"] = k;
  return make_report("LGI_012", k - 1.0, threshold, 0.0, std::move(ctx));
}

ConditionReport nic_012(const Scenario& s, double threshold) {
  require_three_slots(s, "nic_012");
  const double c02 = correlation(joint_distribution(s, {0, 2}), 0, 2);
  const double c02_1 = correlation(joint_distribution(s, {0, 1, 2}), 0, 2);
  Json ctx = s.descriptor();
  ctx["C02"] = c02;
  ctx["C02|1"] = c02_1;
  return make_report("NIC_012", std::abs(c02 - c02_1), threshold, 0.0, std::move(ctx));
}

Json Mr012Bundle::to_json() const {
  Json j;
  j["members"] = Json::array();
  for (const auto& m : members) {
    Json mj = m.to_json();
    mj.erase("context");
    j["members"].push_back(mj);
  }
  j["marginal_mismatch"] = marginal_mismatch;
  j["verdict"] = verdict.to_json();
  return j;
}

Mr012Bundle mr012_check(const Scenario& s, double threshold) {
  require_three_slots(s, "mr012_check");
  const auto p0 = joint_distribution(s, {0});
  const auto p1 = joint_distribution(s, {1});
  const auto p2 = joint_distribution(s, {2});
  const auto p01 = joint_distribution(s, {0, 1});
  const auto p02 = joint_distribution(s, {0, 2});
  const auto p12 = joint_distribution(s, {1, 2});
  const auto p012 = joint_distribution(s, {0, 1, 2});

  Mr012Bundle b;
  const auto n12 = compare_tables(p2, marginalize(p12, {2}));
  const auto n0_1_2 = compare_tables(p02, marginalize(p012, {0, 2}));
  const auto n0_12 = compare_tables(p12, marginalize(p012, {1, 2}));
  b.members.push_back(make_report("NSIT_(1)2", n12.sup, threshold, n12.total_variation));
  b.members.push_back(make_report("NSIT_0(1)2", n0_1_2.sup, threshold, n0_1_2.total_variation));
  b.members.push_back(make_report("NSIT_(0)12", n0_12.sup, threshold, n0_12.total_variation));

  // Earlier statistics against every later-extended experiment.
  const Difference aot[] = {compare_tables(p0, marginalize(p01, {0})), compare_tables(p0, marginalize(p02, {0})),
                            compare_tables(p1, marginalize(p12, {1})), compare_tables(p01, marginalize(p012, {0, 1})),
                            compare_tables(p0, marginalize(p012, {0}))};
  double aot_sup = 0.0;
  double aot_tv = 0.0;
  for (const auto& d : aot) {
    aot_sup = std::max(aot_sup, d.sup);
    aot_tv = std::max(aot_tv, d.total_variation);
  }
  b.members.push_back(make_report("AoT", aot_sup, threshold, aot_tv));

  const std::pair<const ProbabilityTable*, std::vector<std::size_t>> experiments[] = {
      {&p0, {0}}, {&p1, {1}}, {&p2, {2}}, {&p01, {0, 1}}, {&p02, {0, 2}}, {&p12, {1, 2}}, {&p012, {0, 1, 2}}};
  Json per_experiment = Json::object();
  for (const auto& [table, keep] : experiments) {
    const auto d = compare_tables(*table, marginalize(p012, keep));
    std::string key = "P";
    for (auto k : keep) key += std::to_string(k);
    per_experiment[key] = d.sup;
    b.marginal_mismatch = std::max(b.marginal_mismatch, d.sup);
  }

  double worst = b.marginal_mismatch;
  bool all = b.marginal_mismatch <= threshold;
  for (const auto& m : b.members) {
    worst = std::max(worst, m.residual);
    all = all && m.holds;
  }
  Json ctx = s.descriptor();
  ctx["marginal_mismatch"] = per_experiment;
  b.verdict = make_report("MR_012", worst, threshold, 0.0, std::move(ctx));
  b.verdict.holds = all;
  return b;
}

// ---------------------------------------------------------------------------

double nsit_operator_residual(const KrausFamily& a, const KrausFamily& b, const Operator& u, double completeness_tol) {
  if (a.dim() != b.dim() || u.dim() != a.dim()) throw DimensionError("nsit_operator_residual: dimensions differ");
  if (a.completeness_defect() > completeness_tol)
    throw InstrumentError("nsit_operator_residual: first family is not complete");
  const Matrix& um = u.matrix();
  const Matrix s_a = a.effect_sum();
  double worst = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const Matrix bt = um.adjoint() * b.kraus(k) * um;
    const Matrix e = bt.adjoint() * bt;
    worst = std::max(worst, hermitian_norm(a.dual(e) - bt.adjoint() * s_a * bt));
  }
  return worst;
}

CommutatorTests commutator_tests(const KrausFamily& a, const KrausFamily& b, const Operator& u) {
  if (a.dim() != b.dim() || u.dim() != a.dim()) throw DimensionError("commutator_tests: dimensions differ");
  std::vector<Matrix> as;
  for (std::size_t i = 0; i < a.size(); ++i) as.push_back(a.kraus(i));
  CommutatorTests t;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const Matrix bt = u.matrix().adjoint() * b.kraus(k) * u.matrix();
    for (const auto& ai : as) {
      t.pairwise = std::max(t.pairwise, operator_norm(ai * bt - bt * ai));
      const Matrix ab = ai * bt;
      const Matrix ba = bt * ai;
      t.sandwich = std::max(t.sandwich, operator_norm(ab * ba - ba * ab));
    }
  }
  return t;
}

ConditionReport projective_necessity_check(const KrausFamily& a, const KrausFamily& b, const Operator& u, double tol,
                                           double commutator_tol) {
  if (!a.is_projective(1e-10) || !b.is_projective(1e-10))
    throw InstrumentError("projective_necessity_check: families must be projective");
  const double residual = nsit_operator_residual(a, b, u);
  const auto comm = commutator_tests(a, b, u);
  const bool nsit = residual <= tol;
  const bool commute = comm.pairwise <= commutator_tol;
  Json ctx{{"pairwise_commutator", comm.pairwise},
           {"sandwich_commutator", comm.sandwich},
           {"commutator_threshold", commutator_tol},
           {"equivalent", nsit == commute}};
  return make_report("projective_necessity", residual, tol, 0.0, std::move(ctx));
}

ConditionReport classical_operator(const KrausFamily& candidate, const std::vector<KrausFamily>& reference,
                                   double threshold) {
  const Operator one = Operator::identity(candidate.dim());
  double worst = 0.0;
  Json per = Json::array();
  for (const auto& r : reference) {
    const double ab = nsit_operator_residual(candidate, r, one);
    const double ba = nsit_operator_residual(r, candidate, one);
    per.push_back({{"reference", r.label()}, {"candidate_first", ab}, {"reference_first", ba}});
    worst = std::max({worst, ab, ba});
  }
  return make_report("classical_operator", worst, threshold, 0.0,
                     {{"candidate", candidate.label()}, {"residuals", per}});
}

ConditionReport classical_hamiltonian(const Operator& h, const std::vector<KrausFamily>& reference,
                                      const std::vector<double>& times, double threshold) {
  double worst = 0.0;
  Json per = Json::array();
  for (double t : times) {
    const Operator u = unitary_from_hamiltonian(h, t);
    double at_t = 0.0;
    for (const auto& a : reference)
      for (const auto& b : reference) at_t = std::max(at_t, nsit_operator_residual(a, b, u));
    per.push_back({{"time", t}, {"residual", at_t}});
    worst = std::max(worst, at_t);
  }
  return make_report("classical_hamiltonian", worst, threshold, 0.0, {{"per_time", per}});
}

// ---------------------------------------------------------------------------

Json SweepSummary::to_json() const {
  return {{"scenarios", scenarios},
          {"all_nsit_hold", all_nsit_hold},
          {"eq16_forward_failures", eq16_forward_failures},
          {"eq16_converse_failures", eq16_converse_failures},
          {"eq16_converse_worst_ratio", eq16_converse_worst_ratio},
          {"eq9_premise", eq9_premise},
          {"eq9_failures", eq9_failures},
          {"nic_failures", nic_failures},
          {"nic_worst_ratio", nic_worst_ratio}};
}

namespace {

using Rng = std::mt19937_64;

Matrix random_unitary(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Matrix z(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) z(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0);
  }
  return q;
}

Matrix random_density(Rng& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Matrix w = random_unitary(rng, n);
  RealVector p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = -std::log(1.0 - u(rng));
  if (u(rng) < 0.25) {  // pure
    p.setZero();
    p(0) = 1.0;
  }
  p /= p.sum();
  return w * p.cast<Complex>().asDiagonal() * w.adjoint();
}

/// Dichotomic projective instrument diagonal in the basis `w`.
KrausFamily dichotomic_projective(Rng& rng, const Matrix& w, const char* label) {
  const Eigen::Index n = w.rows();
  std::uniform_int_distribution<int> coin(0, 1);
  RealVector plus(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) plus(i) = coin(rng);
  } while (plus.sum() == 0 || plus.sum() == static_cast<double>(n));
  const Matrix p_plus = w * plus.cast<Complex>().asDiagonal() * w.adjoint();
  const Matrix p_minus = Matrix::Identity(n, n) - p_plus;
  return KrausFamily::dense(label, {Outcome{1.0}, Outcome{-1.0}}, {1.0, 1.0}, {p_plus, p_minus},
                            {{"kind", "projective"}});
}

/// Generic two-outcome instrument from a random isometry.
KrausFamily dichotomic_generic(Rng& rng, Eigen::Index n, const char* label) {
  const Matrix v = random_unitary(rng, 2 * n);
  return KrausFamily::dense(label, {Outcome{1.0}, Outcome{-1.0}}, {1.0, 1.0},
                            {v.block(0, 0, n, n), v.block(n, 0, n, n)}, {{"kind", "generic"}});
}

/// Unitary preserving the basis `w` up to a permutation and phases.
Matrix basis_preserving(Rng& rng, const Matrix& w) {
  const Eigen::Index n = w.rows();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(perm[static_cast<std::size_t>(i)], i) = std::polar(1.0, ph(rng));
  return w * m * w.adjoint();
}

}  // namespace

Scenario random_sweep_scenario(const SweepOptions& options, std::size_t i, bool* structured_out) {
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                    static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
  Rng rng(seq);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Eigen::Index n = (u(rng) < 0.5) ? 2 : 3;
  const bool structured = u(rng) < options.structured_fraction;
  if (structured_out) *structured_out = structured;

  const Matrix w = random_unitary(rng, n);
  Matrix rho = random_density(rng, n);
  std::vector<Slot> slots;
  std::vector<Operator> us;
  static const char* labels[] = {"Q0", "Q1", "Q2"};
  for (int k = 0; k < 3; ++k) {
    KrausFamily f = (!structured || u(rng) < 0.3) ? (u(rng) < 0.5 ? dichotomic_generic(rng, n, labels[k])
                                                                  : dichotomic_projective(rng, random_unitary(rng, n),
                                                                                          labels[k]))
                                                  : dichotomic_projective(rng, w, labels[k]);
    slots.push_back({static_cast<double>(k), std::make_shared<const KrausFamily>(std::move(f))});
  }
  for (int k = 0; k < 2; ++k)
    us.emplace_back((structured && u(rng) < 0.7) ? basis_preserving(rng, w) : random_unitary(rng, n));
  if (structured && u(rng) < 0.5) {
    // State diagonal in the common basis.
    const Matrix d = (w.adjoint() * rho * w).diagonal().asDiagonal();
    rho = w * d * w.adjoint();
  }
  rho = 0.5 * (rho + rho.adjoint());
  return Scenario(DensityState(rho, 1e-9), std::move(slots), std::move(us), 1e-9);
}

SweepRecord evaluate_sweep_scenario(const Scenario& s) {
  SweepRecord r;
  r.dim = s.dim();
  const auto bundle = mr012_check(s);
  r.nsit_12 = bundle.members[0].residual;
  r.nsit_0_1_2 = bundle.members[1].residual;
  r.nsit_0_12 = bundle.members[2].residual;
  r.aot = bundle.members[3].residual;
  r.mismatch = bundle.marginal_mismatch;
  r.lgi_excess = lgi_012(s).context["K"].get<double>() - 1.0;
  r.nic = nic_012(s).residual;
  return r;
}

SweepSummary random_scenario_sweep(const SweepOptions& options, std::vector<SweepRecord>* records) {
  SweepSummary sum;
  const double tol = options.exact_tol;
  for (std::size_t i = 0; i < options.count; ++i) {
    bool structured = false;
    const Scenario s = random_sweep_scenario(options, i, &structured);
    SweepRecord r = evaluate_sweep_scenario(s);
    r.structured = structured;
    ++sum.scenarios;

    const bool all_nsit = r.nsit_12 < tol && r.nsit_0_1_2 < tol && r.nsit_0_12 < tol && r.aot < tol;
    if (all_nsit) {
      ++sum.all_nsit_hold;
      if (!(r.mismatch < 1e-8)) ++sum.eq16_forward_failures;
    }
    const double worst_nsit = std::max({r.nsit_12, r.nsit_0_1_2, r.nsit_0_12});
    if (worst_nsit > 1e-14) {
      // Claim under test: every NSIT residual < 2 eps whenever mismatch < eps,
      // i.e. worst_nsit < 2 * mismatch.
      const double ratio = r.mismatch > 0 ? worst_nsit / r.mismatch : std::numeric_limits<double>::infinity();
      sum.eq16_converse_worst_ratio = std::max(sum.eq16_converse_worst_ratio, ratio);
      if (!(worst_nsit < 2.0 * r.mismatch)) ++sum.eq16_converse_failures;
    }
    if (r.nsit_0_1_2 < tol && r.nsit_0_12 < tol && r.aot < tol) {
      ++sum.eq9_premise;
      if (r.lgi_excess > 1e-8) ++sum.eq9_failures;
    }
    if (r.nic > 4.0 * r.nsit_0_1_2 + 1e-12) ++sum.nic_failures;
    if (r.nsit_0_1_2 > 1e-14) sum.nic_worst_ratio = std::max(sum.nic_worst_ratio, r.nic / r.nsit_0_1_2);
    if (records) records->push_back(r);
  }
  return sum;
}

}  // namespace macroreal
