#include "macroreal/mach_zehnder.hpp"

#include <cmath>
#include <limits>
#include <iomanip>
#include <locale>
#include <numbers>
#include <ostream>
#include <sstream>

namespace macroreal {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

Matrix splitter(double r, MzConvention c, bool first) {
  const double a = std::sqrt(r);
  const double b = std::sqrt(1.0 - r);
  Matrix m(2, 2);
  if (c == MzConvention::RealRotation)
    m << a, -b, b, a;
  else if (c == MzConvention::CrossingFirstSplitter && first)
    m << kI * b, a, a, kI * b;
  else
    m << a, kI * b, kI * b, a;
  return m;
}

std::shared_ptr<const KrausFamily> which_path(const char* label, bool plus_on_path1) {
  Matrix p0 = Matrix::Zero(2, 2);
  Matrix p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  std::vector<Matrix> ops = plus_on_path1 ? std::vector<Matrix>{p1, p0} : std::vector<Matrix>{p0, p1};
  return std::make_shared<const KrausFamily>(projective_family(label, ops, {1.0, -1.0}));
}

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

Operator beamsplitter(double r) {
  check_unit(r, "reflectivity");
  return Operator(splitter(r, MzConvention::SymmetricI, false));
}

Operator phase_plate(double phi) {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 0) = std::polar(1.0, phi);
  return Operator(std::move(m));
}

const char* to_string(MzConvention c) {
  switch (c) {
    case MzConvention::SymmetricI:
      return "symmetric-i";
    case MzConvention::SwappedInputLabels:
      return "swapped-input-labels";
    case MzConvention::CrossingFirstSplitter:
      return "crossing-first-splitter";
    case MzConvention::RealRotation:
      return "real-rotation";
  }
  return "?";
}

std::vector<MzConvention> all_conventions() {
  return {MzConvention::SymmetricI, MzConvention::SwappedInputLabels, MzConvention::CrossingFirstSplitter,
          MzConvention::RealRotation};
}

MzParams MzParams::mix(double r1, double r2, double phi, double q) {
  MzParams p;
  p.r1 = r1;
  p.r2 = r2;
  p.phi = phi;
  p.q = q;
  p.state = State::Mix;
  return p;
}

MzParams MzParams::sup(double r1, double r2, double phi, double q, Complex c) {
  MzParams p = mix(r1, r2, phi, q);
  p.state = State::Sup;
  p.c = c;
  return p;
}

double MzParams::alpha() const { return std::sqrt(r1 * r2 * (1.0 - r1) * (1.0 - r2)); }

void MzParams::validate() const {
  check_unit(r1, "R1");
  check_unit(r2, "R2");
  check_unit(q, "q");
  if (!std::isfinite(phi)) throw std::invalid_argument("phi must be finite");
  if (state == State::Sup && std::norm(c) > q * (1.0 - q) + 1e-12)
    throw std::invalid_argument("sup state is not positive: |c|^2 > q(1-q)");
}

Matrix MzParams::density() const {
  Matrix rho(2, 2);
  const Complex coh = state == State::Sup ? c : Complex(0.0);
  rho << q, coh, std::conj(coh), 1.0 - q;
  return rho;
}

Json MzParams::to_json() const {
  return {{"R1", r1},
          {"R2", r2},
          {"phi", phi},
          {"state", state == State::Mix ? "mix" : "sup"},
          {"q", q},
          {"c", {c.real(), c.imag()}}};
}

Scenario mz_scenario(const MzParams& p, MzConvention convention) {
  p.validate();
  const Matrix u01 = phase_plate(p.phi).matrix() * splitter(p.r1, convention, true);
  const Matrix u12 = splitter(p.r2, convention, false);
  std::vector<Slot> slots{{0.0, which_path("Q0", convention == MzConvention::SwappedInputLabels)},
                          {1.0, which_path("Q1", false)},
                          {2.0, which_path("Q2", false)}};
  return Scenario(DensityState(p.density(), 1e-12), std::move(slots), {Operator(u01), Operator(u12)});
}

Table1Predicates table1_predicates(const MzParams& p, double eps) {
  const double a = p.alpha();
  const double cphi = std::cos(p.phi);
  const double sphi = std::sin(p.phi);
  const bool sup = p.state == MzParams::State::Sup;
  auto zero = [eps](double f) { return PredicateValue{std::abs(f) <= eps, f}; };

  Table1Predicates t;
  const double lgi = p.r1 + a * cphi - p.r1 * p.r2;
  t.lgi = {lgi >= -eps, lgi};
  if (!sup) {
    t.nsit_1_2 = zero((2.0 * p.q - 1.0) * a * cphi);
  } else {
    const double s = std::sqrt(p.r2 * (1.0 - p.r2));
    const Complex e = cphi * ((2.0 * p.q - 1.0) * a + kI * p.c * (1.0 - 2.0 * p.r1) * s) +
                      kI * s * p.c.real() * ((2.0 * p.r1 - 1.0) * cphi + kI * sphi);
    t.nsit_1_2 = zero(std::abs(e));
  }
  t.nsit_0_1_2 = zero(a * cphi);
  t.nsit_0_12 = sup ? zero(p.c.imag() * std::sqrt(p.r1 * (1.0 - p.r1))) : PredicateValue{true, 0.0};
  return t;
}

Table1Lattice Table1Lattice::standard() {
  Table1Lattice l;
  for (int i = 0; i <= 10; ++i) {
    l.r1.push_back(i / 10.0);
    l.r2.push_back(i / 10.0);
  }
  for (int k = 0; k < 12; ++k) l.phi.push_back(2.0 * kPi * k / 12.0);
  l.q_mix = {0.0, 0.3, 0.5};
  l.c_sup = {Complex(0.2, 0.0), Complex(0.0, 0.2), Complex(0.1, 0.1)};
  return l;
}

std::vector<MzParams> Table1Lattice::points() const {
  std::vector<MzParams> out;
  for (double q : q_mix)
    for (double a : r1)
      for (double b : r2)
        for (double f : phi) out.push_back(MzParams::mix(a, b, f, q));
  for (Complex c : c_sup)
    for (double a : r1)
      for (double b : r2)
        for (double f : phi) out.push_back(MzParams::sup(a, b, f, q_sup, c));
  return out;
}

void Table1Report::write_csv(std::ostream& os) const {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(17);
  buf << "R1,R2,phi,state,q,c_re,c_im,condition,numeric_residual,analytic_defect,analytic_holds,numeric_holds,"
         "guarded,agree\n";
  for (const auto& r : rows) {
    const auto& p = r.params;
    buf << p.r1 << ',' << p.r2 << ',' << p.phi << ',' << (p.state == MzParams::State::Mix ? "mix" : "sup") << ','
        << p.q << ',' << p.c.real() << ',' << p.c.imag() << ',' << r.condition << ',' << r.residual << ','
        << r.defect << ',' << r.analytic << ',' << r.numeric << ',' << r.guarded << ',' << r.agree() << '\n';
  }
  os << buf.str();
}

Json Table1Report::summary() const {
  Json mism = Json::array();
  for (const auto& r : rows)
    if (!r.agree()) mism.push_back({{"params", r.params.to_json()}, {"condition", r.condition},
                                    {"residual", r.residual}, {"defect", r.defect}});
  return {{"convention", to_string(convention)},
          {"threshold", threshold},
          {"guard_band", guard_band},
          {"points", points},
          {"checks", checks},
          {"guarded", guarded},
          {"mismatches", mismatches},
          {"mismatch_rows", mism}};
}

Table1Report verify_table1(const std::vector<MzParams>& points, double threshold, MzConvention convention,
                           double guard_band) {
  Table1Report rep;
  rep.convention = convention;
  rep.threshold = threshold;
  rep.guard_band = guard_band;
  constexpr double eps = 1e-12;
  for (const auto& p : points) {
    const Scenario s = mz_scenario(p, convention);
    const auto pred = table1_predicates(p, eps);
    const auto bundle = mr012_check(s, threshold);
    const auto lgi = lgi_012(s, threshold);
    const std::pair<const char*, std::pair<const ConditionReport*, PredicateValue>> checks[] = {
        {"LGI_012", {&lgi, pred.lgi}},
        {"NSIT_(1)2", {&bundle.members[0], pred.nsit_1_2}},
        {"NSIT_0(1)2", {&bundle.members[1], pred.nsit_0_1_2}},
        {"NSIT_(0)12", {&bundle.members[2], pred.nsit_0_12}}};
    ++rep.points;
    for (const auto& [name, pair] : checks) {
      const auto& [report, pv] = pair;
      Table1Row row;
      row.params = p;
      row.condition = name;
      row.residual = report->residual;
      row.defect = pv.defect;
      row.analytic = pv.holds;
      row.numeric = report->holds;
      row.guarded = std::abs(pv.defect) > eps && std::abs(pv.defect) < guard_band;
      ++rep.checks;
      if (row.guarded) ++rep.guarded;
      if (!row.agree()) ++rep.mismatches;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

ConventionResolution resolve_convention(const std::vector<MzParams>& points, double threshold) {
  ConventionResolution r;
  for (auto c : all_conventions()) {
    const auto rep = verify_table1(points, threshold, c);
    r.mismatches.emplace_back(c, rep.mismatches);
    if (rep.mismatches == 0) {
      r.chosen = c;
      r.found = true;
      break;
    }
  }
  return r;
}

double mz_lgi_value(const MzParams& p, MzConvention convention) {
  const Scenario s = mz_scenario(p, convention);
  return correlation(joint_distribution(s, {0, 1}), 0, 1) + correlation(joint_distribution(s, {1, 2}), 1, 2) -
         correlation(joint_distribution(s, {0, 2}), 0, 2);
}

LgiSearchResult lgi_max_search(bool pure_only, MzConvention convention) {
  LgiSearchResult best;
  best.value = -std::numeric_limits<double>::infinity();
  auto make = [pure_only](double r1, double r2, double phi, double q) {
    return pure_only ? MzParams::sup(r1, r2, phi, q, Complex(std::sqrt(q * (1.0 - q)), 0.0))
                     : MzParams::mix(r1, r2, phi, q);
  };
  auto consider = [&](const MzParams& p) {
    const double v = mz_lgi_value(p, convention);
    ++best.evaluations;
    if (v > best.value) {
      best.value = v;
      best.params = p;
    }
  };
  for (double q : {0.0, 0.25, 0.5, 0.75, 1.0})
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; j <= 20; ++j)
        for (int k = 0; k < 24; ++k) consider(make(i / 20.0, j / 20.0, 2.0 * kPi * k / 24.0, q));

  // Coordinate refinement around the best grid point.
  double step = 0.05;
  while (step > 1e-7) {
    bool improved = false;
    for (int coord = 0; coord < 3; ++coord)
      for (double sign : {-1.0, 1.0}) {
        MzParams p = best.params;
        double* x = coord == 0 ? &p.r1 : coord == 1 ? &p.r2 : &p.phi;
        *x += sign * (coord == 2 ? step * 2.0 * kPi : step);
        if (coord < 2 && (*x < 0.0 || *x > 1.0)) continue;
        p = make(p.r1, p.r2, p.phi, p.q);
        const double before = best.value;
        consider(p);
        improved = improved || best.value > before;
      }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace macroreal
