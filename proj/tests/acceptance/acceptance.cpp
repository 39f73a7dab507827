// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "macroreal/conditions.hpp"
#include "macroreal/mach_zehnder.hpp"
#include "macroreal/overlap.hpp"

using namespace macroreal;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail, double seconds) {
  std::printf("criterion %2d: %s  %s  (%.1f s)\n", id, pass ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void timed(int id, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  std::pair<bool, std::string> r;
  try {
    r = body();
  } catch (const std::exception& e) {
    r = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(id, r.first, r.second, s);
}

// Haar basis (or the caller's), coarse-grained into random blocks.
KrausFamily random_projective(std::size_t dim, std::mt19937_64& rng, const Matrix* shared = nullptr) {
  Matrix basis;
  if (shared) {
    basis = *shared;
  } else {
    std::normal_distribution<double> g;
    Matrix a(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) a(i, j) = Complex(g(rng), g(rng));
    basis = Eigen::HouseholderQR<Matrix>(a).householderQ();
  }
  std::uniform_int_distribution<std::size_t> len(1, dim);
  std::vector<Matrix> proj;
  std::vector<double> vals;
  for (std::size_t start = 0; start < dim;) {
    const std::size_t n = std::min(dim - start, len(rng));
    Matrix p = Matrix::Zero(dim, dim);
    for (std::size_t k = start; k < start + n; ++k) p += basis.col(k) * basis.col(k).adjoint();
    proj.push_back(p);
    vals.push_back(static_cast<double>(vals.size()));
    start += n;
  }
  return projective_family("P", proj, vals);
}

SweepSummary shared_sweep() {
  static const SweepSummary s = [] {
    SweepOptions o;
    o.count = 10000;
    o.seed = 1;
    return random_scenario_sweep(o);
  }();
  return s;
}

}  // namespace

int main() {
  constexpr double inf = std::numeric_limits<double>::infinity();

  timed(1, [] {
    const auto points = Table1Lattice::standard().points();
    const auto rep = verify_table1(points, 1e-9, kDefaultConvention, 1e-6);
    return std::pair{rep.points >= 3000 && rep.mismatches == 0,
                     fmt("%zu points, %zu checks, %zu guarded, %zu mismatches", rep.points, rep.checks, rep.guarded,
                         rep.mismatches)};
  });

  timed(2, [] {
    const auto best = lgi_max_search();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = -inf;
    for (int i = 0; i < 20000; ++i) {
      const double q = u(rng);
      const auto p = (i % 2) ? MzParams::mix(u(rng), u(rng), 2 * std::numbers::pi * u(rng), q)
                             : MzParams::sup(u(rng), u(rng), 2 * std::numbers::pi * u(rng), q,
                                             std::polar(std::sqrt(q * (1 - q)) * u(rng), 2 * std::numbers::pi * u(rng)));
      worst = std::max(worst, mz_lgi_value(p));
    }
    const bool pass = std::abs(best.value - 1.5) < 1e-3 && best.value <= 1.5 + 1e-9 && worst <= 1.5 + 1e-9;
    return std::pair{pass, fmt("search max %.9f, sweep max %.9f over 20000 points", best.value, worst)};
  });

  timed(3, [] {
    const auto s = shared_sweep();
    const bool pass = s.scenarios >= 10000 && s.eq16_forward_failures == 0 && s.eq16_converse_failures == 0;
    return std::pair{pass, fmt("%zu scenarios, %zu with all NSIT+AoT, forward failures %zu, converse failures %zu "
                               "(worst NSIT/mismatch %.3f)",
                               s.scenarios, s.all_nsit_hold, s.eq16_forward_failures, s.eq16_converse_failures,
                               s.eq16_converse_worst_ratio)};
  });

  timed(4, [] {
    const auto s = shared_sweep();
    return std::pair{s.eq9_failures == 0 && s.eq9_premise > 0,
                     fmt("premise on %zu scenarios, %zu LGI violations", s.eq9_premise, s.eq9_failures)};
  });

  timed(5, [] {
    const auto s = shared_sweep();
    return std::pair{s.nic_failures == 0,
                     fmt("%zu failures, worst NIC/NSIT ratio %.4f", s.nic_failures, s.nic_worst_ratio)};
  });

  timed(6, [] {
    std::mt19937_64 rng(6);
    std::size_t pairs = 0, equivalent = 0, commuting = 0;
    for (std::size_t dim = 2; dim <= 6; ++dim)
      for (int k = 0; k < 240; ++k) {
        const auto a = random_projective(dim, rng);
        KrausFamily b = random_projective(dim, rng);
        if (k % 3 == 0) {
          // Every third pair shares A's eigenbasis, so both sides of the equivalence occur.
          Matrix h = Matrix::Zero(dim, dim);
          for (std::size_t i = 0; i < a.size(); ++i) h += static_cast<double>(i + 1) * a.kraus(i);
          const Matrix v = Eigen::SelfAdjointEigenSolver<Matrix>(h).eigenvectors();
          b = random_projective(dim, rng, &v);
        }
        const Operator one = Operator::identity(dim);
        const double nsit = nsit_operator_residual(a, b, one);
        const auto comm = commutator_tests(a, b, one);
        const bool lhs = nsit < 1e-10;
        const bool rhs = comm.pairwise < 1e-8;
        ++pairs;
        if (lhs == rhs) ++equivalent;
        if (rhs) ++commuting;
      }
    const auto x = KrausFamily::dense("X", {Outcome{0.0}}, {1.0}, {[] {
                                        Matrix m(2, 2);
                                        m << 0, 1, 1, 0;
                                        return m;
                                      }()});
    const auto y = KrausFamily::dense("Y", {Outcome{0.0}}, {1.0}, {[] {
                                        Matrix m(2, 2);
                                        m << 0, Complex(0, -1), Complex(0, 1), 0;
                                        return m;
                                      }()});
    const auto fc = commutator_tests(x, y, Operator::identity(2));
    const double fn = nsit_operator_residual(x, y, Operator::identity(2));
    const bool foot = std::abs(fc.pairwise - 2.0) < 1e-12 && fc.sandwich < 1e-12 && fn < 1e-12;
    return std::pair{pairs >= 1000 && equivalent == pairs && foot,
                     fmt("%zu/%zu pairs equivalent (%zu commuting); sigma_x/sigma_y: pairwise %.3g, sandwich %.3g, "
                         "NSIT %.3g",
                         equivalent, pairs, commuting, fc.pairwise, fc.sandwich, fn)};
  });

  timed(7, [] {
    const double target = 2.0 * std::numbers::sqrt2 / 3.0;
    std::string detail;
    bool pass = true;
    for (double g : {0.0, 1.0, 2.5}) {
      const double v = coherent_delta_overlap(g).value;
      pass = pass && std::abs(v - target) < 2e-3;
      detail += fmt("V(%.1f) = %.6f  ", g, v);
    }
    return std::pair{pass, detail + fmt("target %.6f", target)};
  });

  timed(8, [] {
    const double a = coherent_x_overlap(1.0, 2.0).value;
    const double b = coherent_x_overlap(0.03, 2.0).value;
    const double c = coherent_x_overlap(1e-4, 2.0).value;
    const bool pass = std::abs(a - 0.990) <= 5e-3 && std::abs(b - 0.671) <= 1e-2 && std::abs(c - 0.168) <= 1e-2;
    return std::pair{pass, fmt("V(1) = %.6f, V(0.03) = %.6f, V(1e-4) = %.6f", a, b, c)};
  });

  timed(9, [&] {
    double worst = 0.0;
    std::size_t runs = 0;
    for (auto c : {QuadratureCase::XX, QuadratureCase::PX, QuadratureCase::XP, QuadratureCase::PP})
      for (double delta : {1.0, 2.0})
        for (double kappa : {1.0, 2.0})
          for (double sigma : {1.0, 2.0})
            for (double m : {1.0, 2.0})
              for (double t : {0.0, 1.0, 5.0}) {
                const QuadratureParams p{c, delta, kappa, sigma, t, m};
                worst = std::max(worst, std::abs(quadrature_overlap_numeric(p).value - quadrature_overlap_analytic(p)));
                ++runs;
              }
    // Endpoint behaviour from the grid engine against the closed forms.
    auto num = [](QuadratureCase c, double t) { return quadrature_overlap_numeric({c, 1.0, 1.0, 1.0, t, 1.0}).value; };
    auto closed = [](QuadratureCase c) { return std::pow(quadrature_overlap_endpoint_form(c, 1.0, 1.0, 1.0), 0.25); };
    const double late = 40.0;
    const double e[] = {
        std::abs(num(QuadratureCase::XX, 0.0) - 1.0),
        std::abs(num(QuadratureCase::XX, late) - closed(QuadratureCase::XX)),
        std::abs(num(QuadratureCase::PX, 0.0) - closed(QuadratureCase::PX)),
        std::abs(num(QuadratureCase::PX, late) - 1.0),
        std::abs(num(QuadratureCase::XP, 0.0) - closed(QuadratureCase::XP)),
        std::abs(num(QuadratureCase::XP, 0.0) - num(QuadratureCase::XP, 10.0)),
        std::abs(num(QuadratureCase::PP, 0.0) - 1.0),
        std::abs(num(QuadratureCase::PP, 10.0) - 1.0),
    };
    double worst_end = 0.0;
    for (double v : e) worst_end = std::max(worst_end, v);
    return std::pair{worst < 1e-3 && worst_end < 1e-2,
                     fmt("%zu lattice runs, max |numeric - analytic| %.2e; endpoint checks max deviation %.2e", runs,
                         worst, worst_end)};
  });

  timed(10, [] {
    // Rings.
    double ring_center_min = inf, ring_border_min = inf, ring_border_max = -inf;
    for (double d : {6.0, 7.0, 8.0}) {
      ring_center_min = std::min(ring_center_min, ring_overlap(d, 1.5 * d).value);
      const double b = ring_overlap(d, d).value;
      ring_border_min = std::min(ring_border_min, b);
      ring_border_max = std::max(ring_border_max, b);
    }
    const bool rings = ring_center_min >= 0.999 && ring_border_min >= 0.994 && ring_border_max <= 0.999;

    // Fock curves, from coarsest to finest border function.
    const std::vector<BorderFunction> family{{100, 2}, {10, 2}, {2, 2}, {1, 2}, {2, 1}, {1, 1}};
    std::vector<double> gammas;
    for (double g = 0.5; g <= 6.0 + 1e-9; g += 0.1) gammas.push_back(g);
    std::size_t inversions = 0;
    double worst_inversion = 0.0, first_gamma = 0.0;
    std::string first_pair;
    for (double g : gammas) {
      std::vector<double> v;
      for (const auto& f : family) v.push_back(fock_overlap(f, g).value);
      for (std::size_t k = 0; k + 1 < v.size(); ++k)
        if (v[k] < v[k + 1]) {
          if (inversions == 0) {
            first_gamma = g;
            first_pair = family[k].to_string() + " < " + family[k + 1].to_string();
          }
          ++inversions;
          worst_inversion = std::max(worst_inversion, v[k + 1] - v[k]);
        }
    }

    // Dips. Bin m holds g(m) <= n < g(m+1), so the border between two bins sits
    // at mean photon number g(m) - 1/2 and a bin centre at (g(m) + g(m+1) - 1) / 2.
    std::size_t borders[2] = {0, 0}, dips[2] = {0, 0};  // [linear, quadratic]
    for (const auto& f : family) {
      const int kind = f.power == 2 ? 1 : 0;
      for (long m = 1;; ++m) {
        const double lo = 0.5 * static_cast<double>(f(m - 1) + f(m) - 1);
        const double hi = 0.5 * static_cast<double>(f(m) + f(m + 1) - 1);
        if (std::sqrt(hi) > 6.0) break;
        if (std::sqrt(std::max(lo, 0.0)) < 0.5) continue;
        ++borders[kind];
        const double vb = fock_overlap(f, std::sqrt(static_cast<double>(f(m)) - 0.5)).value;
        if (vb < fock_overlap(f, std::sqrt(lo)).value && vb < fock_overlap(f, std::sqrt(hi)).value) ++dips[kind];
      }
    }
    const bool pass = rings && inversions == 0 && dips[0] == borders[0] && dips[1] == borders[1] && borders[1] > 0;
    return std::pair{pass, fmt("rings: V(3d/2) min %.6f, V(d) in [%.6f, %.6f]; Fock ordering: %zu inversions over "
                               "gamma in [0.5, 6] (first at gamma = %.1f: %s, worst %.4f); dips at %zu/%zu quadratic and %zu/%zu "
                               "linear borders",
                               ring_center_min, ring_border_min, ring_border_max, inversions, first_gamma,
                               first_pair.c_str(), worst_inversion, dips[1], borders[1], dips[0], borders[0])};
  });

  timed(11, [] {
    std::ifstream f(std::string(MACROREAL_DATA_DIR) + "/scenarios/two_time_insufficient.json");
    const Scenario s = scenario_from_json(Json::parse(f));
    const double n01 = nsit_two_time(s, 0, 1).residual;
    const double n02 = nsit_two_time(s, 0, 2).residual;
    const double n12 = nsit_two_time(s, 1, 2).residual;
    const auto mr = mr012_check(s);
    const bool pass = n01 < 1e-10 && n02 < 1e-10 && n12 < 1e-10 && !mr.verdict.holds && mr.marginal_mismatch > 1e-3;
    return std::pair{pass, fmt("NSIT_(0)1 %.2e, NSIT_(0)2 %.2e, NSIT_(1)2 %.2e; MR_012 %s, mismatch %.4f", n01, n02,
                               n12, mr.verdict.holds ? "holds" : "fails", mr.marginal_mismatch)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
