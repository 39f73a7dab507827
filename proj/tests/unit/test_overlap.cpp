#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "helpers.hpp"
#include "macroreal/overlap.hpp"

using namespace macroreal;

namespace {

constexpr double kPi = std::numbers::pi;
const double kBound = 2.0 * std::sqrt(2.0) / 3.0;

OutcomeDistribution line_distribution(const std::vector<double>& xs, double h, const std::function<double(double)>& f) {
  OutcomeDistribution d;
  for (double x : xs) {
    d.outcomes.emplace_back(x);
    d.weights.push_back(h);
    d.density.push_back(f(x));
  }
  return d;
}

Matrix coherent_rho(Complex g, std::size_t dim) {
  const Vector v = coherent_state(g, dim).amplitudes();
  return v * v.adjoint();
}

// Bhattacharyya overlap between the Husimi functions of |gamma> and of its
// photon-number-dephased version, by direct polar quadrature (continuum).
double dephased_overlap_oracle(double gamma) {
  const int nr = 4000, nt = 720;
  const double rmax = gamma + 8.0, dr = rmax / nr, dt = 2 * kPi / nt;
  std::vector<double> pn(80);
  for (std::size_t n = 0; n < pn.size(); ++n)
    pn[n] = std::exp(-gamma * gamma + 2.0 * n * std::log(gamma) - std::lgamma(n + 1.0));
  double v = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) * dr;
    double q_inv = 0.0;
    for (std::size_t n = 0; n < pn.size(); ++n)
      q_inv += pn[n] * std::exp(-r * r + 2.0 * n * std::log(r) - std::lgamma(n + 1.0));
    q_inv /= kPi;
    for (int j = 0; j < nt; ++j) {
      const Complex b = std::polar(r, j * dt);
      const double q = std::exp(-std::norm(b - gamma)) / kPi;
      v += std::sqrt(q * q_inv) * r * dr * dt;
    }
  }
  return v;
}

}  // namespace

TEST_CASE("bhattacharyya") {
  std::vector<double> xs;
  const double h = 0.01;
  for (double x = -12.0; x <= 12.0; x += h) xs.push_back(x);
  auto gauss = [](double mu, double v) {
    return [mu, v](double x) { return std::exp(-(x - mu) * (x - mu) / (2 * v)) / std::sqrt(2 * kPi * v); };
  };
  const auto p = line_distribution(xs, h, gauss(0.0, 1.0));
  CHECK(bhattacharyya(p, p).value == doctest::Approx(1.0).epsilon(1e-9));
  const auto left = line_distribution(xs, h, [](double x) { return x < 0 ? 1.0 / 12.0 : 0.0; });
  const auto right = line_distribution(xs, h, [](double x) { return x >= 0 ? 1.0 / 12.0 : 0.0; });
  CHECK(bhattacharyya(left, right).value == 0.0);
  const auto q = line_distribution(xs, h, gauss(2.0, 1.0));
  CHECK(std::abs(bhattacharyya(p, q).value - std::exp(-0.5)) < 1e-4);
  SUBCASE("grid mismatch") {
    auto shifted = q;
    shifted.weights.back() = 2 * h;
    CHECK_THROWS_AS(bhattacharyya(p, shifted), OverlapError);
  }
  SUBCASE("clipping is reported") {
    auto big = p;
    for (auto& d : big.density) d *= 1.5;
    const auto r = bhattacharyya(big, big);
    CHECK(r.value == 1.0);
    CHECK(r.clipped);
  }
  SUBCASE("closed form for zero-mean Gaussians") {
    CHECK(gaussian_bhattacharyya(1.0, 1.0) == doctest::Approx(1.0));
    const auto a = line_distribution(xs, h, gauss(0.0, 0.5));
    const auto b = line_distribution(xs, h, gauss(0.0, 2.0));
    CHECK(std::abs(bhattacharyya(a, b).value - gaussian_bhattacharyya(0.5, 2.0)) < 1e-8);
  }
}

TEST_CASE("husimi") {
  SUBCASE("vacuum") {
    Matrix rho = Matrix::Zero(20, 20);
    rho(0, 0) = 1.0;
    const auto lat = ComplexLattice::disc(0.0, 5.0, 0.25);
    const auto q = husimi(rho, lat);
    double worst = 0.0;
    for (std::size_t k = 0; k < lat.size(); ++k)
      worst = std::max(worst, std::abs(q.density[k] - std::exp(-std::norm(lat.points[k])) / kPi));
    CHECK(worst < 1e-8);
    CHECK(std::abs(q.mass() - 1.0) < 1e-4);
  }
  SUBCASE("coherent state") {
    const Complex g(1.5, -0.5);
    const auto lat = ComplexLattice::disc(g, 5.0, 0.25);
    const auto q = husimi(coherent_rho(g, default_fock_dim(std::abs(g))), lat);
    double worst = 0.0;
    for (std::size_t k = 0; k < lat.size(); ++k)
      worst = std::max(worst, std::abs(q.density[k] - std::exp(-std::norm(lat.points[k] - g)) / kPi));
    CHECK(worst < 1e-6);
    CHECK(std::abs(q.mass() - 1.0) < 1e-4);
  }
}

TEST_CASE("invaded_distribution") {
  const std::size_t dim = 30;
  const Matrix rho = coherent_rho(Complex(1.0, 0.5), dim);
  const auto b = coherent_projector_family(ComplexLattice::disc(Complex(1.0, 0.5), 5.0, 0.25), dim);
  SUBCASE("identity invasion changes nothing") {
    const auto plain = plain_distribution(rho, Operator::identity(dim), b);
    const auto inv = invaded_distribution(rho, identity_family(dim), Operator::identity(dim), b);
    CHECK(plain.density == inv.density);
    // The disc misses a sliver of mass, so V equals the captured mass rather than 1.
    CHECK(bhattacharyya(plain, inv).value == doctest::Approx(plain.mass()).epsilon(1e-14));
    CHECK(plain.mass() > 1.0 - 1e-9);
  }
  SUBCASE("repeating a projective measurement") {
    const auto f = fock_bin_family(BorderFunction{1.0, 2}, dim);
    const auto plain = plain_distribution(rho, Operator::identity(dim), f);
    const auto inv = invaded_distribution(rho, f, Operator::identity(dim), f);
    CHECK(bhattacharyya(plain, inv).value == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("an X measurement smears the Husimi function along p") {
    const Complex g = 2.0;
    const std::size_t d = 40;
    const auto a = gaussian_x_family(0.5, {-12.0, 12.0, 961}, d);
    const auto lat = ComplexLattice::disc(g, 5.0, 0.25);
    const auto q = husimi(a.channel(coherent_rho(g, d)), lat);
    double m = 0.0, vx = 0.0, vp = 0.0;
    for (std::size_t k = 0; k < lat.size(); ++k) {
      const double w = q.weights[k] * q.density[k];
      m += w;
      vx += w * std::pow(lat.points[k].real() - g.real(), 2);
      vp += w * std::pow(lat.points[k].imag(), 2);
    }
    CHECK(vp / m > 2.0 * vx / m);
    CHECK(vx / m == doctest::Approx(0.5).epsilon(0.05));
  }
  SUBCASE("defect ceiling") {
    const auto coarse = gaussian_x_family(1.0, {-12.0, 12.0, 481}, dim);
    CHECK_THROWS_AS(invaded_distribution(rho, coarse, Operator::identity(dim), b, 1e-30), InstrumentError);
  }
}

TEST_CASE("coherent_delta_overlap") {
  const auto r1 = coherent_delta_overlap(1.0);
  const auto r0 = coherent_delta_overlap(0.0);
  CHECK(std::abs(r1.value - kBound) < 2e-3);
  CHECK(std::abs(r0.value - kBound) < 2e-3);
  CHECK(std::abs(r1.value - r0.value) < 2e-3);
  CHECK(r1.error_estimate < 5e-4);
  CHECK(r1.discretization.contains("dim"));
}

TEST_CASE("coherent_x_overlap") {
  SUBCASE("reference values at three unsharpness levels") {
    CHECK(std::abs(coherent_x_overlap(1.0, 2.0).value - 0.990) < 5e-3);
    CHECK(std::abs(coherent_x_overlap(0.03, 2.0).value - 0.671) < 1e-2);
    CHECK(std::abs(coherent_x_overlap(1e-4, 2.0).value - 0.168) < 1e-2);
  }
  SUBCASE("independent of the coherent amplitude") {
    XGridOptions o;
    o.refine = false;
    const double v2 = coherent_x_overlap(0.03, 2.0, o).value;
    CHECK(std::abs(coherent_x_overlap(0.03, 0.0, o).value - v2) < 1e-6);
    CHECK(std::abs(coherent_x_overlap(0.03, Complex(-1.0, 3.0), o).value - v2) < 1e-6);
  }
  SUBCASE("agrees with the Fock-basis instruments for moderate delta") {
    const double grid = coherent_x_overlap(1.0, 2.0).value;
    const double fock = coherent_x_overlap_fock(1.0, 2.0, 40, {-12.0, 12.0, 481}).value;
    CHECK(std::abs(grid - fock) < 1e-3);
  }
  CHECK_THROWS(coherent_x_overlap(0.0, 1.0));
}

TEST_CASE("ring_overlap") {
  SUBCASE("centred in a ring the state is barely disturbed") {
    CHECK(ring_overlap(6.0, 9.0).value >= 0.999);
  }
  SUBCASE("on a ring border the overlap plateaus near 0.997") {
    const double v = ring_overlap(6.0, 6.0).value;
    CHECK(v >= 0.994);
    CHECK(v <= 0.999);
  }
  SUBCASE("thin rings converge") {
    LatticeOptions o;
    o.refine = false;
    const double a = ring_overlap(0.1, 1.0, o).value;
    const double b = ring_overlap(0.05, 1.0, o).value;
    CHECK(std::abs(a - b) < 1e-3);
    CHECK(a > kBound);  // thin rings resolve |alpha| only, not the phase
  }
}

TEST_CASE("fock_overlap") {
  const double v100 = fock_overlap(BorderFunction{100.0, 2}, 2.0).value;
  const double v10 = fock_overlap(BorderFunction{10.0, 2}, 2.0).value;
  const double v2 = fock_overlap(BorderFunction{2.0, 2}, 2.0).value;
  CHECK(v100 >= v10);
  CHECK(v10 >= v2);
  CHECK(std::abs(fock_overlap(BorderFunction{2.0, 2}, 0.0).value - 1.0) < 1e-6);
  SUBCASE("photon counting against the continuum oracle") {
    const auto r = fock_overlap(BorderFunction{1.0, 1}, 2.0);
    const double oracle = dephased_overlap_oracle(2.0);
    CHECK(std::abs(r.value - oracle) < 1e-3);
    CHECK(r.value == doctest::Approx(0.551524).epsilon(1e-5));
  }
}

TEST_CASE("quadrature_overlap_analytic") {
  QuadratureParams p;
  SUBCASE("XX starts at 1") {
    p.kase = QuadratureCase::XX;
    p.t = 0.0;
    CHECK(quadrature_overlap_analytic(p) == doctest::Approx(1.0));
  }
  SUBCASE("XX at late times, delta = sigma = 1") {
    p.kase = QuadratureCase::XX;
    p.t = std::numeric_limits<double>::infinity();
    CHECK(quadrature_overlap_analytic(p) == doctest::Approx(std::pow(8.0 / 9.0, 0.25)));
    CHECK(quadrature_overlap_endpoint_form(QuadratureCase::XX, 1.0, 1.0, 1.0) == doctest::Approx(8.0 / 9.0));
    p.t = 1e4;
    CHECK(std::abs(quadrature_overlap_analytic(p) - std::pow(8.0 / 9.0, 0.25)) < 1e-6);
  }
  SUBCASE("PP is constant at 1") {
    p.kase = QuadratureCase::PP;
    for (double t : {0.0, 1.0, 7.0, std::numeric_limits<double>::infinity()}) {
      p.t = t;
      CHECK(quadrature_overlap_analytic(p) == 1.0);
    }
  }
  SUBCASE("published endpoint forms are the fourth power of V") {
    for (double delta : {0.5, 1.0, 2.0})
      for (double kappa : {0.5, 1.0, 2.0})
        for (double sigma : {0.7, 1.0, 2.0}) {
          QuadratureParams q{QuadratureCase::XX, delta, kappa, sigma, std::numeric_limits<double>::infinity(), 1.0};
          CHECK(std::pow(quadrature_overlap_analytic(q), 4) ==
                doctest::Approx(quadrature_overlap_endpoint_form(QuadratureCase::XX, delta, kappa, sigma)));
          q.kase = QuadratureCase::PX;
          q.t = 0.0;
          CHECK(std::pow(quadrature_overlap_analytic(q), 4) ==
                doctest::Approx(quadrature_overlap_endpoint_form(QuadratureCase::PX, delta, kappa, sigma)));
          q.kase = QuadratureCase::XP;
          q.t = 3.0;
          CHECK(std::pow(quadrature_overlap_analytic(q), 4) ==
                doctest::Approx(quadrature_overlap_endpoint_form(QuadratureCase::XP, delta, kappa, sigma)));
        }
  }
  SUBCASE("invalid parameters") {
    p.delta = 0.0;
    CHECK_THROWS(quadrature_overlap_analytic(p));
    CHECK_THROWS(quadrature_case_from_string("XY"));
  }
}

TEST_CASE("quadrature_overlap_numeric") {
  SUBCASE("agrees with moment propagation") {
    for (auto c : {QuadratureCase::XX, QuadratureCase::PX, QuadratureCase::XP, QuadratureCase::PP})
      for (double delta : {1.0, 2.0})
        for (double t : {0.0, 1.0, 5.0}) {
          const QuadratureParams p{c, delta, 1.0, 1.0, t, 1.0};
          const auto r = quadrature_overlap_numeric(p);
          CAPTURE(to_string(c));
          CAPTURE(t);
          CHECK(std::abs(r.value - quadrature_overlap_analytic(p)) < 1e-3);
          CHECK(r.value <= 1.0);
          CHECK(r.value >= 0.0);
        }
  }
  SUBCASE("PX approaches 1 at late times") {
    const QuadratureParams p{QuadratureCase::PX, 1.0, 1.0, 1.0, 20.0, 1.0};
    CHECK(std::abs(quadrature_overlap_numeric(p).value - 1.0) < 1e-2);
  }
  SUBCASE("XP does not depend on t") {
    std::vector<double> vs;
    for (double t : {0.0, 1.0, 10.0})
      vs.push_back(quadrature_overlap_numeric({QuadratureCase::XP, 1.0, 1.0, 1.0, t, 1.0}).value);
    CHECK(std::abs(vs[0] - vs[1]) < 1e-4);
    CHECK(std::abs(vs[0] - vs[2]) < 1e-4);
  }
  SUBCASE("Table II pattern") {
    auto v = [](QuadratureCase c, double t) { return quadrature_overlap_analytic({c, 1.0, 1.0, 1.0, t, 1.0}); };
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(v(QuadratureCase::XX, 0.0) == doctest::Approx(1.0));
    CHECK(v(QuadratureCase::XX, inf) < 1.0 - 1e-2);
    CHECK(v(QuadratureCase::PX, 0.0) < 1.0 - 1e-3);
    CHECK(std::abs(v(QuadratureCase::PX, 1e6) - 1.0) < 1e-6);
    CHECK(v(QuadratureCase::XP, 0.0) < 1.0 - 1e-4);
    CHECK(v(QuadratureCase::XP, 0.0) == doctest::Approx(v(QuadratureCase::XP, 50.0)));
    CHECK(v(QuadratureCase::PP, 3.0) == 1.0);
  }
  SUBCASE("a grid that is too small is detected") {
    QuadratureGridOptions o;
    o.widths = 1.0;
    CHECK_THROWS_AS(quadrature_overlap_numeric({QuadratureCase::XX, 1.0, 1.0, 1.0, 1.0, 1.0}, o), OverlapError);
  }
}
