#include "macroreal/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>

#include <fftw3.h>

namespace macroreal {

namespace {

constexpr double kPi = std::numbers::pi;

OutcomeDistribution from_family(const KrausFamily& b, const RealVector& d) {
  OutcomeDistribution out;
  out.outcomes = b.outcomes();
  out.weights = b.weights();
  out.density.assign(d.data(), d.data() + d.size());
  out.grid = b.descriptor();
  return out;
}

Matrix coherent_density(Complex gamma, std::size_t dim) {
  const Vector v = coherent_state(gamma, dim, 1e-10).amplitudes();
  return v * v.adjoint();
}

}  // namespace

double OutcomeDistribution::mass() const {
  double m = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) m += weights[i] * density[i];
  return m;
}

Json OverlapResult::to_json() const {
  return {{"V", value}, {"error_estimate", error_estimate}, {"clipped", clipped}, {"discretization", discretization}};
}

OverlapResult bhattacharyya(const OutcomeDistribution& p, const OutcomeDistribution& q) {
  if (p.density.size() != q.density.size() || p.weights != q.weights || p.outcomes != q.outcomes)
    throw OverlapError("bhattacharyya: distributions live on different grids");
  double v = 0.0;
  for (std::size_t i = 0; i < p.density.size(); ++i)
    v += p.weights[i] * std::sqrt(std::max(p.density[i], 0.0) * std::max(q.density[i], 0.0));
  OverlapResult r;
  r.clipped = v > 1.0;
  r.value = std::min(v, 1.0);
  r.discretization = {{"grid", p.grid}, {"mass_p", p.mass()}, {"mass_q", q.mass()}};
  if (r.clipped) r.discretization["unclipped"] = v;
  return r;
}

OutcomeDistribution husimi(const Matrix& rho, const ComplexLattice& lattice) {
  const auto dim = static_cast<std::size_t>(rho.rows());
  const auto n = static_cast<Eigen::Index>(lattice.size());
  Matrix vs(rho.rows(), n);
  for (Eigen::Index a = 0; a < n; ++a) vs.col(a) = projected_coherent_amplitudes(lattice.points[a], dim);
  const Matrix rv = rho * vs;
  OutcomeDistribution out;
  out.weights = lattice.weights;
  out.grid = lattice.descriptor;
  out.density.resize(lattice.size());
  out.outcomes.reserve(lattice.size());
  for (Eigen::Index a = 0; a < n; ++a) {
    out.density[static_cast<std::size_t>(a)] = vs.col(a).dot(rv.col(a)).real() / kPi;
    out.outcomes.emplace_back(lattice.points[static_cast<std::size_t>(a)]);
  }
  return out;
}

OutcomeDistribution plain_distribution(const Matrix& rho, const Operator& u, const KrausFamily& b) {
  if (b.dim() != static_cast<std::size_t>(rho.rows()) || u.dim() != b.dim())
    throw DimensionError("plain_distribution: dimensions differ");
  return from_family(b, b.densities(u.matrix() * rho * u.matrix().adjoint()));
}

OutcomeDistribution invaded_distribution(const Matrix& rho, const KrausFamily& a, const Operator& u,
                                         const KrausFamily& b, double defect_ceiling) {
  if (a.dim() != static_cast<std::size_t>(rho.rows()) || b.dim() != a.dim() || u.dim() != a.dim())
    throw DimensionError("invaded_distribution: dimensions differ");
  if (a.completeness_defect() > defect_ceiling)
    throw InstrumentError("invaded_distribution: invading family exceeds the completeness defect ceiling");
  const Matrix after = a.channel(rho);
  return from_family(b, b.densities(u.matrix() * after * u.matrix().adjoint()));
}

// ---------------------------------------------------------------------------
// Fock-basis engine

namespace {

std::size_t lattice_dim(double radius) {
  return static_cast<std::size_t>(std::ceil(radius * radius + 5.0 * radius + 10.0));
}

double delta_overlap_once(Complex gamma, double step, double margin, std::size_t dim, Json* disc) {
  const double radius = std::abs(gamma) + margin;
  if (dim == 0) dim = lattice_dim(radius);
  const auto lat_a = ComplexLattice::disc(0.0, radius, step);
  const auto lat_b = ComplexLattice::disc(gamma, margin, step);
  const Matrix rho = coherent_density(gamma, dim);
  const auto a = coherent_projector_family(lat_a, dim);
  const auto p = husimi(rho, lat_b);
  const auto q = husimi(a.channel(rho), lat_b);
  const auto r = bhattacharyya(p, q);
  if (disc) {
    *disc = {{"dim", dim},
             {"family_lattice", lat_a.descriptor},
             {"outcome_lattice", lat_b.descriptor},
             {"family_defect", a.completeness_defect()},
             {"mass_plain", p.mass()},
             {"mass_invaded", q.mass()}};
  }
  return r.value;
}

}  // namespace

OverlapResult coherent_delta_overlap(Complex gamma, const LatticeOptions& o) {
  OverlapResult r;
  r.value = delta_overlap_once(gamma, o.step, o.margin, o.dim, &r.discretization);
  if (o.refine) {
    const double fine = delta_overlap_once(gamma, o.step / 2, o.margin, o.dim, nullptr);
    r.error_estimate = std::abs(fine - r.value);
    r.discretization["refined_V"] = fine;
  }
  return r;
}

OverlapResult fock_diagonal_overlap(const KrausFamily& a, Complex gamma, const LatticeOptions& o) {
  const std::size_t dim = a.dim();
  const Matrix rho = coherent_density(gamma, dim);
  const Matrix invaded = a.channel(rho);
  auto once = [&](double step) {
    const auto lat = ComplexLattice::disc(gamma, o.margin, step);
    return bhattacharyya(husimi(rho, lat), husimi(invaded, lat));
  };
  OverlapResult r = once(o.step);
  r.discretization["dim"] = dim;
  r.discretization["family"] = a.descriptor();
  if (o.refine) {
    const double fine = once(o.step / 2).value;
    r.error_estimate = std::abs(fine - r.value);
    r.discretization["refined_V"] = fine;
  }
  return r;
}

OverlapResult ring_overlap(double d, Complex gamma, const LatticeOptions& o) {
  const std::size_t dim = o.dim ? o.dim : default_fock_dim(std::abs(gamma));
  return fock_diagonal_overlap(ring_family(d, dim), gamma, o);
}

OverlapResult fock_overlap(const BorderFunction& g, Complex gamma, const LatticeOptions& o) {
  const std::size_t dim = o.dim ? o.dim : default_fock_dim(std::abs(gamma));
  return fock_diagonal_overlap(fock_bin_family(g, dim), gamma, o);
}

OverlapResult coherent_x_overlap_fock(double delta_sq, Complex gamma, std::size_t dim, const RealGrid& grid,
                                      double step) {
  if (!(delta_sq > 0.0)) throw std::invalid_argument("delta_sq must be positive");
  const auto a = gaussian_x_family(std::sqrt(delta_sq), grid, dim);
  const Matrix rho = coherent_density(gamma, dim);
  const auto lat = ComplexLattice::disc(gamma, 5.0, step);
  OverlapResult r = bhattacharyya(husimi(rho, lat), husimi(a.channel(rho), lat));
  r.discretization["dim"] = dim;
  r.discretization["family"] = a.descriptor();
  return r;
}

// ---------------------------------------------------------------------------
// Position-grid engine for sharp and unsharp X measurements on coherent states

namespace {

struct XGridResult {
  double value = 0.0;
  double mass_plain = 0.0;
  double mass_invaded = 0.0;
  std::size_t kernel_terms = 0;
};

XGridResult coherent_x_once(double delta, Complex gamma, double step, double margin, double h, double window) {
  // Smearing kernel of the discretized instrument: K_k = h sum_j A(jh) A(jh + kh),
  // A(x) = (delta^2 pi)^(-1/4) exp(-x^2 / (2 delta^2)).
  const double norm = std::pow(delta * delta * kPi, -0.25);
  auto amp = [&](double x) { return norm * std::exp(-0.5 * x * x / (delta * delta)); };
  const long kmax = static_cast<long>(std::ceil(13.0 * delta / h));
  const long jmax = static_cast<long>(std::ceil(9.0 * delta / h)) + kmax;
  std::vector<double> kernel(static_cast<std::size_t>(kmax) + 1);
  for (long k = 0; k <= kmax; ++k) {
    double s = 0.0;
    for (long j = -jmax; j <= jmax; ++j) s += amp(j * h) * amp((j + k) * h);
    kernel[static_cast<std::size_t>(k)] = h * s;
  }

  const double x0 = std::sqrt(2.0) * gamma.real();
  const double p0 = std::sqrt(2.0) * gamma.imag();
  const double n4 = std::pow(kPi, -0.25);
  const auto lat = ComplexLattice::disc(gamma, margin, step);

  XGridResult out;
  out.kernel_terms = kernel.size();
  std::vector<Complex> u;
  for (std::size_t b = 0; b < lat.size(); ++b) {
    const Complex beta = lat.points[b];
    const double xb = std::sqrt(2.0) * beta.real();
    const double pb = std::sqrt(2.0) * beta.imag();
    const double centre = 0.5 * (x0 + xb);
    const long j0 = static_cast<long>(std::floor((centre - window) / h));
    const long j1 = static_cast<long>(std::ceil((centre + window) / h));
    u.resize(static_cast<std::size_t>(j1 - j0 + 1));
    Complex plain_sum = 0.0;
    for (long j = j0; j <= j1; ++j) {
      const double y = j * h;
      // conj(phi_beta(y)) psi_gamma(y)
      const double mag = n4 * n4 * std::exp(-0.5 * ((y - x0) * (y - x0) + (y - xb) * (y - xb)));
      const Complex val = std::polar(mag, (p0 - pb) * y);
      u[static_cast<std::size_t>(j - j0)] = val;
      plain_sum += val;
    }
    const double p = std::norm(h * plain_sum) / kPi;
    double q = 0.0;
    const long n = j1 - j0 + 1;
    for (long k = 0; k <= std::min(kmax, n - 1); ++k) {
      Complex s = 0.0;
      for (long j = 0; j + k < n; ++j) s += u[static_cast<std::size_t>(j)] * std::conj(u[static_cast<std::size_t>(j + k)]);
      q += (k == 0 ? 1.0 : 2.0) * kernel[static_cast<std::size_t>(k)] * s.real();
    }
    q *= h * h / kPi;
    out.value += lat.weights[b] * std::sqrt(std::max(p, 0.0) * std::max(q, 0.0));
    out.mass_plain += lat.weights[b] * p;
    out.mass_invaded += lat.weights[b] * q;
  }
  return out;
}

}  // namespace

OverlapResult coherent_x_overlap(double delta_sq, Complex gamma, const XGridOptions& o) {
  if (!(delta_sq > 0.0)) throw std::invalid_argument("delta_sq must be positive");
  const double delta = std::sqrt(delta_sq);
  const double h = o.spacing > 0.0 ? o.spacing : std::min(0.05, delta / 2.0);
  const auto base = coherent_x_once(delta, gamma, o.step, o.margin, h, o.window);
  OverlapResult r;
  r.value = std::min(base.value, 1.0);
  r.clipped = base.value > 1.0;
  r.discretization = {{"position_spacing", h},
                      {"window", o.window},
                      {"kernel_terms", base.kernel_terms},
                      {"lattice", {{"kind", "disc"}, {"radius", o.margin}, {"step", o.step}}},
                      {"mass_plain", base.mass_plain},
                      {"mass_invaded_in_lattice", base.mass_invaded}};
  if (o.refine) {
    const double fine_h = coherent_x_once(delta, gamma, o.step, o.margin, h / 2, o.window).value;
    const double fine_step = coherent_x_once(delta, gamma, o.step / 2, o.margin, h, o.window).value;
    r.error_estimate = std::max(std::abs(fine_h - base.value), std::abs(fine_step - base.value));
    r.discretization["refined_spacing_V"] = fine_h;
    r.discretization["refined_step_V"] = fine_step;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Quadrature measurements on Gaussian wave packets

const char* to_string(QuadratureCase c) {
  switch (c) {
    case QuadratureCase::XX:
      return "XX";
    case QuadratureCase::PX:
      return "PX";
    case QuadratureCase::XP:
      return "XP";
    case QuadratureCase::PP:
      return "PP";
  }
  return "?";
}

QuadratureCase quadrature_case_from_string(const std::string& s) {
  if (s == "XX") return QuadratureCase::XX;
  if (s == "PX") return QuadratureCase::PX;
  if (s == "XP") return QuadratureCase::XP;
  if (s == "PP") return QuadratureCase::PP;
  throw std::invalid_argument("unknown quadrature case '" + s + "' (XX, PX, XP, PP)");
}

void QuadratureParams::validate() const {
  if (!(delta > 0.0) || !(kappa > 0.0) || !(sigma > 0.0) || !(m > 0.0))
    throw std::invalid_argument("quadrature overlap: widths and mass must be positive");
  if (!(t >= 0.0)) throw std::invalid_argument("quadrature overlap: t must be nonnegative");
}

namespace {

bool a_is_x(QuadratureCase c) { return c == QuadratureCase::XX || c == QuadratureCase::XP; }
bool b_is_x(QuadratureCase c) { return c == QuadratureCase::XX || c == QuadratureCase::PX; }

struct PhaseSpaceVariances {
  double x0;  // position variance right after the (optional) A measurement
  double p;   // momentum variance (conserved by free evolution)
};

PhaseSpaceVariances after_a(const QuadratureParams& p, bool invaded) {
  const double s2 = p.sigma * p.sigma;
  PhaseSpaceVariances v{0.5 * s2, 0.5 / s2};
  if (!invaded) return v;
  if (a_is_x(p.kase))
    v.p += 0.5 / (p.delta * p.delta);
  else
    v.x0 += 0.5 / (p.kappa * p.kappa);
  return v;
}

}  // namespace

QuadratureMoments quadrature_moments(const QuadratureParams& p) {
  p.validate();
  if (!std::isfinite(p.t)) throw std::invalid_argument("quadrature_moments: t must be finite");
  QuadratureMoments out;
  for (bool invaded : {false, true}) {
    const auto v = after_a(p, invaded);
    double var;
    if (b_is_x(p.kase))
      var = v.x0 + p.t * p.t * v.p / (p.m * p.m) + 0.5 * p.delta * p.delta;
    else
      var = v.p + 0.5 * p.kappa * p.kappa;
    (invaded ? out.invaded : out.plain) = {0.0, var};
  }
  return out;
}

double gaussian_bhattacharyya(double va, double vb) {
  if (!(va > 0.0) || !(vb > 0.0)) throw std::invalid_argument("variances must be positive");
  return std::sqrt(2.0 * std::sqrt(va * vb) / (va + vb));
}

double quadrature_overlap_analytic(const QuadratureParams& p) {
  p.validate();
  if (std::isinf(p.t)) {
    if (!b_is_x(p.kase)) {
      QuadratureParams q = p;
      q.t = 0.0;
      return quadrature_overlap_analytic(q);
    }
    // Position spreads as t^2 var_p / m^2; the ratio tends to the momentum ratio.
    return gaussian_bhattacharyya(after_a(p, false).p, after_a(p, true).p);
  }
  const auto mo = quadrature_moments(p);
  return gaussian_bhattacharyya(mo.plain.variance, mo.invaded.variance);
}

double quadrature_overlap_endpoint_form(QuadratureCase c, double delta, double kappa, double sigma) {
  const double d2 = delta * delta;
  const double k2 = kappa * kappa;
  const double s2 = sigma * sigma;
  switch (c) {
    case QuadratureCase::XX:
      return 4.0 * d2 * (d2 + s2) / std::pow(2.0 * d2 + s2, 2);
    case QuadratureCase::PX:
      return 4.0 * k2 * (d2 + s2) * (k2 * (d2 + s2) + 1.0) / std::pow(2.0 * k2 * (d2 + s2) + 1.0, 2);
    case QuadratureCase::XP: {
      const double g = k2 * s2 + 1.0;
      return 4.0 * d2 * g * (d2 * g + s2) / std::pow(2.0 * d2 * g + s2, 2);
    }
    case QuadratureCase::PP:
      return 1.0;
  }
  return 1.0;
}

namespace {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// In-place complex FFT of length n; FFTW planning is not thread-safe, so
/// plans are created under a lock.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n) {
    buf_ = fftw_alloc_complex(n);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  Complex* data() { return reinterpret_cast<Complex*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  /// Unnormalized inverse.
  void backward() { fftw_execute(bwd_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  fftw_complex* buf_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

/// Angular frequency of FFT bin k for sample spacing `spacing`.
double bin_frequency(std::size_t k, std::size_t n, double spacing) {
  const long kk = k < n / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
  return 2.0 * kPi * static_cast<double>(kk) / (static_cast<double>(n) * spacing);
}

/// Convolution of a periodic density with a normalized Gaussian of the given variance.
void smear(std::vector<double>& density, double spacing, double variance, Fft& fft) {
  const std::size_t n = density.size();
  Complex* z = fft.data();
  for (std::size_t i = 0; i < n; ++i) z[i] = density[i];
  fft.forward();
  for (std::size_t k = 0; k < n; ++k) {
    const double w = bin_frequency(k, n, spacing);
    z[k] *= std::exp(-0.5 * variance * w * w);
  }
  fft.backward();
  for (std::size_t i = 0; i < n; ++i) density[i] = std::max(z[i].real() / static_cast<double>(n), 0.0);
}

/// Mass in the outer 1/16 of the box. Momentum densities are stored in FFT
/// order, where the box edge sits in the middle of the array.
double edge_mass(const std::vector<double>& density, double spacing, bool fft_order) {
  const std::size_t n = density.size();
  const std::size_t band = n / 32;
  double m = 0.0;
  for (std::size_t i = 0; i < band; ++i)
    m += fft_order ? density[n / 2 - 1 - i] + density[n / 2 + i] : density[i] + density[n - 1 - i];
  return m * spacing;
}

struct QuadratureRun {
  double value = 0.0;
  double length = 0.0;
  std::size_t branches = 0;
  double mass_plain = 0.0;
  double mass_invaded = 0.0;
};

QuadratureRun quadrature_once(const QuadratureParams& p, std::size_t n, double widths, double branch_step) {
  const bool ax = a_is_x(p.kase);
  const bool bx = b_is_x(p.kase);
  const double s2 = p.sigma * p.sigma;
  const double d2 = p.delta * p.delta;
  const double k2 = p.kappa * p.kappa;
  // Box sized from the widest position and momentum spreads any branch reaches.
  const double var_p_max = 0.5 / s2 + 0.5 / d2 + 0.5 * k2;
  const double var_x_max = 0.5 * s2 + 0.5 / k2 + p.t * p.t * (0.5 / s2 + 0.5 / d2) / (p.m * p.m) + 0.5 * d2;
  const double length = 2.0 * widths * std::sqrt(var_x_max);
  const double dx = length / static_cast<double>(n);
  const double dp = 2.0 * kPi / length;
  if (kPi / dx < widths * std::sqrt(var_p_max))
    throw OverlapError("quadrature grid: momentum range too small, increase the point count");

  Fft fft(n);
  Complex* z = fft.data();
  std::vector<double> x(n), pk(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = -0.5 * length + dx * static_cast<double>(i);
    pk[i] = bin_frequency(i, n, dx);
  }
  std::vector<Complex> psi0(n);
  const double amp0 = std::pow(kPi * s2, -0.25);
  for (std::size_t i = 0; i < n; ++i) psi0[i] = amp0 * std::exp(-0.5 * x[i] * x[i] / s2);
  std::vector<Complex> free_phase(n);
  for (std::size_t i = 0; i < n; ++i) free_phase[i] = std::polar(1.0, -p.t * pk[i] * pk[i] / (2.0 * p.m));
  const double p_norm = dx * dx / (2.0 * kPi);  // |FFT|^2 -> momentum density

  // Adds weight * (B-quadrature density) of the branch with Kraus factor
  // `kraus` (applied in position space when a_in_x, else in momentum space).
  auto accumulate = [&](std::vector<double>& acc, double weight, const std::function<double(double)>* kraus,
                        bool a_in_x) {
    for (std::size_t i = 0; i < n; ++i) z[i] = psi0[i] * ((kraus && a_in_x) ? (*kraus)(x[i]) : 1.0);
    fft.forward();
    for (std::size_t k = 0; k < n; ++k) z[k] *= ((kraus && !a_in_x) ? (*kraus)(pk[k]) : 1.0) * free_phase[k];
    if (bx) {
      fft.backward();
      for (std::size_t i = 0; i < n; ++i) acc[i] += weight * std::norm(z[i] / static_cast<double>(n));
    } else {
      for (std::size_t k = 0; k < n; ++k) acc[k] += weight * p_norm * std::norm(z[k]);
    }
  };

  std::vector<double> plain(n, 0.0), invaded(n, 0.0);
  accumulate(plain, 1.0, nullptr, true);

  const double width = ax ? p.delta : p.kappa;
  const double spread = ax ? std::sqrt(0.5 * s2 + 0.5 * d2) : std::sqrt(0.5 / s2 + 0.5 * k2);
  const double da = branch_step * width;
  const long kb = static_cast<long>(std::ceil(widths * spread / da));
  const double knorm = std::pow(width * width * kPi, -0.25);
  for (long b = -kb; b <= kb; ++b) {
    const double a = b * da;
    const std::function<double(double)> kraus = [a, width, knorm](double v) {
      const double u = (v - a) / width;
      return knorm * std::exp(-0.5 * u * u);
    };
    accumulate(invaded, da, &kraus, ax);
  }

  const double spacing = bx ? dx : dp;
  for (auto* d : {&plain, &invaded})
    if (edge_mass(*d, spacing, !bx) > 1e-9) throw OverlapError("quadrature grid: wave packet reaches the grid edge");
  const double b_var = bx ? 0.5 * d2 : 0.5 * k2;
  smear(plain, spacing, b_var, fft);
  smear(invaded, spacing, b_var, fft);

  QuadratureRun r;
  r.length = length;
  r.branches = static_cast<std::size_t>(2 * kb + 1);
  for (std::size_t i = 0; i < n; ++i) {
    r.value += spacing * std::sqrt(plain[i] * invaded[i]);
    r.mass_plain += spacing * plain[i];
    r.mass_invaded += spacing * invaded[i];
  }
  if (std::abs(r.mass_plain - 1.0) > 1e-6 || std::abs(r.mass_invaded - 1.0) > 1e-6)
    throw OverlapError("quadrature grid: probability mass lost");
  return r;
}

}  // namespace

OverlapResult quadrature_overlap_numeric(const QuadratureParams& p, const QuadratureGridOptions& o) {
  p.validate();
  if (!std::isfinite(p.t)) throw std::invalid_argument("quadrature_overlap_numeric: t must be finite");
  if (o.points < 64) throw std::invalid_argument("quadrature grid needs at least 64 points");
  const auto base = quadrature_once(p, o.points, o.widths, o.branch_step);
  OverlapResult r;
  r.value = std::min(base.value, 1.0);
  r.clipped = base.value > 1.0;
  r.discretization = {{"points", o.points},
                      {"length", base.length},
                      {"branches", base.branches},
                      {"mass_plain", base.mass_plain},
                      {"mass_invaded", base.mass_invaded}};
  if (o.refine) {
    const auto fine = quadrature_once(p, 2 * o.points, o.widths + 2.0, o.branch_step / 2.0);
    r.error_estimate = std::abs(fine.value - base.value);
    r.discretization["refined_V"] = fine.value;
  }
  return r;
}

}  // namespace macroreal
