#pragma once

// Invasiveness of a measurement A, read off from a later measurement B: the
// Bhattacharyya coefficient between B's statistics without and with A.
//
// Two engines:
//   Fock basis    coherent-state, ring and Fock-bin coarse-grainings
//   1-D grids     quadrature measurements on Gaussian wave packets (FFTW)

#include <optional>
#include <string>
#include <vector>

#include "macroreal/instruments.hpp"

namespace macroreal {

struct OutcomeDistribution {
  std::vector<Outcome> outcomes;
  std::vector<double> weights;
  std::vector<double> density;
  Json grid;

  double mass() const;
};

struct OverlapResult {
  double value = 0.0;
  double error_estimate = 0.0;
  Json discretization = Json::object();
  bool clipped = false;

  Json to_json() const;
};

class OverlapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// V = sum w sqrt(P Q), clipped to [0, 1]. Grids must be identical.
OverlapResult bhattacharyya(const OutcomeDistribution& p, const OutcomeDistribution& q);

/// Q(beta) = pi^-1 <beta|rho|beta> on the lattice.
OutcomeDistribution husimi(const Matrix& rho, const ComplexLattice& lattice);

/// Statistics of B after U, without any earlier measurement.
OutcomeDistribution plain_distribution(const Matrix& rho, const Operator& u, const KrausFamily& b);
/// Statistics of B after A then U (A non-selective).
OutcomeDistribution invaded_distribution(const Matrix& rho, const KrausFamily& a, const Operator& u,
                                         const KrausFamily& b, double defect_ceiling = 1e-6);

struct LatticeOptions {
  double step = 0.25;
  double margin = 5.0;  // lattice radius beyond |gamma|
  std::size_t dim = 0;  // 0: chosen from the lattice radius
  bool refine = true;   // error estimate from a half-step rerun
};

/// A and B both coherent projectors, T = 0; 2 sqrt(2)/3 in the continuum.
OverlapResult coherent_delta_overlap(Complex gamma, const LatticeOptions& options = {});

struct XGridOptions {
  double step = 0.25;     // Husimi lattice step
  double margin = 5.0;    // Husimi lattice radius around gamma
  double spacing = 0.0;   // position grid spacing; 0: min(0.05, delta/2)
  double window = 6.0;    // half-width of the position window per lattice point
  bool refine = true;
};
/// A = Gaussian X measurement with variance delta_sq, B = coherent projectors,
/// on a position grid. The instrument's smearing kernel
/// K(s) = int dx A_x(y) A_x(y + s) is accumulated over the discrete outcome grid.
OverlapResult coherent_x_overlap(double delta_sq, Complex gamma, const XGridOptions& options = {});

/// Same quantity through the Fock-basis instruments (for moderate delta only).
OverlapResult coherent_x_overlap_fock(double delta_sq, Complex gamma, std::size_t dim, const RealGrid& grid,
                                      double step = 0.25);

/// A = rings of width d, B = coherent projectors.
OverlapResult ring_overlap(double d, Complex gamma, const LatticeOptions& options = {});
/// A = Fock bins from g, B = coherent projectors.
OverlapResult fock_overlap(const BorderFunction& g, Complex gamma, const LatticeOptions& options = {});
/// Shared path: A given as a Fock-diagonal instrument on a dim-level space.
OverlapResult fock_diagonal_overlap(const KrausFamily& a, Complex gamma, const LatticeOptions& options);

// ---------------------------------------------------------------------------
// Quadrature measurements on Gaussian wave packets.

enum class QuadratureCase { XX, PX, XP, PP };  // first letter: A, second: B
const char* to_string(QuadratureCase c);
QuadratureCase quadrature_case_from_string(const std::string& s);

struct QuadratureParams {
  QuadratureCase kase = QuadratureCase::XX;
  double delta = 1.0;  // X unsharpness
  double kappa = 1.0;  // P unsharpness
  double sigma = 1.0;  // initial width
  double t = 0.0;      // may be +infinity for the analytic form
  double m = 1.0;
  void validate() const;
};

struct GaussianMoments {
  double mean = 0.0;
  double variance = 1.0;
};
struct QuadratureMoments {
  GaussianMoments plain;
  GaussianMoments invaded;
};
/// Outcome moments of B with and without A, by Gaussian moment propagation.
QuadratureMoments quadrature_moments(const QuadratureParams& p);

/// Bhattacharyya coefficient of two zero-mean Gaussians.
double gaussian_bhattacharyya(double var_a, double var_b);

/// V by moment propagation; valid for every t including t = infinity.
double quadrature_overlap_analytic(const QuadratureParams& p);
/// Closed endpoint expressions: XX at t -> infinity, PX at t = 0, XP (any t),
/// PP. These equal the fourth power of the Bhattacharyya coefficient.
double quadrature_overlap_endpoint_form(QuadratureCase c, double delta, double kappa, double sigma);

struct QuadratureGridOptions {
  std::size_t points = 4096;
  double widths = 8.0;         // half-width in combined standard deviations
  double branch_step = 0.25;   // A outcome spacing in units of its unsharpness
  bool refine = true;
};
/// Branch-by-branch simulation on a periodic position grid: Gaussian Kraus in
/// position or momentum space, free evolution exp(-i t p^2 / 2m) via FFT, and
/// B's smearing as a convolution. Throws OverlapError when the wave packet
/// reaches the grid edge.
OverlapResult quadrature_overlap_numeric(const QuadratureParams& p, const QuadratureGridOptions& options = {});

}  // namespace macroreal
