#pragma once

// Measurement instruments as discretized Kraus families.
//
// A family carries one Kraus operator per outcome together with a quadrature
// weight, so that completeness reads sum_a w_a K_a^dag K_a = 1 and the
// outcome density is tr(K_a rho K_a^dag). Three storage forms are used:
//
//   Dense     K_a stored as a matrix
//   Spectral  K_a = V diag(d_a) V^dag with one shared basis V and real d_a
//   RankOne   K_a = c_a |u_a><v_a|
//
// The spectral and rank-one forms keep families with thousands of outcomes
// (fine quadrature grids, coherent-state lattices) cheap to store and apply.

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "macroreal/hilbert.hpp"

namespace macroreal {

using Json = nlohmann::json;

/// Outcome label: real value, complex value or integer bin index.
using Outcome = std::variant<double, Complex, long>;

Json outcome_to_json(const Outcome& o);
Outcome outcome_from_json(const Json& j);
/// Real part of the label (bin index as double).
double outcome_real(const Outcome& o);

/// Uniform grid of `count` points on [min, max].
struct RealGrid {
  double min = -12.0;
  double max = 12.0;
  std::size_t count = 481;

  double spacing() const;
  double point(std::size_t i) const;
  Json to_json() const;
};

/// Points in the complex plane with cell weights.
struct ComplexLattice {
  std::vector<Complex> points;
  std::vector<double> weights;
  Json descriptor;

  /// Square-grid points with |z - center| <= radius.
  static ComplexLattice disc(Complex center, double radius, double step);
  /// Full square grid [lo, hi]^2 (both axes).
  static ComplexLattice square(double lo, double hi, double step);

  std::size_t size() const { return points.size(); }
};

class KrausFamily {
 public:
  enum class Form { Dense, Spectral, RankOne };

  static KrausFamily dense(std::string label, std::vector<Outcome> outcomes, std::vector<double> weights,
                           std::vector<Matrix> kraus, Json parameters = Json::object());
  /// K_a = basis * diag(diagonals.row(a)) * basis^dag.
  static KrausFamily spectral(std::string label, std::vector<Outcome> outcomes, std::vector<double> weights,
                              Matrix basis, Eigen::MatrixXd diagonals, Json parameters = Json::object());
  /// K_a = scale_a |left.col(a)><right.col(a)|.
  static KrausFamily rank_one(std::string label, std::vector<Outcome> outcomes, std::vector<double> weights,
                              std::vector<Complex> scale, Matrix left, Matrix right,
                              Json parameters = Json::object());

  const std::string& label() const { return label_; }
  const std::vector<Outcome>& outcomes() const { return outcomes_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return outcomes_.size(); }
  std::size_t dim() const { return dim_; }
  Form form() const { return form_; }
  const Json& parameters() const { return parameters_; }

  /// Operator norm of sum_a w_a K_a^dag K_a - 1 (cached at construction).
  double completeness_defect() const { return defect_; }
  /// Defect before symmetrize_completeness; equals completeness_defect()
  /// for families that were never corrected.
  double raw_defect() const { return raw_defect_; }
  double recompute_defect() const;

  Matrix kraus(std::size_t a) const;
  /// K_a rho K_a^dag (unnormalized conditional state).
  Matrix branch(std::size_t a, const Matrix& rho) const;
  /// tr(K_a rho K_a^dag) for every outcome.
  RealVector densities(const Matrix& rho) const;
  /// sum_a w_a K_a rho K_a^dag.
  Matrix channel(const Matrix& rho) const;
  /// sum_a w_a K_a^dag E K_a.
  Matrix dual(const Matrix& e) const;
  /// sum_a w_a K_a^dag K_a.
  Matrix effect_sum() const;

  /// True when every w_a K_a is an orthogonal projector, the projectors are
  /// mutually orthogonal and complete.
  bool is_projective(double tol = 1e-10) const;

  /// Provenance descriptor (label, outcome grid, parameters; no matrices).
  Json descriptor() const;

 private:
  friend KrausFamily symmetrize_completeness(const KrausFamily& family, double min_eigenvalue);
  KrausFamily() = default;
  void finalize();

  std::string label_;
  std::vector<Outcome> outcomes_;
  std::vector<double> weights_;
  Json parameters_;
  std::size_t dim_ = 0;
  Form form_ = Form::Dense;
  double defect_ = 0.0;
  double raw_defect_ = 0.0;

  std::shared_ptr<const std::vector<Matrix>> dense_;
  std::shared_ptr<const Matrix> basis_;
  std::shared_ptr<const Eigen::MatrixXd> diagonals_;  // outcomes x dim
  std::shared_ptr<const std::vector<Complex>> scale_;
  std::shared_ptr<const Matrix> left_;   // dim x outcomes
  std::shared_ptr<const Matrix> right_;  // dim x outcomes
};

class InstrumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ceiling on the completeness defect a constructor accepts.
struct FamilyOptions {
  double defect_ceiling = 1e-6;
  /// Skip the +-6 max(width, 1) grid-span check.
  bool allow_narrow_grid = false;
};

KrausFamily identity_family(std::size_t dim);

/// Projective family from orthogonal projectors with real outcome values.
KrausFamily projective_family(std::string label, const std::vector<Matrix>& projectors,
                              std::vector<double> values, double tol = 1e-10);

/// A_x = (delta^2 pi)^{-1/4} exp(-(x - X)^2 / (2 delta^2)), weights = grid spacing.
KrausFamily gaussian_x_family(double delta, const RealGrid& grid, std::size_t dim, FamilyOptions options = {});
/// Same with P in place of X.
KrausFamily gaussian_p_family(double kappa, const RealGrid& grid, std::size_t dim, FamilyOptions options = {});

/// K_beta = pi^{-1/2} |beta_hat><beta|, beta = projected coherent vector,
/// beta_hat its normalization; K^dag K = pi^{-1} |beta><beta|.
KrausFamily coherent_projector_family(const ComplexLattice& lattice, std::size_t dim,
                                      FamilyOptions options = {.defect_ceiling = 1e300});

using Envelope = std::function<double(Complex)>;

/// Hard ring indicators a*d <= |alpha| < (a+1)*d for a = 0..count-1; the last
/// ring is open towards infinity so the envelopes partition the plane.
std::vector<Envelope> ring_envelopes(double d, std::size_t count);

/// Coarse coherent family. POVM elements
/// E_a = pi^{-1} sum_lattice w f_a(alpha) |alpha><alpha|, Kraus K_a = E_a^{1/2},
/// followed by symmetrize_completeness.
KrausFamily coherent_coarse_family(const std::vector<Envelope>& envelopes, const ComplexLattice& lattice,
                                   std::size_t dim, FamilyOptions options = {.defect_ceiling = 1e300});

/// Ring coarse-graining with exact radial integration: the POVM elements are
/// Fock-diagonal with entries P(n+1, r_hi^2) - P(n+1, r_lo^2); Kraus are their
/// square roots. Rings are added until the remainder ring carries no weight
/// below dim.
KrausFamily ring_family(double d, std::size_t dim);

/// Border function for Fock bins, g(m) = coefficient * m^power.
struct BorderFunction {
  double coefficient = 1.0;
  int power = 1;

  long operator()(long m) const;
  std::string to_string() const;
  /// Parses "m", "2m", "m^2", "100m^2", "2*m^2".
  static BorderFunction parse(const std::string& text);
};

/// Bins g(m) <= k < g(m+1); the last bin is cut at dim.
KrausFamily fock_bin_family(const std::function<long(long)>& g, std::size_t dim, std::string label = "fock_bins");
KrausFamily fock_bin_family(const BorderFunction& g, std::size_t dim);

/// K'_a = K_a S^{-1/2} with S = sum_a w_a K_a^dag K_a. The original defect
/// stays available as raw_defect().
KrausFamily symmetrize_completeness(const KrausFamily& family, double min_eigenvalue = 1e-14);

}  // namespace macroreal
