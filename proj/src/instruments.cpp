#include "macroreal/instruments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace macroreal {

namespace {

constexpr double kPi = std::numbers::pi;

double hermitian_norm(const Matrix& m) {
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix identity(std::size_t dim) {
  return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Json summarize_outcomes(const std::vector<Outcome>& outcomes) {
  Json j;
  j["count"] = outcomes.size();
  if (outcomes.size() <= 16) {
    j["values"] = Json::array();
    for (const auto& o : outcomes) j["values"].push_back(outcome_to_json(o));
  } else {
    j["first"] = outcome_to_json(outcomes.front());
    j["last"] = outcome_to_json(outcomes.back());
  }
  return j;
}

void check_lengths(std::size_t outcomes, std::size_t weights, std::size_t ops) {
  if (outcomes != weights || outcomes != ops)
    throw InstrumentError("Kraus family: outcome, weight and operator counts differ");
  if (outcomes == 0) throw InstrumentError("Kraus family: no outcomes");
}

}  // namespace

Json outcome_to_json(const Outcome& o) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Complex>)
          return Json::array({v.real(), v.imag()});
        else
          return v;
      },
      o);
}

Outcome outcome_from_json(const Json& j) {
  if (j.is_array() && j.size() == 2) return Complex(j[0].get<double>(), j[1].get<double>());
  if (j.is_number_integer()) return j.get<long>();
  if (j.is_number()) return j.get<double>();
  throw std::invalid_argument("outcome must be a number or an [re, im] pair");
}

double outcome_real(const Outcome& o) {
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Complex>)
          return v.real();
        else
          return static_cast<double>(v);
      },
      o);
}

double RealGrid::spacing() const { return count > 1 ? (max - min) / static_cast<double>(count - 1) : 1.0; }

double RealGrid::point(std::size_t i) const { return min + spacing() * static_cast<double>(i); }

Json RealGrid::to_json() const { return {{"min", min}, {"max", max}, {"count", count}}; }

ComplexLattice ComplexLattice::disc(Complex center, double radius, double step) {
  if (radius <= 0 || step <= 0) throw std::invalid_argument("lattice radius and step must be positive");
  ComplexLattice l;
  const long n = static_cast<long>(std::ceil(radius / step));
  const double w = step * step;
  for (long i = -n; i <= n; ++i)
    for (long k = -n; k <= n; ++k) {
      const Complex off(step * static_cast<double>(i), step * static_cast<double>(k));
      if (std::abs(off) <= radius * (1 + 1e-12)) {
        l.points.push_back(center + off);
        l.weights.push_back(w);
      }
    }
  l.descriptor = {{"kind", "disc"},
                  {"center", {center.real(), center.imag()}},
                  {"radius", radius},
                  {"step", step},
                  {"points", l.points.size()}};
  return l;
}

ComplexLattice ComplexLattice::square(double lo, double hi, double step) {
  if (!(hi > lo) || step <= 0) throw std::invalid_argument("invalid square lattice");
  ComplexLattice l;
  const long n = static_cast<long>(std::llround((hi - lo) / step));
  for (long i = 0; i <= n; ++i)
    for (long k = 0; k <= n; ++k) {
      l.points.emplace_back(lo + step * static_cast<double>(i), lo + step * static_cast<double>(k));
      l.weights.push_back(step * step);
    }
  l.descriptor = {{"kind", "square"}, {"lo", lo}, {"hi", hi}, {"step", step}, {"points", l.points.size()}};
  return l;
}

// ---------------------------------------------------------------------------
// KrausFamily

KrausFamily KrausFamily::dense(std::string label, std::vector<Outcome> outcomes, std::vector<double> weights,
                               std::vector<Matrix> kraus, Json parameters) {
  check_lengths(outcomes.size(), weights.size(), kraus.size());
  const auto dim = kraus.front().rows();
  for (const auto& k : kraus)
    if (k.rows() != dim || k.cols() != dim) throw DimensionError("Kraus operators must share one square shape");
  KrausFamily f;
  f.label_ = std::move(label);
  f.outcomes_ = std::move(outcomes);
  f.weights_ = std::move(weights);
  f.parameters_ = std::move(parameters);
  f.dim_ = static_cast<std::size_t>(dim);
  f.form_ = Form::Dense;
  f.dense_ = std::make_shared<const std::vector<Matrix>>(std::move(kraus));
  f.finalize();
  return f;
}

KrausFamily KrausFamily::spectral(std::string label, std::vector<Outcome> outcomes, std::vector<double> weights,
                                  Matrix basis, Eigen::MatrixXd diagonals, Json parameters) {
  check_lengths(outcomes.size(), weights.size(), static_cast<std::size_t>(diagonals.rows()));
  if (basis.rows() != basis.cols() || diagonals.cols() != basis.rows())
    throw DimensionError("spectral family: basis and diagonal shapes disagree");
  KrausFamily f;
  f.label_ = std::move(label);
  f.outcomes_ = std::move(outcomes);
  f.weights_ = std::move(weights);
  f.parameters_ = std::move(parameters);
  f.dim_ = static_cast<std::size_t>(basis.rows());
  f.form_ = Form::Spectral;
  f.basis_ = std::make_shared<const Matrix>(std::move(basis));
  f.diagonals_ = std::make_shared<const Eigen::MatrixXd>(std::move(diagonals));
  f.finalize();
  return f;
}

KrausFamily KrausFamily::rank_one(std::string label, std::vector<Outcome> outcomes, std::vector<double> weights,
                                  std::vector<Complex> scale, Matrix left, Matrix right, Json parameters) {
  check_lengths(outcomes.size(), weights.size(), scale.size());
  if (left.cols() != static_cast<Eigen::Index>(scale.size()) || right.cols() != left.cols() ||
      left.rows() != right.rows())
    throw DimensionError("rank-one family: vector shapes disagree");
  KrausFamily f;
  f.label_ = std::move(label);
  f.outcomes_ = std::move(outcomes);
  f.weights_ = std::move(weights);
  f.parameters_ = std::move(parameters);
  f.dim_ = static_cast<std::size_t>(left.rows());
  f.form_ = Form::RankOne;
  f.scale_ = std::make_shared<const std::vector<Complex>>(std::move(scale));
  f.left_ = std::make_shared<const Matrix>(std::move(left));
  f.right_ = std::make_shared<const Matrix>(std::move(right));
  f.finalize();
  return f;
}

void KrausFamily::finalize() {
  for (double w : weights_)
    if (!(w >= 0.0) || !std::isfinite(w)) throw InstrumentError("Kraus family: weights must be nonnegative");
  defect_ = recompute_defect();
  raw_defect_ = defect_;
}

double KrausFamily::recompute_defect() const { return hermitian_norm(effect_sum() - identity(dim_)); }

Matrix KrausFamily::kraus(std::size_t a) const {
  const auto ia = static_cast<Eigen::Index>(a);
  switch (form_) {
    case Form::Dense:
      return (*dense_)[a];
    case Form::Spectral: {
      const Vector d = diagonals_->row(ia).transpose().cast<Complex>();
      return (*basis_) * d.asDiagonal() * basis_->adjoint();
    }
    case Form::RankOne:
      return (*scale_)[a] * left_->col(ia) * right_->col(ia).adjoint();
  }
  return {};
}

Matrix KrausFamily::branch(std::size_t a, const Matrix& rho) const {
  const auto ia = static_cast<Eigen::Index>(a);
  switch (form_) {
    case Form::Dense: {
      const Matrix& k = (*dense_)[a];
      return k * rho * k.adjoint();
    }
    case Form::Spectral: {
      const Matrix rt = basis_->adjoint() * rho * (*basis_);
      const Eigen::VectorXd d = diagonals_->row(ia).transpose();
      const Matrix m = (d * d.transpose()).cast<Complex>();
      return (*basis_) * rt.cwiseProduct(m) * basis_->adjoint();
    }
    case Form::RankOne: {
      const auto v = right_->col(ia);
      const double p = std::norm((*scale_)[a]) * (v.adjoint() * rho * v)(0, 0).real();
      return p * left_->col(ia) * left_->col(ia).adjoint();
    }
  }
  return {};
}

RealVector KrausFamily::densities(const Matrix& rho) const {
  const auto n = static_cast<Eigen::Index>(size());
  RealVector out(n);
  switch (form_) {
    case Form::Dense:
      for (Eigen::Index a = 0; a < n; ++a) {
        const Matrix& k = (*dense_)[static_cast<std::size_t>(a)];
        out(a) = (k.adjoint() * k * rho).trace().real();
      }
      break;
    case Form::Spectral: {
      const Matrix rt = basis_->adjoint() * rho * (*basis_);
      const Eigen::VectorXd diag = rt.diagonal().real();
      out = diagonals_->cwiseAbs2() * diag;
      break;
    }
    case Form::RankOne: {
      const Matrix rv = rho * (*right_);
      for (Eigen::Index a = 0; a < n; ++a)
        out(a) = std::norm((*scale_)[static_cast<std::size_t>(a)]) * right_->col(a).dot(rv.col(a)).real();
      break;
    }
  }
  return out;
}

Matrix KrausFamily::channel(const Matrix& rho) const {
  switch (form_) {
    case Form::Dense: {
      Matrix out = Matrix::Zero(rho.rows(), rho.cols());
      for (std::size_t a = 0; a < size(); ++a) {
        const Matrix& k = (*dense_)[a];
        out += weights_[a] * (k * rho * k.adjoint());
      }
      return out;
    }
    case Form::Spectral: {
      const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights_.data(), static_cast<Eigen::Index>(size()));
      const Eigen::MatrixXd m = diagonals_->transpose() * w.asDiagonal() * (*diagonals_);
      const Matrix rt = basis_->adjoint() * rho * (*basis_);
      return (*basis_) * rt.cwiseProduct(m.cast<Complex>()) * basis_->adjoint();
    }
    case Form::RankOne: {
      const RealVector p = densities(rho);
      Vector coeff(p.size());
      for (Eigen::Index a = 0; a < p.size(); ++a) coeff(a) = weights_[static_cast<std::size_t>(a)] * p(a);
      return (*left_) * coeff.asDiagonal() * left_->adjoint();
    }
  }
  return {};
}

Matrix KrausFamily::dual(const Matrix& e) const {
  switch (form_) {
    case Form::Dense: {
      Matrix out = Matrix::Zero(e.rows(), e.cols());
      for (std::size_t a = 0; a < size(); ++a) {
        const Matrix& k = (*dense_)[a];
        out += weights_[a] * (k.adjoint() * e * k);
      }
      return out;
    }
    case Form::Spectral:
      // Kraus operators are Hermitian in this form, so the dual map equals the channel.
      return channel(e);
    case Form::RankOne: {
      const Matrix el = e * (*left_);
      Vector coeff(static_cast<Eigen::Index>(size()));
      for (Eigen::Index a = 0; a < coeff.size(); ++a)
        coeff(a) = weights_[static_cast<std::size_t>(a)] * std::norm((*scale_)[static_cast<std::size_t>(a)]) *
                   left_->col(a).dot(el.col(a));
      return (*right_) * coeff.asDiagonal() * right_->adjoint();
    }
  }
  return {};
}

Matrix KrausFamily::effect_sum() const {
  switch (form_) {
    case Form::Dense: {
      Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
      for (std::size_t a = 0; a < size(); ++a) out += weights_[a] * ((*dense_)[a].adjoint() * (*dense_)[a]);
      return out;
    }
    case Form::Spectral: {
      const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights_.data(), static_cast<Eigen::Index>(size()));
      const Eigen::VectorXd s = diagonals_->cwiseAbs2().transpose() * w;
      return (*basis_) * s.cast<Complex>().asDiagonal() * basis_->adjoint();
    }
    case Form::RankOne: {
      Vector coeff(static_cast<Eigen::Index>(size()));
      for (Eigen::Index a = 0; a < coeff.size(); ++a)
        coeff(a) = weights_[static_cast<std::size_t>(a)] * std::norm((*scale_)[static_cast<std::size_t>(a)]) *
                   left_->col(a).squaredNorm();
      return (*right_) * coeff.asDiagonal() * right_->adjoint();
    }
  }
  return {};
}

bool KrausFamily::is_projective(double tol) const {
  for (double w : weights_)
    if (std::abs(w - 1.0) > tol) return false;
  if (form_ == Form::Spectral) {
    const Eigen::MatrixXd& d = *diagonals_;
    for (Eigen::Index a = 0; a < d.rows(); ++a)
      for (Eigen::Index i = 0; i < d.cols(); ++i)
        if (std::min(std::abs(d(a, i)), std::abs(d(a, i) - 1.0)) > tol) return false;
    const Eigen::VectorXd col_sum = d.colwise().sum().transpose();
    return (col_sum.array() - 1.0).abs().maxCoeff() <= tol;
  }
  std::vector<Matrix> ops;
  ops.reserve(size());
  for (std::size_t a = 0; a < size(); ++a) ops.push_back(kraus(a));
  Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
  for (std::size_t a = 0; a < ops.size(); ++a) {
    const Matrix& k = ops[a];
    if (operator_norm(k - k.adjoint()) > tol || operator_norm(k * k - k) > tol) return false;
    for (std::size_t b = a + 1; b < ops.size(); ++b)
      if (operator_norm(k * ops[b]) > tol) return false;
    sum += k;
  }
  return operator_norm(sum - identity(dim_)) <= tol;
}

Json KrausFamily::descriptor() const {
  static const char* forms[] = {"dense", "spectral", "rank_one"};
  Json j;
  j["label"] = label_;
  j["form"] = forms[static_cast<int>(form_)];
  j["dim"] = dim_;
  j["outcomes"] = summarize_outcomes(outcomes_);
  const auto [wmin, wmax] = std::minmax_element(weights_.begin(), weights_.end());
  j["weights"] = {{"min", *wmin}, {"max", *wmax}};
  j["parameters"] = parameters_;
  j["completeness_defect"] = defect_;
  j["raw_defect"] = raw_defect_;
  return j;
}

// ---------------------------------------------------------------------------
// Constructors

KrausFamily identity_family(std::size_t dim) {
  return KrausFamily::dense("identity", {Outcome{0.0}}, {1.0}, {identity(dim)}, {{"kind", "identity"}});
}

KrausFamily projective_family(std::string label, const std::vector<Matrix>& projectors, std::vector<double> values,
                              double tol) {
  if (projectors.size() != values.size()) throw InstrumentError("projective family: value count mismatch");
  std::vector<Outcome> outcomes(values.begin(), values.end());
  std::vector<double> weights(projectors.size(), 1.0);
  auto f = KrausFamily::dense(std::move(label), std::move(outcomes), std::move(weights), projectors,
                              {{"kind", "projective"}});
  if (!f.is_projective(tol)) throw InstrumentError("projective family: operators are not complete orthogonal projectors");
  return f;
}

namespace {

KrausFamily gaussian_quadrature_family(const char* label, const Operator& quadrature, double width,
                                       const RealGrid& grid, std::size_t dim, FamilyOptions options) {
  if (!(width > 0.0)) throw InstrumentError(std::string(label) + ": unsharpness must be positive");
  if (grid.count < 2) throw InstrumentError(std::string(label) + ": grid needs at least two points");
  const double span = 6.0 * std::max(width, 1.0);
  if (!options.allow_narrow_grid && (grid.min > -span || grid.max < span))
    throw InstrumentError(std::string(label) + ": grid does not span +-6 max(width, 1)");
  const auto eig = hermitian_eigen(quadrature.matrix());
  const double norm = std::pow(width * width * kPi, -0.25);
  Eigen::MatrixXd diag(static_cast<Eigen::Index>(grid.count), static_cast<Eigen::Index>(dim));
  std::vector<Outcome> outcomes;
  outcomes.reserve(grid.count);
  for (std::size_t a = 0; a < grid.count; ++a) {
    const double x = grid.point(a);
    outcomes.emplace_back(x);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      const double u = (x - eig.values(i)) / width;
      diag(static_cast<Eigen::Index>(a), i) = norm * std::exp(-0.5 * u * u);
    }
  }
  std::vector<double> weights(grid.count, grid.spacing());
  auto f = KrausFamily::spectral(label, std::move(outcomes), std::move(weights), eig.vectors, std::move(diag),
                                 {{"kind", label}, {"width", width}, {"grid", grid.to_json()}});
  if (f.completeness_defect() > options.defect_ceiling)
    throw InstrumentError(std::string(label) + ": grid too coarse, completeness defect " +
                          std::to_string(f.completeness_defect()));
  return f;
}

}  // namespace

KrausFamily gaussian_x_family(double delta, const RealGrid& grid, std::size_t dim, FamilyOptions options) {
  return gaussian_quadrature_family("gaussian_x", quadrature_operators(dim).x, delta, grid, dim, options);
}

KrausFamily gaussian_p_family(double kappa, const RealGrid& grid, std::size_t dim, FamilyOptions options) {
  return gaussian_quadrature_family("gaussian_p", quadrature_operators(dim).p, kappa, grid, dim, options);
}

KrausFamily coherent_projector_family(const ComplexLattice& lattice, std::size_t dim, FamilyOptions options) {
  const auto n = static_cast<Eigen::Index>(lattice.size());
  if (n == 0) throw InstrumentError("coherent projector family: empty lattice");
  Matrix right(static_cast<Eigen::Index>(dim), n);
  Matrix left(static_cast<Eigen::Index>(dim), n);
  std::vector<Outcome> outcomes;
  outcomes.reserve(lattice.size());
  for (Eigen::Index a = 0; a < n; ++a) {
    const Complex beta = lattice.points[static_cast<std::size_t>(a)];
    right.col(a) = projected_coherent_amplitudes(beta, dim);
    left.col(a) = right.col(a) / right.col(a).norm();
    outcomes.emplace_back(beta);
  }
  std::vector<Complex> scale(lattice.size(), Complex(1.0 / std::sqrt(kPi)));
  auto f = KrausFamily::rank_one("coherent_projectors", std::move(outcomes), lattice.weights, std::move(scale),
                                 std::move(left), std::move(right),
                                 {{"kind", "coherent_projectors"}, {"lattice", lattice.descriptor}});
  if (f.completeness_defect() > options.defect_ceiling)
    throw InstrumentError("coherent projector family: lattice coverage insufficient, defect " +
                          std::to_string(f.completeness_defect()));
  return f;
}

std::vector<Envelope> ring_envelopes(double d, std::size_t count) {
  if (!(d > 0.0) || count == 0) throw InstrumentError("ring_envelopes: need d > 0 and count >= 1");
  std::vector<Envelope> out;
  for (std::size_t a = 0; a < count; ++a) {
    const double lo = d * static_cast<double>(a);
    const double hi = (a + 1 == count) ? std::numeric_limits<double>::infinity() : d * static_cast<double>(a + 1);
    out.emplace_back([lo, hi](Complex z) {
      const double r = std::abs(z);
      return (r >= lo && r < hi) ? 1.0 : 0.0;
    });
  }
  return out;
}

KrausFamily coherent_coarse_family(const std::vector<Envelope>& envelopes, const ComplexLattice& lattice,
                                   std::size_t dim, FamilyOptions options) {
  if (envelopes.empty()) throw InstrumentError("coherent coarse family: no envelopes");
  const auto d = static_cast<Eigen::Index>(dim);
  std::vector<Matrix> povm(envelopes.size(), Matrix::Zero(d, d));
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    const Complex alpha = lattice.points[k];
    double total = 0.0;
    std::vector<double> f(envelopes.size());
    for (std::size_t a = 0; a < envelopes.size(); ++a) {
      f[a] = envelopes[a](alpha);
      if (f[a] < 0.0) throw InstrumentError("coherent coarse family: negative envelope value");
      total += f[a];
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw InstrumentError("coherent coarse family: envelopes are not a partition of unity");
    const Vector v = projected_coherent_amplitudes(alpha, dim);
    const Matrix proj = v * v.adjoint();
    for (std::size_t a = 0; a < envelopes.size(); ++a)
      if (f[a] != 0.0) povm[a] += (lattice.weights[k] * f[a] / kPi) * proj;
  }
  std::vector<Matrix> kraus;
  std::vector<Outcome> outcomes;
  for (std::size_t a = 0; a < povm.size(); ++a) {
    kraus.push_back(sqrt_psd(povm[a]));
    outcomes.emplace_back(static_cast<long>(a));
  }
  std::vector<double> weights(povm.size(), 1.0);
  auto raw = KrausFamily::dense("coherent_coarse", std::move(outcomes), std::move(weights), std::move(kraus),
                                {{"kind", "coherent_coarse"}, {"envelopes", envelopes.size()},
                                 {"lattice", lattice.descriptor}});
  if (raw.completeness_defect() > options.defect_ceiling)
    throw InstrumentError("coherent coarse family: lattice coverage insufficient");
  return symmetrize_completeness(raw);
}

KrausFamily ring_family(double d, std::size_t dim) {
  if (!(d > 0.0) || dim == 0) throw InstrumentError("ring_family: need d > 0 and dim >= 1");
  using boost::math::gamma_p;
  using boost::math::gamma_q;
  const double n_max = static_cast<double>(dim);
  const double r2_cut = n_max + 12.0 * std::sqrt(n_max) + 60.0;
  std::size_t rings = 1;
  while (std::pow(d * static_cast<double>(rings), 2) < r2_cut) ++rings;
  ++rings;  // remainder ring beyond the cut

  // Cumulative weight below radius r for level n, P(n+1, r^2), evaluated
  // through whichever tail is more accurate.
  auto cumulative = [](double n1, double r2) -> std::pair<double, double> {
    if (r2 == 0.0) return {0.0, 1.0};
    return {gamma_p(n1, r2), gamma_q(n1, r2)};
  };

  Eigen::MatrixXd diag(static_cast<Eigen::Index>(rings), static_cast<Eigen::Index>(dim));
  for (std::size_t n = 0; n < dim; ++n) {
    const double n1 = static_cast<double>(n) + 1.0;
    for (std::size_t a = 0; a < rings; ++a) {
      const double lo2 = std::pow(d * static_cast<double>(a), 2);
      const auto [p_lo, q_lo] = cumulative(n1, lo2);
      double e;
      if (a + 1 == rings) {
        e = q_lo;
      } else {
        const double hi2 = std::pow(d * static_cast<double>(a + 1), 2);
        const auto [p_hi, q_hi] = cumulative(n1, hi2);
        e = (p_lo < 0.5) ? p_hi - p_lo : q_lo - q_hi;
      }
      diag(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(n)) = std::sqrt(std::max(e, 0.0));
    }
  }
  std::vector<Outcome> outcomes;
  for (std::size_t a = 0; a < rings; ++a) outcomes.emplace_back(static_cast<long>(a));
  std::vector<double> weights(rings, 1.0);
  return KrausFamily::spectral("rings", std::move(outcomes), std::move(weights), identity(dim), std::move(diag),
                               {{"kind", "rings"}, {"width", d}, {"rings", rings}});
}

long BorderFunction::operator()(long m) const {
  return static_cast<long>(std::llround(coefficient * std::pow(static_cast<double>(m), power)));
}

std::string BorderFunction::to_string() const {
  std::ostringstream os;
  if (coefficient != 1.0) os << coefficient;
  os << 'm';
  if (power != 1) os << '^' << power;
  return os.str();
}

BorderFunction BorderFunction::parse(const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '*') s.push_back(ch);
  const auto pos = s.find('m');
  if (pos == std::string::npos || s.empty()) throw std::invalid_argument("border function must look like c*m^p");
  BorderFunction g;
  const std::string coeff = s.substr(0, pos);
  std::size_t used = 0;
  if (!coeff.empty()) {
    g.coefficient = std::stod(coeff, &used);
    if (used != coeff.size()) throw std::invalid_argument("bad border coefficient: " + coeff);
  }
  const std::string rest = s.substr(pos + 1);
  if (!rest.empty()) {
    if (rest[0] != '^' || rest.size() < 2) throw std::invalid_argument("bad border exponent: " + rest);
    g.power = std::stoi(rest.substr(1), &used);
    if (used + 1 != rest.size()) throw std::invalid_argument("bad border exponent: " + rest);
  }
  if (!(g.coefficient > 0.0) || g.power < 1) throw std::invalid_argument("border function must be increasing");
  return g;
}

KrausFamily fock_bin_family(const std::function<long(long)>& g, std::size_t dim, std::string label) {
  if (g(0) != 0) throw InstrumentError("fock_bin_family: g(0) must be 0");
  std::vector<std::pair<long, long>> bins;
  long lo = 0;
  for (long m = 0; lo < static_cast<long>(dim); ++m) {
    const long hi = g(m + 1);
    if (hi <= lo) throw InstrumentError("fock_bin_family: border function must be strictly increasing");
    bins.emplace_back(lo, std::min<long>(hi, static_cast<long>(dim)));
    lo = hi;
  }
  Eigen::MatrixXd diag = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(bins.size()), static_cast<Eigen::Index>(dim));
  std::vector<Outcome> outcomes;
  Json borders = Json::array();
  for (std::size_t m = 0; m < bins.size(); ++m) {
    for (long k = bins[m].first; k < bins[m].second; ++k)
      diag(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = 1.0;
    outcomes.emplace_back(static_cast<long>(m));
    borders.push_back(bins[m].first);
  }
  std::vector<double> weights(bins.size(), 1.0);
  return KrausFamily::spectral(std::move(label), std::move(outcomes), std::move(weights), identity(dim),
                               std::move(diag), {{"kind", "fock_bins"}, {"borders", borders}});
}

KrausFamily fock_bin_family(const BorderFunction& g, std::size_t dim) {
  auto f = fock_bin_family([g](long m) { return g(m); }, dim, "fock_bins_" + g.to_string());
  return f;
}

KrausFamily symmetrize_completeness(const KrausFamily& family, double min_eigenvalue) {
  const Matrix s = family.effect_sum();
  KrausFamily out = family;
  switch (family.form_) {
    case KrausFamily::Form::Dense: {
      const Matrix s_inv_half = inverse_sqrt_psd(s, min_eigenvalue);
      std::vector<Matrix> kraus;
      kraus.reserve(family.size());
      for (const auto& k : *family.dense_) kraus.push_back(k * s_inv_half);
      out.dense_ = std::make_shared<const std::vector<Matrix>>(std::move(kraus));
      break;
    }
    case KrausFamily::Form::Spectral: {
      const Eigen::VectorXd w =
          Eigen::Map<const Eigen::VectorXd>(family.weights_.data(), static_cast<Eigen::Index>(family.size()));
      const Eigen::VectorXd sd = family.diagonals_->cwiseAbs2().transpose() * w;
      if (sd.minCoeff() < min_eigenvalue) throw DimensionError("symmetrize_completeness: S is singular");
      Eigen::MatrixXd diag = *family.diagonals_;
      for (Eigen::Index i = 0; i < diag.cols(); ++i) diag.col(i) /= std::sqrt(sd(i));
      out.diagonals_ = std::make_shared<const Eigen::MatrixXd>(std::move(diag));
      break;
    }
    case KrausFamily::Form::RankOne: {
      const Matrix s_inv_half = inverse_sqrt_psd(s, min_eigenvalue);
      out.right_ = std::make_shared<const Matrix>(s_inv_half * (*family.right_));
      break;
    }
  }
  out.defect_ = out.recompute_defect();
  out.raw_defect_ = family.raw_defect_;
  out.parameters_["symmetrized"] = true;
  return out;
}

}  // namespace macroreal
