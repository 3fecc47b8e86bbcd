#include "bregopt/models.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bregopt {

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::proximal_point: return "proximal_point";
    case ModelFamily::linear_mirror: return "linear_mirror";
    case ModelFamily::prox_linear: return "prox_linear";
    case ModelFamily::saddle: return "saddle";
  }
  return "unknown";
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::A: return "A";
    case Regime::B: return "B";
    case Regime::C: return "C";
  }
  return "?";
}

Regime regime_from_string(std::string_view name) {
  if (name == "A") return Regime::A;
  if (name == "B") return Regime::B;
  if (name == "C") return Regime::C;
  throw ConfigError("unknown regime: " + std::string(name));
}

// ---------------------------------------------------------------- ModelOracle

ModelOracle::ModelOracle(ModelFamily family, Regime regime, ModelConstants constants,
                         std::size_t dimension, std::vector<double> weights,
                         std::vector<double> lipschitz, bool smooth, double noise_scale)
    : family_(family),
      regime_(regime),
      constants_(constants),
      dimension_(dimension),
      weights_(std::move(weights)),
      lipschitz_(std::move(lipschitz)),
      smooth_(smooth),
      noise_scale_(noise_scale) {
  if (weights_.empty()) throw ConfigError("oracle needs at least one atom");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw ConfigError("atom weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ConfigError("atom weights must sum to one");
  if (lipschitz_.empty()) lipschitz_.assign(weights_.size(), 0.0);
  if (lipschitz_.size() != weights_.size()) {
    throw ConfigError("one Lipschitz constant per atom is required");
  }
  if (!(noise_scale_ >= 0.0)) throw ConfigError("noise scale must be nonnegative");
}

double ModelOracle::lipschitz_rms() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) acc += weights_[i] * lipschitz_[i] * lipschitz_[i];
  return std::sqrt(acc);
}

Sample ModelOracle::sample(Rng& rng) const {
  std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
  Sample s;
  s.index = pick(rng);
  if (noise_scale_ > 0.0) {
    std::normal_distribution<double> normal(0.0, noise_scale_);
    s.noise.resize(static_cast<Eigen::Index>(dimension_));
    for (Eigen::Index i = 0; i < s.noise.size(); ++i) s.noise[i] = normal(rng);
  }
  return s;
}

Sample ModelOracle::atom(std::size_t index) const {
  if (index >= weights_.size()) throw ConfigError("atom index out of range");
  return Sample{index, Vector()};
}

double ModelOracle::model_value(const Vector& x, const Vector& y, const Sample& xi) const {
  return bregopt::model_value(step_model(x, xi), y);
}

Vector ModelOracle::model_subgradient(const Vector& x, const Vector& y, const Sample& xi) const {
  return bregopt::model_subgradient(step_model(x, xi), y);
}

std::optional<Matrix> ModelOracle::component_hessian(const Vector&, std::size_t) const {
  return std::nullopt;
}

double ModelOracle::f_value(const Vector& y) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != 0.0) acc += weights_[i] * component_value(y, i);
  }
  return acc;
}

Vector ModelOracle::f_subgradient(const Vector& y) const {
  Vector acc = Vector::Zero(y.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] != 0.0) acc += weights_[i] * component_subgradient(y, i);
  }
  return acc;
}

std::optional<Matrix> ModelOracle::f_hessian(const Vector& y) const {
  if (!smooth_) return std::nullopt;
  Matrix acc = Matrix::Zero(y.size(), y.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (weights_[i] == 0.0) continue;
    auto h = component_hessian(y, i);
    if (!h) return std::nullopt;
    acc += weights_[i] * *h;
  }
  return acc;
}

ConvexObjective ModelOracle::f_objective() const {
  ConvexObjective obj;
  obj.value = [this](const Vector& y) { return f_value(y); };
  obj.subgradient = [this](const Vector& y) { return f_subgradient(y); };
  if (smooth_) obj.hessian = [this](const Vector& y) { return *f_hessian(y); };
  return obj;
}

// ---------------------------------------------------------------- composite

double CompositeData::inner(const Vector& x, std::size_t i) const {
  const double ax = rows.row(static_cast<Eigen::Index>(i)).dot(x);
  return ax * ax - targets[static_cast<Eigen::Index>(i)];
}

Vector CompositeData::inner_gradient(const Vector& x, std::size_t i) const {
  const auto a = rows.row(static_cast<Eigen::Index>(i)).transpose();
  return 2.0 * a.dot(x) * a;
}

double CompositeData::jacobian_constant(std::size_t i) const {
  return rows.row(static_cast<Eigen::Index>(i)).squaredNorm();
}

double CompositeData::accuracy_tau() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    acc += weights[i] * outer_lipschitz(i) * jacobian_constant(i);
  }
  return 4.0 / 3.0 * acc;
}

namespace {

std::vector<double> composite_lipschitz(const CompositeData& data) {
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = std::sqrt(2.0) * data.outer_lipschitz(i) * data.jacobian_constant(i);
  }
  return out;
}

}  // namespace

ProxLinearOracle::ProxLinearOracle(CompositeData data, ModelConstants constants)
    : ModelOracle(ModelFamily::prox_linear, Regime::A, constants,
                  static_cast<std::size_t>(data.rows.cols()), data.weights,
                  composite_lipschitz(data), false),
      data_(std::move(data)) {
  if (static_cast<std::size_t>(data_.targets.size()) != data_.size()) {
    throw ConfigError("composite data: one target per row is required");
  }
}

StepModel ProxLinearOracle::step_model(const Vector& x, const Sample& xi) const {
  return AbsLinearModel{1.0, data_.inner(x, xi.index), data_.inner_gradient(x, xi.index), x};
}

double ProxLinearOracle::component_value(const Vector& y, std::size_t index) const {
  return std::abs(data_.inner(y, index));
}

Vector ProxLinearOracle::component_subgradient(const Vector& y, std::size_t index) const {
  const double c = data_.inner(y, index);
  if (c == 0.0) return Vector::Zero(y.size());
  return (c > 0.0 ? 1.0 : -1.0) * data_.inner_gradient(y, index);
}

// ---------------------------------------------------------------- smooth finite sums

double SmoothComponents::value(const Vector& x, std::size_t i) const {
  const double ax = rows.row(static_cast<Eigen::Index>(i)).dot(x);
  if (kind == ComponentKind::linear) return ax;
  if (kind == ComponentKind::least_squares) {
    const double r = ax - targets[static_cast<Eigen::Index>(i)];
    return 0.5 * r * r;
  }
  const double res = ax * ax - targets[static_cast<Eigen::Index>(i)];
  return res * res;
}

Vector SmoothComponents::gradient(const Vector& x, std::size_t i) const {
  const auto a = rows.row(static_cast<Eigen::Index>(i)).transpose();
  if (kind == ComponentKind::linear) return a;
  const double ax = a.dot(x);
  if (kind == ComponentKind::least_squares) return (ax - targets[static_cast<Eigen::Index>(i)]) * a;
  return 4.0 * (ax * ax - targets[static_cast<Eigen::Index>(i)]) * ax * a;
}

Matrix SmoothComponents::hessian(const Vector& x, std::size_t i) const {
  const auto a = rows.row(static_cast<Eigen::Index>(i)).transpose();
  if (kind == ComponentKind::linear) return Matrix::Zero(x.size(), x.size());
  if (kind == ComponentKind::least_squares) return a * a.transpose();
  const double ax = a.dot(x);
  return 4.0 * (3.0 * ax * ax - targets[static_cast<Eigen::Index>(i)]) * (a * a.transpose());
}

LinearMirrorOracle::LinearMirrorOracle(SmoothComponents data, GradientMode mode,
                                       double noise_scale, Regime regime,
                                       ModelConstants constants, std::vector<double> lipschitz)
    : ModelOracle(ModelFamily::linear_mirror, regime, constants,
                  static_cast<std::size_t>(data.rows.cols()), data.weights, std::move(lipschitz),
                  true, mode == GradientMode::exact_plus_noise ? noise_scale : 0.0),
      data_(std::move(data)),
      mode_(mode) {}

Vector LinearMirrorOracle::stochastic_gradient(const Vector& x, const Sample& xi) const {
  if (mode_ == GradientMode::component) return data_.gradient(x, xi.index);
  Vector g = f_subgradient(x);
  if (xi.noise.size() == g.size()) g += xi.noise;
  return g;
}

StepModel LinearMirrorOracle::step_model(const Vector& x, const Sample& xi) const {
  return LinearModel{f_value(x), stochastic_gradient(x, xi), x};
}

double LinearMirrorOracle::component_value(const Vector& y, std::size_t index) const {
  return data_.value(y, index);
}

Vector LinearMirrorOracle::component_subgradient(const Vector& y, std::size_t index) const {
  return data_.gradient(y, index);
}

std::optional<Matrix> LinearMirrorOracle::component_hessian(const Vector& y,
                                                            std::size_t index) const {
  return data_.hessian(y, index);
}

// ---------------------------------------------------------------- saddle

bool UncertaintySet::contains(const Vector& w, double tol) const {
  if (kind == Kind::ball) return w.norm() <= radius * (1.0 + tol) + tol;
  return std::any_of(points.begin(), points.end(),
                     [&](const Vector& p) { return (p - w).norm() <= tol; });
}

double SaddleData::g(const Vector& x, const Vector& w, std::size_t i) const {
  return (rows.row(static_cast<Eigen::Index>(i)).transpose() + w).dot(x);
}

Vector SaddleData::argmax(const Vector& x, std::size_t) const {
  if (set.kind == UncertaintySet::Kind::ball) {
    const double n = x.norm();
    if (n == 0.0) return Vector::Zero(x.size());
    return x * (set.radius / n);
  }
  std::size_t best = 0;
  double best_val = -kInf;
  for (std::size_t k = 0; k < set.points.size(); ++k) {
    const double v = set.points[k].dot(x);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  return set.points.at(best);
}

SaddleOracle::SaddleOracle(SaddleData data, ModelConstants constants,
                           std::vector<double> lipschitz)
    : ModelOracle(ModelFamily::saddle, Regime::A, constants,
                  static_cast<std::size_t>(data.rows.cols()), data.weights, std::move(lipschitz),
                  false),
      data_(std::move(data)) {
  if (data_.set.kind == UncertaintySet::Kind::finite && data_.set.points.empty()) {
    throw ConfigError("finite uncertainty set must be nonempty");
  }
}

StepModel SaddleOracle::step_model(const Vector& x, const Sample& xi) const {
  const Vector w = data_.argmax(x, xi.index);
  const Vector dir = data_.rows.row(static_cast<Eigen::Index>(xi.index)).transpose() + w;
  return LinearModel{dir.dot(x), dir, x};
}

double SaddleOracle::component_value(const Vector& y, std::size_t index) const {
  return data_.g(y, data_.argmax(y, index), index);
}

Vector SaddleOracle::component_subgradient(const Vector& y, std::size_t index) const {
  return data_.rows.row(static_cast<Eigen::Index>(index)).transpose() + data_.argmax(y, index);
}

// ---------------------------------------------------------------- proximal point

ProximalPointOracle::ProximalPointOracle(Matrix rows, Vector targets, std::vector<double> weights,
                                         ModelConstants constants, std::vector<double> lipschitz)
    : ModelOracle(ModelFamily::proximal_point, Regime::C, constants,
                  static_cast<std::size_t>(rows.cols()), std::move(weights), std::move(lipschitz),
                  true),
      rows_(std::move(rows)),
      targets_(std::move(targets)) {}

StepModel ProximalPointOracle::step_model(const Vector&, const Sample& xi) const {
  const std::size_t i = xi.index;
  GenericModel m;
  m.value = [this, i](const Vector& y) { return component_value(y, i); };
  m.subgradient = [this, i](const Vector& y) { return component_subgradient(y, i); };
  m.hessian = [this, i](const Vector& y) { return *component_hessian(y, i); };
  return m;
}

double ProximalPointOracle::component_value(const Vector& y, std::size_t index) const {
  const auto i = static_cast<Eigen::Index>(index);
  const double res = rows_.row(i).dot(y) - targets_[i];
  return 0.5 * res * res;
}

Vector ProximalPointOracle::component_subgradient(const Vector& y, std::size_t index) const {
  const auto i = static_cast<Eigen::Index>(index);
  return (rows_.row(i).dot(y) - targets_[i]) * rows_.row(i).transpose();
}

std::optional<Matrix> ProximalPointOracle::component_hessian(const Vector&,
                                                             std::size_t index) const {
  const auto i = static_cast<Eigen::Index>(index);
  return Matrix(rows_.row(i).transpose() * rows_.row(i));
}

// ---------------------------------------------------------------- verification

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  const double n = static_cast<double>(v.size());
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return m;
}

double scale_of(double a, double b) { return 1.0 + std::abs(a) + std::abs(b); }

}  // namespace

OneSidedReport verify_one_sided(const ModelOracle& oracle, const LegendreFunction& phi,
                                const Vector& x, const Vector& y, std::size_t n_samples,
                                Rng& rng) {
  OneSidedReport rep;
  const double tau = oracle.regime() == Regime::C ? 0.0 : oracle.constants().tau;
  rep.bound_rhs = tau * phi.bregman(y, x);
  const double fx = oracle.f_value(x);
  const double fy = oracle.f_value(y);
  const double slack = 1e-9 * scale_of(fx, fy);
  if (oracle.noise_scale() == 0.0) {
    double gap_x = 0.0;
    double over = 0.0;
    for (std::size_t i = 0; i < oracle.support_size(); ++i) {
      const double w = oracle.weights()[i];
      if (w == 0.0) continue;
      const StepModel m = oracle.step_model(x, oracle.atom(i));
      gap_x += w * model_value(m, x);
      over += w * model_value(m, y);
    }
    rep.mean_gap_at_x = gap_x - fx;
    rep.mean_overshoot = over - fy - rep.bound_rhs;
    rep.pass = std::abs(rep.mean_gap_at_x) <= slack && rep.mean_overshoot <= slack;
    return rep;
  }
  std::vector<double> gaps;
  std::vector<double> overs;
  gaps.reserve(n_samples);
  overs.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const Sample xi = oracle.sample(rng);
    const StepModel m = oracle.step_model(x, xi);
    // Common random numbers: the same draw feeds both the model and the sampled f.
    gaps.push_back(model_value(m, x) - oracle.component_value(x, xi.index));
    overs.push_back(model_value(m, y) - oracle.component_value(y, xi.index));
  }
  const Moments g = moments(gaps);
  const Moments o = moments(overs);
  rep.mean_gap_at_x = g.mean + 0.0;
  rep.mean_overshoot = o.mean - rep.bound_rhs;
  rep.standard_error = o.se;
  rep.pass = std::abs(g.mean) <= 3.0 * g.se + slack && rep.mean_overshoot <= 3.0 * o.se + slack;
  return rep;
}

LipschitzReport verify_lipschitz(const ModelOracle& oracle, const LegendreFunction& phi,
                                 const PointSampler& points, std::size_t n_pairs, Rng& rng) {
  LipschitzReport rep;
  rep.claimed_L = oracle.constants().lip_bound;
  rep.rms_L = oracle.lipschitz_rms();
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const Vector x = points(rng);
    const Vector y = points(rng);
    if (x == y) continue;
    const double d = phi.bregman(y, x);
    if (!(d > 0.0)) continue;
    const Sample xi = oracle.sample(rng);
    const StepModel m = oracle.step_model(x, xi);
    const double drop = model_value(m, x) - model_value(m, y);
    const double lip = oracle.lipschitz(xi);
    const double slack = 1e-9 * scale_of(model_value(m, x), model_value(m, y));
    double ratio = 0.0;
    if (lip > 0.0) {
      ratio = (drop - slack) / (lip * std::sqrt(d));
    } else if (drop > slack) {
      ratio = kInf;
    }
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    ++rep.pairs;
  }
  rep.pass = rep.max_ratio <= 1.0 && rep.rms_L <= rep.claimed_L * (1.0 + 1e-12);
  return rep;
}

SmoothnessReport verify_relative_smoothness(const ModelOracle& oracle, const LegendreFunction& phi,
                                            const PointSampler& points, std::size_t n_pairs,
                                            Rng& rng) {
  SmoothnessReport rep;
  const double tau = oracle.constants().tau;
  const double big_m = oracle.constants().smooth_M;
  bool ok = true;
  for (std::size_t k = 0; k < n_pairs; ++k) {
    const Vector x = points(rng);
    const Vector y = points(rng);
    const double fx = oracle.f_value(x);
    const double fy = oracle.f_value(y);
    const double lin = fy - fx - oracle.f_subgradient(x).dot(y - x);
    const double d = phi.bregman(y, x);
    const double slack = 1e-9 * scale_of(fx, fy);
    const double lower = lin + tau * d;
    const double upper = big_m * d - lin;
    rep.worst_lower = std::min(rep.worst_lower, lower);
    rep.worst_upper = std::min(rep.worst_upper, upper);
    if (lower < -slack || upper < -slack) ok = false;
    ++rep.pairs;
  }
  rep.pass = ok;
  return rep;
}

VarianceReport verify_variance(const ModelOracle& oracle, const LegendreFunction& phi,
                               const Vector& x, std::size_t n_samples, Rng& rng) {
  VarianceReport rep;
  const double sigma = oracle.constants().variance_sigma;
  rep.bound = 0.5 * sigma * sigma;
  const Vector grad = oracle.f_subgradient(x);
  const NormKind norm = phi.primal_norm();
  std::vector<double> sq;
  if (oracle.noise_scale() == 0.0) {
    double acc = 0.0;
    for (std::size_t i = 0; i < oracle.support_size(); ++i) {
      const StepModel m = oracle.step_model(x, oracle.atom(i));
      const double e = dual_norm_of(model_subgradient(m, x) - grad, norm);
      acc += oracle.weights()[i] * e * e;
    }
    rep.mean_square = acc;
    rep.pass = acc <= rep.bound * (1.0 + 1e-12) + 1e-15;
    return rep;
  }
  sq.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const Sample xi = oracle.sample(rng);
    const StepModel m = oracle.step_model(x, xi);
    const double e = dual_norm_of(model_subgradient(m, x) - grad, norm);
    sq.push_back(e * e);
  }
  const Moments mo = moments(sq);
  rep.mean_square = mo.mean;
  rep.standard_error = mo.se;
  rep.pass = mo.mean <= rep.bound + 3.0 * mo.se + 1e-15;
  return rep;
}

CurvatureReport verify_second_order_weak_convexity(const ModelOracle& oracle,
                                                   const LegendreFunction& phi, double rho,
                                                   const PointSampler& points, std::size_t n,
                                                   Rng& rng) {
  CurvatureReport rep;
  bool ok = true;
  for (std::size_t k = 0; k < n; ++k) {
    const Vector x = points(rng);
    const auto h = oracle.f_hessian(x);
    if (!h) throw ConfigError("second-order check needs a C² objective");
    const Matrix m = *h + rho * phi.hessian(x);
    const double ev = Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
    rep.worst_eigenvalue = std::min(rep.worst_eigenvalue, ev);
    if (ev < -1e-9 * (1.0 + m.norm())) ok = false;
    ++rep.points;
  }
  rep.pass = ok;
  return rep;
}

ConvexityReport verify_model_convexity(const ModelOracle& oracle, const PointSampler& points,
                                       std::size_t n_triples, Rng& rng) {
  ConvexityReport rep;
  bool ok = true;
  for (std::size_t k = 0; k < n_triples; ++k) {
    const Vector x = points(rng);
    const Vector a = points(rng);
    const Vector b = points(rng);
    const StepModel m = oracle.step_model(x, oracle.sample(rng));
    const double fa = model_value(m, a);
    const double fb = model_value(m, b);
    const double viol = model_value(m, 0.5 * (a + b)) - 0.5 * (fa + fb);
    rep.worst_violation = std::max(rep.worst_violation, viol);
    if (viol > 1e-10 * scale_of(fa, fb)) ok = false;
  }
  rep.pass = ok;
  return rep;
}

ConvexityReport verify_saddle_argmax(const SaddleOracle& oracle, const PointSampler& points,
                                     std::size_t n_trials, Rng& rng) {
  ConvexityReport rep;
  const SaddleData& data = oracle.data();
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  bool ok = true;
  for (std::size_t k = 0; k < n_trials; ++k) {
    const Vector x = points(rng);
    const Sample xi = oracle.sample(rng);
    const Vector what = data.argmax(x, xi.index);
    if (!data.set.contains(what, 1e-12)) ok = false;
    Vector w(x.size());
    if (data.set.kind == UncertaintySet::Kind::ball) {
      for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = normal(rng);
      w *= data.set.radius * std::pow(unif(rng), 1.0 / static_cast<double>(w.size())) /
           std::max(w.norm(), 1e-300);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, data.set.points.size() - 1);
      w = data.set.points[pick(rng)];
    }
    const double viol = data.g(x, w, xi.index) - data.g(x, what, xi.index);
    rep.worst_violation = std::max(rep.worst_violation, viol);
    if (viol > 1e-9) ok = false;
  }
  rep.pass = ok;
  return rep;
}

// ---------------------------------------------------------------- samplers

PointSampler simplex_sampler(std::size_t dim) {
  return [dim](Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    Vector x(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = expo(rng) + 1e-12;
    return Vector(x / x.sum());
  };
}

PointSampler ball_sampler(std::size_t dim, double radius) {
  return [dim, radius](Rng& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector x(static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = normal(rng);
    const double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(dim));
    return Vector(x * (r / std::max(x.norm(), 1e-300)));
  };
}

PointSampler positive_ball_sampler(std::size_t dim, double radius) {
  PointSampler base = ball_sampler(dim, radius);
  return [base](Rng& rng) { return Vector(base(rng).cwiseAbs().cwiseMax(1e-9)); };
}

}  // namespace bregopt
