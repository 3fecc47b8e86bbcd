#include "bregopt/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bregopt {
namespace {

void require_nonnegative(const std::vector<double>& c, const char* what) {
  for (double v : c) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw ConfigError(std::string(what) + ": coefficients must be finite and nonnegative");
  }
}

bool any_positive(const std::vector<double>& c) {
  return std::any_of(c.begin(), c.end(), [](double v) { return v > 0.0; });
}

// ‖x‖^e with the convention 0^0 = 1 and e ≥ 0.
double pow_norm(double r, int e) {
  if (e == 0) return 1.0;
  return std::pow(r, e);
}

double radial_value(const std::vector<RadialTerm>& terms, double r) {
  double acc = 0.0;
  for (const auto& t : terms) acc += t.coeff * pow_norm(r, t.power);
  return acc;
}

Vector radial_gradient(const std::vector<RadialTerm>& terms, const Vector& x) {
  const double r = x.norm();
  double scale = 0.0;
  for (const auto& t : terms) {
    if (t.power == 2) {
      scale += 2.0 * t.coeff;
    } else if (r > 0.0) {
      scale += t.coeff * t.power * pow_norm(r, t.power - 2);
    }
  }
  return scale * x;
}

Matrix radial_hessian(const std::vector<RadialTerm>& terms, const Vector& x) {
  const auto d = x.size();
  const double r = x.norm();
  double iso = 0.0;
  double rank_one = 0.0;
  for (const auto& t : terms) {
    const int k = t.power;
    if (k == 2) {
      iso += 2.0 * t.coeff;
    } else if (r > 0.0) {
      iso += t.coeff * k * pow_norm(r, k - 2);
      rank_one += t.coeff * k * (k - 2) * std::pow(r, k - 4);
    }
  }
  Matrix h = iso * Matrix::Identity(d, d);
  if (rank_one != 0.0) h.noalias() += rank_one * x * x.transpose();
  return h;
}

double radial_bregman(const std::vector<RadialTerm>& terms, const Vector& y, const Vector& x) {
  const double rx = x.norm();
  const double ry = y.norm();
  const Vector diff = y - x;
  double acc = 0.0;
  for (const auto& t : terms) {
    const int k = t.power;
    if (k == 2) {
      acc += t.coeff * diff.squaredNorm();
    } else {
      const double lin = (rx > 0.0) ? k * pow_norm(rx, k - 2) * x.dot(diff) : 0.0;
      acc += t.coeff * (pow_norm(ry, k) - pow_norm(rx, k) - lin);
    }
  }
  return std::max(acc, 0.0);
}

}  // namespace

std::string_view to_string(LegendreKind kind) {
  switch (kind) {
    case LegendreKind::euclidean: return "euclidean";
    case LegendreKind::shannon_entropy: return "shannon_entropy";
    case LegendreKind::burg: return "burg";
    case LegendreKind::poly_growth: return "poly_growth";
    case LegendreKind::norm_power_sum: return "norm_power_sum";
    case LegendreKind::weighted_sum: return "weighted_sum";
  }
  return "unknown";
}

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::all_space: return "all_space";
    case DomainKind::positive_orthant: return "positive_orthant";
    case DomainKind::open_positive_orthant: return "open_positive_orthant";
  }
  return "unknown";
}

LegendreKind legendre_kind_from_string(std::string_view name) {
  for (auto k : {LegendreKind::euclidean, LegendreKind::shannon_entropy, LegendreKind::burg,
                 LegendreKind::poly_growth, LegendreKind::norm_power_sum,
                 LegendreKind::weighted_sum}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown Legendre kind '" + std::string(name) + "'");
}

LegendreFunction::LegendreFunction(LegendreKind kind, std::vector<double> coeffs,
                                   std::vector<LegendreFunction> children,
                                   std::vector<double> weights)
    : kind_(kind),
      coeffs_(std::move(coeffs)),
      children_(std::move(children)),
      weights_(std::move(weights)) {}

LegendreFunction LegendreFunction::euclidean() {
  return LegendreFunction(LegendreKind::euclidean, {}, {}, {});
}

LegendreFunction LegendreFunction::shannon_entropy() {
  return LegendreFunction(LegendreKind::shannon_entropy, {}, {}, {});
}

LegendreFunction LegendreFunction::burg() {
  return LegendreFunction(LegendreKind::burg, {}, {}, {});
}

LegendreFunction LegendreFunction::poly_growth(std::vector<double> a) {
  require_nonnegative(a, "poly_growth");
  if (!any_positive(a)) throw ConfigError("poly_growth: at least one coefficient must be positive");
  return LegendreFunction(LegendreKind::poly_growth, std::move(a), {}, {});
}

LegendreFunction LegendreFunction::norm_power_sum(std::vector<double> b) {
  require_nonnegative(b, "norm_power_sum");
  if (!any_positive(b))
    throw ConfigError("norm_power_sum: at least one coefficient must be positive");
  return LegendreFunction(LegendreKind::norm_power_sum, std::move(b), {}, {});
}

LegendreFunction LegendreFunction::weighted_sum(std::vector<LegendreFunction> children,
                                                std::vector<double> weights) {
  if (children.empty() || children.size() != weights.size())
    throw ConfigError("weighted_sum: need one positive weight per child");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("weighted_sum: weights must be positive");
  }
  // Children must share the open interior; orthant kinds only combine with orthant kinds.
  const bool orthant = children.front().domain() != DomainKind::all_space;
  for (const auto& c : children) {
    if ((c.domain() != DomainKind::all_space) != orthant)
      throw ConfigError("weighted_sum: children must share a common domain");
  }
  return LegendreFunction(LegendreKind::weighted_sum, {}, std::move(children), std::move(weights));
}

DomainKind LegendreFunction::domain() const {
  switch (kind_) {
    case LegendreKind::shannon_entropy: return DomainKind::positive_orthant;
    case LegendreKind::burg: return DomainKind::open_positive_orthant;
    case LegendreKind::weighted_sum: {
      DomainKind d = DomainKind::all_space;
      for (const auto& c : children_) {
        if (c.domain() == DomainKind::open_positive_orthant) return c.domain();
        if (c.domain() == DomainKind::positive_orthant) d = DomainKind::positive_orthant;
      }
      return d;
    }
    default: return DomainKind::all_space;
  }
}

std::optional<std::vector<RadialTerm>> LegendreFunction::radial_terms() const {
  std::vector<RadialTerm> terms;
  switch (kind_) {
    case LegendreKind::euclidean:
      terms.push_back({0.5, 2});
      break;
    case LegendreKind::poly_growth:
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0.0) continue;
        const double n = static_cast<double>(i);
        terms.push_back({coeffs_[i] * (3.0 * n + 7.0) / (n + 2.0), static_cast<int>(i) + 2});
      }
      break;
    case LegendreKind::norm_power_sum:
      for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == 0.0) continue;
        terms.push_back({coeffs_[i] / (static_cast<double>(i) + 2.0), static_cast<int>(i) + 2});
      }
      break;
    case LegendreKind::weighted_sum:
      for (std::size_t j = 0; j < children_.size(); ++j) {
        auto sub = children_[j].radial_terms();
        if (!sub) return std::nullopt;
        for (auto t : *sub) terms.push_back({weights_[j] * t.coeff, t.power});
      }
      break;
    default:
      return std::nullopt;
  }
  // Merge equal powers so the expansion is canonical.
  std::sort(terms.begin(), terms.end(),
            [](const RadialTerm& a, const RadialTerm& b) { return a.power < b.power; });
  std::vector<RadialTerm> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().power == t.power) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  return merged;
}

std::optional<StrongConvexity> LegendreFunction::strong_convexity() const {
  switch (kind_) {
    case LegendreKind::euclidean:
      return StrongConvexity{1.0, NormKind::l2, false};
    case LegendreKind::shannon_entropy:
      return StrongConvexity{1.0, NormKind::l1, true};
    case LegendreKind::burg:
      return std::nullopt;
    case LegendreKind::poly_growth:
    case LegendreKind::norm_power_sum: {
      const auto terms = *radial_terms();
      for (const auto& t : terms) {
        if (t.power == 2) return StrongConvexity{2.0 * t.coeff, NormKind::l2, false};
      }
      return std::nullopt;
    }
    case LegendreKind::weighted_sum: {
      if (auto terms = radial_terms()) {
        for (const auto& t : *terms) {
          if (t.power == 2) return StrongConvexity{2.0 * t.coeff, NormKind::l2, false};
        }
        return std::nullopt;
      }
      // Moduli add only when all children agree on the norm.
      StrongConvexity total{0.0, NormKind::l2, false};
      std::optional<NormKind> norm;
      for (std::size_t j = 0; j < children_.size(); ++j) {
        auto sc = children_[j].strong_convexity();
        if (!sc) continue;
        if (norm && *norm != sc->norm) continue;
        norm = sc->norm;
        total.norm = sc->norm;
        total.modulus += weights_[j] * sc->modulus;
        total.simplex_only = total.simplex_only || sc->simplex_only;
      }
      if (!norm) return std::nullopt;
      return total;
    }
  }
  return std::nullopt;
}

NormKind LegendreFunction::primal_norm() const {
  if (auto sc = strong_convexity()) return sc->norm;
  return NormKind::l2;
}

bool LegendreFunction::in_domain(const Vector& x) const {
  if (!x.allFinite()) return false;
  switch (domain()) {
    case DomainKind::all_space: return true;
    case DomainKind::positive_orthant: return (x.array() >= 0.0).all();
    case DomainKind::open_positive_orthant: return (x.array() > 0.0).all();
  }
  return false;
}

bool LegendreFunction::in_interior(const Vector& x) const {
  if (!x.allFinite()) return false;
  if (domain() == DomainKind::all_space) return true;
  return (x.array() > 0.0).all();
}

double LegendreFunction::value(const Vector& x) const {
  if (!in_domain(x)) return kInf;
  switch (kind_) {
    case LegendreKind::shannon_entropy: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0) acc += x[i] * std::log(x[i]);
      }
      return acc;
    }
    case LegendreKind::burg:
      return -x.array().log().sum();
    case LegendreKind::weighted_sum: {
      double acc = 0.0;
      for (std::size_t j = 0; j < children_.size(); ++j) acc += weights_[j] * children_[j].value(x);
      return acc;
    }
    default:
      return radial_value(*radial_terms(), x.norm());
  }
}

Vector LegendreFunction::gradient(const Vector& x) const {
  if (!in_interior(x)) throw DomainError("Legendre gradient requested outside int(dom Φ)");
  switch (kind_) {
    case LegendreKind::shannon_entropy:
      return (x.array().log() + 1.0).matrix();
    case LegendreKind::burg:
      return (-x.array().inverse()).matrix();
    case LegendreKind::weighted_sum: {
      Vector g = Vector::Zero(x.size());
      for (std::size_t j = 0; j < children_.size(); ++j) g += weights_[j] * children_[j].gradient(x);
      return g;
    }
    default:
      return radial_gradient(*radial_terms(), x);
  }
}

Matrix LegendreFunction::hessian(const Vector& x) const {
  if (!in_interior(x)) throw DomainError("Legendre Hessian requested outside int(dom Φ)");
  switch (kind_) {
    case LegendreKind::shannon_entropy:
      return x.array().inverse().matrix().asDiagonal();
    case LegendreKind::burg:
      return x.array().square().inverse().matrix().asDiagonal();
    case LegendreKind::weighted_sum: {
      Matrix h = Matrix::Zero(x.size(), x.size());
      for (std::size_t j = 0; j < children_.size(); ++j) h += weights_[j] * children_[j].hessian(x);
      return h;
    }
    default:
      return radial_hessian(*radial_terms(), x);
  }
}

Vector LegendreFunction::hessian_apply(const Vector& x, const Vector& v) const {
  if (!in_interior(x)) throw DomainError("Legendre Hessian requested outside int(dom Φ)");
  switch (kind_) {
    case LegendreKind::shannon_entropy:
      return (v.array() / x.array()).matrix();
    case LegendreKind::burg:
      return (v.array() / x.array().square()).matrix();
    case LegendreKind::weighted_sum: {
      Vector out = Vector::Zero(x.size());
      for (std::size_t j = 0; j < children_.size(); ++j)
        out += weights_[j] * children_[j].hessian_apply(x, v);
      return out;
    }
    default: {
      const auto terms = *radial_terms();
      const double r = x.norm();
      const double xv = x.dot(v);
      Vector out = Vector::Zero(x.size());
      for (const auto& t : terms) {
        const int k = t.power;
        if (k == 2) {
          out += 2.0 * t.coeff * v;
        } else if (r > 0.0) {
          out += t.coeff * k * pow_norm(r, k - 2) * v +
                 t.coeff * k * (k - 2) * std::pow(r, k - 4) * xv * x;
        }
      }
      return out;
    }
  }
}

double LegendreFunction::bregman(const Vector& y, const Vector& x) const {
  if (!in_interior(x)) throw DomainError("Bregman divergence needs x in int(dom Φ)");
  if (y.size() != x.size()) throw DomainError("Bregman divergence: dimension mismatch");
  if (!in_domain(y)) return kInf;
  if (y == x) return 0.0;
  switch (kind_) {
    case LegendreKind::euclidean:
      return 0.5 * (y - x).squaredNorm();
    case LegendreKind::shannon_entropy: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        acc += (y[i] > 0.0 ? y[i] * std::log(y[i] / x[i]) : 0.0) - y[i] + x[i];
      }
      return std::max(acc, 0.0);
    }
    case LegendreKind::burg: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double q = y[i] / x[i];
        acc += q - std::log(q) - 1.0;
      }
      return std::max(acc, 0.0);
    }
    case LegendreKind::weighted_sum: {
      double acc = 0.0;
      for (std::size_t j = 0; j < children_.size(); ++j)
        acc += weights_[j] * children_[j].bregman(y, x);
      return acc;
    }
    default:
      return radial_bregman(*radial_terms(), y, x);
  }
}

bool LegendreFunction::operator==(const LegendreFunction& other) const {
  return kind_ == other.kind_ && coeffs_ == other.coeffs_ && children_ == other.children_ &&
         weights_ == other.weights_;
}

double norm_of(const Vector& v, NormKind norm) {
  return norm == NormKind::l1 ? v.lpNorm<1>() : v.norm();
}

double dual_norm_of(const Vector& v, NormKind norm) {
  return norm == NormKind::l1 ? v.lpNorm<Eigen::Infinity>() : v.norm();
}

LocalNormContext::LocalNormContext(const LegendreFunction& phi, const Vector& base_point)
    : base_point_(base_point), hessian_(phi.hessian(base_point)), norm_(phi.primal_norm()) {
  factor_.compute(hessian_);
}

double LocalNormContext::primal(const Vector& y) const {
  return dual_norm_of(hessian_ * y, norm_);
}

double LocalNormContext::dual(const Vector& v) const {
  if (v.isZero(0.0)) return 0.0;
  const auto& d = factor_.vectorD();
  const double scale = d.cwiseAbs().maxCoeff();
  if (factor_.info() != Eigen::Success || scale == 0.0 ||
      d.cwiseAbs().minCoeff() <= 1e-14 * std::max(scale, 1.0)) {
    throw SolverError("local dual norm: Hessian of Φ is singular at the base point");
  }
  return norm_of(factor_.solve(v), norm_);
}

double phi_value(const LegendreFunction& phi, const Vector& x) { return phi.value(x); }

Vector phi_gradient(const LegendreFunction& phi, const Vector& x) { return phi.gradient(x); }

double bregman(const LegendreFunction& phi, const Vector& y, const Vector& x) {
  return phi.bregman(y, x);
}

Vector hessian_apply(const LegendreFunction& phi, const Vector& x, const Vector& v) {
  return phi.hessian_apply(x, v);
}

double local_dual_norm(const LegendreFunction& phi, const Vector& x, const Vector& v) {
  return LocalNormContext(phi, x).dual(v);
}

LegendreFunction build_poly_legendre(const std::vector<double>& p_coeffs) {
  return LegendreFunction::poly_growth(p_coeffs);
}

LegendreFunction build_composite_legendre(const std::vector<double>& p_coeffs,
                                          const std::vector<double>& q_coeffs) {
  require_nonnegative(p_coeffs, "composite accuracy polynomial");
  require_nonnegative(q_coeffs, "composite Lipschitz polynomial");
  std::vector<LegendreFunction> parts;
  if (any_positive(p_coeffs)) parts.push_back(LegendreFunction::poly_growth(p_coeffs));
  if (any_positive(q_coeffs)) parts.push_back(LegendreFunction::norm_power_sum(q_coeffs));
  if (parts.empty()) throw ConfigError("composite Legendre function needs a positive coefficient");
  if (parts.size() == 1) return parts.front();
  return LegendreFunction::weighted_sum(std::move(parts), {1.0, 1.0});
}

}  // namespace bregopt
