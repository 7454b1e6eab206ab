#include "pricedyn/demand.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace pricedyn {

namespace {

constexpr double kUnitTol = 1e-12;

void require_unit(const Vector& p, const char* what) {
  if (std::abs(p.norm() - 1.0) > kUnitTol) {
    std::ostringstream os;
    os << what << ": price vector must be unit length (|p| = " << p.norm() << ")";
    throw UsageError(os.str());
  }
}

void require_finite(const Vector& x, const char* what) {
  if (const auto bad = first_non_finite(x); bad >= 0) {
    std::ostringstream os;
    os << what << ": non-finite component at index " << bad;
    throw NumericError(os.str());
  }
}

}  // namespace

void LinearTwoPriceSpec::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(delta) ||
      !p_hat.allFinite()) {
    throw UsageError("two-price spec: coefficients must be finite");
  }
  if (alpha <= 0.0) throw UsageError("two-price spec: alpha must be > 0");
  if (beta < 0.0) throw UsageError("two-price spec: beta must be >= 0");
}

Matrix LinearTwoPriceSpec::matrix() const {
  Matrix m(2, 2);
  m << -alpha, beta + delta,
       beta - delta, -alpha;
  return m;
}

DecompositionResult decompose_linear(const Matrix& m, const Vector& p_hat) {
  if (m.rows() != m.cols()) throw UsageError("decompose_linear: matrix must be square");
  if (m.rows() != p_hat.size()) {
    throw UsageError("decompose_linear: matrix and p_hat dimensions differ");
  }
  if (!m.allFinite() || !p_hat.allFinite()) {
    throw NumericError("decompose_linear: non-finite input");
  }
  DecompositionResult out;
  const Matrix mt = m.transpose();
  out.symmetric_matrix = 0.5 * (m + mt);
  // Exactly antisymmetric with an exactly zero diagonal. S + K reproduces m
  // bit-for-bit whenever the half-sums are representable, otherwise to 1 ulp.
  out.skew_matrix = 0.5 * (m - mt);
  out.potential_quadratic = -out.symmetric_matrix;
  out.p_hat = p_hat;
  return out;
}

DemandModel::DemandModel(int dim, Fields fields, std::optional<Vector> equilibrium,
                         std::string label)
    : dim_(dim),
      fields_(std::move(fields)),
      equilibrium_(std::move(equilibrium)),
      label_(std::move(label)) {
  if (dim_ <= 0) throw UsageError("demand model: dimension must be positive");
  if (!fields_.potential || !fields_.potential_gradient || !fields_.solenoidal) {
    throw UsageError("demand model: potential, gradient and solenoidal fields are required");
  }
  if (equilibrium_ && equilibrium_->size() != dim_) {
    throw UsageError("demand model: equilibrium dimension mismatch");
  }
}

DemandModel DemandModel::linear(const Matrix& m, const Vector& p_hat) {
  auto parts = decompose_linear(m, p_hat);
  auto model = composite(parts.potential_quadratic, parts.skew_matrix, p_hat);
  model.label_ = "linear";
  return model;
}

DemandModel DemandModel::composite(const Matrix& potential_quadratic, const Matrix& skew,
                                   const Vector& p_hat) {
  const auto n = p_hat.size();
  if (potential_quadratic.rows() != n || potential_quadratic.cols() != n || skew.rows() != n ||
      skew.cols() != n) {
    throw UsageError("composite model: matrices must be n x n with n = dim(p_hat)");
  }
  if (!potential_quadratic.allFinite() || !skew.allFinite() || !p_hat.allFinite()) {
    throw NumericError("composite model: non-finite coefficients");
  }
  const double scale = 1.0 + potential_quadratic.cwiseAbs().maxCoeff() + skew.cwiseAbs().maxCoeff();
  if ((potential_quadratic - potential_quadratic.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * scale) {
    throw UsageError("composite model: potential quadratic must be symmetric");
  }
  if (std::abs(skew.trace()) > 1e-12 * scale) {
    throw UsageError("composite model: solenoidal matrix must be traceless");
  }

  DecompositionResult parts;
  parts.potential_quadratic = potential_quadratic;
  parts.symmetric_matrix = -potential_quadratic;
  parts.skew_matrix = skew;
  parts.p_hat = p_hat;

  Fields f;
  f.potential = [h = potential_quadratic, p_hat](const Vector& p) {
    const Vector q = p - p_hat;
    return 0.5 * q.dot(h * q);
  };
  f.potential_gradient = [h = potential_quadratic, p_hat](const Vector& p) -> Vector {
    return h * (p - p_hat);
  };
  f.solenoidal = [skew, p_hat](const Vector& p) -> Vector { return skew * (p - p_hat); };
  f.jacobian = [j = Matrix(skew - potential_quadratic)](const Vector&) -> Matrix { return j; };

  DemandModel model(static_cast<int>(n), std::move(f), p_hat, "composite");
  model.linear_ = std::move(parts);
  return model;
}

DemandModel DemandModel::two_price(const LinearTwoPriceSpec& spec) {
  spec.validate();
  auto model = linear(spec.matrix(), Vector(spec.p_hat));
  model.label_ = "linear_two_price";
  return model;
}

void DemandModel::check_point(const Vector& p) const {
  if (p.size() != dim_) {
    std::ostringstream os;
    os << "demand model: expected dimension " << dim_ << ", got " << p.size();
    throw UsageError(os.str());
  }
  require_finite(p, "demand model input");
}

double DemandModel::potential(const Vector& p) const {
  check_point(p);
  const double v = fields_.potential(p);
  if (!std::isfinite(v)) throw NumericError("demand model: non-finite potential");
  return v;
}

Vector DemandModel::potential_gradient(const Vector& p) const {
  check_point(p);
  Vector g = fields_.potential_gradient(p);
  require_finite(g, "potential gradient");
  return g;
}

Vector DemandModel::solenoidal(const Vector& p) const {
  check_point(p);
  Vector a = fields_.solenoidal(p);
  require_finite(a, "solenoidal field");
  return a;
}

Matrix DemandModel::jacobian(const Vector& p) const {
  check_point(p);
  if (fields_.jacobian) return fields_.jacobian(p);
  const double h = 1e-6 * (1.0 + p.norm());
  Matrix j(dim_, dim_);
  Vector probe = p;
  for (int k = 0; k < dim_; ++k) {
    probe[k] = p[k] + h;
    const Vector plus = eval_excess_demand(*this, probe);
    probe[k] = p[k] - h;
    const Vector minus = eval_excess_demand(*this, probe);
    probe[k] = p[k];
    j.col(k) = (plus - minus) / (2.0 * h);
  }
  return j;
}

Vector eval_excess_demand(const DemandModel& model, const Vector& p) {
  return model.solenoidal(p) - model.potential_gradient(p);
}

bool verify_walras(const DemandModel& model, const Vector& p, double tol) {
  require_unit(p, "verify_walras");
  return std::abs(p.dot(eval_excess_demand(model, p))) <= tol;
}

Vector project_tangent(const Vector& p, const Vector& xi) {
  if (p.size() != xi.size()) throw UsageError("project_tangent: dimension mismatch");
  require_unit(p, "project_tangent");
  Vector out = xi - p.dot(xi) * p;
  // One correction pass brings |p . out| down to rounding of the second dot
  // product, which matters when xi is nearly radial.
  out -= p.dot(out) * p;
  return out;
}

double divergence_estimate(const DemandModel& model, const Vector& p, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw UsageError("divergence: step must be positive");
  Vector probe = p;
  double div = 0.0;
  for (int k = 0; k < model.dim(); ++k) {
    probe[k] = p[k] + h;
    const double plus = model.solenoidal(probe)[k];
    probe[k] = p[k] - h;
    const double minus = model.solenoidal(probe)[k];
    probe[k] = p[k];
    div += (plus - minus) / (2.0 * h);
  }
  return div;
}

bool verify_divergence_free(const DemandModel& model, const Vector& p, double h, double tol) {
  return std::abs(divergence_estimate(model, p, h)) <= tol;
}

bool verify_divergence_free(const DemandModel& model, const Vector& p) {
  return verify_divergence_free(model, p, 1e-5 * std::max(1.0, p.norm()), 1e-6);
}

}  // namespace pricedyn
