#pragma once

#include <functional>
#include <optional>
#include <string>

#include "pricedyn/types.hpp"

namespace pricedyn {

/// Coefficients of the two-commodity linear excess demand
///
///   xi_1 = -alpha q_1 + (beta + delta) q_2
///   xi_2 = -alpha q_2 + (beta - delta) q_1,      q = p - p_hat.
///
/// alpha is the own-price response, beta the symmetric and delta the
/// antisymmetric cross-price response.
struct LinearTwoPriceSpec {
  double alpha = 1.0;
  double beta = 0.0;
  double delta = 0.0;
  Eigen::Vector2d p_hat = Eigen::Vector2d::Ones();

  /// Throws UsageError unless alpha > 0, beta >= 0 and everything is finite.
  void validate() const;

  /// Demand matrix M with xi(p) = M (p - p_hat).
  Matrix matrix() const;
};

/// Split of a linear demand matrix into its gradient and divergence-free parts.
struct DecompositionResult {
  Matrix symmetric_matrix;  ///< (M + M^T)/2, generates -grad(phi)
  Matrix skew_matrix;       ///< (M - M^T)/2, generates A
  /// H with phi(q) = 1/2 q^T H q; equals -symmetric_matrix.
  Matrix potential_quadratic;
  Vector p_hat;
};

/// M = S + K with S symmetric and K antisymmetric. Throws UsageError if M is
/// not square or does not match p_hat.
DecompositionResult decompose_linear(const Matrix& m, const Vector& p_hat);

/// Excess demand supplied constructively as xi(p) = -grad(phi)(p) + A(p).
///
/// The potential is referenced so that phi(p_hat) = 0 when an equilibrium is
/// known. Linear models carry their matrices so that Jacobians are exact;
/// other models fall back to central differences.
class DemandModel {
 public:
  using ScalarField = std::function<double(const Vector&)>;
  using VectorField = std::function<Vector(const Vector&)>;
  using MatrixField = std::function<Matrix(const Vector&)>;

  struct Fields {
    ScalarField potential;
    VectorField potential_gradient;
    VectorField solenoidal;
    MatrixField jacobian;  ///< optional d xi_i / d p_j
  };

  DemandModel(int dim, Fields fields, std::optional<Vector> equilibrium = std::nullopt,
              std::string label = "custom");

  /// xi(p) = M (p - p_hat), split through decompose_linear.
  static DemandModel linear(const Matrix& m, const Vector& p_hat);
  /// phi(q) = 1/2 q^T H q and A(q) = K q. H must be symmetric and K traceless.
  static DemandModel composite(const Matrix& potential_quadratic, const Matrix& skew,
                               const Vector& p_hat);
  static DemandModel two_price(const LinearTwoPriceSpec& spec);

  int dim() const { return dim_; }
  const std::optional<Vector>& equilibrium() const { return equilibrium_; }
  const std::string& label() const { return label_; }
  /// Present for models built from matrices.
  const std::optional<DecompositionResult>& linear_parts() const { return linear_; }

  double potential(const Vector& p) const;
  Vector potential_gradient(const Vector& p) const;
  Vector solenoidal(const Vector& p) const;
  /// J_ij = d xi_i / d p_j, analytic for linear models, otherwise central
  /// differences with step 1e-6 (1 + |p|).
  Matrix jacobian(const Vector& p) const;

 private:
  void check_point(const Vector& p) const;

  int dim_;
  Fields fields_;
  std::optional<Vector> equilibrium_;
  std::string label_;
  std::optional<DecompositionResult> linear_;
};

/// -grad(phi)(p) + A(p). Throws UsageError on dimension mismatch and
/// NumericError on non-finite input or output.
Vector eval_excess_demand(const DemandModel& model, const Vector& p);

/// |p . xi(p)| <= tol. p must be a unit vector to within 1e-12.
bool verify_walras(const DemandModel& model, const Vector& p, double tol);

/// Removes the radial component: xi - (p . xi) p. p must be a unit vector to
/// within 1e-12.
Vector project_tangent(const Vector& p, const Vector& xi);

/// Central-difference estimate of div A at p with per-coordinate step h.
double divergence_estimate(const DemandModel& model, const Vector& p, double h);

/// |div A(p)| <= tol using divergence_estimate.
bool verify_divergence_free(const DemandModel& model, const Vector& p, double h, double tol);

/// Default step 1e-5 max(1, |p|) and tolerance 1e-6.
bool verify_divergence_free(const DemandModel& model, const Vector& p);

}  // namespace pricedyn
