#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pricedyn/demand.hpp"

using namespace pricedyn;

namespace {

LinearTwoPriceSpec spec_of(double alpha, double beta, double delta, double p1 = 1.0,
                           double p2 = 1.0) {
  LinearTwoPriceSpec s;
  s.alpha = alpha;
  s.beta = beta;
  s.delta = delta;
  s.p_hat = Eigen::Vector2d(p1, p2);
  return s;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// A(p) = c (p2, -p1), phi = 0.
DemandModel rotation_field(double c) {
  DemandModel::Fields f;
  f.potential = [](const Vector&) { return 0.0; };
  f.potential_gradient = [](const Vector& p) { return Vector::Zero(p.size()).eval(); };
  f.solenoidal = [c](const Vector& p) { return vec({c * p[1], -c * p[0]}); };
  return DemandModel(2, f);
}

}  // namespace

TEST(TwoPrice, VanishesAtEquilibrium) {
  const auto model = DemandModel::two_price(spec_of(2, 1, 0.5));
  const Vector xi = eval_excess_demand(model, vec({1, 1}));
  EXPECT_EQ(xi[0], 0.0);
  EXPECT_EQ(xi[1], 0.0);
}

TEST(TwoPrice, NormalGoodsAndPartialComplements) {
  const auto model = DemandModel::two_price(spec_of(2, 1, 0.5));
  const Vector xi = eval_excess_demand(model, vec({1.1, 1.0}));
  EXPECT_NEAR(xi[0], -0.2, 1e-15);
  EXPECT_NEAR(xi[1], 0.05, 1e-15);
}

TEST(TwoPrice, MatchesHandWrittenMatrix) {
  const auto spec = spec_of(1.3, 0.4, -0.7, 2.0, 0.5);
  const auto model = DemandModel::two_price(spec);
  const Vector p = vec({2.3, 0.1});
  const Vector expected = oracle::two_price_matrix(1.3, 0.4, -0.7) * (p - vec({2.0, 0.5}));
  EXPECT_LT((eval_excess_demand(model, p) - expected).norm(), 1e-15);
}

TEST(TwoPrice, RejectsBadCoefficients) {
  EXPECT_THROW(spec_of(0, 1, 0).validate(), UsageError);
  EXPECT_THROW(spec_of(1, -0.1, 0).validate(), UsageError);
  EXPECT_THROW(spec_of(1, 0, NAN).validate(), UsageError);
  EXPECT_NO_THROW(spec_of(1, 0, -3).validate());
}

TEST(Decompose, TwoPriceExample) {
  Matrix m(2, 2);
  m << -2, 1.5, 0.5, -2;
  const auto d = decompose_linear(m, vec({1, 1}));
  Matrix sym(2, 2), skew(2, 2);
  sym << -2, 1, 1, -2;
  skew << 0, 0.5, -0.5, 0;
  EXPECT_EQ(d.symmetric_matrix, sym);
  EXPECT_EQ(d.skew_matrix, skew);
  EXPECT_EQ(d.potential_quadratic, -sym);
  EXPECT_EQ(d.symmetric_matrix + d.skew_matrix, m);
}

TEST(Decompose, SymmetricInputHasNoSkewPart) {
  Matrix m(3, 3);
  m << -3, 1, 0.25, 1, -2, 0.5, 0.25, 0.5, -1;
  const auto d = decompose_linear(m, Vector::Zero(3));
  EXPECT_EQ(d.skew_matrix, Matrix::Zero(3, 3));
  EXPECT_EQ(d.symmetric_matrix, m);
}

TEST(Decompose, AntisymmetricInputHasNoPotential) {
  Matrix m(2, 2);
  m << 0, 0.7, -0.7, 0;
  const auto d = decompose_linear(m, Vector::Zero(2));
  EXPECT_EQ(d.symmetric_matrix, Matrix::Zero(2, 2));
  EXPECT_EQ(d.skew_matrix, m);
  EXPECT_EQ(d.skew_matrix.trace(), 0.0);
}

TEST(Decompose, RejectsNonSquare) {
  EXPECT_THROW(decompose_linear(Matrix::Zero(2, 3), Vector::Zero(2)), UsageError);
  EXPECT_THROW(decompose_linear(Matrix::Zero(2, 2), Vector::Zero(3)), UsageError);
}

TEST(Model, PotentialReferencedAtEquilibrium) {
  const auto model = DemandModel::two_price(spec_of(2, 1, 0.5, 0.3, 0.7));
  EXPECT_EQ(model.potential(vec({0.3, 0.7})), 0.0);
  // phi(q) = 1/2 (alpha |q|^2 - 2 beta q1 q2) for the two-price model.
  const Vector q = vec({0.2, -0.1});
  const double expected = 0.5 * (2 * q.squaredNorm() - 2 * 1 * q[0] * q[1]);
  EXPECT_NEAR(model.potential(vec({0.5, 0.6})), expected, 1e-15);
}

TEST(Model, GradientMatchesPotentialDifferences) {
  const auto model = DemandModel::two_price(spec_of(1.7, 0.6, 0.9));
  const Vector p = vec({1.3, 0.8});
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vector e = Vector::Zero(2);
    e[i] = h;
    const double fd = (model.potential(p + e) - model.potential(p - e)) / (2 * h);
    EXPECT_NEAR(model.potential_gradient(p)[i], fd, 1e-8);
  }
}

TEST(Model, PurePotentialEvaluatesToNegativeGradient) {
  Matrix h(2, 2);
  h << 3, 0.5, 0.5, 1;
  const auto model = DemandModel::composite(h, Matrix::Zero(2, 2), vec({1, 2}));
  const Vector p = vec({0.4, 2.5});
  EXPECT_EQ(eval_excess_demand(model, p), -model.potential_gradient(p));
}

TEST(Model, CompositeValidation) {
  Matrix asym(2, 2);
  asym << 1, 0.2, 0.1, 1;
  EXPECT_THROW(DemandModel::composite(asym, Matrix::Zero(2, 2), vec({1, 1})), UsageError);
  Matrix traced(2, 2);
  traced << 1, 0, 0, 0;
  EXPECT_THROW(DemandModel::composite(Matrix::Identity(2, 2), traced, vec({1, 1})), UsageError);
}

TEST(Model, DimensionAndFiniteChecks) {
  const auto model = DemandModel::two_price(spec_of(2, 1, 0.5));
  EXPECT_THROW(eval_excess_demand(model, vec({1, 1, 1})), UsageError);
  EXPECT_THROW(eval_excess_demand(model, vec({NAN, 1})), NumericError);
}

TEST(Model, JacobianOfLinearModelIsTheMatrix) {
  const auto model = DemandModel::two_price(spec_of(2, 1, 0.5));
  EXPECT_EQ(model.jacobian(vec({3, -1})), oracle::two_price_matrix(2, 1, 0.5));
}

TEST(Model, FiniteDifferenceJacobianFallback) {
  DemandModel::Fields f;
  f.potential = [](const Vector& p) { return p[0] * p[0] * p[0] / 3.0; };
  f.potential_gradient = [](const Vector& p) { return vec({p[0] * p[0], 0.0}); };
  f.solenoidal = [](const Vector& p) { return vec({p[1], -p[0]}); };
  const DemandModel model(2, f);
  const Matrix j = model.jacobian(vec({0.5, 0.2}));
  Matrix expected(2, 2);
  expected << -1.0, 1.0, -1.0, 0.0;
  EXPECT_LT((j - expected).norm(), 1e-8);
}

TEST(Walras, RotationFieldSatisfiesIt) {
  const auto model = rotation_field(0.8);
  for (double th : {0.1, 0.7, 1.3}) {
    EXPECT_TRUE(verify_walras(model, vec({std::cos(th), std::sin(th)}), 1e-14));
  }
}

TEST(Walras, LinearizationViolatesItOffEquilibrium) {
  const auto model = DemandModel::two_price(spec_of(2, 1, 0.5, 1, 0));
  const Vector p = vec({0.8, 0.6});
  // xi = M (p - p_hat) with q = (-0.2, 0.6): (0.4 + 0.9, -0.1 - 1.2) = (1.3, -1.3)
  const Vector xi = eval_excess_demand(model, p);
  EXPECT_NEAR(xi[0], 1.3, 1e-15);
  EXPECT_NEAR(xi[1], -1.3, 1e-15);
  EXPECT_NEAR(p.dot(xi), 0.26, 1e-15);
  EXPECT_FALSE(verify_walras(model, p, 1e-9));
}

TEST(Walras, HoldsAtNormalizedEquilibrium) {
  const Vector p_hat = vec({3, 4}) / 5.0;
  const auto model = DemandModel::two_price(spec_of(2, 1, 0.5, p_hat[0], p_hat[1]));
  EXPECT_TRUE(verify_walras(model, p_hat, 1e-15));
}

TEST(Walras, RequiresUnitVector) {
  EXPECT_THROW(verify_walras(rotation_field(1), vec({1, 1}), 1e-9), UsageError);
}

TEST(Tangent, AxisProjection) {
  const Vector r = project_tangent(vec({1, 0}), vec({0.3, 0.4}));
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[1], 0.4);
}

TEST(Tangent, IdempotentOnTangentInput) {
  const Vector p = vec({0.6, 0.8});
  const Vector xi = vec({-0.8, 0.6}) * 0.37;
  EXPECT_LT((project_tangent(p, xi) - xi).norm(), 1e-16);
}

TEST(Tangent, AnnihilatesRadialInput) {
  const Vector p = vec({0.6, 0.8});
  EXPECT_LT(project_tangent(p, 2.5 * p).norm(), 1e-15);
}

TEST(Divergence, RotationIsDivergenceFree) {
  EXPECT_TRUE(verify_divergence_free(rotation_field(0.5), vec({0.3, 1.7}), 1e-4, 1e-6));
}

TEST(Divergence, RadialFieldIsNot) {
  DemandModel::Fields f;
  f.potential = [](const Vector&) { return 0.0; };
  f.potential_gradient = [](const Vector& p) { return Vector::Zero(p.size()).eval(); };
  f.solenoidal = [](const Vector& p) { return p; };
  const DemandModel model(2, f);
  EXPECT_NEAR(divergence_estimate(model, vec({0.4, 0.1}), 1e-4), 2.0, 1e-9);
  EXPECT_FALSE(verify_divergence_free(model, vec({0.4, 0.1}), 1e-4, 1e-6));
}

TEST(Divergence, SkewPartOfLinearModel) {
  Matrix m(3, 3);
  m << -1, 2, 0.3, -0.5, -2, 1, 0.1, 0.4, -3;
  const auto model = DemandModel::linear(m, vec({1, 1, 1}));
  EXPECT_TRUE(verify_divergence_free(model, vec({1.2, 0.7, 0.9})));
}
