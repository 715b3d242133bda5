#include <random>

#include <gtest/gtest.h>

#include "rhc/estimator.hpp"

namespace rhc {
namespace {

Matrix case1_regressor() {
    Matrix D(3, 3);
    D << 1, 0, 0, 0, -50, 0, 0, 0, 50;
    return D;
}

TEST(EstimatorRhs, ZeroErrorFreezesEstimate) {
    EXPECT_EQ(estimator_rhs(case1_regressor(), Vector::Zero(3)), Vector::Zero(3));
}

TEST(EstimatorRhs, InitialCaseOneError) {
    const Vector rate = estimator_rhs(case1_regressor(), Vector{{-800.0, 40.0, 19000.0}});
    EXPECT_EQ(rate, (Vector{{800.0, 2000.0, -950000.0}}));
}

TEST(EstimatorRhs, SingleColumnCoupling) {
    EXPECT_EQ(estimator_rhs(case1_regressor(), Vector{{1.0, 0.0, 0.0}}), (Vector{{-1.0, 0.0, 0.0}}));
}

TEST(EstimatorRhs, DimensionMismatch) {
    EXPECT_THROW((void)estimator_rhs(case1_regressor(), Vector::Zero(2)), std::invalid_argument);
}

TEST(EstimatorRhs, LinearInError) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(-10.0, 10.0);
    for (int k = 0; k < 100; ++k) {
        Matrix D(3, 2);
        for (Eigen::Index i = 0; i < D.size(); ++i) D.data()[i] = unit(rng);
        const Vector e1{{unit(rng), unit(rng), unit(rng)}};
        const Vector e2{{unit(rng), unit(rng), unit(rng)}};
        const double a = unit(rng);
        const double b = unit(rng);
        const Vector lhs = estimator_rhs(D, a * e1 + b * e2);
        const Vector rhs = a * estimator_rhs(D, e1) + b * estimator_rhs(D, e2);
        EXPECT_LE((lhs - rhs).norm(), 1e-12 * (1.0 + rhs.norm()));
    }
}

TEST(PeWindow, IdentityIntegrandOverUnitWindow) {
    PeWindow w(1.0);
    for (int i = 0; i <= 100; ++i) w.push(0.01 * i, Matrix::Identity(3, 3));
    const PeMetric m = w.metric();
    EXPECT_FALSE(m.empty);
    EXPECT_NEAR(m.value, 1.0, 1e-12);
}

TEST(PeWindow, NoExcitation) {
    PeWindow w(1.0);
    for (int i = 0; i <= 100; ++i) w.push(0.01 * i, Matrix::Zero(3, 3));
    EXPECT_EQ(w.metric().value, 0.0);
}

TEST(PeWindow, EmptyWindowIsFlagged) {
    const PeWindow w(5.0);
    const PeMetric m = w.metric();
    EXPECT_TRUE(m.empty);
    EXPECT_EQ(m.value, 0.0);
}

TEST(PeWindow, KeepsOnlyTrailingSpan) {
    PeWindow w(1.0);
    for (int i = 0; i <= 500; ++i) w.push(0.01 * i, Matrix::Identity(2, 2));
    EXPECT_NEAR(w.covered(), 1.0, 1e-9);
    EXPECT_NEAR(w.metric().value, 1.0, 1e-9);
}

TEST(PeWindow, NonNegativeForRandomRegressors) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-3.0, 3.0);
    PeWindow w(0.5);
    for (int i = 0; i < 300; ++i) {
        Matrix D(3, 2);
        for (Eigen::Index k = 0; k < D.size(); ++k) D.data()[k] = unit(rng);
        w.push(0.01 * i, D);
        EXPECT_GE(w.metric().value, 0.0);
    }
}

}  // namespace
}  // namespace rhc
