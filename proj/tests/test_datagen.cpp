#include "oracles.hpp"

#include "tenring/datagen.hpp"
#include "tenring/error.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tenring;

namespace {

Matrix congruence_gram(std::size_t n, double gamma) {
    const auto k = static_cast<Eigen::Index>(n);
    Matrix c = Matrix::Constant(k, k, gamma);
    c.diagonal().setOnes();
    return c;
}

SynthSpec structured(CoreKind kind, std::uint64_t seed) {
    SynthSpec s;
    s.order = 3;
    s.dim = 100;
    s.true_rank = 5;
    s.core_kind = kind;
    s.seed = seed;
    return s;
}

}  // namespace

TEST(GaussianCores, ShapesAndDeterminism) {
    SynthSpec s;
    s.order = 4;
    s.dim = 6;
    s.true_rank = 3;
    s.seed = 5;
    const TrCores a = gaussian_cores(s), b = gaussian_cores(s);
    ASSERT_EQ(a.order(), 4u);
    for (std::size_t n = 0; n < 4; ++n) {
        EXPECT_EQ(a.core(n).dims(), (Dims{3, 6, 3}));
        EXPECT_EQ(a.core(n), b.core(n));
    }
    s.seed = 6;
    EXPECT_NE(gaussian_cores(s).core(0), a.core(0));
}

TEST(GaussianCores, SampleMean) {
    SynthSpec s;
    s.order = 4;
    s.dim = 1000;
    s.true_rank = 5;  // 4 * 25000 = 1e5 entries
    s.seed = 9;
    const TrCores c = gaussian_cores(s);
    double sum = 0, count = 0;
    for (const auto& g : c.cores())
        for (double v : g.data()) {
            sum += v;
            ++count;
        }
    EXPECT_LT(std::abs(sum / count), 3.0 / std::sqrt(count));
}

TEST(CongruentMatrix, OrthonormalAtZero) {
    const Matrix m = congruent_matrix(30, 7, 0.0, 1);
    EXPECT_LT((m.transpose() * m - Matrix::Identity(7, 7)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CongruentMatrix, GramStructure) {
    for (double gamma : {0.0, 0.5, 0.3141, 1 - 1e-4, 1 - 1e-7, 1 - 1e-10}) {
        const Matrix m = congruent_matrix(100, 25, gamma, 2);
        const Matrix g = m.transpose() * m;
        EXPECT_LT((g - congruence_gram(25, gamma)).cwiseAbs().maxCoeff(), 1e-10) << gamma;
        for (Eigen::Index j = 0; j < 25; ++j) EXPECT_NEAR(m.col(j).norm(), 1.0, 1e-12);
    }
}

TEST(CongruentMatrix, Errors) {
    EXPECT_THROW(congruent_matrix(4, 5, 0.5, 0), DimensionError);
    EXPECT_THROW(congruent_matrix(10, 5, 1.0, 0), std::invalid_argument);
    EXPECT_THROW(congruent_matrix(10, 5, -0.1, 0), std::invalid_argument);
}

TEST(CoreReshape, RoundTripAndMapping) {
    std::mt19937_64 rng(3);
    const Matrix m = tenring::testing::random_matrix(100, 25, rng);
    const DenseTensor g = matrix_to_core(m, 5);
    EXPECT_EQ(g.dims(), (Dims{5, 100, 5}));
    EXPECT_EQ(core_to_matrix(g), m);
    EXPECT_EQ(g({2, 17, 3}), m(17, 2 + 5 * 3));
    EXPECT_THROW(matrix_to_core(m, 4), DimensionError);
}

TEST(CongruentCores, ShapesSeedsAndGram) {
    SynthSpec s = structured(CoreKind::congruent, 1);
    s.gamma = 0.9;
    const TrCores a = congruent_cores(s);
    s.seed = 2;
    const TrCores b = congruent_cores(s);
    EXPECT_NE(a.core(0), b.core(0));
    for (const TrCores* c : {&a, &b}) {
        for (const auto& g : c->cores()) {
            EXPECT_EQ(g.dims(), (Dims{5, 100, 5}));
            const Matrix m = core_to_matrix(g);
            EXPECT_LT((m.transpose() * m - congruence_gram(25, 0.9)).cwiseAbs().maxCoeff(), 1e-10);
        }
    }
    const SynthResult r = synthesize(s);
    EXPECT_EQ(r.tensor.dims(), (Dims{100, 100, 100}));
}

TEST(CongruentCores, NonDefaultShape) {
    SynthSpec s = structured(CoreKind::congruent, 1);
    s.dim = 12;
    s.true_rank = 3;
    s.gamma = 0.5;
    EXPECT_EQ(congruent_cores(s).core(1).dims(), (Dims{3, 12, 3}));
    s.dim = 8;  // 8 rows cannot hold 9 congruent unit columns with gamma < 1
    EXPECT_THROW(congruent_cores(s), DimensionError);
}

TEST(StudentT, DeterminismAndShape) {
    SynthSpec s = structured(CoreKind::student_t, 4);
    s.theta = 0.9;
    const TrCores a = student_t_cores(s), b = student_t_cores(s);
    EXPECT_EQ(a.core(2), b.core(2));
    EXPECT_EQ(a.core(2).dims(), (Dims{5, 100, 5}));
}

TEST(StudentT, IndependentColumnsAtThetaZero) {
    // Large dof makes the t draw nearly Gaussian.
    const Matrix m = student_t_matrix(10000, 6, 0.0, 1e6, 5);
    const Matrix centered = m.rowwise() - m.colwise().mean();
    const Matrix cov = centered.transpose() * centered / 9999.0;
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < i; ++j) EXPECT_LT(std::abs(cov(i, j) / std::sqrt(cov(i, i) * cov(j, j))), 0.1);
}

TEST(StudentT, AutocorrelationFollowsTheta) {
    const double theta = 0.8;
    const Matrix m = student_t_matrix(40000, 4, theta, 1e6, 6);
    const Matrix cov = m.transpose() * m / 40000.0;
    for (Eigen::Index lag = 1; lag < 4; ++lag) {
        const double rho = cov(0, lag) / std::sqrt(cov(0, 0) * cov(lag, lag));
        EXPECT_NEAR(rho, std::pow(theta, static_cast<double>(lag)), 0.03) << lag;
    }
}

TEST(StudentT, HeavyTailsAtOneDof) {
    const Matrix m = student_t_matrix(20000, 1, 0.0, 1.0, 7);
    // Cauchy: P(|t| > 10) = 1 - 2 atan(10) / pi ~ 0.0635.
    const double frac = (m.array().abs() > 10.0).cast<double>().mean();
    EXPECT_NEAR(frac, 0.0635, 0.01);
}

TEST(StudentT, Errors) {
    EXPECT_THROW(student_t_matrix(10, 3, 1.0, 1.0, 0), std::invalid_argument);
    EXPECT_THROW(student_t_matrix(10, 3, 0.5, 0.5, 0), std::invalid_argument);
}

TEST(AddNoise, ZeroEtaIsIdentity) {
    std::mt19937_64 rng(8);
    const DenseTensor x = tenring::testing::random_tensor({4, 5, 6}, rng);
    EXPECT_EQ(add_noise(x, 0.0, 3), x);
}

TEST(AddNoise, RelativePerturbationIsEta) {
    std::mt19937_64 rng(9);
    const DenseTensor x = tenring::testing::random_tensor({10, 10, 10}, rng);
    for (double eta : {1e-1, 1e-4, 1e-10}) {
        const DenseTensor y = add_noise(x, eta, 4);
        EXPECT_NEAR(frobenius_norm(y - x) / frobenius_norm(x), eta, 1e-12 * std::max(1.0, eta));
        EXPECT_EQ(add_noise(x, eta, 4), y);
        EXPECT_NE(add_noise(x, eta, 5), y);
    }
    EXPECT_THROW(add_noise(x, -1.0, 0), std::invalid_argument);
}

TEST(Synthesize, NoiselessMatchesTruth) {
    SynthSpec s;
    s.order = 3;
    s.dim = 7;
    s.true_rank = 2;
    s.seed = 3;
    const SynthResult r = synthesize(s);
    EXPECT_EQ(r.tensor, tr_reconstruct(r.truth));
}

TEST(SynthSpec, Validation) {
    SynthSpec s;
    s.order = 1;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    s.order = 3;
    s.core_kind = CoreKind::student_t;
    s.theta = 1.0;
    EXPECT_THROW(s.validate(), std::invalid_argument);
    EXPECT_EQ(parse_core_kind("congruent"), CoreKind::congruent);
    EXPECT_THROW(parse_core_kind("uniform"), std::invalid_argument);
}
