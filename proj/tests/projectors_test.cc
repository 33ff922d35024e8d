// Copyright 2026 The cvsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "cvsq/analytics.h"
#include "cvsq/projectors.h"
#include "test_util.h"

namespace cvsq {
namespace {

FockVector squeezed(double r, int c) {
    return build_resource_state({ResourceKind::SqueezedVacuum, r, std::nullopt, std::nullopt}, c).state;
}

TEST(DeltaR, Examples) {
    EXPECT_NEAR(delta_r_from_gamma(0.5, 0), 0.5 * std::log(2.0), 1e-15);
    EXPECT_NEAR(delta_r_from_gamma(0.5, 0), 0.34657, 1e-5);
    EXPECT_LE(delta_r_from_gamma(1e12, 0), 1e-12);
    for (double g : {0.01, 0.5, 3.0}) {
        for (double r : {-0.5, 0.0, 0.8}) {
            EXPECT_NEAR(gamma_from_delta_r(delta_r_from_gamma(g, r), r), g, 1e-12 * g);
        }
    }
    EXPECT_THROW(delta_r_from_gamma(0, 0), Error);
    EXPECT_THROW(gamma_from_delta_r(-0.1, 0), Error);
}

TEST(Grid, SinglePoint) {
    GaussianGrid g = discretize_gaussian(0.5, 1);
    ASSERT_EQ(g.points.size(), 1u);
    EXPECT_EQ(g.points[0], 0);
    EXPECT_NEAR(g.weights[0], std::sqrt(0.5 / M_PI) * g.spacing(), 1e-15);
}

TEST(Grid, FineGridMassAndSymmetry) {
    GaussianGrid g = discretize_gaussian(0.5, 201);
    EXPECT_NEAR(g.weight_sum(), 1, 1e-6);
    for (size_t i = 0; i < g.points.size(); i++) {
        size_t j = g.points.size() - 1 - i;
        EXPECT_EQ(g.weights[i], g.weights[j]);
        EXPECT_NEAR(g.points[i], -g.points[j], 1e-15);
    }
}

TEST(Grid, PaperLiteralSpan) {
    const double gamma = 2;
    GaussianGrid g = discretize_gaussian(gamma, 30, SpanPolicy::PaperLiteral);
    double half = 2 * std::sqrt(gamma / 2);
    EXPECT_LE(g.points.back(), half + 1e-12);
    EXPECT_GT(g.points.back(), half - g.spacing());
}

TEST(ProjectSq, VacuumToSqueezed) {
    const int c = 60;
    const double dr = 0.5 * std::log(2.0);
    SmearedProjector p = build_smeared_projector(ProjectorKind::Sq, gamma_from_delta_r(dr, 0), {},
                                                 discretize_gaussian(gamma_from_delta_r(dr, 0), 201));
    PureProjection out = apply_projector(p, FockVector::vacuum(c));
    EXPECT_GE(fidelity(out.state.normalized(), squeezed(dr, c)), 1 - 1e-6);
    EXPECT_NEAR(out.probability, std::exp(-dr), 1e-4);
    EXPECT_NEAR(out.probability, 0.70711, 1e-4);
}

TEST(ProjectSq, AmplitudeLawFromSqueezedInput) {
    const int c = 60;
    const double r = 0.3454, dr = 0.5 * std::log(2.0);
    double gamma = gamma_from_delta_r(dr, r);
    SmearedProjector p = build_smeared_projector(ProjectorKind::Sq, gamma, {}, discretize_gaussian(gamma, 201));
    PureProjection out = apply_projector(p, squeezed(r, c));
    EXPECT_GE(fidelity(out.state.normalized(), squeezed(r + dr, c)), 1 - 1e-6);
    EXPECT_NEAR(std::sqrt(out.probability), std::exp(-dr / 2), 1e-4);
}

TEST(Projector, IdentityLimit) {
    const int c = 20;
    const double gamma = 1e12;
    GaussianGrid grid = discretize_gaussian(gamma, 11);
    ProjectorParams params{1.0, 0.1};
    for (ProjectorKind k : {ProjectorKind::Sq, ProjectorKind::Asq, ProjectorKind::CPS}) {
        ProjectorParams pp;
        if (k == ProjectorKind::CPS) {
            pp.eta = 0.1;
        }
        Mat m = dense_sum(build_smeared_projector(k, gamma, pp, grid), c).matrix();
        EXPECT_LT(low_block_max_error(m, Mat::Identity(c, c), c, 1, low_block_levels(c)), 1e-5)
            << projector_kind_name(k);
    }
    for (ProjectorKind k : {ProjectorKind::EPR, ProjectorKind::Cluster}) {
        ProjectorParams pp;
        if (k == ProjectorKind::Cluster) {
            pp.g = 1;
        }
        const int c2 = 8;
        Mat m = dense_sum(build_smeared_projector(k, gamma, pp, grid), c2).matrix();
        EXPECT_LT(low_block_max_error(m, Mat::Identity(c2 * c2, c2 * c2), c2, 2, low_block_levels(c2)), 1e-5)
            << projector_kind_name(k);
    }
    (void)params;
}

TEST(Projector, IdentityOperatorProbability) {
    PureProjection out = apply_projector(DenseOperator::identity(10), testing::coherent(0.5, 10));
    EXPECT_NEAR(out.probability, 1, 1e-14);
}

TEST(Projector, ClusterDenseSumMatchesExponential) {
    const int c = 14;
    const double gamma = 0.5;
    ProjectorParams pp;
    pp.g = 1;
    SmearedProjector p = build_smeared_projector(ProjectorKind::Cluster, gamma, pp, discretize_gaussian(gamma, 61));
    EXPECT_TRUE(p.is_separable());
    Mat sum = dense_sum(p, c).matrix();
    Mat exact = exact_projector_form(ProjectorKind::Cluster, gamma, pp, c, c + 16).matrix();
    EXPECT_LT(low_block_max_error(sum, exact, c, 2, 6), 1e-4);
}

TEST(Projector, ClusterProbabilityOnClusterState) {
    const int c = 36;
    const double dr = 0.5 * std::log(2.0);
    double gamma = gamma_from_delta_r(dr, 0);
    ProjectorParams pp;
    pp.g = 1;
    FockVector s = build_resource_state({ResourceKind::Cluster, 0, std::nullopt, 1.0}, c).state;
    SmearedProjector p = build_smeared_projector(ProjectorKind::Cluster, gamma, pp, discretize_gaussian(gamma, 41));
    PureProjection out = apply_projector(p, s);
    EXPECT_NEAR(out.probability, 0.5, 1e-3);
}

TEST(Projector, SeparableTermsAreDisplacements) {
    ProjectorParams pp;
    pp.g = 0.7;
    for (ProjectorKind k : {ProjectorKind::EPR, ProjectorKind::Cluster}) {
        SmearedProjector p = build_smeared_projector(k, 0.5, pp, discretize_gaussian(0.5, 5));
        EXPECT_EQ(p.modes, 2);
        for (const ProjectorTerm &t : p.terms) {
            ASSERT_EQ(t.factors.size(), 2u);
            for (const auto &seq : t.factors) {
                for (const GateSpec &g : seq) {
                    EXPECT_EQ(g.kind, GateKind::Displacement);
                }
            }
        }
    }
}

TEST(Projector, MissingSecondaryParameter) {
    GaussianGrid grid = discretize_gaussian(0.5, 5);
    EXPECT_THROW(build_smeared_projector(ProjectorKind::Cluster, 0.5, {}, grid), Error);
    EXPECT_THROW(build_smeared_projector(ProjectorKind::CPS, 0.5, {}, grid), Error);
}

TEST(ExactForm, SqEigenvaluesOnWindow) {
    const int c = 60;
    const double gamma = 0.5;
    // At working cutoff c the form is a function of the truncated x itself.
    Mat m = exact_projector_form(ProjectorKind::Sq, gamma, {}, c, c).matrix();
    auto [x, p] = quadratures(c);
    HermitianSpectrum sx(x.matrix());
    const double window = 0.6 * std::sqrt(2.0 * c);
    int checked = 0;
    for (int k = 0; k < c; k++) {
        double x0 = sx.values()[k];
        if (std::abs(x0) > window) {
            continue;
        }
        Vec v = sx.vectors().col(k);
        double lambda = (v.adjoint() * m * v)(0, 0).real();
        EXPECT_NEAR(lambda, std::exp(-x0 * x0 / (4 * gamma)), 1e-6) << x0;
        checked++;
    }
    EXPECT_GT(checked, 10);
}

TEST(ExactForm, HermitianPositiveAndCpsReduction) {
    const int c = 30;
    ProjectorParams pp;
    pp.eta = 0.2;
    Mat m = exact_projector_form(ProjectorKind::CPS, 0.7, pp, c).matrix();
    EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(HermitianSpectrum(m).values().minCoeff(), -1e-10);
    pp.eta = 0;
    Mat cps0 = exact_projector_form(ProjectorKind::CPS, 0.7, pp, c).matrix();
    Mat asq = exact_projector_form(ProjectorKind::Asq, 0.7, {}, c).matrix();
    EXPECT_LT((cps0 - asq).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Factorization, ZeroShiftIsIdentity) {
    GaussianFactorization f = cps_stabilizer_factorization(0, 0.3);
    EXPECT_EQ(f.alpha, cplx(0, 0));
    EXPECT_NEAR(f.phi1, M_PI / 4, 1e-15);
    EXPECT_NEAR(f.r, 0, 1e-15);
    EXPECT_NEAR(f.phi2, -M_PI / 4, 1e-15);
    TermEvaluator ev(20, default_working_cutoff(20));
    EXPECT_LT((ev.matrix(f.sequence()) - Mat::Identity(20, 20)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Factorization, GaussianLimitIsDisplacement) {
    const int c = 30;
    GaussianFactorization f = cps_stabilizer_factorization(1, 0);
    TermEvaluator ev(c, default_working_cutoff(c));
    Mat m = std::polar(1.0, f.phase) * ev.matrix(f.sequence());
    // exp(-i p) = D(1/sqrt2) with x = (a + a^dagger)/sqrt2.
    EXPECT_LT((m - displacement_elements(1 / std::sqrt(2.0), c, c)).cwiseAbs().maxCoeff(), 1e-10);
}

Mat stabilizer_oracle(double x0, double eta, int c) {
    const int big = 200;
    auto [xo, po] = quadratures(big);
    Mat gen = cplx(0, -x0) * (po.matrix() - eta * xo.matrix() * xo.matrix());
    Mat u = matrix_exponential(gen);
    return u.topLeftCorner(c, c);
}

TEST(Factorization, MatchesStabilizerOnLowBlock) {
    const int c = 60;
    GaussianFactorization f = cps_stabilizer_factorization(1.5, 0.3);
    TermEvaluator ev(c, 200);
    Mat m = std::polar(1.0, f.phase) * ev.matrix(f.sequence());
    EXPECT_LT(low_block_max_error(m, stabilizer_oracle(1.5, 0.3, c), c, 1, 40), 1e-6);
}

TEST(Factorization, SqueezeMinimizedAtOrigin) {
    for (double eta : {0.1, 0.3}) {
        double r0 = std::abs(cps_stabilizer_factorization(0, eta).r);
        EXPECT_EQ(r0, 0);
        for (double x0 : {-2.0, -0.5, 0.3, 1.0, 2.0}) {
            EXPECT_GT(std::abs(cps_stabilizer_factorization(x0, eta).r), r0);
        }
    }
}

TEST(ProjectCps, ProbabilityIndependentOfEta) {
    const int c = 60;
    const double dr = 0.5 * std::log(2.0);
    double gamma = gamma_from_delta_r(dr, 0);
    std::vector<double> q;
    for (double eta : {0.0, 0.1, 0.2}) {
        FockVector s = build_resource_state({ResourceKind::CPS, 0, eta, std::nullopt}, c).state;
        ProjectorParams pp;
        pp.eta = eta;
        SmearedProjector p = build_smeared_projector(ProjectorKind::CPS, gamma, pp, discretize_gaussian(gamma, 101));
        q.push_back(apply_projector(p, s).probability);
    }
    EXPECT_NEAR(q[0], q[1], 1e-3);
    EXPECT_NEAR(q[0], q[2], 1e-3);
    EXPECT_NEAR(q[0], std::exp(-dr), 1e-2);
}

TEST(Projector, DenseSumConvergesWithPointCount) {
    const int c = 30;
    const double gamma = 0.5;
    Mat exact = exact_projector_form(ProjectorKind::Sq, gamma, {}, c).matrix();
    double prev = 1e9;
    for (int n : {5, 11, 21, 41, 81}) {
        GaussianGrid g = discretize_gaussian(gamma, n);
        Mat sum = dense_sum(build_smeared_projector(ProjectorKind::Sq, gamma, {}, g), c).matrix();
        double err = low_block_max_error(sum, exact, c, 1, low_block_levels(c));
        // Tolerance covers the truncation floor both forms share.
        EXPECT_LE(err, prev + 1e-6) << n;
        prev = err;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(Projector, MixedStateProbabilityMatchesPure) {
    const int c = 30;
    double gamma = 0.5;
    SmearedProjector p = build_smeared_projector(ProjectorKind::Sq, gamma, {}, discretize_gaussian(gamma, 61));
    FockVector psi = testing::coherent(cplx(0.2, 0.4), c);
    PureProjection a = apply_projector(p, psi);
    MixedProjection b = apply_projector(p, DensityOperator::from_ket(psi));
    EXPECT_NEAR(a.probability, b.probability, 1e-12);
}

}  // namespace
}  // namespace cvsq
