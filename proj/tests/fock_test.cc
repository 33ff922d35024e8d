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

#include "cvsq/fock.h"
#include "test_util.h"

namespace cvsq {
namespace {

TEST(Ladder, SingleEntryAtCutoffTwo) {
    auto [a, ad] = build_ladder(2);
    EXPECT_DOUBLE_EQ(a.matrix()(0, 1).real(), 1.0);
    EXPECT_EQ((a.matrix().array().abs() > 0).count(), 1);
}

TEST(Ladder, SqrtTwoEntry) {
    auto [a, ad] = build_ladder(3);
    EXPECT_NEAR(a.matrix()(1, 2).real(), std::sqrt(2.0), 1e-15);
}

TEST(Ladder, CommutatorDiagonalLaw) {
    for (int n : {2, 5, 17, 60}) {
        auto [a, ad] = build_ladder(n);
        Mat c = a.matrix() * ad.matrix() - ad.matrix() * a.matrix();
        for (int k = 0; k < n - 1; k++) {
            EXPECT_NEAR(c(k, k).real(), 1.0, 1e-12);
        }
        EXPECT_NEAR(c(n - 1, n - 1).real(), -(n - 1.0), 1e-12);
        Mat off = c;
        off.diagonal().setZero();
        EXPECT_LT(off.cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Ladder, NumberOperatorDiagonal) {
    DenseOperator n = number_operator(12);
    for (int k = 0; k < 12; k++) {
        EXPECT_NEAR(n.matrix()(k, k).real(), k, 1e-12);
    }
    Mat off = n.matrix();
    off.diagonal().setZero();
    EXPECT_LT(off.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Quadratures, VacuumMoments) {
    auto [x, p] = quadratures(20);
    FockVector vac = FockVector::vacuum(20);
    EXPECT_NEAR(expectation(vac, x).real(), 0, 1e-15);
    EXPECT_NEAR(expectation(vac, x * x).real(), 0.5, 1e-14);
    EXPECT_NEAR(variance(vac, x), 0.5, 1e-14);
}

TEST(Quadratures, CanonicalCommutatorBelowTopLevels) {
    const int n = 30;
    auto [x, p] = quadratures(n);
    Mat c = x.matrix() * p.matrix() - p.matrix() * x.matrix();
    Mat expect = cplx(0, 1) * Mat::Identity(n - 2, n - 2);
    EXPECT_LT((c.topLeftCorner(n - 2, n - 2) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Quadratures, CoherentMean) {
    FockVector c = testing::coherent(1.0, 40);
    auto [x, p] = quadratures(40);
    EXPECT_NEAR(expectation(c, x).real(), std::sqrt(2.0), 1e-10);
}

TEST(Exponential, ZeroIsIdentity) {
    DenseOperator z(6, 1, Mat::Zero(6, 6));
    EXPECT_LT((matrix_exponential(z).matrix() - Mat::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Exponential, ParityOperator) {
    DenseOperator n = number_operator(9);
    Mat e = matrix_exponential(Mat(cplx(0, M_PI) * n.matrix()));
    for (int k = 0; k < 9; k++) {
        EXPECT_NEAR(e(k, k).real(), k % 2 == 0 ? 1 : -1, 1e-12);
        EXPECT_NEAR(e(k, k).imag(), 0, 1e-12);
    }
}

TEST(Exponential, TaylorOrder) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd(0, 1);
    Mat a(8, 8);
    for (int i = 0; i < 8; i++) {
        for (int j = 0; j < 8; j++) {
            a(i, j) = cplx(nd(rng), nd(rng));
        }
    }
    const double eps = 1e-3;
    Mat ea = matrix_exponential(Mat(eps * a));
    Mat taylor = Mat::Identity(8, 8) + eps * a + eps * eps * a * a / 2.0;
    double err = (ea - taylor).cwiseAbs().maxCoeff();
    double scale = (a * a * a).cwiseAbs().maxCoeff() / 6;
    EXPECT_LT(err, 2 * scale * eps * eps * eps);
}

TEST(Exponential, AntiHermitianIsUnitaryOnFullMatrix) {
    auto [x, p] = quadratures(40);
    Mat gen = cplx(0, 1) * (x.matrix() * x.matrix() * x.matrix() + 0.3 * p.matrix());
    bool unitary = false;
    Mat u = matrix_exponential(gen, &unitary);
    EXPECT_TRUE(unitary);
    EXPECT_LT((u.adjoint() * u - Mat::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Fidelity, Examples) {
    FockVector a = FockVector::vacuum(30);
    EXPECT_NEAR(fidelity(a, a), 1, 1e-15);
    EXPECT_NEAR(fidelity(a, FockVector::basis(30, {1})), 0, 1e-15);
    EXPECT_NEAR(fidelity(a, testing::coherent(0.5, 30)), std::exp(-0.25), 1e-10);
}

TEST(Fidelity, MixedReducesToPure) {
    FockVector c = testing::coherent(cplx(0.3, -0.2), 15);
    DensityOperator rho = testing::random_density(15, 1, 3);
    DensityOperator pure = DensityOperator::from_ket(c);
    EXPECT_NEAR(fidelity(rho, pure), fidelity(rho, c), 1e-8);
    EXPECT_NEAR(fidelity(rho, rho), 1, 1e-8);
}

TEST(Wigner, VacuumOriginAndNormalization) {
    WignerGridSpec spec;
    spec.resolution = 121;
    PhaseSpaceGrid g = wigner(FockVector::vacuum(20), spec);
    double total = 0;
    double best = -1;
    int bi = 0, bj = 0;
    for (int i = 0; i < g.resolution; i++) {
        for (int j = 0; j < g.resolution; j++) {
            total += g.at(i, j);
            if (g.at(i, j) > best) {
                best = g.at(i, j);
                bi = i;
                bj = j;
            }
        }
    }
    EXPECT_NEAR(g.x(bi), 0, 1e-12);
    EXPECT_NEAR(g.p(bj), 0, 1e-12);
    EXPECT_NEAR(best, 1 / M_PI, 1e-10);
    const double dx = g.x(1) - g.x(0), dp = g.p(1) - g.p(0);
    EXPECT_NEAR(total * dx * dp, 1, 1e-3);
}

TEST(Wigner, SqueezedOriginValue) {
    FockVector s = build_resource_state({ResourceKind::SqueezedVacuum, 0.5, std::nullopt, std::nullopt}, 60).state;
    WignerGridSpec spec;
    spec.resolution = 3;
    spec.x_min = spec.p_min = -1;
    spec.x_max = spec.p_max = 1;
    EXPECT_NEAR(wigner(s, spec).at(1, 1), 1 / M_PI, 1e-8);
}

TEST(States, NormalizationContracts) {
    EXPECT_THROW(FockVector(3, 2, Vec::Zero(8)), Error);
    FockVector z(3, 1, Vec::Zero(3));
    EXPECT_THROW(z.normalized(), Error);
    EXPECT_TRUE(FockVector::vacuum(4, 2).is_normalized());
    EXPECT_EQ(FockVector::vacuum(4, 3).dimension(), 64u);
}

TEST(Operators, AdjointInvolutionAndIdentityExpectation) {
    DensityOperator rho = testing::random_density(6, 2, 11);
    DenseOperator m(6, 2, rho.matrix() * cplx(0.5, 2.0));
    EXPECT_EQ(m.adjoint().adjoint().matrix(), m.matrix());
    FockVector psi = testing::coherent(0.4, 6);
    EXPECT_NEAR(expectation(psi, DenseOperator::identity(6)).real(), 1, 1e-14);
}

TEST(Operators, VarianceNonNegative) {
    auto [x, p] = quadratures(25);
    for (uint64_t seed = 0; seed < 10; seed++) {
        DensityOperator rho = testing::random_density(25, 1, seed);
        EXPECT_GT(variance(rho, x), -1e-10);
        EXPECT_GT(variance(rho, p * p), -1e-10);
    }
}

TEST(Operators, LowBlockComparison) {
    Mat a = Mat::Identity(9, 9), b = a;
    b(8, 8) = 3;
    EXPECT_EQ(low_block_levels(9), 6);
    EXPECT_LT(low_block_max_error(a, b, 9, 1, 6), 1e-15);
    EXPECT_NEAR(low_block_max_error(a, b, 9, 1, 9), 2, 1e-15);
}

TEST(Operators, ModeMajorKron) {
    Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
    a(1, 0) = 1;
    b(0, 1) = 1;
    Mat k = kron(a, b);
    // |n1 n2> at index n1 * cutoff + n2.
    EXPECT_EQ(k(2, 1), cplx(1, 0));
}

TEST(Operators, ReducedDensityOfProduct) {
    FockVector a = testing::coherent(0.3, 8), b = testing::coherent(cplx(0, 0.5), 8);
    Vec v(64);
    for (int i = 0; i < 8; i++) {
        v.segment(i * 8, 8) = a[i] * b.amplitudes();
    }
    Mat r1 = reduced_density(v, 8, 1);
    EXPECT_LT((r1 - b.amplitudes() * b.amplitudes().adjoint()).cwiseAbs().maxCoeff(), 1e-14);
}

}  // namespace
}  // namespace cvsq
