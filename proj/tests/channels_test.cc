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

#include "cvsq/channels.h"
#include "test_util.h"

namespace cvsq {
namespace {

TEST(Kraus, ZeroLossIsIdentity) {
    auto k = loss_kraus({0.0, -1, {}}, 8);
    ASSERT_GE(k.size(), 1u);
    EXPECT_LT((k[0].matrix() - Mat::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-15);
    for (size_t n = 1; n < k.size(); n++) {
        EXPECT_LT(k[n].matrix().cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Kraus, Completeness) {
    for (double l : {0.05, 0.3, 0.9}) {
        for (int c : {4, 20, 60}) {
            auto k = loss_kraus({l, -1, {}}, c);
            Mat s = Mat::Zero(c, c);
            for (const auto &e : k) {
                s += e.matrix().adjoint() * e.matrix();
            }
            EXPECT_LT((s - Mat::Identity(c, c)).cwiseAbs().maxCoeff(), 1e-10) << l << " " << c;
        }
    }
}

TEST(Kraus, InvalidLoss) {
    EXPECT_THROW(loss_kraus({1.0, -1, {}}, 5), Error);
    EXPECT_THROW(loss_kraus({-0.1, -1, {}}, 5), Error);
}

TEST(Loss, SinglePhotonMean) {
    DensityOperator out = apply_loss(FockVector::basis(10, {1}), {0.3, -1, {}});
    EXPECT_NEAR(expectation(out, number_operator(10)).real(), 0.7, 1e-12);
}

TEST(Loss, ZeroLossIsExact) {
    DensityOperator rho = testing::random_density(9, 1, 4);
    DensityOperator out = apply_loss(rho, {0.0, -1, {}});
    EXPECT_EQ(out.matrix(), rho.matrix());
}

TEST(Loss, CoherentStaysCoherent) {
    const int c = 30;
    DensityOperator out = apply_loss(testing::coherent(0.8, c), {0.36, -1, {}});
    EXPECT_GE(fidelity(out, testing::coherent(0.64, c)), 1 - 1e-8);
}

TEST(Loss, TracePreservedAndPositive) {
    for (uint64_t seed = 0; seed < 5; seed++) {
        DensityOperator rho = testing::random_density(12, 1, seed);
        DensityOperator out = apply_loss(rho, {0.2, -1, {}});
        EXPECT_NEAR(out.trace(), 1, 1e-10);
        EXPECT_GE(HermitianSpectrum(out.matrix()).values().minCoeff(), -1e-9);
        auto n = number_operator(12);
        EXPECT_LE(expectation(out, n).real(), expectation(rho, n).real() + 1e-12);
    }
    DensityOperator two = testing::random_density(6, 2, 9);
    EXPECT_NEAR(apply_loss(two, {0.2, -1, {}}).trace(), 1, 1e-10);
}

TEST(Loss, ModeOrderIndependent) {
    DensityOperator rho = testing::random_density(7, 2, 21);
    DensityOperator a = apply_loss(apply_loss(rho, {0.1, -1, {0}}), {0.25, -1, {1}});
    DensityOperator b = apply_loss(apply_loss(rho, {0.25, -1, {1}}), {0.1, -1, {0}});
    EXPECT_LT((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Loss, ModeOutOfRange) {
    DensityOperator rho = testing::random_density(4, 1, 1);
    EXPECT_THROW(apply_loss(rho, {0.1, -1, {1}}), Error);
}

}  // namespace
}  // namespace cvsq
