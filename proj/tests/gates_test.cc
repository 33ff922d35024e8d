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
#include "cvsq/gates.h"
#include "test_util.h"

namespace cvsq {
namespace {

double max_abs(const Mat &m) {
    return m.cwiseAbs().maxCoeff();
}

TEST(BuildGate, TrivialParametersGiveIdentity) {
    EXPECT_LT(max_abs(build_gate(GateSpec::displacement(0), 12).matrix() - Mat::Identity(12, 12)), 1e-14);
    EXPECT_LT(max_abs(build_gate(GateSpec::cz(0), 6).matrix() - Mat::Identity(36, 36)), 1e-14);
}

TEST(BuildGate, DisplacementMeanPhotonNumber) {
    const int c = 40;
    FockVector out = build_gate(GateSpec::displacement(0.7), c).apply(FockVector::vacuum(c));
    EXPECT_NEAR(expectation(out, number_operator(c)).real(), 0.49, 1e-8);
}

TEST(BuildGate, DisplacementMatchesExactElementsOnLowBlock) {
    const int c = 60;
    Mat d = build_gate(GateSpec::displacement(cplx(0.4, -0.3)), c).matrix();
    Mat exact = displacement_elements(cplx(0.4, -0.3), c, c);
    EXPECT_LT(low_block_max_error(d, exact, c, 1, low_block_levels(c)), 1e-10);
}

TEST(BuildGate, SqueezedVariance) {
    const double r = std::log(10.0) * 3 / 20;
    FockVector s = build_resource_state({ResourceKind::SqueezedVacuum, r, std::nullopt, std::nullopt}, 60).state;
    auto [x, p] = quadratures(60);
    EXPECT_NEAR(variance(s, x), 0.25059, 1e-5);
    EXPECT_NEAR(variance(s, x), std::exp(-2 * r) / 2, 1e-10);
}

TEST(BuildGate, InvalidSpecs) {
    EXPECT_THROW(build_gate(GateSpec::cz(1, 0, 0), 4), Error);
    EXPECT_THROW(build_gate(GateSpec::squeeze(0.1, 2), 4, 2), Error);
    EXPECT_THROW(GateSpec::displacement(cplx(NAN, 0)).validate(1), Error);
}

TEST(BuildGate, AllKindsUnitary) {
    const int c = 12;
    std::vector<GateSpec> specs = {GateSpec::displacement(cplx(0.3, 0.8)), GateSpec::squeeze(0.7),
                                   GateSpec::phase_shift(1.1),         GateSpec::cubic_phase(0.2),
                                   GateSpec::beam_splitter(),           GateSpec::cz(0.8),
                                   GateSpec::czprime(-1.3)};
    for (const GateSpec &s : specs) {
        DenseOperator u = build_gate(s, c);
        EXPECT_TRUE(u.is_unitary()) << gate_kind_name(s.kind);
        const auto d = static_cast<Eigen::Index>(u.dimension());
        EXPECT_LT(max_abs(u.matrix().adjoint() * u.matrix() - Mat::Identity(d, d)), 1e-10) << gate_kind_name(s.kind);
    }
}

TEST(BuildGate, RotationComposition) {
    const int c = 15;
    Mat a = build_gate(GateSpec::phase_shift(0.4), c).matrix();
    Mat b = build_gate(GateSpec::phase_shift(-1.7), c).matrix();
    Mat ab = build_gate(GateSpec::phase_shift(-1.3), c).matrix();
    EXPECT_LT(max_abs(a * b - ab), 1e-10);
}

TEST(Conjugation, CubicPhaseShearsMomentum) {
    const int c = 60;
    const double eta = 0.1;
    // The gate kicks high levels far past any cutoff near c, so conjugate in a larger space
    // and compare its compression.
    const int w = 200;
    DenseOperator u = build_gate(GateSpec::cubic_phase(eta), w);
    auto [xw, pw] = testing::quadrature_compressions(w);
    Mat got = conjugate_quadrature(u, DenseOperator(w, 1, pw)).matrix().topLeftCorner(c, c);
    auto [x, p] = testing::quadrature_compressions(c + 2);
    Mat x2 = (x * x).topLeftCorner(c, c);
    Mat want = p.topLeftCorner(c, c) - eta * x2;
    EXPECT_LT(low_block_max_error(got, want, c, 1, low_block_levels(c)), 1e-6);
}

TEST(Conjugation, CzShiftsMomentum) {
    const int c = 40;
    DenseOperator u = build_gate(GateSpec::cz(1), c);
    auto [x, p] = testing::quadrature_compressions(c);
    Mat id = Mat::Identity(c, c);
    DenseOperator p1(c, 2, kron(p, id));
    Mat got = conjugate_quadrature(u, p1).matrix();
    Mat want = kron(p, id) - kron(id, x);
    // A unit momentum kick at g = 1 leaves few clean levels per mode.
    EXPECT_LT(low_block_max_error(got, want, c, 2, 4), 1e-8);
}

TEST(Conjugation, IdentityRotation) {
    auto [x, p] = quadratures(10);
    DenseOperator u = build_gate(GateSpec::phase_shift(0), 10);
    EXPECT_LT(max_abs(conjugate_quadrature(u, x).matrix() - x.matrix()), 1e-14);
}

TEST(Conjugation, RejectsNonUnitaryAndNonHermitian) {
    auto [a, ad] = build_ladder(5);
    DenseOperator u = build_gate(GateSpec::phase_shift(0.2), 5);
    EXPECT_THROW(conjugate_quadrature(a, a), Error);
    EXPECT_THROW(conjugate_quadrature(u, a), Error);
}

TEST(Resources, TrivialReductions) {
    FockVector s0 = build_resource_state({ResourceKind::SqueezedVacuum, 0, std::nullopt, std::nullopt}, 20).state;
    EXPECT_NEAR(fidelity(s0, FockVector::vacuum(20)), 1, 1e-14);
    FockVector c0 = build_resource_state({ResourceKind::CPS, 0.4, 0.0, std::nullopt}, 40).state;
    FockVector a = build_resource_state({ResourceKind::AntiSqueezedVacuum, 0.4, std::nullopt, std::nullopt}, 40).state;
    EXPECT_LT((c0.amplitudes() - a.amplitudes()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Resources, EprModeSymmetry) {
    const int c = 30;
    FockVector e = build_resource_state({ResourceKind::EPRstar, 0.5, std::nullopt, std::nullopt}, c).state;
    DenseOperator n = number_operator(c);
    double n1 = expectation(e, embed(n, 0, 2)).real();
    double n2 = expectation(e, embed(n, 1, 2)).real();
    EXPECT_NEAR(n1, n2, 1e-8);
    EXPECT_NEAR(n1, std::sinh(0.5) * std::sinh(0.5), 1e-6);
}

TEST(Resources, ClusterNullifierSymmetry) {
    const int c = 30;
    for (double g : {1.0, 0.6}) {
        FockVector s = build_resource_state({ResourceKind::Cluster, 0.3, std::nullopt, g}, c).state;
        NullifierOperators n = nullifier_operators(NullifierKind::cluster_pair(g), c);
        double v1 = variance(s, n.ops[0]);
        double v2 = variance(s, n.ops[1]);
        EXPECT_NEAR(v1, v2, 1e-8);
    }
}

TEST(Resources, CutoffTooSmallIsReported) {
    try {
        build_resource_state({ResourceKind::SqueezedVacuum, 1.5, std::nullopt, std::nullopt}, 8);
        FAIL() << "expected a cutoff error";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::CutoffTooSmall);
    }
}

TEST(Resources, SecondaryParameterPresence) {
    EXPECT_THROW(ResourceStateSpec({ResourceKind::CPS, 0.1, std::nullopt, std::nullopt}).validate(), Error);
    EXPECT_THROW(ResourceStateSpec({ResourceKind::Cluster, 0.1, 0.2, 1.0}).validate(), Error);
    EXPECT_THROW(ResourceStateSpec({ResourceKind::SqueezedVacuum, 0.1, std::nullopt, 1.0}).validate(), Error);
}

TEST(Factory, ApplyMatchesMatrix) {
    GateFactory f(20);
    Mat x = Mat::Random(20, 3);
    for (const GateSpec &s : {GateSpec::squeeze(0.3), GateSpec::phase_shift(0.9), GateSpec::cubic_phase(0.1),
                              GateSpec::displacement(cplx(0.2, 0.1))}) {
        EXPECT_LT(max_abs(f.apply(s, x) - f.single_mode(s) * x), 1e-10) << gate_kind_name(s.kind);
    }
}

}  // namespace
}  // namespace cvsq
