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

#include "cvsq/analytics.h"

#include <cmath>

#include "cvsq/projectors.h"

namespace cvsq {

double db_to_r(double db) {
    if (!std::isfinite(db)) {
        fail(ErrorKind::InvalidArgument, "db_to_r needs a finite value");
    }
    return std::log(10.0) * db / 20;
}

double r_to_db(double r) {
    if (!std::isfinite(r)) {
        fail(ErrorKind::InvalidArgument, "r_to_db needs a finite value");
    }
    return 20 * r / std::log(10.0);
}

NullifierKind NullifierKind::sq_x() {
    return {NullifierType::SqX, 0};
}

NullifierKind NullifierKind::cps_parabola(double eta) {
    return {NullifierType::CpsParabola, eta};
}

NullifierKind NullifierKind::cluster_pair(double g) {
    return {NullifierType::ClusterPair, g};
}

int NullifierKind::modes() const {
    return type == NullifierType::ClusterPair ? 2 : 1;
}

NullifierOperators nullifier_operators(const NullifierKind &kind, int cutoff) {
    if (!std::isfinite(kind.param)) {
        fail(ErrorKind::InvalidArgument, "nullifier parameter must be finite");
    }
    if (cutoff < 2) {
        fail(ErrorKind::InvalidDimension, "nullifier needs cutoff >= 2");
    }
    // p - eta x^2 raises the level by at most 2, its square by 4.
    const int w = cutoff + 4;
    auto [xo, po] = quadratures(w);
    const Mat &x = xo.matrix();
    const Mat &p = po.matrix();
    auto cut = [&](const Mat &m) {
        return Mat(m.topLeftCorner(cutoff, cutoff));
    };
    NullifierOperators out;
    if (kind.type != NullifierType::ClusterPair) {
        Mat n = kind.type == NullifierType::SqX ? x : Mat(p - kind.param * x * x);
        n = 0.5 * (n + n.adjoint());
        out.ops.emplace_back(cutoff, 1, cut(n));
        out.squares.emplace_back(cutoff, 1, cut(n * n));
        return out;
    }
    // Compressions of tensor products factorize, so the two-mode squares are assembled from
    // single-mode pieces.
    const double g = kind.param;
    Mat xc = cut(x), pc = cut(p), x2 = cut(x * x), p2 = cut(p * p);
    Mat id = Mat::Identity(cutoff, cutoff);
    out.ops.emplace_back(cutoff, 2, kron(pc, id) - g * kron(id, xc));
    out.squares.emplace_back(cutoff, 2, kron(p2, id) - 2 * g * kron(pc, xc) + g * g * kron(id, x2));
    out.ops.emplace_back(cutoff, 2, kron(id, pc) - g * kron(xc, id));
    out.squares.emplace_back(cutoff, 2, kron(id, p2) - 2 * g * kron(xc, pc) + g * g * kron(x2, id));
    return out;
}

namespace {

template <typename State>
double variance_sum(const NullifierKind &kind, const State &s) {
    if (s.modes() != kind.modes()) {
        fail(ErrorKind::DimensionMismatch, "nullifier mode count differs from the state");
    }
    NullifierOperators n = nullifier_operators(kind, s.cutoff());
    double total = 0;
    for (size_t i = 0; i < n.ops.size(); i++) {
        double m = expectation(s, n.ops[i]).real();
        double m2 = expectation(s, n.squares[i]).real();
        total += m2 - m * m;
    }
    return total;
}

}  // namespace

double nullifier_variance(const NullifierKind &kind, const FockVector &psi) {
    return variance_sum(kind, psi.normalized());
}

double nullifier_variance(const NullifierKind &kind, const DensityOperator &rho) {
    return variance_sum(kind, rho.normalized());
}

const char *curve_name(Curve curve) {
    switch (curve) {
        case Curve::CpsNullifier:
            return "CpsNullifier";
        case Curve::ClusterNullifier:
            return "ClusterNullifier";
        case Curve::CpsProb:
            return "CpsProb";
        case Curve::ClusterProb:
            return "ClusterProb";
        case Curve::DeltaR:
            return "DeltaR";
    }
    return "?";
}

Curve parse_curve(const std::string &name) {
    for (Curve c : {Curve::CpsNullifier, Curve::ClusterNullifier, Curve::CpsProb, Curve::ClusterProb, Curve::DeltaR}) {
        if (name == curve_name(c)) {
            return c;
        }
    }
    fail(ErrorKind::InvalidArgument, "unknown curve '" + name + "'");
}

double analytic_reference(Curve curve, const CurveParams &params) {
    if (!std::isfinite(params.r) || !std::isfinite(params.delta_r) || !std::isfinite(params.gamma)) {
        fail(ErrorKind::InvalidArgument, "analytic_reference needs finite parameters");
    }
    switch (curve) {
        case Curve::CpsNullifier:
            return std::exp(-2 * (params.r + params.delta_r)) / 2;
        case Curve::ClusterNullifier:
            return std::exp(-2 * (params.r + params.delta_r));
        case Curve::CpsProb:
            return std::exp(-params.delta_r);
        case Curve::ClusterProb:
            return std::exp(-2 * params.delta_r);
        case Curve::DeltaR:
            return delta_r_from_gamma(params.gamma, params.r);
    }
    return 0;
}

}  // namespace cvsq
