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

#include "cvsq/lcu.h"

#include <cmath>
#include <sstream>

#include "cvsq/gates.h"
#include "cvsq/projectors.h"

namespace cvsq {

namespace {

constexpr double kMaxRepetitions = 1e6;

Vec q_apply(const Vec &v, double p0, double p1, const Mat &u, bool conjugate) {
    Vec uv = conjugate ? Vec(u.adjoint() * v) : Vec(u * v);
    return p0 * v + p1 * uv;
}

}  // namespace

LcuStep lcu_step(const FockVector &psi, double p0, const DenseOperator &u, bool conjugate) {
    if (!(p0 >= 0 && p0 <= 1)) {
        fail(ErrorKind::InvalidArgument, "lcu_step needs p0 in [0, 1]");
    }
    if (!u.is_unitary()) {
        fail(ErrorKind::InvalidArgument, "lcu_step needs a unitary-flagged U");
    }
    if (u.cutoff() != psi.cutoff() || u.modes() != psi.modes()) {
        fail(ErrorKind::DimensionMismatch, "lcu_step: U and state spaces differ");
    }
    if (!psi.is_normalized(1e-9)) {
        fail(ErrorKind::InvalidArgument, "lcu_step expects a normalized state");
    }
    Vec out = q_apply(psi.amplitudes(), p0, 1 - p0, u.matrix(), conjugate);
    double q = out.squaredNorm();
    if (!(q >= 1e-300)) {
        fail(ErrorKind::DegenerateProjection, "LCU step annihilated the state");
    }
    return LcuStep{FockVector(psi.cutoff(), psi.modes(), out / std::sqrt(q)), q};
}

void LcuConfig::validate() const {
    if (!(p0 >= 0 && p1 >= 0) || std::abs(p0 + p1 - 1) > 1e-12) {
        fail(ErrorKind::InvalidArgument, "LCU amplitudes need p0, p1 >= 0 with p0 + p1 = 1");
    }
    if (repetitions < 1) {
        fail(ErrorKind::InvalidArgument, "LCU needs at least one repetition");
    }
    if (repetitions > kMaxRepetitions) {
        fail(ErrorKind::Configuration, "LCU repetition count above 1e6; raise delta_x0");
    }
    if (!u.is_unitary()) {
        fail(ErrorKind::InvalidArgument, "LCU step operator must be flagged unitary");
    }
}

LcuOutcome lcu_repeat(const LcuConfig &config, const FockVector &psi) {
    config.validate();
    if (config.u.cutoff() != psi.cutoff() || config.u.modes() != psi.modes()) {
        fail(ErrorKind::DimensionMismatch, "lcu_repeat: U and state spaces differ");
    }
    LcuOutcome out{psi.normalized(), 1, {}, config.repetitions, 0};
    out.step_probabilities.reserve(2 * static_cast<size_t>(config.repetitions));
    Vec v = out.state.amplitudes();
    for (int pass = 0; pass < 2; pass++) {
        for (int k = 0; k < config.repetitions; k++) {
            Vec w = q_apply(v, config.p0, config.p1, config.u.matrix(), pass == 1);
            double q = w.squaredNorm();
            if (!(q >= 1e-300)) {
                fail(ErrorKind::DegenerateProjection, "LCU repetition annihilated the state");
            }
            v = w / std::sqrt(q);
            out.step_probabilities.push_back(q);
            out.probability *= q;
        }
    }
    out.state = FockVector(psi.cutoff(), psi.modes(), std::move(v));
    if (config.delta_x0 > 0 && config.p0 * config.p1 > 0) {
        out.achieved_gamma =
            1 / (4.0 * config.repetitions * config.p0 * config.p1 * config.delta_x0 * config.delta_x0);
    }
    return out;
}

int lcu_repetitions(double r, double delta_r, double p0, double delta_x0) {
    if (!std::isfinite(r) || !std::isfinite(delta_r) || !(delta_r >= 0)) {
        fail(ErrorKind::InvalidArgument, "lcu_repetitions needs finite r and delta_r >= 0");
    }
    if (!(delta_x0 > 0) || !std::isfinite(delta_x0)) {
        fail(ErrorKind::InvalidArgument, "lcu_repetitions needs delta_x0 > 0");
    }
    double p1 = 1 - p0;
    if (!(p0 > 0 && p1 > 0)) {
        fail(ErrorKind::InvalidArgument, "lcu_repetitions needs 0 < p0 < 1");
    }
    double n = std::exp(2 * r) * std::expm1(2 * delta_r) / (2 * p0 * p1 * delta_x0 * delta_x0);
    if (!(n <= kMaxRepetitions)) {
        std::stringstream ss;
        ss << "LCU needs N = " << n << " > 1e6 repetitions; raise delta_x0";
        fail(ErrorKind::Configuration, ss.str());
    }
    return std::max(1, static_cast<int>(std::lround(n)));
}

LcuCpsResult lcu_project_cps(double r, double delta_r, double eta, double delta_x0, double p0, int cutoff,
                             LcuUnitaryMethod method) {
    if (!std::isfinite(eta)) {
        fail(ErrorKind::InvalidArgument, "lcu_project_cps needs finite eta");
    }
    const int n = lcu_repetitions(r, delta_r, p0, delta_x0);
    const int w = cutoff + std::max(20, cutoff / 2);
    Mat u;
    if (method == LcuUnitaryMethod::Direct) {
        auto [x, p] = quadratures(w);
        Mat g = p.matrix() - eta * x.matrix() * x.matrix();
        u = HermitianSpectrum(0.5 * (g + g.adjoint())).exp_i(delta_x0);
    } else {
        // exp(i dx G) = exp(-i x0 G) at x0 = -dx. Each factor is the exponential of its truncated
        // generator, so the product stays exactly unitary over many repetitions.
        GaussianFactorization f = cps_stabilizer_factorization(-delta_x0, eta);
        GateFactory gates(w);
        u = Mat::Identity(w, w);
        for (const GateSpec &g : f.sequence()) {
            u = gates.apply(g, u);
        }
        u *= std::polar(1.0, f.phase);
    }
    LcuConfig config;
    config.p0 = p0;
    config.p1 = 1 - p0;
    config.u = DenseOperator(w, 1, std::move(u), true);
    config.repetitions = n;
    config.delta_x0 = delta_x0;

    ResourceStateSpec in_spec{ResourceKind::CPS, r, eta, std::nullopt};
    FockVector in = build_resource_state(in_spec, cutoff).state;
    FockVector padded(w, 1, pad_levels(in.amplitudes(), cutoff, 1, w));
    LcuOutcome big = lcu_repeat(config, padded);

    Vec small = truncate_levels(big.state.amplitudes(), w, 1, cutoff);
    double kept = small.squaredNorm();
    if (kept < 1 - 1e-6) {
        std::stringstream ss;
        ss << "LCU output keeps norm^2 " << kept << " below cutoff " << cutoff << "; raise the cutoff";
        fail(ErrorKind::CutoffTooSmall, ss.str());
    }
    LcuOutcome out = big;
    out.state = FockVector(cutoff, 1, small / std::sqrt(kept));
    ResourceStateSpec out_spec{ResourceKind::CPS, r + delta_r, eta, std::nullopt};
    double f = fidelity(out.state, build_resource_state(out_spec, cutoff).state);
    return LcuCpsResult{std::move(out), f, std::exp(-delta_r), w};
}

}  // namespace cvsq
