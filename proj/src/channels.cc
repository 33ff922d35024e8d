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

#include "cvsq/channels.h"

#include <cmath>

namespace cvsq {

void LossSpec::validate() const {
    if (!(loss >= 0 && loss < 1)) {
        fail(ErrorKind::InvalidArgument, "loss rate must lie in [0, 1)");
    }
}

namespace {

int order_limit(const LossSpec &spec, int cutoff) {
    int n = spec.n_max < 0 ? cutoff - 1 : spec.n_max;
    return std::min(n, cutoff - 1);
}

/// k[n][m] = <m|E_n|m+n>, the only nonzero band of E_n.
std::vector<std::vector<double>> kraus_bands(double loss, int cutoff, int n_max) {
    std::vector<std::vector<double>> k(n_max + 1);
    double log_keep = loss > 0 ? std::log1p(-loss) : 0;
    double log_loss = loss > 0 ? std::log(loss) : 0;
    for (int n = 0; n <= n_max; n++) {
        k[n].assign(cutoff - n, 0);
        for (int m = 0; m + n < cutoff; m++) {
            if (n > 0 && loss == 0) {
                continue;
            }
            // C(m+n, n) L^n (1-L)^m, in logs.
            double lg = std::lgamma(m + n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n + 1.0);
            double v = 0.5 * (lg + n * log_loss + m * log_keep);
            k[n][m] = std::exp(v);
        }
    }
    return k;
}

size_t int_pow(int base, int e) {
    size_t out = 1;
    for (int i = 0; i < e; i++) {
        out *= static_cast<size_t>(base);
    }
    return out;
}

void apply_mode_loss(Mat &rho, int cutoff, int modes, int mode, const std::vector<std::vector<double>> &k) {
    const size_t right = int_pow(cutoff, modes - mode - 1);
    const size_t left = int_pow(cutoff, mode);
    const size_t c = static_cast<size_t>(cutoff);
    const size_t dim = left * c * right;
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    // Row index (l1, a, r1) and column index (l2, b, r2); the band couples (a+n, b+n) to (a, b).
    for (size_t col = 0; col < dim; col++) {
        size_t b = (col / right) % c;
        size_t col_base = col - b * right;
        for (size_t row = 0; row < dim; row++) {
            size_t a = (row / right) % c;
            size_t row_base = row - a * right;
            size_t top = c - std::max(a, b);
            cplx acc = 0;
            for (size_t n = 0; n < top && n < k.size(); n++) {
                acc += k[n][a] * k[n][b] * rho(row_base + (a + n) * right, col_base + (b + n) * right);
            }
            out(row, col) = acc;
        }
    }
    rho = std::move(out);
    (void)left;
}

}  // namespace

std::vector<DenseOperator> loss_kraus(const LossSpec &spec, int cutoff) {
    spec.validate();
    if (cutoff < 2) {
        fail(ErrorKind::InvalidDimension, "loss_kraus needs cutoff >= 2");
    }
    int n_max = spec.loss == 0 ? 0 : order_limit(spec, cutoff);
    auto k = kraus_bands(spec.loss, cutoff, n_max);
    std::vector<DenseOperator> out;
    out.reserve(n_max + 1);
    for (int n = 0; n <= n_max; n++) {
        Mat e = Mat::Zero(cutoff, cutoff);
        for (int m = 0; m + n < cutoff; m++) {
            e(m, m + n) = k[n][m];
        }
        out.emplace_back(cutoff, 1, std::move(e));
    }
    return out;
}

DensityOperator apply_loss(const DensityOperator &rho, const LossSpec &spec) {
    spec.validate();
    const int c = rho.cutoff();
    std::vector<int> targets = spec.modes;
    if (targets.empty()) {
        for (int m = 0; m < rho.modes(); m++) {
            targets.push_back(m);
        }
    }
    for (int m : targets) {
        if (m < 0 || m >= rho.modes()) {
            fail(ErrorKind::DimensionMismatch, "loss target mode out of range");
        }
    }
    if (spec.loss == 0) {
        return rho;
    }
    auto k = kraus_bands(spec.loss, c, order_limit(spec, c));
    Mat m = rho.matrix();
    for (int mode : targets) {
        apply_mode_loss(m, c, rho.modes(), mode, k);
    }
    return DensityOperator(c, rho.modes(), std::move(m), 1e-8);
}

DensityOperator apply_loss(const FockVector &psi, const LossSpec &spec) {
    return apply_loss(DensityOperator::from_ket(psi), spec);
}

}  // namespace cvsq
