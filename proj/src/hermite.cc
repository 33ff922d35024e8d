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

#include "cvsq/hermite.h"

#include <cmath>
#include <sstream>

namespace cvsq {

RealVec hermite_functions(int count, double x) {
    if (count < 1) {
        fail(ErrorKind::InvalidDimension, "hermite_functions needs count >= 1");
    }
    if (!std::isfinite(x)) {
        fail(ErrorKind::InvalidArgument, "hermite_functions needs a finite point");
    }
    RealVec out(count);
    // Recurrence on the scaled values with the Gaussian factor kept as a log scale, so the
    // leading orders stay representable even where e^{-x^2/2} underflows.
    const double big = 1e150;
    double log_scale = -0.25 * std::log(M_PI) - 0.5 * x * x;
    double prev = 0;
    double cur = 1;
    for (int n = 0; n < count; n++) {
        if (n > 0) {
            double next = std::sqrt(2.0 / n) * x * cur - std::sqrt((n - 1.0) / n) * prev;
            prev = cur;
            cur = next;
        }
        if (std::abs(cur) > big) {
            cur /= big;
            prev /= big;
            log_scale += std::log(big);
        }
        out[n] = cur == 0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(cur)) + log_scale), cur);
    }
    return out;
}

Eigen::MatrixXd hermite_matrix(int count, const std::vector<double> &points) {
    Eigen::MatrixXd m(count, static_cast<Eigen::Index>(points.size()));
    for (size_t i = 0; i < points.size(); i++) {
        m.col(static_cast<Eigen::Index>(i)) = hermite_functions(count, points[i]);
    }
    return m;
}

double spectral_window(int cutoff) {
    return 0.6 * std::sqrt(2.0 * cutoff);
}

Vec homodyne_projector(double m, Quadrature q, int cutoff) {
    if (cutoff < 1) {
        fail(ErrorKind::InvalidDimension, "homodyne_projector needs cutoff >= 1");
    }
    if (!(std::abs(m) <= spectral_window(cutoff))) {
        std::stringstream ss;
        ss << "homodyne outcome " << m << " outside the spectral window +-" << spectral_window(cutoff)
           << " of cutoff " << cutoff;
        fail(ErrorKind::SpectralWindow, ss.str());
    }
    RealVec h = hermite_functions(cutoff, m);
    Vec f(cutoff);
    const cplx phases[4] = {1, cplx(0, -1), -1, cplx(0, 1)};
    for (int n = 0; n < cutoff; n++) {
        f[n] = q == Quadrature::X ? cplx(h[n], 0) : phases[n % 4] * h[n];
    }
    return f;
}

HomodyneModel HomodyneModel::uniform(Quadrature q, double half_width, int count) {
    if (count < 1 || !(half_width > 0)) {
        fail(ErrorKind::InvalidArgument, "homodyne grid needs count >= 1 and a positive span");
    }
    HomodyneModel m;
    m.quadrature = q;
    m.spacing = 2 * half_width / count;
    for (int i = 0; i < count; i++) {
        m.outcomes.push_back(-half_width + (i + 0.5) * m.spacing);
    }
    return m;
}

std::vector<double> HomodyneModel::probabilities(const FockVector &psi) const {
    if (psi.modes() != 1) {
        fail(ErrorKind::Unsupported, "homodyne model measures single-mode states");
    }
    std::vector<double> out;
    out.reserve(outcomes.size());
    for (double m : outcomes) {
        Vec f = homodyne_projector(m, quadrature, psi.cutoff());
        cplx a = f.transpose() * psi.amplitudes();
        out.push_back(spacing * std::norm(a));
    }
    return out;
}

namespace {

Vec wavefunction(const FockVector &psi, const std::vector<double> &points, bool momentum) {
    if (psi.modes() != 1) {
        fail(ErrorKind::Unsupported, "wavefunctions are evaluated for single-mode kets");
    }
    const int c = psi.cutoff();
    Vec coef = psi.amplitudes();
    if (momentum) {
        const cplx phases[4] = {1, cplx(0, -1), -1, cplx(0, 1)};
        for (int n = 0; n < c; n++) {
            coef[n] *= phases[n % 4];
        }
    }
    Eigen::MatrixXd h = hermite_matrix(c, points);
    return h.transpose().cast<cplx>() * coef;
}

}  // namespace

Vec position_wavefunction(const FockVector &psi, const std::vector<double> &points) {
    return wavefunction(psi, points, false);
}

Vec momentum_wavefunction(const FockVector &psi, const std::vector<double> &points) {
    return wavefunction(psi, points, true);
}

}  // namespace cvsq
