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

#ifndef CVSQ_TESTS_TEST_UTIL_H
#define CVSQ_TESTS_TEST_UTIL_H

#include <random>

#include "cvsq/fock.h"
#include "cvsq/gates.h"

namespace cvsq::testing {

inline FockVector coherent(cplx alpha, int cutoff) {
    const int w = cutoff + 30;
    GateFactory f(w);
    Vec v = f.displacement(alpha) * FockVector::vacuum(w).amplitudes();
    return FockVector(cutoff, 1, truncate_levels(v, w, 1, cutoff)).normalized();
}

/// Compressions of x and p taken from a slightly larger register, so x^2 etc. are exact on the
/// whole retained block.
inline std::pair<Mat, Mat> quadrature_compressions(int cutoff) {
    auto [x, p] = quadratures(cutoff + 2);
    return {x.matrix().topLeftCorner(cutoff, cutoff), p.matrix().topLeftCorner(cutoff, cutoff)};
}

inline DensityOperator random_density(int cutoff, int modes, uint64_t seed, int rank = 3) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0, 1);
    const size_t d = space_dimension(cutoff, modes);
    Mat m = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (int k = 0; k < rank; k++) {
        Vec v(static_cast<Eigen::Index>(d));
        for (auto &c : v) {
            c = cplx(n(rng), n(rng));
        }
        m += v * v.adjoint();
    }
    return DensityOperator(cutoff, modes, m / m.trace().real());
}

}  // namespace cvsq::testing

#endif
