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

#ifndef CVSQ_HERMITE_H
#define CVSQ_HERMITE_H

#include <vector>

#include "cvsq/fock.h"

namespace cvsq {

/// h_n(x) = <x|n> = pi^{-1/4} (2^n n!)^{-1/2} H_n(x) e^{-x^2/2} for n < count, evaluated with a
/// log-scaled recurrence so large |x| neither overflows nor loses the leading orders.
RealVec hermite_functions(int count, double x);

/// M(n, i) = h_n(points[i]).
Eigen::MatrixXd hermite_matrix(int count, const std::vector<double> &points);

enum class Quadrature {
    X,
    P,
};

/// Largest admissible |m| for a homodyne row functional at this cutoff: 0.6 sqrt(2 cutoff).
double spectral_window(int cutoff);

/// Row functional f with f . psi = <q=m|psi>: f_n = h_n(m) for X and (-i)^n h_n(m) for P.
/// Throws SpectralWindow when |m| lies outside the window.
Vec homodyne_projector(double m, Quadrature q, int cutoff);

/// Uniform midpoint outcome grid with Hermite-overlap probabilities.
struct HomodyneModel {
    Quadrature quadrature = Quadrature::X;
    std::vector<double> outcomes;
    double spacing = 0;

    /// 121 outcomes over +-6 by default.
    static HomodyneModel uniform(Quadrature q, double half_width = 6, int count = 121);
    /// Delta m |<q=m|psi>|^2 per outcome. Outcomes outside the spectral window of the state's
    /// cutoff raise SpectralWindow.
    std::vector<double> probabilities(const FockVector &psi) const;
};

/// Position-representation values psi(x) = sum_n c_n h_n(x) of a single-mode ket.
Vec position_wavefunction(const FockVector &psi, const std::vector<double> &points);
/// Momentum-representation values psi~(k) = sum_n c_n (-i)^n h_n(k).
Vec momentum_wavefunction(const FockVector &psi, const std::vector<double> &points);

}  // namespace cvsq

#endif
