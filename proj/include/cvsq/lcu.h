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

#ifndef CVSQ_LCU_H
#define CVSQ_LCU_H

#include <vector>

#include "cvsq/fock.h"

namespace cvsq {

struct LcuStep {
    FockVector state;
    double probability = 0;
};

/// Applies Q = p0 I + (1 - p0) U (or Q^dagger) and renormalizes. The ancilla is implicit: Q is
/// the map conditioned on reading |0>.
LcuStep lcu_step(const FockVector &psi, double p0, const DenseOperator &u, bool conjugate);

struct LcuConfig {
    double p0 = 0.5;
    double p1 = 0.5;
    DenseOperator u = DenseOperator::identity(2);
    int repetitions = 1;
    /// Step size of the underlying generator, used only to report the achieved gamma.
    double delta_x0 = 0;

    void validate() const;
};

struct LcuOutcome {
    FockVector state;
    double probability = 1;
    std::vector<double> step_probabilities;
    int repetitions = 0;
    /// gamma = 1 / (4 N p0 p1 delta_x0^2) realized by the rounded N; zero when delta_x0 is unset.
    double achieved_gamma = 0;
};

/// N steps of Q, then N steps of Q^dagger.
LcuOutcome lcu_repeat(const LcuConfig &config, const FockVector &psi);

/// N = e^{2r}(e^{2 delta_r} - 1) / (2 p0 p1 dx^2), rounded to the nearest integer >= 1.
int lcu_repetitions(double r, double delta_r, double p0, double delta_x0);

enum class LcuUnitaryMethod {
    /// Exponential of the truncated generator at the working cutoff.
    Direct,
    /// Product of the Gaussian factors with the exact phase.
    Factorized,
};

struct LcuCpsResult {
    LcuOutcome outcome;
    double fidelity = 0;
    double target_probability = 0;
    int working_cutoff = 0;
};

/// Runs the repeated LCU with U = exp(i dx (p - eta x^2)) on CPS(r, eta) at a padded working
/// cutoff and compares with CPS(r + delta_r, eta).
LcuCpsResult lcu_project_cps(double r, double delta_r, double eta, double delta_x0, double p0, int cutoff,
                             LcuUnitaryMethod method = LcuUnitaryMethod::Direct);

}  // namespace cvsq

#endif
