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

#ifndef CVSQ_CHANNELS_H
#define CVSQ_CHANNELS_H

#include <vector>

#include "cvsq/fock.h"

namespace cvsq {

/// Photon loss with rate L. n_max < 0 means cutoff - 1, which is exact in truncation.
/// An empty mode list applies the channel to every mode.
struct LossSpec {
    double loss = 0;
    int n_max = -1;
    std::vector<int> modes;

    void validate() const;
};

/// E_n = (L/(1-L))^{n/2} a^n / sqrt(n!) (1-L)^{n_op/2}, n = 0..n_max.
std::vector<DenseOperator> loss_kraus(const LossSpec &spec, int cutoff);

/// sum_n E_n rho E_n^dagger on each selected mode in turn.
DensityOperator apply_loss(const DensityOperator &rho, const LossSpec &spec);
DensityOperator apply_loss(const FockVector &psi, const LossSpec &spec);

}  // namespace cvsq

#endif
