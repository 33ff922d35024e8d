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

#ifndef CVSQ_KNITTING_H
#define CVSQ_KNITTING_H

#include <cstdint>
#include <string>
#include <vector>

#include "cvsq/fock.h"
#include "cvsq/vqed.h"

namespace cvsq {

/// Two-mode ancilla consumed by the teleported CZ' gate.
///
/// Cluster is C_z(g) (S(-r)|0>)^{(x)2}, handled through its exact position wavefunction so
/// large squeezing needs no Fock cutoff. Product holds sum_k w_k a_k (x) b_k with orthonormal
/// b_k (a Schmidt form).
struct TeleportResource {
    enum class Kind {
        Cluster,
        Product,
    };
    struct Term {
        cplx weight;
        FockVector a;
        FockVector b;
    };

    Kind kind = Kind::Cluster;
    double r = 0;
    double g = 1;
    std::vector<Term> terms;

    static TeleportResource cluster(double r, double g = 1);
    static TeleportResource product(const FockVector &a, const FockVector &b);
    /// Schmidt decomposition of a two-mode ket; components below tol are dropped.
    static TeleportResource two_mode(const FockVector &ket, double tol = 1e-10);
};

struct TeleportModel {
    int output_cutoff = 20;
    /// Position grid for the output modes.
    double x_max = 10.5;
    int x_points = 141;
    /// Outcome grid per homodyne wire, spanning outcome_sigmas standard deviations of the
    /// outcome distribution around its mean.
    int outcome_points = 121;
    double outcome_sigmas = 6;
    bool feedforward = true;
    /// Sampled mode only.
    int samples = 10000;
    uint64_t seed = 0;

    void validate() const;
};

enum class TeleportMode {
    EnsembleAveraged,
    Sampled,
};

struct TeleportSample {
    double m1 = 0;
    double m2 = 0;
    FockVector state;
};

struct TeleportResult {
    /// Outcome-averaged output, normalized.
    DensityOperator output;
    /// Sampled mode: one pure conditional output per draw.
    std::vector<TeleportSample> samples;
    /// Trace of the grid-integrated output before normalization.
    double grid_norm = 0;
    std::vector<double> outcomes_1;
    std::vector<double> outcomes_2;
};

/// Gate teleportation of CZ'(1) = exp(i p1 p2) onto psi1 (x) psi2: C_z couplings to the
/// ancilla halves, p homodyne on both inputs, displacement feedforward, then R(-pi/2) on both
/// outputs.
TeleportResult teleport_czp(const FockVector &psi1, const FockVector &psi2, const TeleportResource &resource,
                            const TeleportModel &model = {}, TeleportMode mode = TeleportMode::EnsembleAveraged);

/// exp(i g p1 p2) psi1 (x) psi2 at `cutoff`, computed on a padded register.
FockVector czprime_reference(const FockVector &psi1, const FockVector &psi2, int cutoff, double g = 1);

/// Cluster squeezing with the same nullifier statistics as the normalized P_Cluster(gamma)|00>:
/// e^{-2 r}/2 = gamma/(1 + gamma). Requires gamma < 1.
double implied_cluster_squeezing(double gamma);

struct KnitParams {
    int samples = 20000;
    uint64_t seed = 0;
    int threads = 1;
    TeleportModel model;
    /// Importance proposal widths relative to the outcome standard deviation.
    double proposal_widen = 1.25;
};

/// One sampled operation of the knitted circuit. Modes 0, 2 (input 1, ancilla a) form side A
/// and modes 1, 3 (input 2, ancilla b) side B.
struct KnitOperation {
    std::string name;
    std::vector<int> modes;
};

int knit_side(int mode);

struct KnitReport {
    /// One report per observable, all from the same trajectories.
    std::vector<EstimatorReport> observables;
    double gamma = 0;
    double g = 1;
    double implied_r = 0;
    /// Operations of one representative trajectory and the number of sampled operations, over
    /// all trajectories, that touched both sides.
    std::vector<KnitOperation> circuit;
    long cross_cut_operations = 0;
};

/// CZ' teleportation consuming vacuum ancillas on which the cluster projector P_Cluster(gamma, g)
/// is applied virtually. Each trajectory draws a stabilizer pair, prepares product ancillas on
/// each side and importance-samples the homodyne outcomes. Observables act on the two outputs
/// at model.output_cutoff and must be product-term observables.
KnitReport knit_czp_expectation(const FockVector &psi1, const FockVector &psi2,
                                const std::vector<Observable> &observables, double gamma, double g,
                                const KnitParams &params);

}  // namespace cvsq

#endif
