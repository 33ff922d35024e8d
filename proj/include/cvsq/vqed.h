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

#ifndef CVSQ_VQED_H
#define CVSQ_VQED_H

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "cvsq/analytics.h"
#include "cvsq/fock.h"
#include "cvsq/projectors.h"

namespace cvsq {

using Rng = std::mt19937_64;

/// Independent stream for trajectory `index` of a run seeded with `seed`.
Rng trajectory_rng(uint64_t seed, uint64_t index);

/// coef * (factors[0] (x) factors[1] (x) ...), one single-mode matrix per mode.
struct ProductTerm {
    cplx coef = 1;
    std::vector<Mat> factors;
};

/// Observable given densely or as a sum of tensor products. Product form keeps two-mode
/// sandwiches at O(cutoff^3).
class Observable {
   public:
    static Observable dense(const DenseOperator &m);
    static Observable products(int cutoff, int modes, std::vector<ProductTerm> terms);
    static Observable identity(int cutoff, int modes);
    /// (nullifier)^2 for SqX and CpsParabola; Var-style sum of both squares for ClusterPair.
    static Observable nullifier_square(const NullifierKind &kind, int cutoff);

    int cutoff() const {
        return cutoff_;
    }
    int modes() const {
        return modes_;
    }
    bool is_dense() const {
        return dense_.has_value();
    }
    const std::vector<ProductTerm> &terms() const {
        return terms_;
    }
    /// A single product term, the form shot sampling needs on separable circuits.
    bool is_single_product() const {
        return !dense_ && terms_.size() == 1;
    }
    DenseOperator to_dense() const;
    /// <bra| M |ket> on the joint register.
    cplx sandwich(const Vec &bra, const Vec &ket) const;

   private:
    int cutoff_ = 2;
    int modes_ = 1;
    std::optional<DenseOperator> dense_;
    std::vector<ProductTerm> terms_;
};

/// P = c * sum_l p_l U_l with sum_l p_l = 1. Discrete decompositions come from a smeared
/// projector grid; the continuous CPS family draws x0 from N(0, 1/(2 gamma)).
struct StabilizerDecomposition {
    int modes = 1;
    double norm_constant = 1;
    std::vector<double> probabilities;
    std::vector<ProjectorTerm> terms;
    bool continuous = false;
    double gamma = 0;
    double eta = 0;

    static StabilizerDecomposition from_projector(const SmearedProjector &p);
    static StabilizerDecomposition continuous_cps(double gamma, double eta);
    static StabilizerDecomposition identity(int modes);
    /// Explicit terms; weights are renormalized and their sum becomes the constant c.
    static StabilizerDecomposition discrete(int modes, std::vector<ProjectorTerm> terms);

    void validate() const;
    /// Every term factor acts on one mode only.
    bool is_separable() const;
};

/// The pair (l, l') plus U_l'' = U_l' U_l^dagger as a gate sequence per mode.
struct StabilizerSample {
    int l = 0;
    int l_prime = 0;
    ProjectorTerm u;
    ProjectorTerm u_prime;
    ProjectorTerm u_double_prime;
};

StabilizerSample sample_stabilizer_pair(const StabilizerDecomposition &d, Rng &rng);

enum class VqedMode {
    ExactExpectation,
    ShotSampled,
};

/// Weighted ket ensemble; a pure state has one entry of weight one.
using StateEnsemble = std::vector<std::pair<double, FockVector>>;

StateEnsemble ensemble_of(const FockVector &psi);
StateEnsemble ensemble_of(const DensityOperator &rho, double drop_tol = 1e-14);

struct VqedPlan {
    StateEnsemble input;
    /// Insertion k is applied before gate k.
    std::vector<StabilizerDecomposition> projectors;
    /// Unitary gate processes; empty entries are treated as identity.
    std::vector<std::optional<DenseOperator>> gates;
    Observable observable = Observable::identity(2, 1);
    int samples = 1000;
    uint64_t seed = 0;
    VqedMode mode = VqedMode::ExactExpectation;
    int shots = 1;
    /// Worker count; 0 uses the hardware concurrency. Output does not depend on it.
    int threads = 1;

    int cutoff() const;
    int modes() const;
    void validate() const;
};

/// One trajectory's estimator values. `den`, `num` are the real-part estimators; `im_den`,
/// `im_num` the imaginary parts, which vanish on average for Hermitian projectors.
struct TrajectoryResult {
    double den = 0;
    double num = 0;
    double im_den = 0;
    double im_num = 0;
};

TrajectoryResult hadamard_test_trajectory(const VqedPlan &plan, const std::vector<StabilizerSample> &samples,
                                          Rng &rng);

struct EstimatorReport {
    double mean_num = 0;
    double mean_den = 0;
    double se_num = 0;
    double se_den = 0;
    double ratio = 0;
    double ratio_se = 0;
    double mean_im_den = 0;
    double se_im_den = 0;
    /// Product of the dropped constants c_k.
    double norm_constant = 1;
    /// c^2 * mean_den, the projection probability Tr[P rho P^dagger].
    double probability = 0;
    double probability_se = 0;
    int trajectories = 0;
    uint64_t seed = 0;
};

/// Mean, standard error and jackknife ratio statistics of per-trajectory results.
EstimatorReport summarize(const std::vector<TrajectoryResult> &results, double norm_constant, uint64_t seed,
                          bool check_denominator = true);

EstimatorReport vqed_estimate(const VqedPlan &plan);

struct VirtualEntangleParams {
    int samples = 1000;
    uint64_t seed = 0;
    VqedMode mode = VqedMode::ExactExpectation;
    int shots = 1;
    int threads = 1;
};

/// Virtual projection of rho_A (x) rho_B with one ancilla per subsystem; every sampled
/// operation acts on one side only. Throws Structural for non-separable decompositions.
EstimatorReport virtual_entangle_estimate(const StateEnsemble &rho_a, const StateEnsemble &rho_b,
                                          const StabilizerDecomposition &d, const Observable &m,
                                          const VirtualEntangleParams &params);

/// Runs `count` trajectories of `fn(index, rng)` over a worker pool and returns the results in
/// index order.
std::vector<TrajectoryResult> run_trajectories(int count, uint64_t seed, int threads,
                                               const std::function<TrajectoryResult(int, Rng &)> &fn);

}  // namespace cvsq

#endif
