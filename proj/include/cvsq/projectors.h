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

#ifndef CVSQ_PROJECTORS_H
#define CVSQ_PROJECTORS_H

#include <optional>
#include <string>
#include <vector>

#include "cvsq/fock.h"
#include "cvsq/gates.h"

namespace cvsq {

/// Delta r = ln(1 + 1/(2 gamma e^{2r})) / 2.
double delta_r_from_gamma(double gamma, double r);
/// Exact inverse: gamma = 1 / (2 e^{2r} (e^{2 delta_r} - 1)).
double gamma_from_delta_r(double delta_r, double r);

enum class SpanPolicy {
    /// Uniform over [-sqrt(2 gamma), sqrt(2 gamma)].
    PaperLiteral,
    /// Uniform over +-k sigma with sigma = 1/sqrt(2 gamma).
    SigmaScaled,
};

const char *span_policy_name(SpanPolicy policy);
SpanPolicy parse_span_policy(const std::string &name);

/// Midpoint discretization of the unit-mass weight sqrt(gamma/pi) exp(-gamma x^2).
struct GaussianGrid {
    double gamma = 1;
    std::vector<double> points;
    std::vector<double> weights;
    SpanPolicy policy = SpanPolicy::SigmaScaled;
    int count = 0;
    double k_sigma = 5;

    double weight_sum() const;
    double spacing() const;
};

GaussianGrid discretize_gaussian(double gamma, int count, SpanPolicy policy = SpanPolicy::SigmaScaled,
                                 double k_sigma = 5);

/// e^{i phase} D(alpha) R(phi2) S(r) R(phi1) = exp(-i x0 (p - eta x^2)).
struct GaussianFactorization {
    cplx alpha = 0;
    double phi1 = 0;
    double r = 0;
    double phi2 = 0;
    double phase = 0;

    /// Gates in application order: R(phi1), S(r), R(phi2), D(alpha).
    std::vector<GateSpec> sequence(int mode = 0) const;
};

GaussianFactorization cps_stabilizer_factorization(double x0, double eta);

enum class ProjectorKind {
    Sq,
    Asq,
    EPR,
    Cluster,
    CPS,
};

const char *projector_kind_name(ProjectorKind kind);
ProjectorKind parse_projector_kind(const std::string &name);
int projector_modes(ProjectorKind kind);

struct ProjectorParams {
    std::optional<double> g;
    std::optional<double> eta;
};

/// One weighted unitary: weight * phase * (U_1 (x) U_2 ...), each U_m given as a gate sequence
/// in application order.
struct ProjectorTerm {
    double weight = 0;
    cplx phase = 1;
    std::vector<std::vector<GateSpec>> factors;
    /// Grid abscissae that produced the term (x0, or (x1, x2) for two-mode kinds).
    std::vector<double> abscissae;
};

struct SmearedProjector {
    ProjectorKind kind = ProjectorKind::Sq;
    double gamma = 1;
    ProjectorParams params;
    GaussianGrid grid;
    int modes = 1;
    std::vector<ProjectorTerm> terms;

    double weight_sum() const;
    /// Two-mode kinds must consist of per-mode displacements only.
    bool is_separable() const;
};

/// Two-mode kinds use the product grid of `grid` with itself.
SmearedProjector build_smeared_projector(ProjectorKind kind, double gamma, const ProjectorParams &params,
                                         const GaussianGrid &grid);

/// The closed exponential form, evaluated at `working_cutoff` (0 picks 2*cutoff for one mode and
/// cutoff for two) and truncated to `cutoff`.
DenseOperator exact_projector_form(ProjectorKind kind, double gamma, const ProjectorParams &params, int cutoff,
                                   int working_cutoff = 0);

/// Compressions <m|U|n>, m, n < cutoff, of single-mode gate sequences. Displacements use exact
/// matrix elements; other gates act at the padded working cutoff.
class TermEvaluator {
   public:
    TermEvaluator(int cutoff, int working_cutoff);

    int cutoff() const {
        return cutoff_;
    }
    /// Applies the sequence to the columns of x (cutoff rows each).
    Mat apply(const std::vector<GateSpec> &sequence, const Mat &x) const;
    Mat matrix(const std::vector<GateSpec> &sequence) const;

   private:
    int cutoff_;
    int work_;
    GateFactory factory_;
};

/// Default padded cutoff used for sequences that contain non-displacement gates.
int default_working_cutoff(int cutoff);

struct PureProjection {
    FockVector state;
    double probability = 0;
};

struct MixedProjection {
    DensityOperator state;
    double probability = 0;
};

/// Unnormalized P psi and q = ||P psi||^2.
PureProjection apply_projector(const SmearedProjector &p, const FockVector &psi);
PureProjection apply_projector(const DenseOperator &p, const FockVector &psi);
/// P rho P^dagger and q = Tr[P rho P^dagger].
MixedProjection apply_projector(const SmearedProjector &p, const DensityOperator &rho);
MixedProjection apply_projector(const DenseOperator &p, const DensityOperator &rho);

/// Dense matrix of the term sum at `cutoff`.
DenseOperator dense_sum(const SmearedProjector &p, int cutoff);

}  // namespace cvsq

#endif
