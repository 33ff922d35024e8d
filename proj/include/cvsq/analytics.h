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

#ifndef CVSQ_ANALYTICS_H
#define CVSQ_ANALYTICS_H

#include <string>
#include <vector>

#include "cvsq/fock.h"

namespace cvsq {

/// r = ln(10) dB / 20.
double db_to_r(double db);
double r_to_db(double r);

enum class NullifierType {
    SqX,
    CpsParabola,
    ClusterPair,
};

struct NullifierKind {
    NullifierType type = NullifierType::SqX;
    /// eta for CpsParabola, g for ClusterPair.
    double param = 0;

    static NullifierKind sq_x();
    static NullifierKind cps_parabola(double eta);
    static NullifierKind cluster_pair(double g);
    int modes() const;
};

/// Nullifier operators together with their squares. Both are compressions of the untruncated
/// operators, so moments of states supported below the cutoff are exact.
struct NullifierOperators {
    std::vector<DenseOperator> ops;
    std::vector<DenseOperator> squares;
};

NullifierOperators nullifier_operators(const NullifierKind &kind, int cutoff);

double nullifier_variance(const NullifierKind &kind, const FockVector &psi);
double nullifier_variance(const NullifierKind &kind, const DensityOperator &rho);

enum class Curve {
    CpsNullifier,
    ClusterNullifier,
    CpsProb,
    ClusterProb,
    DeltaR,
};

const char *curve_name(Curve curve);
Curve parse_curve(const std::string &name);

struct CurveParams {
    double r = 0;
    double delta_r = 0;
    double gamma = 1;
};

double analytic_reference(Curve curve, const CurveParams &params);

}  // namespace cvsq

#endif
