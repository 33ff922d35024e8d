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

#ifndef CVSQ_GATES_H
#define CVSQ_GATES_H

#include <optional>
#include <string>
#include <vector>

#include "cvsq/fock.h"

namespace cvsq {

enum class GateKind {
    Displacement,
    Squeeze,
    PhaseShift,
    CubicPhase,
    BeamSplitter5050,
    CZ,
    CZprime,
};

const char *gate_kind_name(GateKind kind);
GateKind parse_gate_kind(const std::string &name);

/// One gate with its parameters. `alpha` is used by Displacement, `value` holds r, phi, eta or
/// the gain g depending on the kind.
struct GateSpec {
    GateKind kind = GateKind::Displacement;
    cplx alpha = 0;
    double value = 0;
    std::vector<int> targets{0};

    static GateSpec displacement(cplx alpha, int mode = 0);
    static GateSpec squeeze(double r, int mode = 0);
    static GateSpec phase_shift(double phi, int mode = 0);
    static GateSpec cubic_phase(double eta, int mode = 0);
    static GateSpec beam_splitter(int mode1 = 0, int mode2 = 1);
    static GateSpec cz(double g, int mode1 = 0, int mode2 = 1);
    static GateSpec czprime(double g, int mode1 = 0, int mode2 = 1);

    int arity() const;
    /// Throws InvalidArgument when the targets do not fit the kind or a `modes`-mode register.
    void validate(int modes) const;
};

/// exp of the truncated generator, embedded into a `modes`-mode register (0 means the smallest
/// register containing the targets). Always flagged unitary.
DenseOperator build_gate(const GateSpec &spec, int cutoff, int modes = 0);

/// U Q U^dagger.
DenseOperator conjugate_quadrature(const DenseOperator &u, const DenseOperator &q);

/// Single-mode gates at one cutoff, built from cached spectra of x, p and the squeeze
/// generator. Every matrix equals the exponential of the truncated generator.
class GateFactory {
   public:
    explicit GateFactory(int cutoff);

    int cutoff() const {
        return cutoff_;
    }
    Mat displacement(cplx alpha) const;
    Mat squeeze(double r) const;
    Mat phase_shift(double phi) const;
    Mat cubic_phase(double eta) const;
    Mat single_mode(const GateSpec &spec) const;
    /// single_mode(spec) * x without forming the gate matrix.
    Mat apply(const GateSpec &spec, const Mat &x) const;

    const HermitianSpectrum &x_spectrum() const {
        return x_;
    }
    const HermitianSpectrum &p_spectrum() const {
        return p_;
    }

   private:
    int cutoff_;
    HermitianSpectrum x_;
    HermitianSpectrum p_;
    HermitianSpectrum k_;
};

/// exp(pi (a1 a2^dagger - a1^dagger a2) / 4) on two modes, assembled from the conserved
/// total-photon-number blocks.
Mat beam_splitter_matrix(int cutoff);
/// exp(i g q1 q2) applied in place to a two-mode ket, q being the quadrature whose truncated
/// spectrum is passed in.
void apply_quadrature_coupling(const HermitianSpectrum &q, double g, int cutoff, Vec &psi);

enum class ResourceKind {
    SqueezedVacuum,
    AntiSqueezedVacuum,
    EPRstar,
    Cluster,
    CPS,
};

const char *resource_kind_name(ResourceKind kind);
ResourceKind parse_resource_kind(const std::string &name);

struct ResourceStateSpec {
    ResourceKind kind = ResourceKind::SqueezedVacuum;
    double r = 0;
    std::optional<double> eta;
    std::optional<double> g;

    int modes() const;
    void validate() const;
};

struct ResourceState {
    FockVector state;
    /// Norm of the truncated amplitudes before renormalization.
    double truncation_norm = 1;
};

/// Builds the state at an enlarged working cutoff, truncates and renormalizes. Throws
/// CutoffTooSmall when the retained norm falls below 1 - norm_tolerance.
ResourceState build_resource_state(const ResourceStateSpec &spec, int cutoff, double norm_tolerance = 1e-6);

}  // namespace cvsq

#endif
