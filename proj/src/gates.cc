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

#include "cvsq/gates.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace cvsq {

const char *gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::Displacement:
            return "Displacement";
        case GateKind::Squeeze:
            return "Squeeze";
        case GateKind::PhaseShift:
            return "PhaseShift";
        case GateKind::CubicPhase:
            return "CubicPhase";
        case GateKind::BeamSplitter5050:
            return "BeamSplitter5050";
        case GateKind::CZ:
            return "CZ";
        case GateKind::CZprime:
            return "CZprime";
    }
    return "?";
}

GateKind parse_gate_kind(const std::string &name) {
    for (GateKind k : {GateKind::Displacement, GateKind::Squeeze, GateKind::PhaseShift, GateKind::CubicPhase,
                       GateKind::BeamSplitter5050, GateKind::CZ, GateKind::CZprime}) {
        if (name == gate_kind_name(k)) {
            return k;
        }
    }
    fail(ErrorKind::InvalidArgument, "unknown gate kind '" + name + "'");
}

GateSpec GateSpec::displacement(cplx alpha, int mode) {
    return GateSpec{GateKind::Displacement, alpha, 0, {mode}};
}

GateSpec GateSpec::squeeze(double r, int mode) {
    return GateSpec{GateKind::Squeeze, 0, r, {mode}};
}

GateSpec GateSpec::phase_shift(double phi, int mode) {
    return GateSpec{GateKind::PhaseShift, 0, phi, {mode}};
}

GateSpec GateSpec::cubic_phase(double eta, int mode) {
    return GateSpec{GateKind::CubicPhase, 0, eta, {mode}};
}

GateSpec GateSpec::beam_splitter(int mode1, int mode2) {
    return GateSpec{GateKind::BeamSplitter5050, 0, 0, {mode1, mode2}};
}

GateSpec GateSpec::cz(double g, int mode1, int mode2) {
    return GateSpec{GateKind::CZ, 0, g, {mode1, mode2}};
}

GateSpec GateSpec::czprime(double g, int mode1, int mode2) {
    return GateSpec{GateKind::CZprime, 0, g, {mode1, mode2}};
}

int GateSpec::arity() const {
    switch (kind) {
        case GateKind::BeamSplitter5050:
        case GateKind::CZ:
        case GateKind::CZprime:
            return 2;
        default:
            return 1;
    }
}

void GateSpec::validate(int modes) const {
    if (static_cast<int>(targets.size()) != arity()) {
        std::stringstream ss;
        ss << gate_kind_name(kind) << " needs " << arity() << " target mode(s), got " << targets.size();
        fail(ErrorKind::InvalidArgument, ss.str());
    }
    std::set<int> seen;
    for (int t : targets) {
        if (t < 0 || t >= modes) {
            fail(ErrorKind::InvalidArgument, std::string(gate_kind_name(kind)) + ": mode index out of range");
        }
        if (!seen.insert(t).second) {
            fail(ErrorKind::InvalidArgument, std::string(gate_kind_name(kind)) + ": target modes must be distinct");
        }
    }
    bool finite = std::isfinite(value) && std::isfinite(alpha.real()) && std::isfinite(alpha.imag());
    if (!finite) {
        fail(ErrorKind::InvalidArgument, std::string(gate_kind_name(kind)) + ": non-finite parameter");
    }
}

namespace {

Mat squeeze_generator(int cutoff) {
    // K = i(a^2 - a^dagger^2)/2, so that S(r) = exp(-i r K).
    auto [a, ad] = build_ladder(cutoff);
    Mat a2 = a.matrix() * a.matrix();
    Mat k = cplx(0, 0.5) * (a2 - a2.adjoint());
    return 0.5 * (k + k.adjoint());
}

Mat embed_two_mode(const Mat &g, int t0, int t1, int cutoff, int modes) {
    size_t d = space_dimension(cutoff, modes);
    Mat out = Mat::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    std::vector<int> occ(modes);
    for (size_t col = 0; col < d; col++) {
        size_t rem = col;
        for (int m = modes - 1; m >= 0; m--) {
            occ[m] = static_cast<int>(rem % cutoff);
            rem /= cutoff;
        }
        int src = occ[t0] * cutoff + occ[t1];
        for (int a = 0; a < cutoff; a++) {
            for (int b = 0; b < cutoff; b++) {
                cplx v = g(a * cutoff + b, src);
                if (v == cplx(0)) {
                    continue;
                }
                std::vector<int> o2 = occ;
                o2[t0] = a;
                o2[t1] = b;
                size_t row = 0;
                for (int m = 0; m < modes; m++) {
                    row = row * cutoff + o2[m];
                }
                out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = v;
            }
        }
    }
    return out;
}

Mat coupling_matrix(const HermitianSpectrum &q, double g, int cutoff) {
    Mat v = kron(q.vectors(), q.vectors());
    Vec ph(cutoff * cutoff);
    for (int i = 0; i < cutoff; i++) {
        for (int j = 0; j < cutoff; j++) {
            ph[i * cutoff + j] = std::polar(1.0, g * q.values()[i] * q.values()[j]);
        }
    }
    return v * ph.asDiagonal() * v.adjoint();
}

}  // namespace

GateFactory::GateFactory(int cutoff)
    : cutoff_(cutoff),
      x_(quadratures(cutoff).first.matrix()),
      p_(quadratures(cutoff).second.matrix()),
      k_(squeeze_generator(cutoff)) {
}

Mat GateFactory::phase_shift(double phi) const {
    Vec d(cutoff_);
    for (int n = 0; n < cutoff_; n++) {
        d[n] = std::polar(1.0, phi * n);
    }
    return d.asDiagonal();
}

Mat GateFactory::displacement(cplx alpha) const {
    // D(alpha) = R(theta) exp(-i sqrt(2) |alpha| p) R(-theta); holds exactly for truncated ladders.
    double t = std::abs(alpha);
    if (t == 0) {
        return Mat::Identity(cutoff_, cutoff_);
    }
    double theta = std::arg(alpha);
    Mat d = p_.exp_i(-std::sqrt(2.0) * t);
    for (int m = 0; m < cutoff_; m++) {
        for (int n = 0; n < cutoff_; n++) {
            d(m, n) *= std::polar(1.0, theta * (m - n));
        }
    }
    return d;
}

Mat GateFactory::squeeze(double r) const {
    return k_.exp_i(-r);
}

Mat GateFactory::cubic_phase(double eta) const {
    return x_.function([eta](double v) {
        return std::polar(1.0, eta * v * v * v / 3);
    });
}

Mat GateFactory::single_mode(const GateSpec &spec) const {
    switch (spec.kind) {
        case GateKind::Displacement:
            return displacement(spec.alpha);
        case GateKind::Squeeze:
            return squeeze(spec.value);
        case GateKind::PhaseShift:
            return phase_shift(spec.value);
        case GateKind::CubicPhase:
            return cubic_phase(spec.value);
        default:
            fail(ErrorKind::InvalidArgument, std::string(gate_kind_name(spec.kind)) + " is not a single-mode gate");
    }
}

namespace {

Mat apply_spectral(const HermitianSpectrum &h, const std::function<cplx(double)> &f, const Mat &x) {
    Mat y = h.vectors().adjoint() * x;
    for (Eigen::Index k = 0; k < y.rows(); k++) {
        y.row(k) *= f(h.values()[k]);
    }
    return h.vectors() * y;
}

}  // namespace

Mat GateFactory::apply(const GateSpec &spec, const Mat &x) const {
    if (x.rows() != cutoff_) {
        fail(ErrorKind::DimensionMismatch, "GateFactory::apply: row count differs from cutoff");
    }
    switch (spec.kind) {
        case GateKind::Displacement: {
            double t = std::abs(spec.alpha);
            double theta = std::arg(spec.alpha);
            Mat y = x;
            for (int n = 0; n < cutoff_; n++) {
                y.row(n) *= std::polar(1.0, -theta * n);
            }
            y = apply_spectral(
                p_,
                [t](double v) {
                    return std::polar(1.0, -std::sqrt(2.0) * t * v);
                },
                y);
            for (int n = 0; n < cutoff_; n++) {
                y.row(n) *= std::polar(1.0, theta * n);
            }
            return y;
        }
        case GateKind::Squeeze: {
            double r = spec.value;
            return apply_spectral(
                k_,
                [r](double v) {
                    return std::polar(1.0, -r * v);
                },
                x);
        }
        case GateKind::PhaseShift: {
            Mat y = x;
            for (int n = 0; n < cutoff_; n++) {
                y.row(n) *= std::polar(1.0, spec.value * n);
            }
            return y;
        }
        case GateKind::CubicPhase: {
            double eta = spec.value;
            return apply_spectral(
                x_,
                [eta](double v) {
                    return std::polar(1.0, eta * v * v * v / 3);
                },
                x);
        }
        default:
            fail(ErrorKind::InvalidArgument, std::string(gate_kind_name(spec.kind)) + " is not a single-mode gate");
    }
}

Mat beam_splitter_matrix(int cutoff) {
    const int c = cutoff;
    Mat out = Mat::Zero(c * c, c * c);
    for (int total = 0; total <= 2 * c - 2; total++) {
        int lo = std::max(0, total - c + 1);
        int hi = std::min(total, c - 1);
        int len = hi - lo + 1;
        // Generator G = a1 a2^dagger - a1^dagger a2 restricted to n1 + n2 = total; H = iG.
        Mat h = Mat::Zero(len, len);
        for (int k = 0; k < len; k++) {
            int n1 = lo + k;
            int n2 = total - n1;
            if (n1 > lo) {
                // a1 a2^dagger |n1, n2> = sqrt(n1 (n2 + 1)) |n1 - 1, n2 + 1>
                h(k - 1, k) += cplx(0, std::sqrt(static_cast<double>(n1) * (n2 + 1)));
            }
            if (n1 < hi) {
                h(k + 1, k) -= cplx(0, std::sqrt(static_cast<double>(n1 + 1) * n2));
            }
        }
        Mat block = HermitianSpectrum(h).exp_i(-M_PI / 4);
        for (int i = 0; i < len; i++) {
            for (int j = 0; j < len; j++) {
                int ri = (lo + i) * c + (total - lo - i);
                int cj = (lo + j) * c + (total - lo - j);
                out(ri, cj) = block(i, j);
            }
        }
    }
    return out;
}

void apply_quadrature_coupling(const HermitianSpectrum &q, double g, int cutoff, Vec &psi) {
    Mat vd = q.vectors().adjoint();
    apply_to_mode(vd, 0, cutoff, 2, psi);
    apply_to_mode(vd, 1, cutoff, 2, psi);
    for (int i = 0; i < cutoff; i++) {
        for (int j = 0; j < cutoff; j++) {
            psi[i * cutoff + j] *= std::polar(1.0, g * q.values()[i] * q.values()[j]);
        }
    }
    apply_to_mode(q.vectors(), 0, cutoff, 2, psi);
    apply_to_mode(q.vectors(), 1, cutoff, 2, psi);
}

DenseOperator build_gate(const GateSpec &spec, int cutoff, int modes) {
    if (cutoff < 2) {
        fail(ErrorKind::InvalidDimension, "gates need cutoff >= 2");
    }
    if (modes == 0) {
        modes = 1 + *std::max_element(spec.targets.begin(), spec.targets.end());
    }
    spec.validate(modes);
    if (spec.arity() == 1) {
        GateFactory f(cutoff);
        DenseOperator single(cutoff, 1, f.single_mode(spec), true);
        return modes == 1 ? single : embed(single, spec.targets[0], modes);
    }
    Mat g2;
    switch (spec.kind) {
        case GateKind::BeamSplitter5050:
            g2 = beam_splitter_matrix(cutoff);
            break;
        case GateKind::CZ:
            g2 = coupling_matrix(HermitianSpectrum(quadratures(cutoff).first.matrix()), spec.value, cutoff);
            break;
        case GateKind::CZprime:
            g2 = coupling_matrix(HermitianSpectrum(quadratures(cutoff).second.matrix()), spec.value, cutoff);
            break;
        default:
            fail(ErrorKind::InvalidArgument, "unexpected gate kind");
    }
    if (modes == 2 && spec.targets[0] == 0 && spec.targets[1] == 1) {
        return DenseOperator(cutoff, 2, std::move(g2), true);
    }
    return DenseOperator(cutoff, modes, embed_two_mode(g2, spec.targets[0], spec.targets[1], cutoff, modes), true);
}

DenseOperator conjugate_quadrature(const DenseOperator &u, const DenseOperator &q) {
    if (u.cutoff() != q.cutoff() || u.modes() != q.modes()) {
        fail(ErrorKind::DimensionMismatch, "conjugate_quadrature: operator spaces differ");
    }
    if (!u.is_unitary()) {
        fail(ErrorKind::InvalidArgument, "conjugate_quadrature expects a unitary-flagged U");
    }
    if (!q.is_hermitian(1e-10 * std::max(1.0, q.matrix().cwiseAbs().maxCoeff()))) {
        fail(ErrorKind::InvalidArgument, "conjugate_quadrature expects a Hermitian Q");
    }
    return DenseOperator(u.cutoff(), u.modes(), u.matrix() * q.matrix() * u.matrix().adjoint());
}

const char *resource_kind_name(ResourceKind kind) {
    switch (kind) {
        case ResourceKind::SqueezedVacuum:
            return "SqueezedVacuum";
        case ResourceKind::AntiSqueezedVacuum:
            return "AntiSqueezedVacuum";
        case ResourceKind::EPRstar:
            return "EPRstar";
        case ResourceKind::Cluster:
            return "Cluster";
        case ResourceKind::CPS:
            return "CPS";
    }
    return "?";
}

ResourceKind parse_resource_kind(const std::string &name) {
    for (ResourceKind k : {ResourceKind::SqueezedVacuum, ResourceKind::AntiSqueezedVacuum, ResourceKind::EPRstar,
                           ResourceKind::Cluster, ResourceKind::CPS}) {
        if (name == resource_kind_name(k)) {
            return k;
        }
    }
    fail(ErrorKind::InvalidArgument, "unknown resource state kind '" + name + "'");
}

int ResourceStateSpec::modes() const {
    return (kind == ResourceKind::EPRstar || kind == ResourceKind::Cluster) ? 2 : 1;
}

void ResourceStateSpec::validate() const {
    if (!std::isfinite(r)) {
        fail(ErrorKind::InvalidArgument, "resource state: non-finite squeezing");
    }
    if (eta.has_value() != (kind == ResourceKind::CPS)) {
        fail(ErrorKind::InvalidArgument, "resource state: eta is required for CPS and only for CPS");
    }
    if (g.has_value() != (kind == ResourceKind::Cluster)) {
        fail(ErrorKind::InvalidArgument, "resource state: g is required for Cluster and only for Cluster");
    }
    if ((eta && !std::isfinite(*eta)) || (g && !std::isfinite(*g))) {
        fail(ErrorKind::InvalidArgument, "resource state: non-finite parameter");
    }
}

ResourceState build_resource_state(const ResourceStateSpec &spec, int cutoff, double norm_tolerance) {
    spec.validate();
    if (cutoff < 2) {
        fail(ErrorKind::InvalidDimension, "resource states need cutoff >= 2");
    }
    const int modes = spec.modes();
    const int work = modes == 1 ? cutoff + std::max(20, cutoff) : cutoff + std::max(10, cutoff / 2);
    GateFactory f(work);
    Vec vac = Vec::Zero(work);
    vac[0] = 1;
    Vec big;
    switch (spec.kind) {
        case ResourceKind::SqueezedVacuum:
            big = f.squeeze(spec.r) * vac;
            break;
        case ResourceKind::AntiSqueezedVacuum:
            big = f.squeeze(-spec.r) * vac;
            break;
        case ResourceKind::CPS:
            big = f.cubic_phase(*spec.eta) * (f.squeeze(-spec.r) * vac);
            break;
        case ResourceKind::EPRstar: {
            Vec s1 = f.squeeze(spec.r) * vac;
            Vec s2 = f.squeeze(-spec.r) * vac;
            big = beam_splitter_matrix(work) * kron(Mat(s1), Mat(s2));
            break;
        }
        case ResourceKind::Cluster: {
            Vec s = f.squeeze(-spec.r) * vac;
            big = kron(Mat(s), Mat(s));
            apply_quadrature_coupling(f.x_spectrum(), *spec.g, work, big);
            break;
        }
    }
    Vec small = truncate_levels(big, work, modes, cutoff);
    double norm = small.norm();
    if (norm < 1 - norm_tolerance) {
        std::stringstream ss;
        ss << resource_kind_name(spec.kind) << " with r=" << spec.r << " keeps norm " << norm << " at cutoff "
           << cutoff << "; raise the cutoff";
        fail(ErrorKind::CutoffTooSmall, ss.str());
    }
    return ResourceState{FockVector(cutoff, modes, small / norm), norm};
}

}  // namespace cvsq
