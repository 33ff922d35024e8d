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

#include "cvsq/projectors.h"

#include <cmath>
#include <sstream>

namespace cvsq {

double delta_r_from_gamma(double gamma, double r) {
    if (!(gamma > 0) || !std::isfinite(r)) {
        fail(ErrorKind::InvalidArgument, "delta_r_from_gamma needs gamma > 0 and finite r");
    }
    return 0.5 * std::log1p(1 / (2 * gamma * std::exp(2 * r)));
}

double gamma_from_delta_r(double delta_r, double r) {
    if (!(delta_r > 0) || !std::isfinite(r)) {
        fail(ErrorKind::InvalidArgument, "gamma_from_delta_r needs delta_r > 0 and finite r");
    }
    return 1 / (2 * std::exp(2 * r) * std::expm1(2 * delta_r));
}

const char *span_policy_name(SpanPolicy policy) {
    return policy == SpanPolicy::PaperLiteral ? "PaperLiteral" : "SigmaScaled";
}

SpanPolicy parse_span_policy(const std::string &name) {
    if (name == "PaperLiteral") {
        return SpanPolicy::PaperLiteral;
    }
    if (name == "SigmaScaled") {
        return SpanPolicy::SigmaScaled;
    }
    fail(ErrorKind::InvalidArgument, "unknown span policy '" + name + "'");
}

double GaussianGrid::weight_sum() const {
    double s = 0;
    for (double w : weights) {
        s += w;
    }
    return s;
}

double GaussianGrid::spacing() const {
    double half = policy == SpanPolicy::PaperLiteral ? std::sqrt(2 * gamma) : k_sigma / std::sqrt(2 * gamma);
    return 2 * half / count;
}

GaussianGrid discretize_gaussian(double gamma, int count, SpanPolicy policy, double k_sigma) {
    if (!(gamma > 0) || !std::isfinite(gamma)) {
        fail(ErrorKind::InvalidArgument, "discretize_gaussian needs a finite gamma > 0");
    }
    if (count < 1) {
        fail(ErrorKind::InvalidArgument, "discretize_gaussian needs at least one point");
    }
    if (policy == SpanPolicy::SigmaScaled && !(k_sigma > 0)) {
        fail(ErrorKind::InvalidArgument, "discretize_gaussian needs k_sigma > 0");
    }
    GaussianGrid g;
    g.gamma = gamma;
    g.policy = policy;
    g.count = count;
    g.k_sigma = k_sigma;
    const double h = g.spacing();
    const double half = h * count / 2;
    const double norm = std::sqrt(gamma / M_PI);
    g.points.resize(count);
    g.weights.resize(count);
    for (int i = 0; i < count; i++) {
        int mirror = count - 1 - i;
        if (mirror < i) {
            g.points[i] = -g.points[mirror];
            g.weights[i] = g.weights[mirror];
            continue;
        }
        double x = (2 * i + 1 == count) ? 0.0 : -half + (i + 0.5) * h;
        g.points[i] = x;
        g.weights[i] = norm * std::exp(-gamma * x * x) * h;
    }
    return g;
}

std::vector<GateSpec> GaussianFactorization::sequence(int mode) const {
    return {GateSpec::phase_shift(phi1, mode), GateSpec::squeeze(r, mode), GateSpec::phase_shift(phi2, mode),
            GateSpec::displacement(alpha, mode)};
}

GaussianFactorization cps_stabilizer_factorization(double x0, double eta) {
    if (!std::isfinite(x0) || !std::isfinite(eta)) {
        fail(ErrorKind::InvalidArgument, "cps_stabilizer_factorization needs finite inputs");
    }
    // The symplectic part [[1, 0], [2 eta x0, 1]] splits as Rot(phi2) diag(e^{-r}, e^{r}) Rot(phi1);
    // the displacement carries the affine shift (x0, eta x0^2) and the phase matches vacuum
    // amplitudes of both sides.
    const double y = -x0;
    const double s = std::sqrt(1 + eta * eta * y * y);
    GaussianFactorization f;
    f.phi1 = std::atan(s - eta * y);
    f.r = std::log(s - eta * y);
    f.phi2 = -std::atan(s + eta * y);
    f.alpha = cplx(-y, eta * y * y) / std::sqrt(2.0);
    cplx lhs = -0.5 * std::log(cplx(1, eta * y)) - cplx(0, eta * y * y * y / 12);
    cplx rhs = std::conj(f.alpha) * std::conj(f.alpha) * std::polar(1.0, 2 * f.phi2) * std::tanh(f.r) / 2.0;
    f.phase = (lhs + rhs).imag();
    return f;
}

const char *projector_kind_name(ProjectorKind kind) {
    switch (kind) {
        case ProjectorKind::Sq:
            return "Sq";
        case ProjectorKind::Asq:
            return "Asq";
        case ProjectorKind::EPR:
            return "EPR";
        case ProjectorKind::Cluster:
            return "Cluster";
        case ProjectorKind::CPS:
            return "CPS";
    }
    return "?";
}

ProjectorKind parse_projector_kind(const std::string &name) {
    for (ProjectorKind k :
         {ProjectorKind::Sq, ProjectorKind::Asq, ProjectorKind::EPR, ProjectorKind::Cluster, ProjectorKind::CPS}) {
        if (name == projector_kind_name(k)) {
            return k;
        }
    }
    fail(ErrorKind::InvalidArgument, "unknown projector kind '" + name + "'");
}

int projector_modes(ProjectorKind kind) {
    return (kind == ProjectorKind::EPR || kind == ProjectorKind::Cluster) ? 2 : 1;
}

double SmearedProjector::weight_sum() const {
    double s = 0;
    for (const auto &t : terms) {
        s += t.weight;
    }
    return s;
}

bool SmearedProjector::is_separable() const {
    for (const auto &t : terms) {
        if (static_cast<int>(t.factors.size()) != modes) {
            return false;
        }
        for (int m = 0; m < modes; m++) {
            for (const auto &g : t.factors[m]) {
                if (g.arity() != 1 || g.targets[0] != m) {
                    return false;
                }
                if (modes == 2 && g.kind != GateKind::Displacement) {
                    return false;
                }
            }
        }
    }
    return true;
}

namespace {

void validate_params(ProjectorKind kind, double gamma, const ProjectorParams &params) {
    if (!(gamma > 0) || !std::isfinite(gamma)) {
        fail(ErrorKind::InvalidArgument, "projector needs a finite gamma > 0");
    }
    if (kind == ProjectorKind::Cluster && !params.g) {
        fail(ErrorKind::InvalidArgument, "Cluster projector needs the gain g");
    }
    if (kind == ProjectorKind::CPS && !params.eta) {
        fail(ErrorKind::InvalidArgument, "CPS projector needs the nonlinearity eta");
    }
}

bool needs_working_space(const std::vector<GateSpec> &seq) {
    return !(seq.size() == 1 && seq[0].kind == GateKind::Displacement);
}

}  // namespace

SmearedProjector build_smeared_projector(ProjectorKind kind, double gamma, const ProjectorParams &params,
                                         const GaussianGrid &grid) {
    validate_params(kind, gamma, params);
    if (std::abs(grid.gamma - gamma) > 1e-12 * gamma) {
        fail(ErrorKind::InvalidArgument, "grid was discretized for a different gamma");
    }
    SmearedProjector p;
    p.kind = kind;
    p.gamma = gamma;
    p.params = params;
    p.grid = grid;
    p.modes = projector_modes(kind);
    const double s2 = std::sqrt(2.0);
    const size_t n = grid.points.size();
    if (p.modes == 1) {
        p.terms.reserve(n);
        for (size_t i = 0; i < n; i++) {
            double x = grid.points[i];
            ProjectorTerm t;
            t.weight = grid.weights[i];
            t.abscissae = {x};
            switch (kind) {
                case ProjectorKind::Sq:
                    t.factors = {{GateSpec::displacement(cplx(0, x / s2))}};
                    break;
                case ProjectorKind::Asq:
                    t.factors = {{GateSpec::displacement(cplx(x / s2, 0))}};
                    break;
                default: {
                    GaussianFactorization f = cps_stabilizer_factorization(x, *params.eta);
                    t.factors = {f.sequence(0)};
                    t.phase = std::polar(1.0, f.phase);
                }
            }
            p.terms.push_back(std::move(t));
        }
        return p;
    }
    p.terms.reserve(n * n);
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            double u = grid.points[i];
            double v = grid.points[j];
            ProjectorTerm t;
            t.weight = grid.weights[i] * grid.weights[j];
            t.abscissae = {u, v};
            if (kind == ProjectorKind::EPR) {
                t.factors = {{GateSpec::displacement(cplx(u, v) / 2.0, 0)},
                             {GateSpec::displacement(cplx(u, -v) / 2.0, 1)}};
            } else {
                double g = *params.g;
                t.factors = {{GateSpec::displacement(cplx(u, g * v) / s2, 0)},
                             {GateSpec::displacement(cplx(v, g * u) / s2, 1)}};
            }
            p.terms.push_back(std::move(t));
        }
    }
    return p;
}

DenseOperator exact_projector_form(ProjectorKind kind, double gamma, const ProjectorParams &params, int cutoff,
                                   int working_cutoff) {
    validate_params(kind, gamma, params);
    const int modes = projector_modes(kind);
    int w = working_cutoff > 0 ? working_cutoff : (modes == 1 ? 2 * cutoff : cutoff);
    if (w < cutoff) {
        fail(ErrorKind::InvalidArgument, "working cutoff below the target cutoff");
    }
    auto [x, p] = quadratures(w);
    Mat big;
    auto gauss = [gamma](double denom) {
        return [gamma, denom](double v) {
            return cplx(std::exp(-v / (denom * gamma)), 0);
        };
    };
    auto gauss_sq = [gamma](double v) {
        return cplx(std::exp(-v * v / (4 * gamma)), 0);
    };
    switch (kind) {
        case ProjectorKind::Sq:
            big = HermitianSpectrum(x.matrix()).function(gauss_sq);
            break;
        case ProjectorKind::Asq:
            big = HermitianSpectrum(p.matrix()).function(gauss_sq);
            break;
        case ProjectorKind::CPS: {
            Mat n = p.matrix() - *params.eta * x.matrix() * x.matrix();
            big = HermitianSpectrum(0.5 * (n + n.adjoint())).function(gauss_sq);
            break;
        }
        case ProjectorKind::EPR:
        case ProjectorKind::Cluster: {
            Mat id = Mat::Identity(w, w);
            Mat x1 = kron(x.matrix(), id), x2 = kron(id, x.matrix());
            Mat p1 = kron(p.matrix(), id), p2 = kron(id, p.matrix());
            Mat n;
            double denom;
            if (kind == ProjectorKind::EPR) {
                Mat u = x1 - x2, v = p1 + p2;
                n = u * u + v * v;
                denom = 8;
            } else {
                double g = *params.g;
                Mat u = p1 - g * x2, v = p2 - g * x1;
                n = u * u + v * v;
                denom = 4;
            }
            big = HermitianSpectrum(0.5 * (n + n.adjoint())).function(gauss(denom));
            break;
        }
    }
    Mat out = w == cutoff ? big : truncate_levels(big, w, modes, cutoff);
    return DenseOperator(cutoff, modes, std::move(out));
}

int default_working_cutoff(int cutoff) {
    return 2 * cutoff + 40;
}

TermEvaluator::TermEvaluator(int cutoff, int working_cutoff)
    : cutoff_(cutoff), work_(std::max(cutoff, working_cutoff)), factory_(std::max(2, std::max(cutoff, working_cutoff))) {
}

Mat TermEvaluator::apply(const std::vector<GateSpec> &sequence, const Mat &x) const {
    if (x.rows() != cutoff_) {
        fail(ErrorKind::DimensionMismatch, "TermEvaluator::apply: row count differs from cutoff");
    }
    if (sequence.empty()) {
        return x;
    }
    if (!needs_working_space(sequence)) {
        return displacement_elements(sequence[0].alpha, cutoff_, cutoff_) * x;
    }
    Mat y = Mat::Zero(work_, x.cols());
    y.topRows(cutoff_) = x;
    for (size_t k = 0; k < sequence.size(); k++) {
        const GateSpec &g = sequence[k];
        if (g.kind == GateKind::Displacement) {
            bool last = k + 1 == sequence.size();
            Mat d = displacement_elements(g.alpha, last ? cutoff_ : work_, work_);
            if (last) {
                return d * y;
            }
            y = d * y;
        } else {
            y = factory_.apply(g, y);
        }
    }
    return y.topRows(cutoff_);
}

Mat TermEvaluator::matrix(const std::vector<GateSpec> &sequence) const {
    return apply(sequence, Mat::Identity(cutoff_, cutoff_));
}

namespace {

void require_projector_space(const SmearedProjector &p, int modes) {
    if (p.modes != modes) {
        std::stringstream ss;
        ss << projector_kind_name(p.kind) << " projector acts on " << p.modes << " mode(s), state has " << modes;
        fail(ErrorKind::DimensionMismatch, ss.str());
    }
}

int working_cutoff_for(const SmearedProjector &p, int cutoff) {
    for (const auto &t : p.terms) {
        for (const auto &seq : t.factors) {
            if (needs_working_space(seq)) {
                return default_working_cutoff(cutoff);
            }
        }
    }
    return cutoff;
}

/// Per-mode compressed factor matrices of one term.
Mat mode_matrix(const TermEvaluator &ev, const std::vector<GateSpec> &seq) {
    if (!needs_working_space(seq)) {
        return displacement_elements(seq[0].alpha, ev.cutoff(), ev.cutoff());
    }
    return ev.matrix(seq);
}

Vec apply_terms(const SmearedProjector &p, const Vec &psi, int cutoff) {
    TermEvaluator ev(cutoff, working_cutoff_for(p, cutoff));
    if (p.modes == 1) {
        Mat acc = Mat::Zero(cutoff, 1);
        for (const auto &t : p.terms) {
            acc += (t.weight * t.phase) * ev.apply(t.factors[0], psi);
        }
        return acc.col(0);
    }
    // psi viewed column-major as X(n2, n1); (A (x) B) psi becomes B X A^T.
    Eigen::Map<const Mat> x(psi.data(), cutoff, cutoff);
    Mat acc = Mat::Zero(cutoff, cutoff);
    Mat tmp;
    for (const auto &t : p.terms) {
        Mat a = mode_matrix(ev, t.factors[0]);
        Mat b = mode_matrix(ev, t.factors[1]);
        tmp.noalias() = b * x;
        acc.noalias() += (t.weight * t.phase) * tmp * a.transpose();
    }
    return Eigen::Map<Vec>(acc.data(), cutoff * cutoff);
}

}  // namespace

DenseOperator dense_sum(const SmearedProjector &p, int cutoff) {
    TermEvaluator ev(cutoff, working_cutoff_for(p, cutoff));
    auto d = static_cast<Eigen::Index>(space_dimension(cutoff, p.modes));
    Mat acc = Mat::Zero(d, d);
    for (const auto &t : p.terms) {
        if (p.modes == 1) {
            acc += (t.weight * t.phase) * mode_matrix(ev, t.factors[0]);
        } else {
            acc += (t.weight * t.phase) * kron(mode_matrix(ev, t.factors[0]), mode_matrix(ev, t.factors[1]));
        }
    }
    return DenseOperator(cutoff, p.modes, std::move(acc));
}

PureProjection apply_projector(const SmearedProjector &p, const FockVector &psi) {
    require_projector_space(p, psi.modes());
    Vec out = apply_terms(p, psi.amplitudes(), psi.cutoff());
    double q = out.squaredNorm();
    return PureProjection{FockVector(psi.cutoff(), psi.modes(), std::move(out)), q};
}

PureProjection apply_projector(const DenseOperator &p, const FockVector &psi) {
    FockVector out = p.apply(psi);
    double q = out.norm_squared();
    return PureProjection{std::move(out), q};
}

MixedProjection apply_projector(const SmearedProjector &p, const DensityOperator &rho) {
    require_projector_space(p, rho.modes());
    if (p.modes == 1) {
        return apply_projector(dense_sum(p, rho.cutoff()), rho);
    }
    // Two-mode dense sums are expensive; project the eigen-ensemble instead.
    HermitianSpectrum s(rho.matrix());
    double top = std::max(1e-300, s.values().cwiseAbs().maxCoeff());
    Mat acc = Mat::Zero(rho.matrix().rows(), rho.matrix().cols());
    for (Eigen::Index k = 0; k < s.values().size(); k++) {
        double lam = s.values()[k];
        if (std::abs(lam) <= 1e-13 * top) {
            continue;
        }
        Vec v = apply_terms(p, s.vectors().col(k), rho.cutoff());
        acc += lam * v * v.adjoint();
    }
    DensityOperator out(rho.cutoff(), rho.modes(), std::move(acc), 1e-8);
    double q = out.trace();
    return MixedProjection{std::move(out), q};
}

MixedProjection apply_projector(const DenseOperator &p, const DensityOperator &rho) {
    if (p.cutoff() != rho.cutoff() || p.modes() != rho.modes()) {
        fail(ErrorKind::DimensionMismatch, "projector and state spaces differ");
    }
    Mat out = p.matrix() * rho.matrix() * p.matrix().adjoint();
    DensityOperator state(rho.cutoff(), rho.modes(), std::move(out), 1e-8);
    double q = state.trace();
    return MixedProjection{std::move(state), q};
}

}  // namespace cvsq
