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

#include "cvsq/knitting.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cvsq/gates.h"
#include "cvsq/hermite.h"

namespace cvsq {

TeleportResource TeleportResource::cluster(double r, double g) {
    if (!std::isfinite(r) || !std::isfinite(g) || r < 0) {
        fail(ErrorKind::InvalidArgument, "cluster resource needs finite r >= 0 and finite g");
    }
    TeleportResource res;
    res.kind = Kind::Cluster;
    res.r = r;
    res.g = g;
    return res;
}

TeleportResource TeleportResource::product(const FockVector &a, const FockVector &b) {
    if (a.modes() != 1 || b.modes() != 1) {
        fail(ErrorKind::InvalidDimension, "product resource takes two single-mode kets");
    }
    TeleportResource res;
    res.kind = Kind::Product;
    res.terms.push_back({1, a.normalized(), b.normalized()});
    return res;
}

TeleportResource TeleportResource::two_mode(const FockVector &ket, double tol) {
    if (ket.modes() != 2) {
        fail(ErrorKind::InvalidDimension, "two_mode resource takes a two-mode ket");
    }
    const int c = ket.cutoff();
    FockVector n = ket.normalized();
    // Row index n1, column n2 for the mode-major layout.
    Mat x(c, c);
    for (int i = 0; i < c; i++) {
        for (int j = 0; j < c; j++) {
            x(i, j) = n[static_cast<size_t>(i * c + j)];
        }
    }
    Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
    TeleportResource res;
    res.kind = Kind::Product;
    for (int k = 0; k < c; k++) {
        double s = svd.singularValues()[k];
        if (s < tol) {
            break;
        }
        res.terms.push_back({s, FockVector(c, 1, svd.matrixU().col(k)), FockVector(c, 1, svd.matrixV().col(k).conjugate())});
    }
    return res;
}

void TeleportModel::validate() const {
    if (output_cutoff < 2) {
        fail(ErrorKind::InvalidDimension, "teleport output cutoff must be >= 2");
    }
    if (!(x_max > 0) || x_points < 8 || outcome_points < 2 || !(outcome_sigmas > 0)) {
        fail(ErrorKind::InvalidArgument, "teleport grids need a positive span and enough points");
    }
    const double nyquist = M_PI * (x_points - 1) / (2 * x_max);
    if (nyquist < x_max) {
        std::stringstream ss;
        ss << "position grid too coarse for the C_z kernel: spacing " << 2 * x_max / (x_points - 1);
        fail(ErrorKind::Configuration, ss.str());
    }
    if (samples < 1) {
        fail(ErrorKind::InvalidArgument, "teleport sampling needs samples >= 1");
    }
    // The averaged output is a dense c^2 x c^2 matrix.
    if (output_cutoff > 64) {
        fail(ErrorKind::MemoryGuard, "teleport output cutoff above 64 exceeds the memory guard");
    }
}

double implied_cluster_squeezing(double gamma) {
    if (!(gamma > 0) || !(gamma < 1)) {
        fail(ErrorKind::InvalidArgument, "implied cluster squeezing needs 0 < gamma < 1");
    }
    return -0.5 * std::log(2 * gamma / (1 + gamma));
}

FockVector czprime_reference(const FockVector &psi1, const FockVector &psi2, int cutoff, double g) {
    if (psi1.modes() != 1 || psi2.modes() != 1) {
        fail(ErrorKind::InvalidDimension, "czprime_reference takes single-mode inputs");
    }
    const int w = std::max({psi1.cutoff(), psi2.cutoff(), cutoff}) + 40;
    Vec a = pad_levels(psi1.amplitudes(), psi1.cutoff(), 1, w);
    Vec b = pad_levels(psi2.amplitudes(), psi2.cutoff(), 1, w);
    Vec v(static_cast<Eigen::Index>(w) * w);
    for (int i = 0; i < w; i++) {
        v.segment(static_cast<Eigen::Index>(i) * w, w) = a[i] * b;
    }
    GateFactory f(w);
    apply_quadrature_coupling(f.p_spectrum(), g, w, v);
    return FockVector(cutoff, 2, truncate_levels(v, w, 2, cutoff)).normalized();
}

namespace {

struct Moments {
    double mean = 0;
    double var = 0;
};

Moments quadrature_moments(const FockVector &psi, bool momentum) {
    const int w = psi.cutoff() + 2;
    Vec v = pad_levels(psi.normalized().amplitudes(), psi.cutoff(), 1, w);
    auto [x, p] = quadratures(w);
    const Mat &q = momentum ? p.matrix() : x.matrix();
    Vec qv = q * v;
    Moments m;
    m.mean = v.dot(qv).real();
    m.var = std::max(qv.squaredNorm() - m.mean * m.mean, 0.0);
    return m;
}

std::vector<double> uniform_points(double x_max, int n) {
    std::vector<double> xs(static_cast<size_t>(n));
    const double dx = 2 * x_max / (n - 1);
    for (int i = 0; i < n; i++) {
        xs[i] = -x_max + i * dx;
    }
    return xs;
}

std::vector<double> outcome_grid(double center, double sigma, const TeleportModel &m, double *spacing) {
    const double half = m.outcome_sigmas * sigma;
    *spacing = 2 * half / m.outcome_points;
    std::vector<double> out(static_cast<size_t>(m.outcome_points));
    for (int i = 0; i < m.outcome_points; i++) {
        out[i] = center - half + (i + 0.5) * *spacing;
    }
    return out;
}

std::vector<double> shifted(const std::vector<double> &xs, double scale, double offset) {
    std::vector<double> out(xs.size());
    for (size_t i = 0; i < xs.size(); i++) {
        out[i] = scale * xs[i] + offset;
    }
    return out;
}

/// Multiplies c(n) by (-i)^n: R(-pi/2) on a Fock coefficient vector.
void rotate_minus_quarter(Vec &c) {
    const cplx phases[4] = {1, cplx(0, -1), -1, cplx(0, 1)};
    for (Eigen::Index n = 0; n < c.size(); n++) {
        c[n] *= phases[n % 4];
    }
}

/// Computes the unnormalized conditional outputs C(n, k) (output-1 level n, output-2 level k),
/// already rotated, for every outcome of one row m1 = outcomes_1[i].
class TeleportKernel {
   public:
    TeleportKernel(const FockVector &psi1, const FockVector &psi2, const TeleportResource &res,
                   const TeleportModel &model)
        : psi1_(psi1.normalized()), psi2_(psi2.normalized()), res_(res), model_(model) {
        model.validate();
        xs_ = uniform_points(model.x_max, model.x_points);
        const double dx = xs_[1] - xs_[0];
        h_ = (hermite_matrix(model.output_cutoff, xs_) * dx).cast<cplx>();
        // psi~(-x) on the grid.
        in1_ = momentum_wavefunction(psi1_, shifted(xs_, -1, 0));
        in2_ = momentum_wavefunction(psi2_, shifted(xs_, -1, 0));

        Moments p1 = quadrature_moments(psi1_, true);
        Moments p2 = quadrature_moments(psi2_, true);
        Moments xa, xb;
        if (res.kind == TeleportResource::Kind::Cluster) {
            xa.var = xb.var = std::exp(2 * res.r) / 2;
        } else {
            if (res.terms.empty()) {
                fail(ErrorKind::InvalidArgument, "product resource has no terms");
            }
            double wsum = 0;
            for (const auto &t : res.terms) {
                double w = std::norm(t.weight);
                Moments ma = quadrature_moments(t.a, false);
                Moments mb = quadrature_moments(t.b, false);
                xa.mean += w * ma.mean;
                xa.var += w * (ma.var + ma.mean * ma.mean);
                xb.mean += w * mb.mean;
                xb.var += w * (mb.var + mb.mean * mb.mean);
                wsum += w;
            }
            xa.mean /= wsum;
            xb.mean /= wsum;
            xa.var = std::max(xa.var / wsum - xa.mean * xa.mean, 0.0);
            xb.var = std::max(xb.var / wsum - xb.mean * xb.mean, 0.0);
        }
        m1_ = outcome_grid(p1.mean + xa.mean, std::sqrt(p1.var + xa.var), model, &dm1_);
        m2_ = outcome_grid(p2.mean + xb.mean, std::sqrt(p2.var + xb.var), model, &dm2_);

        const int n = model.x_points;
        if (res.kind == TeleportResource::Kind::Cluster) {
            kernel_ = Mat(n, n);
            for (int i = 0; i < n; i++) {
                for (int j = 0; j < n; j++) {
                    kernel_(i, j) = std::polar(1.0, res.g * xs_[i] * xs_[j]);
                }
            }
            if (model.feedforward) {
                v_rows_.reserve(m2_.size());
                for (double m2 : m2_) {
                    v_rows_.push_back(in2_.cwiseProduct(squeezed(shifted(xs_, 1, m2))));
                }
            } else {
                Vec s = squeezed(xs_);
                for (double m2 : m2_) {
                    Vec v = momentum_wavefunction(psi2_, shifted(xs_, -1, m2));
                    v_rows_.push_back(v.cwiseProduct(s));
                }
            }
        } else {
            // Per term, the output-2 factor before its m1-dependent kick.
            for (const auto &t : res.terms) {
                std::vector<Vec> rows;
                for (double m2 : m2_) {
                    if (model.feedforward) {
                        rows.push_back(in2_.cwiseProduct(position_wavefunction(t.b, shifted(xs_, 1, m2))));
                    } else {
                        Vec v = momentum_wavefunction(psi2_, shifted(xs_, -1, m2));
                        rows.push_back(v.cwiseProduct(position_wavefunction(t.b, xs_)));
                    }
                }
                b_rows_.push_back(std::move(rows));
            }
        }
    }

    const std::vector<double> &outcomes_1() const {
        return m1_;
    }
    const std::vector<double> &outcomes_2() const {
        return m2_;
    }
    double cell() const {
        return dm1_ * dm2_;
    }

    std::vector<Mat> row(size_t i) const {
        const double m1 = m1_[i];
        const int co = model_.output_cutoff;
        std::vector<Mat> out;
        out.reserve(m2_.size());
        if (res_.kind == TeleportResource::Kind::Cluster) {
            Vec u;
            if (model_.feedforward) {
                u = in1_.cwiseProduct(squeezed(shifted(xs_, 1, m1)));
            } else {
                u = momentum_wavefunction(psi1_, shifted(xs_, -1, m1)).cwiseProduct(squeezed(xs_));
            }
            const bool plain = !model_.feedforward || res_.g == 1;
            Mat left;
            if (plain) {
                left = (h_ * u.asDiagonal()) * kernel_;
            }
            for (size_t j = 0; j < m2_.size(); j++) {
                Vec v = v_rows_[j];
                Mat c;
                if (plain) {
                    c = left * v.asDiagonal() * h_.transpose();
                } else {
                    // A cluster gain other than one leaves outcome-dependent kicks on both sides.
                    const double beta = res_.g - 1;
                    Vec uk = u, vk = v;
                    for (int k = 0; k < model_.x_points; k++) {
                        uk[k] *= std::polar(1.0, beta * m2_[j] * xs_[k]);
                        vk[k] *= std::polar(1.0, beta * m1 * xs_[k]);
                    }
                    c = (h_ * uk.asDiagonal()) * kernel_ * vk.asDiagonal() * h_.transpose();
                }
                out.push_back(rotated(c));
            }
            return out;
        }
        std::vector<Vec> a_row;
        for (const auto &t : res_.terms) {
            if (model_.feedforward) {
                a_row.push_back(in1_.cwiseProduct(position_wavefunction(t.a, shifted(xs_, 1, m1))));
            } else {
                Vec u = momentum_wavefunction(psi1_, shifted(xs_, -1, m1));
                a_row.push_back(u.cwiseProduct(position_wavefunction(t.a, xs_)));
            }
        }
        Vec kick1(model_.x_points);
        for (int k = 0; k < model_.x_points; k++) {
            kick1[k] = model_.feedforward ? std::polar(1.0, -m1 * xs_[k]) : cplx(1, 0);
        }
        for (size_t j = 0; j < m2_.size(); j++) {
            Mat c = Mat::Zero(co, co);
            Vec kick2(model_.x_points);
            for (int k = 0; k < model_.x_points; k++) {
                kick2[k] = model_.feedforward ? std::polar(1.0, -m2_[j] * xs_[k]) : cplx(1, 0);
            }
            for (size_t t = 0; t < res_.terms.size(); t++) {
                Vec ca = h_ * a_row[t].cwiseProduct(kick2);
                Vec cb = h_ * b_rows_[t][j].cwiseProduct(kick1);
                c += res_.terms[t].weight * ca * cb.transpose();
            }
            out.push_back(rotated(c));
        }
        return out;
    }

    Vec to_ket(const Mat &c) const {
        const int co = model_.output_cutoff;
        Vec v(static_cast<Eigen::Index>(co) * co);
        for (int n = 0; n < co; n++) {
            for (int k = 0; k < co; k++) {
                v[n * co + k] = c(n, k);
            }
        }
        return v;
    }

   private:
    Vec squeezed(const std::vector<double> &pts) const {
        const double e2r = std::exp(2 * res_.r);
        const double norm = std::pow(M_PI * e2r, -0.25);
        Vec s(static_cast<Eigen::Index>(pts.size()));
        for (size_t k = 0; k < pts.size(); k++) {
            s[static_cast<Eigen::Index>(k)] = norm * std::exp(-pts[k] * pts[k] / (2 * e2r));
        }
        return s;
    }

    Mat rotated(const Mat &c) const {
        const cplx phases[4] = {1, cplx(0, -1), -1, cplx(0, 1)};
        Mat out = c;
        for (Eigen::Index n = 0; n < c.rows(); n++) {
            for (Eigen::Index k = 0; k < c.cols(); k++) {
                out(n, k) *= phases[(n + k) % 4];
            }
        }
        return out;
    }

    FockVector psi1_;
    FockVector psi2_;
    TeleportResource res_;
    TeleportModel model_;
    std::vector<double> xs_;
    Mat h_;
    Vec in1_;
    Vec in2_;
    std::vector<double> m1_;
    std::vector<double> m2_;
    double dm1_ = 0;
    double dm2_ = 0;
    Mat kernel_;
    std::vector<Vec> v_rows_;
    std::vector<std::vector<Vec>> b_rows_;
};

}  // namespace

TeleportResult teleport_czp(const FockVector &psi1, const FockVector &psi2, const TeleportResource &resource,
                            const TeleportModel &model, TeleportMode mode) {
    if (psi1.modes() != 1 || psi2.modes() != 1) {
        fail(ErrorKind::InvalidDimension, "teleport_czp takes single-mode inputs");
    }
    TeleportKernel kernel(psi1, psi2, resource, model);
    const int co = model.output_cutoff;
    const size_t dim = static_cast<size_t>(co) * co;
    const size_t n1 = kernel.outcomes_1().size();
    const size_t n2 = kernel.outcomes_2().size();
    const double cell = kernel.cell();
    Mat rho = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    TeleportResult result{DensityOperator::from_ket(FockVector::vacuum(co, 2)), {}, 0, kernel.outcomes_1(),
                          kernel.outcomes_2()};

    if (mode == TeleportMode::EnsembleAveraged) {
        for (size_t i = 0; i < n1; i++) {
            std::vector<Mat> row = kernel.row(i);
            Mat cols(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n2));
            for (size_t j = 0; j < n2; j++) {
                cols.col(static_cast<Eigen::Index>(j)) = kernel.to_ket(row[j]);
            }
            rho.noalias() += cell * cols * cols.adjoint();
        }
    } else {
        std::vector<double> prob(n1 * n2);
        for (size_t i = 0; i < n1; i++) {
            std::vector<Mat> row = kernel.row(i);
            for (size_t j = 0; j < n2; j++) {
                prob[i * n2 + j] = cell * row[j].squaredNorm();
            }
        }
        std::vector<double> marginal(n1, 0.0);
        for (size_t i = 0; i < n1; i++) {
            for (size_t j = 0; j < n2; j++) {
                marginal[i] += prob[i * n2 + j];
            }
        }
        // Wire 1 is measured first; wire 2 is then drawn from the collapsed conditional.
        Rng rng = trajectory_rng(model.seed, 0);
        std::discrete_distribution<size_t> first(marginal.begin(), marginal.end());
        std::vector<std::pair<size_t, size_t>> picks;
        for (int s = 0; s < model.samples; s++) {
            size_t i = first(rng);
            std::discrete_distribution<size_t> second(prob.begin() + static_cast<long>(i * n2),
                                                      prob.begin() + static_cast<long>((i + 1) * n2));
            picks.push_back({i, second(rng)});
        }
        std::vector<size_t> order(picks.size());
        for (size_t k = 0; k < order.size(); k++) {
            order[k] = k;
        }
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return picks[a].first < picks[b].first; });
        result.samples.assign(picks.size(), TeleportSample{0, 0, FockVector::vacuum(co, 2)});
        size_t cached = n1;
        std::vector<Mat> row;
        for (size_t k : order) {
            auto [i, j] = picks[k];
            if (i != cached) {
                row = kernel.row(i);
                cached = i;
            }
            FockVector out = FockVector(co, 2, kernel.to_ket(row[j])).normalized();
            result.samples[k] = {kernel.outcomes_1()[i], kernel.outcomes_2()[j], out};
        }
        for (const auto &s : result.samples) {
            rho.noalias() += s.state.amplitudes() * s.state.amplitudes().adjoint();
        }
        rho /= static_cast<double>(result.samples.size());
        double total = 0;
        for (double p : prob) {
            total += p;
        }
        result.grid_norm = total;
    }
    rho = 0.5 * (rho + rho.adjoint());
    if (mode == TeleportMode::EnsembleAveraged) {
        result.grid_norm = rho.trace().real();
    }
    if (!(rho.trace().real() > 0)) {
        fail(ErrorKind::DegenerateProjection, "teleported output vanished on the grid");
    }
    result.output = DensityOperator(co, 2, rho).normalized();
    return result;
}

// ---------------------------------------------------------------------------------------------
// Knitting

int knit_side(int mode) {
    return mode == 0 || mode == 2 ? 0 : 1;
}

namespace {

/// <x|alpha> for D(alpha)|0> = exp(i sqrt2 (Im a x - Re a p))|0>.
void coherent_wavefunction(cplx alpha, const std::vector<double> &xs, double shift, Vec &out) {
    const double c = std::sqrt(2.0) * alpha.real();
    const double k = std::sqrt(2.0) * alpha.imag();
    const double norm = std::pow(M_PI, -0.25);
    const double phase0 = -alpha.real() * alpha.imag();
    for (size_t i = 0; i < xs.size(); i++) {
        double x = xs[i] + shift;
        out[static_cast<Eigen::Index>(i)] = norm * std::exp(-(x - c) * (x - c) / 2) * std::polar(1.0, k * x + phase0);
    }
}

double normal_pdf(double x, double mean, double sd) {
    double z = (x - mean) / sd;
    return std::exp(-z * z / 2) / (sd * std::sqrt(2 * M_PI));
}

std::vector<KnitOperation> knit_circuit() {
    return {
        {"displace_ancilla", {2}},
        {"displace_ancilla", {3}},
        {"cz", {0, 2}},
        {"cz", {1, 3}},
        {"homodyne_p", {0}},
        {"homodyne_p", {1}},
        {"feedforward_displace", {2}},
        {"feedforward_displace", {3}},
        {"phase_shift", {2}},
        {"phase_shift", {3}},
    };
}

long cross_cut(const std::vector<KnitOperation> &ops) {
    long count = 0;
    for (const auto &op : ops) {
        int side = knit_side(op.modes.front());
        for (int m : op.modes) {
            if (knit_side(m) != side) {
                count++;
                break;
            }
        }
    }
    return count;
}

}  // namespace

KnitReport knit_czp_expectation(const FockVector &psi1, const FockVector &psi2,
                                const std::vector<Observable> &observables, double gamma, double g,
                                const KnitParams &params) {
    if (psi1.modes() != 1 || psi2.modes() != 1) {
        fail(ErrorKind::InvalidDimension, "knitting takes single-mode inputs");
    }
    if (!(gamma > 0) || !std::isfinite(gamma) || !std::isfinite(g)) {
        fail(ErrorKind::InvalidArgument, "knitting needs gamma > 0 and finite g");
    }
    if (params.samples < 2 || !(params.proposal_widen >= 1)) {
        fail(ErrorKind::InvalidArgument, "knitting needs samples >= 2 and proposal_widen >= 1");
    }
    const TeleportModel &model = params.model;
    model.validate();
    const int co = model.output_cutoff;
    for (const auto &o : observables) {
        if (o.modes() != 2 || o.cutoff() != co) {
            fail(ErrorKind::DimensionMismatch, "knitting observables act on the two outputs at the output cutoff");
        }
        if (o.is_dense()) {
            fail(ErrorKind::Unsupported, "knitting observables must be given as product terms");
        }
    }
    FockVector in1 = psi1.normalized();
    FockVector in2 = psi2.normalized();
    std::vector<double> xs = uniform_points(model.x_max, model.x_points);
    const double dx = xs[1] - xs[0];
    const Mat h = (hermite_matrix(co, xs) * dx).cast<cplx>();
    const Vec w1 = momentum_wavefunction(in1, shifted(xs, -1, 0));
    const Vec w2 = momentum_wavefunction(in2, shifted(xs, -1, 0));
    const Moments p1 = quadrature_moments(in1, true);
    const Moments p2 = quadrature_moments(in2, true);
    const double sd1 = params.proposal_widen * std::sqrt(p1.var + 0.5);
    const double sd2 = params.proposal_widen * std::sqrt(p2.var + 0.5);
    const double spread = 1 / std::sqrt(2 * gamma);
    const std::vector<KnitOperation> circuit = knit_circuit();
    const size_t nobs = observables.size();
    const int count = params.samples;

    std::vector<std::vector<TrajectoryResult>> per_obs(nobs, std::vector<TrajectoryResult>(count));
    std::vector<long> cuts(count, 0);
    auto den_results = run_trajectories(count, params.seed, params.threads, [&](int index, Rng &rng) {
        std::normal_distribution<double> spread_dist(0, spread);
        // Ket and bra resource displacements: D((u + i g v)/sqrt2) on a, D((v + i g u)/sqrt2) on b.
        double u = spread_dist(rng), v = spread_dist(rng);
        double up = spread_dist(rng), vp = spread_dist(rng);
        const double s2 = std::sqrt(2.0);
        cplx a1(u / s2, g * v / s2), a2(v / s2, g * u / s2);
        cplx b1(up / s2, g * vp / s2), b2(vp / s2, g * up / s2);
        std::vector<KnitOperation> ops = circuit;
        cuts[index] = cross_cut(ops);

        // Homodyne outcomes: mixture of the ket- and bra-branch outcome laws.
        std::uniform_real_distribution<double> coin(0, 1);
        std::normal_distribution<double> unit(0, 1);
        const double c1k = s2 * a1.real() + p1.mean, c2k = s2 * a2.real() + p2.mean;
        const double c1b = s2 * b1.real() + p1.mean, c2b = s2 * b2.real() + p2.mean;
        bool ket_branch = coin(rng) < 0.5;
        double m1 = (ket_branch ? c1k : c1b) + sd1 * unit(rng);
        double m2 = (ket_branch ? c2k : c2b) + sd2 * unit(rng);
        double q = 0.5 * normal_pdf(m1, c1k, sd1) * normal_pdf(m2, c2k, sd2) +
                   0.5 * normal_pdf(m1, c1b, sd1) * normal_pdf(m2, c2b, sd2);

        const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
        Vec ra(n), rb(n);
        Vec kick1(n), kick2(n);
        for (Eigen::Index k = 0; k < n; k++) {
            kick1[k] = std::polar(1.0, -m1 * xs[k]);
            kick2[k] = std::polar(1.0, -m2 * xs[k]);
        }
        auto output = [&](cplx alpha, double shift, const Vec &w, const Vec &kick) {
            Vec r(n);
            coherent_wavefunction(alpha, xs, shift, r);
            Vec c = h * w.cwiseProduct(r).cwiseProduct(kick);
            rotate_minus_quarter(c);
            return c;
        };
        Vec ket1 = output(a1, m1, w1, kick2);
        Vec ket2 = output(a2, m2, w2, kick1);
        Vec bra1 = output(b1, m1, w1, kick2);
        Vec bra2 = output(b2, m2, w2, kick1);

        cplx den = bra1.dot(ket1) * bra2.dot(ket2) / q;
        for (size_t o = 0; o < nobs; o++) {
            cplx val = 0;
            for (const auto &t : observables[o].terms()) {
                val += t.coef * bra1.dot(t.factors[0] * ket1) * bra2.dot(t.factors[1] * ket2);
            }
            val /= q;
            per_obs[o][index] = {den.real(), val.real(), den.imag(), val.imag()};
        }
        return TrajectoryResult{den.real(), den.real(), den.imag(), den.imag()};
    });
    (void)den_results;

    KnitReport report;
    report.gamma = gamma;
    report.g = g;
    report.implied_r = gamma < 1 ? implied_cluster_squeezing(gamma) : 0;
    report.circuit = circuit;
    for (long c : cuts) {
        report.cross_cut_operations += c;
    }
    for (size_t o = 0; o < nobs; o++) {
        report.observables.push_back(summarize(per_obs[o], 1, params.seed));
    }
    return report;
}

}  // namespace cvsq
