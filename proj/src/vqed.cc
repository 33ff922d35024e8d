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

#include "cvsq/vqed.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace cvsq {

Rng trajectory_rng(uint64_t seed, uint64_t index) {
    std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(index),
                      static_cast<uint32_t>(index >> 32), 0x9e3779b9u};
    return Rng(seq);
}

// ---------------------------------------------------------------------------------------------
// Observable

Observable Observable::dense(const DenseOperator &m) {
    Observable o;
    o.cutoff_ = m.cutoff();
    o.modes_ = m.modes();
    o.dense_ = m;
    return o;
}

Observable Observable::products(int cutoff, int modes, std::vector<ProductTerm> terms) {
    for (const auto &t : terms) {
        if (static_cast<int>(t.factors.size()) != modes) {
            fail(ErrorKind::DimensionMismatch, "product term needs one factor per mode");
        }
        for (const auto &f : t.factors) {
            if (f.rows() != cutoff || f.cols() != cutoff) {
                fail(ErrorKind::DimensionMismatch, "product term factor has the wrong size");
            }
        }
    }
    Observable o;
    o.cutoff_ = cutoff;
    o.modes_ = modes;
    o.terms_ = std::move(terms);
    return o;
}

Observable Observable::identity(int cutoff, int modes) {
    ProductTerm t;
    for (int m = 0; m < modes; m++) {
        t.factors.push_back(Mat::Identity(cutoff, cutoff));
    }
    return products(cutoff, modes, {t});
}

Observable Observable::nullifier_square(const NullifierKind &kind, int cutoff) {
    const int w = cutoff + 4;
    auto [xo, po] = quadratures(w);
    const Mat &x = xo.matrix();
    const Mat &p = po.matrix();
    auto cut = [&](const Mat &m) {
        return Mat(m.topLeftCorner(cutoff, cutoff));
    };
    if (kind.type == NullifierType::SqX) {
        return products(cutoff, 1, {{1, {cut(x * x)}}});
    }
    if (kind.type == NullifierType::CpsParabola) {
        Mat n = p - kind.param * x * x;
        n = 0.5 * (n + n.adjoint());
        return products(cutoff, 1, {{1, {cut(n * n)}}});
    }
    const double g = kind.param;
    Mat id = Mat::Identity(cutoff, cutoff);
    Mat xc = cut(x), pc = cut(p), x2 = cut(x * x), p2 = cut(p * p);
    return products(cutoff, 2,
                    {{1, {p2, id}},
                     {-2 * g, {pc, xc}},
                     {g * g, {id, x2}},
                     {1, {id, p2}},
                     {-2 * g, {xc, pc}},
                     {g * g, {x2, id}}});
}

DenseOperator Observable::to_dense() const {
    if (dense_) {
        return *dense_;
    }
    auto d = static_cast<Eigen::Index>(space_dimension(cutoff_, modes_));
    Mat acc = Mat::Zero(d, d);
    for (const auto &t : terms_) {
        Mat k = t.factors[0];
        for (int m = 1; m < modes_; m++) {
            k = kron(k, t.factors[m]);
        }
        acc += t.coef * k;
    }
    return DenseOperator(cutoff_, modes_, std::move(acc));
}

cplx Observable::sandwich(const Vec &bra, const Vec &ket) const {
    if (dense_) {
        return bra.dot(dense_->matrix() * ket);
    }
    cplx acc = 0;
    for (const auto &t : terms_) {
        Vec v = ket;
        for (int m = 0; m < modes_; m++) {
            if (!t.factors[m].isIdentity(0)) {
                apply_to_mode(t.factors[m], m, cutoff_, modes_, v);
            }
        }
        acc += t.coef * bra.dot(v);
    }
    return acc;
}

// ---------------------------------------------------------------------------------------------
// Decompositions

StabilizerDecomposition StabilizerDecomposition::from_projector(const SmearedProjector &p) {
    return discrete(p.modes, p.terms);
}

StabilizerDecomposition StabilizerDecomposition::discrete(int modes, std::vector<ProjectorTerm> terms) {
    StabilizerDecomposition d;
    d.modes = modes;
    double total = 0;
    for (const auto &t : terms) {
        if (!(t.weight > 0)) {
            fail(ErrorKind::InvalidArgument, "decomposition weights must be positive");
        }
        total += t.weight;
    }
    if (terms.empty()) {
        fail(ErrorKind::InvalidArgument, "decomposition needs at least one term");
    }
    d.norm_constant = total;
    for (const auto &t : terms) {
        d.probabilities.push_back(t.weight / total);
    }
    d.terms = std::move(terms);
    return d;
}

StabilizerDecomposition StabilizerDecomposition::continuous_cps(double gamma, double eta) {
    if (!(gamma > 0) || !std::isfinite(gamma) || !std::isfinite(eta)) {
        fail(ErrorKind::InvalidArgument, "continuous CPS decomposition needs gamma > 0 and finite eta");
    }
    StabilizerDecomposition d;
    d.modes = 1;
    d.continuous = true;
    d.gamma = gamma;
    d.eta = eta;
    return d;
}

StabilizerDecomposition StabilizerDecomposition::identity(int modes) {
    ProjectorTerm t;
    t.weight = 1;
    t.factors.assign(modes, {});
    return discrete(modes, {t});
}

void StabilizerDecomposition::validate() const {
    if (continuous) {
        if (modes != 1 || !(gamma > 0)) {
            fail(ErrorKind::InvalidArgument, "continuous decomposition must be single-mode with gamma > 0");
        }
        return;
    }
    if (probabilities.size() != terms.size() || terms.empty()) {
        fail(ErrorKind::InvalidArgument, "decomposition probabilities and terms differ in length");
    }
    double s = 0;
    for (double p : probabilities) {
        if (!(p >= 0)) {
            fail(ErrorKind::InvalidArgument, "negative sampling probability");
        }
        s += p;
    }
    if (std::abs(s - 1) > 1e-12) {
        fail(ErrorKind::InvalidArgument, "sampling distribution does not sum to one");
    }
    for (const auto &t : terms) {
        if (static_cast<int>(t.factors.size()) != modes) {
            fail(ErrorKind::DimensionMismatch, "term factor count differs from the mode count");
        }
    }
}

bool StabilizerDecomposition::is_separable() const {
    if (continuous) {
        return true;
    }
    for (const auto &t : terms) {
        if (static_cast<int>(t.factors.size()) != modes) {
            return false;
        }
        for (int m = 0; m < modes; m++) {
            for (const auto &g : t.factors[m]) {
                if (g.arity() != 1 || g.targets[0] != m) {
                    return false;
                }
            }
        }
    }
    return true;
}

namespace {

ProjectorTerm continuous_term(double x0, double eta) {
    GaussianFactorization f = cps_stabilizer_factorization(x0, eta);
    ProjectorTerm t;
    t.weight = 1;
    t.phase = std::polar(1.0, f.phase);
    t.factors = {f.sequence(0)};
    t.abscissae = {x0};
    return t;
}

GateSpec inverse_gate(const GateSpec &g) {
    GateSpec out = g;
    out.alpha = -g.alpha;
    out.value = -g.value;
    return out;
}

/// U_b U_a^dagger as a per-mode sequence.
ProjectorTerm compose_double_prime(const ProjectorTerm &a, const ProjectorTerm &b) {
    ProjectorTerm out;
    out.weight = 1;
    out.phase = b.phase * std::conj(a.phase);
    out.factors.resize(a.factors.size());
    for (size_t m = 0; m < a.factors.size(); m++) {
        for (auto it = a.factors[m].rbegin(); it != a.factors[m].rend(); ++it) {
            out.factors[m].push_back(inverse_gate(*it));
        }
        for (const auto &g : b.factors[m]) {
            out.factors[m].push_back(g);
        }
    }
    return out;
}

int sample_index(const std::vector<double> &probs, Rng &rng) {
    std::uniform_real_distribution<double> u(0, 1);
    double r = u(rng);
    double acc = 0;
    for (size_t i = 0; i < probs.size(); i++) {
        acc += probs[i];
        if (r < acc) {
            return static_cast<int>(i);
        }
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace

StabilizerSample sample_stabilizer_pair(const StabilizerDecomposition &d, Rng &rng) {
    StabilizerSample s;
    if (d.continuous) {
        std::normal_distribution<double> n(0, 1 / std::sqrt(2 * d.gamma));
        double x = n(rng);
        double xp = n(rng);
        s.l = -1;
        s.l_prime = -1;
        s.u = continuous_term(x, d.eta);
        s.u_prime = continuous_term(xp, d.eta);
    } else {
        s.l = sample_index(d.probabilities, rng);
        s.l_prime = sample_index(d.probabilities, rng);
        s.u = d.terms[s.l];
        s.u_prime = d.terms[s.l_prime];
    }
    s.u_double_prime = compose_double_prime(s.u, s.u_prime);
    return s;
}

// ---------------------------------------------------------------------------------------------
// Ensembles and plans

StateEnsemble ensemble_of(const FockVector &psi) {
    return {{1.0, psi.normalized()}};
}

StateEnsemble ensemble_of(const DensityOperator &rho, double drop_tol) {
    DensityOperator n = rho.normalized();
    HermitianSpectrum s(n.matrix());
    StateEnsemble out;
    for (Eigen::Index k = 0; k < s.values().size(); k++) {
        double lam = s.values()[k];
        if (lam > drop_tol) {
            out.emplace_back(lam, FockVector(rho.cutoff(), rho.modes(), s.vectors().col(k)));
        }
    }
    double total = 0;
    for (auto &e : out) {
        total += e.first;
    }
    for (auto &e : out) {
        e.first /= total;
    }
    return out;
}

int VqedPlan::cutoff() const {
    return input.empty() ? 0 : input.front().second.cutoff();
}

int VqedPlan::modes() const {
    return input.empty() ? 0 : input.front().second.modes();
}

void VqedPlan::validate() const {
    if (input.empty()) {
        fail(ErrorKind::InvalidArgument, "VQED plan needs an input state");
    }
    for (const auto &e : input) {
        if (e.second.cutoff() != cutoff() || e.second.modes() != modes()) {
            fail(ErrorKind::DimensionMismatch, "VQED input ensemble mixes spaces");
        }
    }
    if (samples < 1) {
        fail(ErrorKind::InvalidArgument, "VQED needs at least one trajectory");
    }
    if (mode == VqedMode::ShotSampled && shots < 1) {
        fail(ErrorKind::InvalidArgument, "shot mode needs at least one shot per trajectory");
    }
    if (gates.size() > projectors.size()) {
        fail(ErrorKind::InvalidArgument, "more gate processes than insertion points");
    }
    for (const auto &d : projectors) {
        d.validate();
        if (d.modes != modes()) {
            fail(ErrorKind::DimensionMismatch, "projector mode count differs from the state");
        }
    }
    for (const auto &g : gates) {
        if (g && (g->cutoff() != cutoff() || g->modes() != modes())) {
            fail(ErrorKind::DimensionMismatch, "gate process space differs from the state");
        }
        if (g && !g->is_unitary()) {
            fail(ErrorKind::InvalidArgument, "gate processes must be flagged unitary");
        }
    }
    if (observable.cutoff() != cutoff() || observable.modes() != modes()) {
        fail(ErrorKind::DimensionMismatch, "observable space differs from the state");
    }
}

// ---------------------------------------------------------------------------------------------
// Trajectories

namespace {

struct TrajectoryContext {
    const VqedPlan *plan = nullptr;
    std::unique_ptr<TermEvaluator> evaluator;
    std::optional<HermitianSpectrum> spectrum;
};

bool uses_working_space(const StabilizerDecomposition &d) {
    if (d.continuous) {
        return true;
    }
    for (const auto &t : d.terms) {
        for (const auto &seq : t.factors) {
            for (const auto &g : seq) {
                if (g.kind != GateKind::Displacement) {
                    return true;
                }
            }
        }
    }
    return false;
}

TrajectoryContext make_context(const VqedPlan &plan) {
    TrajectoryContext ctx;
    ctx.plan = &plan;
    bool working = false;
    for (const auto &d : plan.projectors) {
        working = working || uses_working_space(d);
    }
    int c = plan.cutoff();
    ctx.evaluator = std::make_unique<TermEvaluator>(c, working ? default_working_cutoff(c) : c);
    if (plan.mode == VqedMode::ShotSampled) {
        if (plan.projectors.size() > 1) {
            fail(ErrorKind::Unsupported, "shot sampling supports a single insertion point");
        }
        DenseOperator m = plan.observable.to_dense();
        if (!m.is_hermitian(1e-9)) {
            fail(ErrorKind::InvalidArgument, "shot sampling needs a Hermitian observable");
        }
        ctx.spectrum.emplace(m.matrix());
    }
    return ctx;
}

/// Applies one sampled term (with its phase) to a joint ket.
Vec apply_term(const TermEvaluator &ev, const ProjectorTerm &t, int cutoff, int modes, const Vec &v) {
    Vec out = v;
    if (modes == 1) {
        if (!t.factors[0].empty()) {
            out = ev.apply(t.factors[0], Mat(out)).col(0);
        }
    } else {
        for (int m = 0; m < modes; m++) {
            if (!t.factors[m].empty()) {
                apply_to_mode(ev.matrix(t.factors[m]), m, cutoff, modes, out);
            }
        }
    }
    return t.phase * out;
}

/// Draws a +-1 outcome and the conditional vector (a + s b')/2 with b' = b (X) or -i b (Y).
int measure_ancilla(const Vec &a, const Vec &b, bool y_basis, Rng &rng, Vec &conditional) {
    cplx f = y_basis ? cplx(0, -1) : cplx(1, 0);
    Vec plus = 0.5 * (a + f * b);
    Vec minus = 0.5 * (a - f * b);
    double pp = plus.squaredNorm();
    double pm = minus.squaredNorm();
    std::uniform_real_distribution<double> u(0, 1);
    if (u(rng) * (pp + pm) < pp) {
        conditional = std::move(plus);
        return 1;
    }
    conditional = std::move(minus);
    return -1;
}

double measure_spectrum(const HermitianSpectrum &s, const Vec &v, Rng &rng) {
    Vec amps = s.vectors().adjoint() * v;
    std::vector<double> probs(amps.size());
    double total = 0;
    for (Eigen::Index j = 0; j < amps.size(); j++) {
        probs[j] = std::norm(amps[j]);
        total += probs[j];
    }
    for (double &p : probs) {
        p /= total;
    }
    return s.values()[sample_index(probs, rng)];
}

int sample_component(const StateEnsemble &e, Rng &rng) {
    if (e.size() == 1) {
        return 0;
    }
    std::vector<double> w;
    for (const auto &c : e) {
        w.push_back(c.first);
    }
    return sample_index(w, rng);
}

TrajectoryResult run_one(const TrajectoryContext &ctx, const std::vector<StabilizerSample> &samples, Rng &rng) {
    const VqedPlan &plan = *ctx.plan;
    const int c = plan.cutoff();
    const int modes = plan.modes();
    if (samples.size() != plan.projectors.size()) {
        fail(ErrorKind::InvalidArgument, "one stabilizer sample per insertion point is required");
    }
    auto branches = [&](const FockVector &v) {
        Vec a = v.amplitudes();
        Vec b = v.amplitudes();
        for (size_t k = 0; k < samples.size(); k++) {
            a = apply_term(*ctx.evaluator, samples[k].u, c, modes, a);
            b = apply_term(*ctx.evaluator, samples[k].u_prime, c, modes, b);
            if (k < plan.gates.size() && plan.gates[k]) {
                a = plan.gates[k]->matrix() * a;
                b = plan.gates[k]->matrix() * b;
            }
        }
        return std::make_pair(std::move(a), std::move(b));
    };
    TrajectoryResult r;
    if (plan.mode == VqedMode::ExactExpectation) {
        cplx den = 0;
        cplx num = 0;
        for (const auto &[w, v] : plan.input) {
            auto [a, b] = branches(v);
            den += w * b.dot(a);
            num += w * plan.observable.sandwich(b, a);
        }
        r.den = den.real();
        r.im_den = den.imag();
        r.num = num.real();
        r.im_num = num.imag();
        return r;
    }
    // Shot mode: each shot picks the X or Y basis at random, so 2 s m estimates Re (X) or
    // -Im (Y) of <b|M|a>.
    std::vector<std::pair<Vec, Vec>> cache(plan.input.size());
    std::vector<bool> ready(plan.input.size(), false);
    std::bernoulli_distribution coin(0.5);
    for (int shot = 0; shot < plan.shots; shot++) {
        int k = sample_component(plan.input, rng);
        if (!ready[k]) {
            cache[k] = branches(plan.input[k].second);
            ready[k] = true;
        }
        bool y = coin(rng);
        Vec cond;
        int s = measure_ancilla(cache[k].first, cache[k].second, y, rng, cond);
        double m = measure_spectrum(*ctx.spectrum, cond, rng);
        if (y) {
            r.im_den -= 2.0 * s;
            r.im_num -= 2.0 * s * m;
        } else {
            r.den += 2.0 * s;
            r.num += 2.0 * s * m;
        }
    }
    r.den /= plan.shots;
    r.num /= plan.shots;
    r.im_den /= plan.shots;
    r.im_num /= plan.shots;
    return r;
}

}  // namespace

TrajectoryResult hadamard_test_trajectory(const VqedPlan &plan, const std::vector<StabilizerSample> &samples,
                                          Rng &rng) {
    plan.validate();
    TrajectoryContext ctx = make_context(plan);
    return run_one(ctx, samples, rng);
}

std::vector<TrajectoryResult> run_trajectories(int count, uint64_t seed, int threads,
                                               const std::function<TrajectoryResult(int, Rng &)> &fn) {
    std::vector<TrajectoryResult> out(static_cast<size_t>(count));
    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::max(1, std::min(workers, count));
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&](int w) {
        for (int i = w; i < count; i += workers) {
            try {
                Rng rng = trajectory_rng(seed, static_cast<uint64_t>(i));
                out[i] = fn(i, rng);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                return;
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; w++) {
            pool.emplace_back(work, w);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

EstimatorReport summarize(const std::vector<TrajectoryResult> &results, double norm_constant, uint64_t seed,
                          bool check_denominator) {
    const size_t n = results.size();
    if (n == 0) {
        fail(ErrorKind::InvalidArgument, "no trajectories to summarize");
    }
    double sn = 0, sd = 0, si = 0;
    for (const auto &r : results) {
        sn += r.num;
        sd += r.den;
        si += r.im_den;
    }
    EstimatorReport rep;
    rep.trajectories = static_cast<int>(n);
    rep.seed = seed;
    rep.norm_constant = norm_constant;
    rep.mean_num = sn / n;
    rep.mean_den = sd / n;
    rep.mean_im_den = si / n;
    if (n > 1) {
        double vn = 0, vd = 0, vi = 0;
        for (const auto &r : results) {
            vn += (r.num - rep.mean_num) * (r.num - rep.mean_num);
            vd += (r.den - rep.mean_den) * (r.den - rep.mean_den);
            vi += (r.im_den - rep.mean_im_den) * (r.im_den - rep.mean_im_den);
        }
        rep.se_num = std::sqrt(vn / (n - 1) / n);
        rep.se_den = std::sqrt(vd / (n - 1) / n);
        rep.se_im_den = std::sqrt(vi / (n - 1) / n);
    }
    if (check_denominator && n > 1 && !(std::abs(rep.mean_den) >= 5 * rep.se_den)) {
        std::stringstream ss;
        ss << "denominator mean " << rep.mean_den << " is within 5 standard errors (" << rep.se_den
           << ") of zero; the projection probability is too small for this sample count";
        fail(ErrorKind::UnstableDenominator, ss.str());
    }
    rep.ratio = rep.mean_num / rep.mean_den;
    if (n > 1) {
        // Leave-one-out jackknife of the ratio.
        double mean_loo = 0;
        std::vector<double> loo(n);
        for (size_t i = 0; i < n; i++) {
            loo[i] = (sn - results[i].num) / (sd - results[i].den);
            mean_loo += loo[i];
        }
        mean_loo /= n;
        double v = 0;
        for (double x : loo) {
            v += (x - mean_loo) * (x - mean_loo);
        }
        rep.ratio_se = std::sqrt(v * (n - 1) / n);
    }
    double c2 = norm_constant * norm_constant;
    rep.probability = c2 * rep.mean_den;
    rep.probability_se = c2 * rep.se_den;
    return rep;
}

EstimatorReport vqed_estimate(const VqedPlan &plan) {
    plan.validate();
    TrajectoryContext ctx = make_context(plan);
    double c = 1;
    for (const auto &d : plan.projectors) {
        c *= d.norm_constant;
    }
    auto results = run_trajectories(plan.samples, plan.seed, plan.threads, [&](int, Rng &rng) {
        std::vector<StabilizerSample> samples;
        samples.reserve(plan.projectors.size());
        for (const auto &d : plan.projectors) {
            samples.push_back(sample_stabilizer_pair(d, rng));
        }
        return run_one(ctx, samples, rng);
    });
    return summarize(results, c, plan.seed);
}

// ---------------------------------------------------------------------------------------------
// Virtual entanglement

namespace {

void require_single_mode(const StateEnsemble &e, const char *name) {
    if (e.empty()) {
        fail(ErrorKind::InvalidArgument, std::string(name) + " is empty");
    }
    for (const auto &c : e) {
        if (c.second.modes() != 1) {
            fail(ErrorKind::DimensionMismatch, std::string(name) + " must be single-mode");
        }
        if (c.second.cutoff() != e.front().second.cutoff()) {
            fail(ErrorKind::DimensionMismatch, std::string(name) + " mixes cutoffs");
        }
    }
}

Vec apply_side(const TermEvaluator &ev, const std::vector<GateSpec> &seq, const Vec &v) {
    if (seq.empty()) {
        return v;
    }
    return ev.apply(seq, Mat(v)).col(0);
}

}  // namespace

EstimatorReport virtual_entangle_estimate(const StateEnsemble &rho_a, const StateEnsemble &rho_b,
                                          const StabilizerDecomposition &d, const Observable &m,
                                          const VirtualEntangleParams &params) {
    require_single_mode(rho_a, "rho_A");
    require_single_mode(rho_b, "rho_B");
    const int c = rho_a.front().second.cutoff();
    if (rho_b.front().second.cutoff() != c) {
        fail(ErrorKind::DimensionMismatch, "subsystem cutoffs differ");
    }
    d.validate();
    if (d.modes != 2 || !d.is_separable()) {
        fail(ErrorKind::Structural, "virtual entanglement needs a separable two-mode decomposition");
    }
    if (m.cutoff() != c || m.modes() != 2) {
        fail(ErrorKind::DimensionMismatch, "observable must act on the two subsystems");
    }
    if (params.samples < 1 || (params.mode == VqedMode::ShotSampled && params.shots < 1)) {
        fail(ErrorKind::InvalidArgument, "virtual entanglement needs positive sample and shot counts");
    }
    bool working = uses_working_space(d);
    TermEvaluator ev(c, working ? default_working_cutoff(c) : c);
    std::vector<ProductTerm> terms = m.terms();
    if (m.is_dense()) {
        if (params.mode == VqedMode::ShotSampled) {
            fail(ErrorKind::Structural, "shot sampling across the cut needs a product observable");
        }
    }
    std::optional<HermitianSpectrum> spec_a, spec_b;
    if (params.mode == VqedMode::ShotSampled) {
        if (!m.is_single_product()) {
            fail(ErrorKind::Unsupported, "shot sampling across the cut needs a single product term");
        }
        const auto &t = terms.front();
        if (std::abs(t.coef.imag()) > 0 || !t.factors[0].isApprox(t.factors[0].adjoint()) ||
            !t.factors[1].isApprox(t.factors[1].adjoint())) {
            fail(ErrorKind::InvalidArgument, "shot sampling needs Hermitian factors and a real coefficient");
        }
        spec_a.emplace(t.factors[0]);
        spec_b.emplace(t.factors[1]);
    }
    auto side_branches = [&](const StabilizerSample &s, int side, const Vec &v) {
        Vec a = apply_side(ev, s.u.factors[side], v);
        Vec b = apply_side(ev, s.u_prime.factors[side], v);
        // Global term phases belong to the joint ket and bra; side 0 carries them.
        if (side == 0) {
            a *= s.u.phase;
            b *= s.u_prime.phase;
        }
        return std::make_pair(std::move(a), std::move(b));
    };
    auto results = run_trajectories(params.samples, params.seed, params.threads, [&](int, Rng &rng) {
        StabilizerSample s = sample_stabilizer_pair(d, rng);
        TrajectoryResult r;
        if (params.mode == VqedMode::ExactExpectation) {
            cplx den = 0, num = 0;
            std::vector<std::pair<Vec, Vec>> bb;
            for (const auto &[wb, vb] : rho_b) {
                bb.push_back(side_branches(s, 1, vb.amplitudes()));
            }
            for (const auto &[wa, va] : rho_a) {
                auto [a0, b0] = side_branches(s, 0, va.amplitudes());
                for (size_t j = 0; j < rho_b.size(); j++) {
                    const auto &[a1, b1] = bb[j];
                    double w = wa * rho_b[j].first;
                    den += w * b0.dot(a0) * b1.dot(a1);
                    if (m.is_dense()) {
                        Vec ket = kron(Mat(a0), Mat(a1)).col(0);
                        Vec bra = kron(Mat(b0), Mat(b1)).col(0);
                        num += w * m.sandwich(bra, ket);
                    } else {
                        for (const auto &t : terms) {
                            num += w * t.coef * b0.dot(t.factors[0] * a0) * b1.dot(t.factors[1] * a1);
                        }
                    }
                }
            }
            r.den = den.real();
            r.im_den = den.imag();
            r.num = num.real();
            r.im_num = num.imag();
            return r;
        }
        // Shot mode: both ancillas share a random basis; 2 (XX) - 2 (YY) readings estimate Re.
        std::bernoulli_distribution coin(0.5);
        const double coef = terms.front().coef.real();
        for (int shot = 0; shot < params.shots; shot++) {
            int ia = sample_component(rho_a, rng);
            int ib = sample_component(rho_b, rng);
            auto [a0, b0] = side_branches(s, 0, rho_a[ia].second.amplitudes());
            auto [a1, b1] = side_branches(s, 1, rho_b[ib].second.amplitudes());
            bool y = coin(rng);
            Vec c0, c1;
            int s0 = measure_ancilla(a0, b0, y, rng, c0);
            int s1 = measure_ancilla(a1, b1, y, rng, c1);
            double m0 = measure_spectrum(*spec_a, c0, rng);
            double m1 = measure_spectrum(*spec_b, c1, rng);
            double sign = y ? -2.0 : 2.0;
            r.den += sign * s0 * s1;
            r.num += sign * s0 * s1 * coef * m0 * m1;
        }
        r.den /= params.shots;
        r.num /= params.shots;
        return r;
    });
    return summarize(results, d.norm_constant, params.seed);
}

}  // namespace cvsq
