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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cvsq/analytics.h"
#include "cvsq/channels.h"
#include "cvsq/experiments.h"
#include "cvsq/gates.h"
#include "cvsq/knitting.h"
#include "cvsq/lcu.h"
#include "cvsq/projectors.h"
#include "cvsq/vqed.h"

using namespace cvsq;

namespace {

const double kHalfLn2 = 0.5 * std::log(2.0);

struct Verdict {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char *f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

FockVector squeezed(double r, int c) {
    return build_resource_state({ResourceKind::SqueezedVacuum, r, std::nullopt, std::nullopt}, c).state;
}

FockVector coherent(cplx a, int c) {
    Vec v = build_gate(GateSpec::displacement(a), c + 30).apply(FockVector::vacuum(c + 30)).amplitudes();
    return FockVector(c, 1, truncate_levels(v, c + 30, 1, c)).normalized();
}

std::pair<Mat, Mat> compressions(int c) {
    auto [x, p] = quadratures(c + 2);
    return {x.matrix().topLeftCorner(c, c), p.matrix().topLeftCorner(c, c)};
}

std::vector<std::vector<std::string>> read_csv(const std::string &path) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

int column(const std::vector<std::string> &header, const std::string &name) {
    for (size_t i = 0; i < header.size(); i++) {
        if (header[i] == name) {
            return static_cast<int>(i);
        }
    }
    fail(ErrorKind::Validation, "missing column " + name);
}

std::filesystem::path scratch_dir() {
    auto d = std::filesystem::temp_directory_path() / "cvsq_acceptance";
    std::filesystem::create_directories(d);
    return d;
}

Verdict criterion1() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    const int c = 60;
    for (double r : {0.0, 0.3454}) {
        double gamma = gamma_from_delta_r(kHalfLn2, r);
        SmearedProjector p = build_smeared_projector(ProjectorKind::Sq, gamma, {}, discretize_gaussian(gamma, 201));
        PureProjection out = apply_projector(p, squeezed(r, c));
        double f = fidelity(out.state.normalized(), squeezed(r + kHalfLn2, c));
        double dq = std::abs(out.probability - std::exp(-kHalfLn2));
        v.pass = v.pass && f >= 1 - 1e-6 && dq <= 1e-4;
        v.detail += fmt("r=%.4f 1-F=%.2e |q-e^-dr|=%.2e; ", r, 1 - f, dq);
    }
    double t = seconds_since(t0);
    v.pass = v.pass && t < 5;
    v.detail += fmt("%.2fs", t);
    return v;
}

/// Criteria 2 and 3 share one sweep.
struct Fig5 {
    double worst_cps_variance = 0, worst_cluster_variance = 0, worst_cps_prob = 0, worst_cluster_prob = 0;
    double seconds = 0;
    int rows = 0;
};

Fig5 run_fig5_sweep() {
    Json cfg = {{"experiment", "Fig5Sweep"},
                {"name", "acceptance_fig5"},
                {"params",
                 {{"r_db", {0, 3, 5}},
                  {"delta_r_db", {0, 1, 2, 3, 4, 5}},
                  {"kinds", {"CPS", "Cluster"}},
                  {"eta", 0.1},
                  {"g", 1}}}};
    auto t0 = std::chrono::steady_clock::now();
    RunOutcome out = run_experiment(cfg, {scratch_dir().string(), true});
    Fig5 f;
    f.seconds = seconds_since(t0);
    auto rows = read_csv(out.csv_path);
    int kind = column(rows[0], "kind"), q = column(rows[0], "quantity"), rel = column(rows[0], "rel_error");
    for (size_t i = 1; i < rows.size(); i++) {
        double e = std::stod(rows[i][rel]);
        bool cps = rows[i][kind] == "CPS";
        bool var = rows[i][q] == "nullifier_variance";
        double &slot = cps ? (var ? f.worst_cps_variance : f.worst_cps_prob)
                           : (var ? f.worst_cluster_variance : f.worst_cluster_prob);
        slot = std::max(slot, e);
        f.rows++;
    }
    return f;
}

Verdict criterion2(const Fig5 &f) {
    Verdict v;
    v.pass = f.rows == 72 && f.worst_cps_variance <= 0.05 && f.worst_cluster_variance <= 0.02 && f.seconds < 120;
    v.detail = fmt("worst CPS %.3f%% (<=5%%), worst cluster %.3f%% (<=2%%), %d rows, %.1fs", 100 * f.worst_cps_variance,
                   100 * f.worst_cluster_variance, f.rows, f.seconds);
    return v;
}

Verdict criterion3(const Fig5 &f) {
    Verdict v;
    v.pass = f.rows == 72 && f.worst_cps_prob <= 0.01 && f.worst_cluster_prob <= 0.01;
    v.detail = fmt("worst CPS %.4f%%, worst cluster %.4f%% (<=1%%)", 100 * f.worst_cps_prob, 100 * f.worst_cluster_prob);
    return v;
}

Verdict criterion4() {
    Verdict v;
    const int c = 60, low = 40, big = 200;
    auto [xo, po] = quadratures(big);
    auto [xs, ps] = quadratures(c);
    TermEvaluator ev(c, default_working_cutoff(c));
    double worst = 0, worst_small = 0;
    for (double eta : {0.1, 0.3}) {
        for (double x0 : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            GaussianFactorization f = cps_stabilizer_factorization(x0, eta);
            Mat product = std::polar(1.0, f.phase) * ev.matrix(f.sequence());
            Mat oracle = matrix_exponential(Mat(cplx(0, -x0) * (po.matrix() - eta * xo.matrix() * xo.matrix())))
                             .topLeftCorner(c, c);
            Mat small = matrix_exponential(Mat(cplx(0, -x0) * (ps.matrix() - eta * xs.matrix() * xs.matrix())));
            worst = std::max(worst, low_block_max_error(product, oracle, c, 1, low));
            worst_small = std::max(worst_small, low_block_max_error(product, small, c, 1, low));
        }
    }
    v.pass = worst <= 1e-6;
    v.detail = fmt("max low-block error %.2e vs exp at cutoff %d (truncated-at-%d generator: %.2e)", worst, big, c,
                   worst_small);
    return v;
}

Verdict criterion5() {
    Verdict v;
    for (double eta : {0.0, 0.1}) {
        LcuCpsResult r = lcu_project_cps(0, kHalfLn2, eta, 0.05, 0.5, 60);
        double rel = std::abs(r.outcome.probability / std::exp(-kHalfLn2) - 1);
        v.pass = v.pass && r.fidelity >= 0.995 && rel <= 0.05;
        v.detail += fmt("eta=%.1f N=%d F=%.5f q=%.5f (rel %.2f%%); ", eta, r.outcome.repetitions, r.fidelity,
                        r.outcome.probability, 100 * rel);
    }
    return v;
}

double post_selected(const FockVector &projected, const Observable &m) {
    return expectation(projected.normalized(), m.to_dense()).real();
}

Verdict criterion6() {
    Verdict v;
    const int seeds[] = {1, 2, 3};
    auto record = [&](const char *plan, int seed, const EstimatorReport &r, double oracle) {
        double z = (r.ratio - oracle) / r.ratio_se;
        v.pass = v.pass && std::abs(z) <= 3;
        v.detail += fmt("%s/%d z=%+.2f ", plan, seed, z);
    };
    {
        const int c = 40;
        double gamma = gamma_from_delta_r(kHalfLn2, 0);
        SmearedProjector p = build_smeared_projector(ProjectorKind::Sq, gamma, {}, discretize_gaussian(gamma, 201));
        FockVector in = FockVector::vacuum(c);
        Observable m = Observable::nullifier_square(NullifierKind::sq_x(), c);
        double oracle = post_selected(apply_projector(p, in).state, m);
        for (int s : seeds) {
            VqedPlan plan;
            plan.input = ensemble_of(in);
            plan.projectors = {StabilizerDecomposition::from_projector(p)};
            plan.observable = m;
            plan.samples = 10000;
            plan.seed = s;
            record("Sq", s, vqed_estimate(plan), oracle);
        }
    }
    {
        const int c = 40;
        const double eta = 0.1;
        double gamma = gamma_from_delta_r(kHalfLn2, 0);
        FockVector in = build_resource_state({ResourceKind::CPS, 0, eta, std::nullopt}, c).state;
        Observable m = Observable::nullifier_square(NullifierKind::cps_parabola(eta), c);
        ProjectorParams pp;
        pp.eta = eta;
        double oracle = post_selected(apply_projector(exact_projector_form(ProjectorKind::CPS, gamma, pp, c), in).state, m);
        for (int s : seeds) {
            VqedPlan plan;
            plan.input = ensemble_of(in);
            plan.projectors = {StabilizerDecomposition::continuous_cps(gamma, eta)};
            plan.observable = m;
            plan.samples = 10000;
            plan.seed = s;
            record("CPS", s, vqed_estimate(plan), oracle);
        }
    }
    {
        const int c = 30;
        double gamma = gamma_from_delta_r(kHalfLn2, 0);
        ProjectorParams pp;
        pp.g = 1;
        SmearedProjector p = build_smeared_projector(ProjectorKind::Cluster, gamma, pp, discretize_gaussian(gamma, 61));
        FockVector vac = FockVector::vacuum(c);
        Observable m = Observable::nullifier_square(NullifierKind::cluster_pair(1), c);
        double oracle = post_selected(apply_projector(p, FockVector::vacuum(c, 2)).state, m);
        for (int s : seeds) {
            VirtualEntangleParams vp;
            vp.samples = 10000;
            vp.seed = s;
            record("Cluster", s,
                   virtual_entangle_estimate(ensemble_of(vac), ensemble_of(vac), StabilizerDecomposition::from_projector(p), m, vp),
                   oracle);
        }
    }
    // Overhead: ratio variance against q = e^{-dr}.
    std::vector<double> lq, lv;
    for (double dr : {0.35, 0.69, 1.04}) {
        const int c = 40;
        double gamma = gamma_from_delta_r(dr, 0);
        SmearedProjector p = build_smeared_projector(ProjectorKind::Sq, gamma, {}, discretize_gaussian(gamma, 201));
        VqedPlan plan;
        plan.input = ensemble_of(FockVector::vacuum(c));
        plan.projectors = {StabilizerDecomposition::from_projector(p)};
        plan.observable = Observable::nullifier_square(NullifierKind::sq_x(), c);
        plan.samples = 20000;
        plan.seed = 7;
        EstimatorReport r = vqed_estimate(plan);
        lq.push_back(-dr);
        lv.push_back(std::log(r.ratio_se * r.ratio_se * r.trajectories));
    }
    double mx = (lq[0] + lq[1] + lq[2]) / 3, my = (lv[0] + lv[1] + lv[2]) / 3, sxy = 0, sxx = 0;
    for (int i = 0; i < 3; i++) {
        sxy += (lq[i] - mx) * (lv[i] - my);
        sxx += (lq[i] - mx) * (lq[i] - mx);
    }
    double slope = sxy / sxx;
    v.pass = v.pass && slope >= -2.5 && slope <= -1.5;
    v.detail += fmt("| variance slope %.3f", slope);
    return v;
}

Verdict criterion7() {
    Verdict v;
    auto t0 = std::chrono::steady_clock::now();
    const int c = 20;
    for (cplx a : {cplx(0, 0), cplx(0.3, 0)}) {
        FockVector in = coherent(a, c);
        FockVector target = czprime_reference(in, in, c);
        double prev = 0;
        bool monotone = true;
        v.detail += fmt("alpha=%.1f F=", a.real());
        for (double r : {0.5, 1.0, 1.5, 2.0}) {
            double f = fidelity(teleport_czp(in, in, TeleportResource::cluster(r)).output, target);
            monotone = monotone && f >= prev;
            prev = f;
            v.detail += fmt("%.4f ", f);
        }
        v.pass = v.pass && monotone && prev >= 0.98;
        v.detail += "; ";
    }
    double t = seconds_since(t0);
    v.pass = v.pass && t < 180;
    v.detail += fmt("%.1fs", t);
    return v;
}

Verdict criterion8() {
    Verdict v;
    const int c = 20;
    auto [x, p] = compressions(c);
    Mat id = Mat::Identity(c, c);
    auto one = [&](const Mat &a, const Mat &b) {
        return Observable::products(c, 2, {ProductTerm{1, {a, b}}});
    };
    std::vector<std::string> names = {"x1", "p1", "x2", "p2", "x1x2"};
    std::vector<Observable> obs = {one(x, id), one(p, id), one(id, x), one(id, p), one(x, x)};
    FockVector a = coherent(0.3, c), b = coherent(0.3, c);
    double gamma = gamma_from_delta_r(1.0, 0);
    KnitParams kp;
    kp.samples = 20000;
    kp.seed = 1;
    KnitReport rep = knit_czp_expectation(a, b, obs, gamma, 1.0, kp);
    TeleportResult phys = teleport_czp(a, b, TeleportResource::cluster(implied_cluster_squeezing(gamma)));
    for (size_t i = 0; i < obs.size(); i++) {
        double want = expectation(phys.output, obs[i].to_dense()).real();
        double z = (rep.observables[i].ratio - want) / rep.observables[i].ratio_se;
        v.pass = v.pass && std::abs(z) <= 3;
        v.detail += fmt("%s z=%+.2f ", names[i].c_str(), z);
    }
    bool one_sided = rep.cross_cut_operations == 0 && !rep.circuit.empty();
    for (const KnitOperation &op : rep.circuit) {
        for (int m : op.modes) {
            one_sided = one_sided && knit_side(m) == knit_side(op.modes[0]);
        }
    }
    v.pass = v.pass && one_sided;
    v.detail += fmt("| cross-cut ops %ld, r*=%.4f", rep.cross_cut_operations, rep.implied_r);
    return v;
}

Verdict criterion9() {
    Verdict v;
    Json cfg = {{"experiment", "Fig6LossSweep"},
                {"name", "acceptance_fig6"},
                {"params", {{"r_db", 3}, {"delta_r_db", 3}, {"losses", {0.05, 0.1, 0.2}}, {"eta", 0.1}, {"g", 1}}}};
    RunOutcome out = run_experiment(cfg, {scratch_dir().string(), true});
    auto rows = read_csv(out.csv_path);
    int kind = column(rows[0], "kind"), loss = column(rows[0], "loss");
    int noisy = column(rows[0], "noisy_variance"), sup = column(rows[0], "suppressed_variance");
    int count = 0;
    for (size_t i = 1; i < rows.size(); i++) {
        double n = std::stod(rows[i][noisy]), s = std::stod(rows[i][sup]);
        v.pass = v.pass && s < n;
        v.detail += fmt("%s L=%s %.4f<%.4f; ", rows[i][kind].c_str(), rows[i][loss].c_str(), s, n);
        count++;
    }
    v.pass = v.pass && count == 6;
    return v;
}

bool same(const EstimatorReport &a, const EstimatorReport &b) {
    return a.ratio == b.ratio && a.ratio_se == b.ratio_se && a.mean_den == b.mean_den && a.mean_num == b.mean_num &&
           a.probability == b.probability && a.seed == b.seed && a.trajectories == b.trajectories;
}

Verdict criterion10() {
    Verdict v;
    double comm = 0;
    for (int n : {2, 3, 5, 17, 60}) {
        auto [a, ad] = build_ladder(n);
        Mat c = a.matrix() * ad.matrix() - ad.matrix() * a.matrix();
        Mat want = Mat::Identity(n, n);
        want(n - 1, n - 1) = -(n - 1.0);
        comm = std::max(comm, (c - want).cwiseAbs().maxCoeff());
    }
    double kraus = 0, trace = 0;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (double l : {0.05, 0.1, 0.2, 0.5}) {
        for (int c : {5, 20, 40}) {
            Mat s = Mat::Zero(c, c);
            for (const auto &e : loss_kraus({l, -1, {}}, c)) {
                s += e.matrix().adjoint() * e.matrix();
            }
            kraus = std::max(kraus, (s - Mat::Identity(c, c)).cwiseAbs().maxCoeff());
        }
        for (int modes : {1, 2}) {
            const int c = modes == 1 ? 20 : 6;
            const auto d = static_cast<Eigen::Index>(space_dimension(c, modes));
            Mat m(d, d);
            for (auto &z : m.reshaped()) {
                z = cplx(nd(rng), nd(rng));
            }
            Mat rho = m * m.adjoint();
            rho /= rho.trace().real();
            DensityOperator out = apply_loss(DensityOperator(c, modes, rho), {l, -1, {}});
            trace = std::max(trace, std::abs(out.trace() - 1));
        }
    }
    double unitary = 0;
    for (const GateSpec &s : {GateSpec::displacement(cplx(0.5, -0.3)), GateSpec::squeeze(0.8), GateSpec::phase_shift(2.1),
                              GateSpec::cubic_phase(0.3), GateSpec::beam_splitter(), GateSpec::cz(1), GateSpec::czprime(0.7)}) {
        for (int c : {6, 14}) {
            DenseOperator u = build_gate(s, c);
            const auto d = static_cast<Eigen::Index>(u.dimension());
            unitary = std::max(unitary, (u.matrix().adjoint() * u.matrix() - Mat::Identity(d, d)).cwiseAbs().maxCoeff());
        }
    }

    bool deterministic = true;
    {
        const int c = 20;
        double gamma = gamma_from_delta_r(0.4, 0);
        SmearedProjector p = build_smeared_projector(ProjectorKind::Sq, gamma, {}, discretize_gaussian(gamma, 41));
        for (VqedMode mode : {VqedMode::ExactExpectation, VqedMode::ShotSampled}) {
            VqedPlan plan;
            plan.input = ensemble_of(FockVector::vacuum(c));
            plan.projectors = {StabilizerDecomposition::from_projector(p)};
            plan.observable = Observable::nullifier_square(NullifierKind::sq_x(), c);
            plan.samples = 500;
            plan.seed = 12;
            plan.mode = mode;
            EstimatorReport a = vqed_estimate(plan);
            plan.threads = 4;
            deterministic = deterministic && same(a, vqed_estimate(plan));
        }
        VqedPlan cps;
        cps.input = ensemble_of(build_resource_state({ResourceKind::CPS, 0, 0.1, std::nullopt}, c).state);
        cps.projectors = {StabilizerDecomposition::continuous_cps(gamma, 0.1)};
        cps.observable = Observable::nullifier_square(NullifierKind::cps_parabola(0.1), c);
        cps.samples = 200;
        cps.seed = 3;
        deterministic = deterministic && same(vqed_estimate(cps), vqed_estimate(cps));

        ProjectorParams pp;
        pp.g = 1;
        SmearedProjector cl = build_smeared_projector(ProjectorKind::Cluster, gamma, pp, discretize_gaussian(gamma, 21));
        FockVector vac = FockVector::vacuum(12);
        VirtualEntangleParams vp;
        vp.samples = 300;
        vp.seed = 5;
        auto run_virtual = [&]() {
            return virtual_entangle_estimate(ensemble_of(vac), ensemble_of(vac), StabilizerDecomposition::from_projector(cl),
                                             Observable::nullifier_square(NullifierKind::cluster_pair(1), 12), vp);
        };
        deterministic = deterministic && same(run_virtual(), run_virtual());

        auto [x, pq] = compressions(c);
        std::vector<Observable> obs = {Observable::products(c, 2, {ProductTerm{1, {x, pq}}})};
        KnitParams kp;
        kp.samples = 300;
        kp.seed = 6;
        KnitReport k1 = knit_czp_expectation(vac.cutoff() == c ? vac : FockVector::vacuum(c), FockVector::vacuum(c), obs,
                                             0.3, 1.0, kp);
        kp.threads = 3;
        KnitReport k2 = knit_czp_expectation(FockVector::vacuum(c), FockVector::vacuum(c), obs, 0.3, 1.0, kp);
        deterministic = deterministic && same(k1.observables[0], k2.observables[0]);

        TeleportModel tm;
        tm.samples = 200;
        tm.seed = 9;
        FockVector in = coherent(0.2, c);
        TeleportResult t1 = teleport_czp(in, in, TeleportResource::cluster(1.0), tm, TeleportMode::Sampled);
        TeleportResult t2 = teleport_czp(in, in, TeleportResource::cluster(1.0), tm, TeleportMode::Sampled);
        deterministic = deterministic && t1.output.matrix() == t2.output.matrix();
    }
    v.pass = comm <= 1e-10 && kraus <= 1e-10 && trace <= 1e-10 && unitary <= 1e-10 && deterministic;
    v.detail = fmt("commutator %.1e, Kraus %.1e, trace %.1e, unitarity %.1e, seed determinism %s", comm, kraus, trace,
                   unitary, deterministic ? "yes" : "no");
    return v;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const std::function<Verdict()> &fn) {
        auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception &e) {
            v.pass = false;
            v.detail = std::string("error: ") + e.what();
        }
        failures += v.pass ? 0 : 1;
        std::printf("%s criterion %d: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, v.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    };
    report(1, criterion1);
    Fig5 fig5;
    bool fig5_ok = true;
    std::string fig5_error;
    try {
        fig5 = run_fig5_sweep();
    } catch (const std::exception &e) {
        fig5_ok = false;
        fig5_error = e.what();
    }
    auto fig5_verdict = [&](Verdict (*fn)(const Fig5 &)) {
        return [&, fn]() {
            if (!fig5_ok) {
                return Verdict{false, "error: " + fig5_error};
            }
            return fn(fig5);
        };
    };
    report(2, fig5_verdict(criterion2));
    report(3, fig5_verdict(criterion3));
    report(4, criterion4);
    report(5, criterion5);
    report(6, criterion6);
    report(7, criterion7);
    report(8, criterion8);
    report(9, criterion9);
    report(10, criterion10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
