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

#include "cvsq/experiments.h"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <fstream>
#include <sstream>

#include "cvsq/analytics.h"
#include "cvsq/channels.h"
#include "cvsq/knitting.h"
#include "cvsq/lcu.h"
#include "cvsq/projectors.h"
#include "cvsq/vqed.h"

namespace cvsq {

namespace {

const ExperimentKind kAllExperiments[] = {
    ExperimentKind::ProjectSq,     ExperimentKind::ProjectCps, ExperimentKind::ProjectCluster,
    ExperimentKind::Fig5Sweep,     ExperimentKind::Fig6LossSweep, ExperimentKind::LcuCps,
    ExperimentKind::VqedCps,       ExperimentKind::KnitCzp,    ExperimentKind::WignerDump,
};

[[noreturn]] void invalid(const std::string &path, const std::string &what) {
    fail(ErrorKind::Validation, path + ": " + what);
}

}  // namespace

const char *experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::ProjectSq:
            return "ProjectSq";
        case ExperimentKind::ProjectCps:
            return "ProjectCps";
        case ExperimentKind::ProjectCluster:
            return "ProjectCluster";
        case ExperimentKind::Fig5Sweep:
            return "Fig5Sweep";
        case ExperimentKind::Fig6LossSweep:
            return "Fig6LossSweep";
        case ExperimentKind::LcuCps:
            return "LcuCps";
        case ExperimentKind::VqedCps:
            return "VqedCps";
        case ExperimentKind::KnitCzp:
            return "KnitCzp";
        case ExperimentKind::WignerDump:
            return "WignerDump";
    }
    return "?";
}

ExperimentKind parse_experiment(const std::string &name) {
    for (ExperimentKind k : kAllExperiments) {
        if (name == experiment_name(k)) {
            return k;
        }
    }
    invalid("experiment", "unknown experiment '" + name + "'");
}

bool is_stochastic(ExperimentKind kind) {
    return kind == ExperimentKind::VqedCps || kind == ExperimentKind::KnitCzp;
}

const char *library_version() {
#ifdef CVSQ_VERSION
    return CVSQ_VERSION;
#else
    return "0.0.0";
#endif
}

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Validation:
        case ErrorKind::Configuration:
        case ErrorKind::InvalidArgument:
        case ErrorKind::InvalidDimension:
        case ErrorKind::DimensionMismatch:
        case ErrorKind::Unsupported:
            return 2;
        default:
            return 3;
    }
}

std::string sha256_hex(const std::string &data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        fail(ErrorKind::Numeric, "sha256 failed");
    }
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; i++) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

Json load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::Validation, "config: cannot read '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::parse_error &e) {
        fail(ErrorKind::Validation, std::string("config: invalid JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------------------------------------
// Validation and defaults

namespace {

void set_default(Json &p, const std::string &key, const Json &value) {
    if (!p.contains(key)) {
        p[key] = value;
    }
}

void check_number(const Json &p, const std::string &key, const std::string &path) {
    get_number(p, key, path);
}

void check_positive_int(const Json &p, const std::string &key, const std::string &path, int min) {
    int v = get_int(p, key, path);
    if (v < min) {
        invalid(path + "." + key, "must be >= " + std::to_string(min));
    }
}

/// Accepts `<base>_db` or `<base>` (natural units) as a non-empty list or a single number and
/// stores the natural-unit list under `<base>`.
void normalize_r_list(Json &p, const std::string &base, const std::string &path, bool required,
                      const std::vector<double> &fallback = {}) {
    const std::string db = base + "_db";
    std::vector<double> out;
    if (p.contains(db)) {
        Json wrapped = p[db].is_array() ? p[db] : Json::array({p[db]});
        Json tmp = {{db, wrapped}};
        for (double v : get_number_list(tmp, db, path)) {
            out.push_back(db_to_r(v));
        }
    } else if (p.contains(base)) {
        Json wrapped = p[base].is_array() ? p[base] : Json::array({p[base]});
        Json tmp = {{base, wrapped}};
        out = get_number_list(tmp, base, path);
    } else if (required) {
        invalid(path + "." + base, "required field is missing (give '" + base + "' or '" + db + "')");
    } else {
        out = fallback;
    }
    for (double v : out) {
        if (v < 0) {
            invalid(path + "." + base, "squeezing values must be non-negative");
        }
    }
    p[base] = out;
}

void normalize_grid(Json &p, const std::string &key, const std::string &path, int points) {
    set_default(p, key, Json::object());
    Json &g = p[key];
    if (!g.is_object()) {
        invalid(path + "." + key, "expected an object");
    }
    const std::string gp = path + "." + key;
    set_default(g, "points", points);
    set_default(g, "policy", "SigmaScaled");
    set_default(g, "k_sigma", 5.0);
    check_positive_int(g, "points", gp, 1);
    check_number(g, "k_sigma", gp);
    try {
        parse_span_policy(get_string(g, "policy", gp, ""));
    } catch (const Error &e) {
        invalid(gp + ".policy", e.what());
    }
}

void normalize_kinds(Json &p, const std::string &path) {
    set_default(p, "kinds", Json::array({"CPS", "Cluster"}));
    const Json &k = p["kinds"];
    if (!k.is_array() || k.empty()) {
        invalid(path + ".kinds", "expected a non-empty list");
    }
    for (const auto &v : k) {
        if (!v.is_string() || (v != "CPS" && v != "Cluster")) {
            invalid(path + ".kinds", "entries must be \"CPS\" or \"Cluster\"");
        }
    }
}

const std::vector<std::string> &allowed_params(ExperimentKind kind) {
    static const std::vector<std::string> project = {"threads", "r", "r_db", "delta_r", "delta_r_db", "cutoff",
                                                     "grid", "eta", "projector_eta", "g", "projector_g"};
    static const std::vector<std::string> sweep = {"threads", "r",  "r_db",          "delta_r",    "delta_r_db",
                                                   "kinds",   "eta", "g",            "cutoff_single", "cutoff_two",
                                                   "grid_single", "grid_two", "losses"};
    static const std::vector<std::string> lcu = {"threads", "r",        "r_db", "delta_r", "delta_r_db", "eta",
                                                 "delta_x0", "p0",      "cutoff", "method"};
    static const std::vector<std::string> vqed = {"threads", "r",       "r_db",   "delta_r",       "delta_r_db",
                                                  "eta",     "cutoff",  "samples", "decomposition", "grid",
                                                  "mode",    "shots"};
    static const std::vector<std::string> knit = {"threads",   "inputs",       "input_cutoff", "delta_r",
                                                  "delta_r_db", "gamma",       "g",            "samples",
                                                  "output_cutoff", "x_max",    "x_points",     "outcome_points",
                                                  "outcome_sigmas"};
    static const std::vector<std::string> wigner = {"threads", "state", "cutoff", "projector", "loss", "grid"};
    switch (kind) {
        case ExperimentKind::ProjectSq:
        case ExperimentKind::ProjectCps:
        case ExperimentKind::ProjectCluster:
            return project;
        case ExperimentKind::Fig5Sweep:
        case ExperimentKind::Fig6LossSweep:
            return sweep;
        case ExperimentKind::LcuCps:
            return lcu;
        case ExperimentKind::VqedCps:
            return vqed;
        case ExperimentKind::KnitCzp:
            return knit;
        case ExperimentKind::WignerDump:
            return wigner;
    }
    return project;
}

Json normalize_params(ExperimentKind kind, Json p) {
    const std::string path = "params";
    if (!p.is_object()) {
        invalid(path, "expected an object");
    }
    set_default(p, "threads", 0);
    check_positive_int(p, "threads", path, 0);
    switch (kind) {
        case ExperimentKind::ProjectSq:
        case ExperimentKind::ProjectCps:
        case ExperimentKind::ProjectCluster: {
            normalize_r_list(p, "r", path, true);
            normalize_r_list(p, "delta_r", path, true);
            bool two = kind == ExperimentKind::ProjectCluster;
            set_default(p, "cutoff", two ? 52 : 60);
            check_positive_int(p, "cutoff", path, 2);
            normalize_grid(p, "grid", path, two ? 61 : 201);
            if (kind == ExperimentKind::ProjectCps) {
                set_default(p, "eta", 0.1);
                check_number(p, "eta", path);
                set_default(p, "projector_eta", p["eta"]);
                check_number(p, "projector_eta", path);
            }
            if (two) {
                set_default(p, "g", 1.0);
                check_number(p, "g", path);
                set_default(p, "projector_g", p["g"]);
                check_number(p, "projector_g", path);
            }
            break;
        }
        case ExperimentKind::Fig5Sweep: {
            normalize_r_list(p, "r", path, false, {db_to_r(0), db_to_r(3), db_to_r(5)});
            normalize_r_list(p, "delta_r", path, false,
                             {0, db_to_r(1), db_to_r(2), db_to_r(3), db_to_r(4), db_to_r(5)});
            normalize_kinds(p, path);
            set_default(p, "eta", 0.1);
            set_default(p, "g", 1.0);
            check_number(p, "eta", path);
            check_number(p, "g", path);
            set_default(p, "cutoff_single", 100);
            set_default(p, "cutoff_two", 52);
            check_positive_int(p, "cutoff_single", path, 2);
            check_positive_int(p, "cutoff_two", path, 2);
            normalize_grid(p, "grid_single", path, 201);
            normalize_grid(p, "grid_two", path, 61);
            break;
        }
        case ExperimentKind::Fig6LossSweep: {
            normalize_r_list(p, "r", path, false, {db_to_r(3)});
            normalize_r_list(p, "delta_r", path, false, {db_to_r(3)});
            set_default(p, "losses", Json::array({0.05, 0.1, 0.2}));
            for (double l : get_number_list(p, "losses", path)) {
                if (!(l >= 0 && l <= 1)) {
                    invalid(path + ".losses", "loss rates must lie in [0, 1]");
                }
            }
            normalize_kinds(p, path);
            set_default(p, "eta", 0.1);
            set_default(p, "g", 1.0);
            check_number(p, "eta", path);
            check_number(p, "g", path);
            set_default(p, "cutoff_single", 60);
            set_default(p, "cutoff_two", 30);
            check_positive_int(p, "cutoff_single", path, 2);
            check_positive_int(p, "cutoff_two", path, 2);
            normalize_grid(p, "grid_single", path, 201);
            normalize_grid(p, "grid_two", path, 61);
            break;
        }
        case ExperimentKind::LcuCps: {
            normalize_r_list(p, "r", path, false, {0.0});
            normalize_r_list(p, "delta_r", path, false, {0.5 * std::log(2.0)});
            set_default(p, "eta", Json::array({0.0, 0.1}));
            get_number_list(p, "eta", path);
            set_default(p, "delta_x0", 0.05);
            set_default(p, "p0", 0.5);
            check_number(p, "delta_x0", path);
            check_number(p, "p0", path);
            set_default(p, "cutoff", 60);
            check_positive_int(p, "cutoff", path, 2);
            set_default(p, "method", "Direct");
            std::string m = get_string(p, "method", path, "");
            if (m != "Direct" && m != "Factorized") {
                invalid(path + ".method", "expected \"Direct\" or \"Factorized\"");
            }
            break;
        }
        case ExperimentKind::VqedCps: {
            normalize_r_list(p, "r", path, false, {0.0});
            normalize_r_list(p, "delta_r", path, false, {0.5 * std::log(2.0)});
            set_default(p, "eta", 0.1);
            check_number(p, "eta", path);
            set_default(p, "cutoff", 40);
            check_positive_int(p, "cutoff", path, 2);
            set_default(p, "samples", 10000);
            check_positive_int(p, "samples", path, 2);
            set_default(p, "decomposition", "continuous");
            std::string d = get_string(p, "decomposition", path, "");
            if (d != "continuous" && d != "grid") {
                invalid(path + ".decomposition", "expected \"continuous\" or \"grid\"");
            }
            normalize_grid(p, "grid", path, 201);
            set_default(p, "mode", "exact");
            std::string m = get_string(p, "mode", path, "");
            if (m != "exact" && m != "shots") {
                invalid(path + ".mode", "expected \"exact\" or \"shots\"");
            }
            set_default(p, "shots", 1);
            check_positive_int(p, "shots", path, 1);
            break;
        }
        case ExperimentKind::KnitCzp: {
            set_default(p, "inputs", Json::array({Json{{"alpha", {0.3, 0.0}}}, Json{{"alpha", {0.3, 0.0}}}}));
            const Json &in = p["inputs"];
            if (!in.is_array() || in.size() != 2) {
                invalid(path + ".inputs", "expected two input states");
            }
            for (size_t i = 0; i < 2; i++) {
                const std::string ip = path + ".inputs[" + std::to_string(i) + "]";
                const Json &a = require_field(in[i], "alpha", ip);
                if (!(a.is_number() || (a.is_array() && a.size() == 2 && a[0].is_number() && a[1].is_number()))) {
                    invalid(ip + ".alpha", "expected a number or [re, im]");
                }
            }
            set_default(p, "input_cutoff", 20);
            check_positive_int(p, "input_cutoff", path, 2);
            if (!p.contains("gamma")) {
                normalize_r_list(p, "delta_r", path, false, {1.0});
                if (p["delta_r"].size() != 1 || !(p["delta_r"][0].get<double>() > 0)) {
                    invalid(path + ".delta_r", "expected a single positive value");
                }
            } else {
                check_number(p, "gamma", path);
                if (!(p["gamma"].get<double>() > 0)) {
                    invalid(path + ".gamma", "must be positive");
                }
            }
            set_default(p, "g", 1.0);
            check_number(p, "g", path);
            set_default(p, "samples", 20000);
            check_positive_int(p, "samples", path, 2);
            set_default(p, "output_cutoff", 20);
            set_default(p, "x_max", 10.5);
            set_default(p, "x_points", 141);
            set_default(p, "outcome_points", 121);
            set_default(p, "outcome_sigmas", 6.0);
            check_positive_int(p, "output_cutoff", path, 2);
            check_number(p, "x_max", path);
            check_positive_int(p, "x_points", path, 8);
            check_positive_int(p, "outcome_points", path, 2);
            check_number(p, "outcome_sigmas", path);
            break;
        }
        case ExperimentKind::WignerDump: {
            resource_from_json(require_field(p, "state", path), path + ".state");
            set_default(p, "cutoff", 60);
            check_positive_int(p, "cutoff", path, 2);
            if (p.contains("projector")) {
                Json &pr = p["projector"];
                if (!pr.is_object()) {
                    invalid(path + ".projector", "expected an object");
                }
                normalize_r_list(pr, "delta_r", path + ".projector", true);
                if (pr["delta_r"].size() != 1) {
                    invalid(path + ".projector.delta_r", "expected a single value");
                }
                set_default(pr, "points", 201);
                set_default(pr, "policy", "SigmaScaled");
                set_default(pr, "k_sigma", 5.0);
                check_positive_int(pr, "points", path + ".projector", 1);
            }
            if (p.contains("loss")) {
                loss_from_json(p["loss"], path + ".loss");
            }
            set_default(p, "grid", Json::object());
            Json &g = p["grid"];
            set_default(g, "x_min", -6.0);
            set_default(g, "x_max", 6.0);
            set_default(g, "p_min", -6.0);
            set_default(g, "p_max", 6.0);
            set_default(g, "resolution", 121);
            for (const char *k : {"x_min", "x_max", "p_min", "p_max"}) {
                check_number(g, k, path + ".grid");
            }
            check_positive_int(g, "resolution", path + ".grid", 2);
            break;
        }
    }
    const std::vector<std::string> &allowed = allowed_params(kind);
    for (const auto &[k, v] : p.items()) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            invalid(path + "." + k, "unknown field");
        }
    }
    return p;
}

}  // namespace

Json validate_config(const Json &config) {
    if (!config.is_object()) {
        invalid("config", "expected a JSON object");
    }
    const Json &e = require_field(config, "experiment", "config");
    if (!e.is_string()) {
        invalid("config.experiment", "expected a string");
    }
    ExperimentKind kind = parse_experiment(e.get<std::string>());
    Json out = Json::object();
    out["experiment"] = experiment_name(kind);
    std::string name = get_string(config, "name", "config", "");
    if (name.empty()) {
        name = experiment_name(kind);
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    }
    if (name.find('/') != std::string::npos) {
        invalid("config.name", "must not contain '/'");
    }
    out["name"] = name;
    if (config.contains("seed")) {
        const Json &s = config["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            invalid("config.seed", "expected a non-negative integer");
        }
        out["seed"] = s.get<uint64_t>();
    } else if (is_stochastic(kind)) {
        invalid("config.seed", std::string("required field is missing for ") + experiment_name(kind));
    }
    if (config.contains("output_dir")) {
        out["output_dir"] = get_string(config, "output_dir", "config", "");
    }
    out["params"] = normalize_params(kind, config.contains("params") ? config["params"] : Json::object());
    for (auto it = config.begin(); it != config.end(); ++it) {
        const std::string &k = it.key();
        if (k != "experiment" && k != "name" && k != "seed" && k != "output_dir" && k != "params" && k != "$schema") {
            invalid("config." + k, "unknown field");
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Runners

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct Context {
    Json config;
    Json params;
    std::string hash;
    int threads = 0;
    uint64_t seed = 0;
};

GaussianGrid grid_from(const Json &g, double gamma) {
    return discretize_gaussian(gamma, g["points"].get<int>(), parse_span_policy(g["policy"].get<std::string>()),
                               g["k_sigma"].get<double>());
}

std::vector<double> list(const Json &p, const char *key) {
    return p[key].get<std::vector<double>>();
}

FockVector coherent_state(cplx alpha, int cutoff) {
    const int w = cutoff + 30;
    GateFactory f(w);
    Vec v = f.displacement(alpha) * FockVector::vacuum(w).amplitudes();
    return FockVector(cutoff, 1, truncate_levels(v, w, 1, cutoff)).normalized();
}

struct ProjectionPoint {
    FockVector state;
    double probability;
};

/// Normalized output and probability; delta_r = 0 is the unprojected state.
ProjectionPoint project(ProjectorKind kind, const ProjectorParams &pp, double r, double delta_r, const Json &grid,
                        const FockVector &in) {
    if (delta_r == 0) {
        return {in, 1.0};
    }
    double gamma = gamma_from_delta_r(delta_r, r);
    SmearedProjector p = build_smeared_projector(kind, gamma, pp, grid_from(grid, gamma));
    PureProjection out = apply_projector(p, in);
    return {out.state.normalized(), out.probability};
}

Table run_project(ExperimentKind kind, const Context &ctx) {
    const Json &p = ctx.params;
    const int cutoff = p["cutoff"].get<int>();
    Table t;
    t.columns = {"r", "delta_r", "gamma", "fidelity", "probability", "analytic_probability",
                 "variance", "analytic_variance"};
    for (double r : list(p, "r")) {
        for (double dr : list(p, "delta_r")) {
            ResourceStateSpec in_spec, target_spec;
            ProjectorKind pk = ProjectorKind::Sq;
            ProjectorParams pp;
            NullifierKind nk = NullifierKind::sq_x();
            double analytic_variance = 0;
            double analytic_probability = 0;
            if (kind == ExperimentKind::ProjectSq) {
                in_spec = {ResourceKind::SqueezedVacuum, r, std::nullopt, std::nullopt};
                analytic_variance = analytic_reference(Curve::CpsNullifier, {r, dr, 0});
                analytic_probability = analytic_reference(Curve::CpsProb, {r, dr, 0});
            } else if (kind == ExperimentKind::ProjectCps) {
                double eta = p["eta"].get<double>();
                in_spec = {ResourceKind::CPS, r, eta, std::nullopt};
                pk = ProjectorKind::CPS;
                pp.eta = p["projector_eta"].get<double>();
                nk = NullifierKind::cps_parabola(eta);
                analytic_variance = analytic_reference(Curve::CpsNullifier, {r, dr, 0});
                analytic_probability = analytic_reference(Curve::CpsProb, {r, dr, 0});
            } else {
                double g = p["g"].get<double>();
                in_spec = {ResourceKind::Cluster, r, std::nullopt, g};
                pk = ProjectorKind::Cluster;
                pp.g = p["projector_g"].get<double>();
                nk = NullifierKind::cluster_pair(g);
                analytic_variance = analytic_reference(Curve::ClusterNullifier, {r, dr, 0});
                analytic_probability = analytic_reference(Curve::ClusterProb, {r, dr, 0});
            }
            target_spec = in_spec;
            target_spec.r = r + dr;
            FockVector in = build_resource_state(in_spec, cutoff).state;
            FockVector target = build_resource_state(target_spec, cutoff).state;
            ProjectionPoint out = project(pk, pp, r, dr, p["grid"], in);
            double gamma = dr == 0 ? 0 : gamma_from_delta_r(dr, r);
            t.rows.push_back({num(r), num(dr), num(gamma), num(fidelity(out.state, target)), num(out.probability),
                              num(analytic_probability), num(nullifier_variance(nk, out.state)),
                              num(analytic_variance)});
        }
    }
    return t;
}

Table run_fig5(const Context &ctx) {
    const Json &p = ctx.params;
    const double eta = p["eta"].get<double>();
    const double g = p["g"].get<double>();
    Table t;
    t.columns = {"kind", "r_db", "delta_r_db", "quantity", "measured", "analytic", "rel_error"};
    for (const auto &kind_name : p["kinds"]) {
        const bool cps = kind_name == "CPS";
        const int cutoff = p[cps ? "cutoff_single" : "cutoff_two"].get<int>();
        const Json &grid = p[cps ? "grid_single" : "grid_two"];
        for (double r : list(p, "r")) {
            ResourceStateSpec spec = cps ? ResourceStateSpec{ResourceKind::CPS, r, eta, std::nullopt}
                                         : ResourceStateSpec{ResourceKind::Cluster, r, std::nullopt, g};
            FockVector in = build_resource_state(spec, cutoff).state;
            for (double dr : list(p, "delta_r")) {
                ProjectorParams pp;
                if (cps) {
                    pp.eta = eta;
                } else {
                    pp.g = g;
                }
                ProjectionPoint out = project(cps ? ProjectorKind::CPS : ProjectorKind::Cluster, pp, r, dr, grid, in);
                double v = nullifier_variance(cps ? NullifierKind::cps_parabola(eta) : NullifierKind::cluster_pair(g),
                                              out.state);
                double va = analytic_reference(cps ? Curve::CpsNullifier : Curve::ClusterNullifier, {r, dr, 0});
                double qa = analytic_reference(cps ? Curve::CpsProb : Curve::ClusterProb, {r, dr, 0});
                const std::string k = kind_name.get<std::string>();
                t.rows.push_back({k, num(r_to_db(r)), num(r_to_db(dr)), "nullifier_variance", num(v), num(va),
                                  num(std::abs(v / va - 1))});
                t.rows.push_back({k, num(r_to_db(r)), num(r_to_db(dr)), "probability", num(out.probability), num(qa),
                                  num(std::abs(out.probability / qa - 1))});
            }
        }
    }
    return t;
}

Table run_fig6(const Context &ctx) {
    const Json &p = ctx.params;
    const double eta = p["eta"].get<double>();
    const double g = p["g"].get<double>();
    const double r = list(p, "r").front();
    const double dr = list(p, "delta_r").front();
    const double gamma = gamma_from_delta_r(dr, r);
    Table t;
    t.columns = {"kind", "r_db", "delta_r_db", "loss", "noisy_variance", "suppressed_variance", "probability",
                 "ideal_variance", "analytic_target_variance"};
    for (const auto &kind_name : p["kinds"]) {
        const bool cps = kind_name == "CPS";
        const int cutoff = p[cps ? "cutoff_single" : "cutoff_two"].get<int>();
        ResourceStateSpec spec = cps ? ResourceStateSpec{ResourceKind::CPS, r, eta, std::nullopt}
                                     : ResourceStateSpec{ResourceKind::Cluster, r, std::nullopt, g};
        FockVector in = build_resource_state(spec, cutoff).state;
        NullifierKind nk = cps ? NullifierKind::cps_parabola(eta) : NullifierKind::cluster_pair(g);
        ProjectorParams pp;
        if (cps) {
            pp.eta = eta;
        } else {
            pp.g = g;
        }
        SmearedProjector proj = build_smeared_projector(cps ? ProjectorKind::CPS : ProjectorKind::Cluster, gamma, pp,
                                                        grid_from(p[cps ? "grid_single" : "grid_two"], gamma));
        DenseOperator dense = dense_sum(proj, cutoff);
        double ideal = nullifier_variance(nk, in);
        double target = analytic_reference(cps ? Curve::CpsNullifier : Curve::ClusterNullifier, {r, dr, 0});
        for (double loss : list(p, "losses")) {
            LossSpec ls;
            ls.loss = loss;
            DensityOperator noisy = apply_loss(in, ls);
            MixedProjection out = apply_projector(dense, noisy);
            t.rows.push_back({kind_name.get<std::string>(), num(r_to_db(r)), num(r_to_db(dr)), num(loss),
                              num(nullifier_variance(nk, noisy)), num(nullifier_variance(nk, out.state)),
                              num(out.probability), num(ideal), num(target)});
        }
    }
    return t;
}

Table run_lcu(const Context &ctx) {
    const Json &p = ctx.params;
    const double dx = p["delta_x0"].get<double>();
    const double p0 = p["p0"].get<double>();
    const int cutoff = p["cutoff"].get<int>();
    LcuUnitaryMethod method = p["method"] == "Direct" ? LcuUnitaryMethod::Direct : LcuUnitaryMethod::Factorized;
    Table t;
    t.columns = {"r", "delta_r", "eta", "delta_x0", "N", "fidelity", "probability", "analytic_probability",
                 "achieved_gamma"};
    for (double r : list(p, "r")) {
        for (double dr : list(p, "delta_r")) {
            for (double eta : list(p, "eta")) {
                LcuCpsResult res = lcu_project_cps(r, dr, eta, dx, p0, cutoff, method);
                t.rows.push_back({num(r), num(dr), num(eta), num(dx), std::to_string(res.outcome.repetitions),
                                  num(res.fidelity), num(res.outcome.probability), num(res.target_probability),
                                  num(res.outcome.achieved_gamma)});
            }
        }
    }
    return t;
}

Table run_vqed(const Context &ctx) {
    const Json &p = ctx.params;
    const double eta = p["eta"].get<double>();
    const int cutoff = p["cutoff"].get<int>();
    Table t;
    t.columns = {"r", "delta_r", "eta", "observable", "estimate", "stderr", "oracle", "z_score"};
    for (double r : list(p, "r")) {
        for (double dr : list(p, "delta_r")) {
            const double gamma = gamma_from_delta_r(dr, r);
            FockVector in = build_resource_state({ResourceKind::CPS, r, eta, std::nullopt}, cutoff).state;
            ProjectorParams pp;
            pp.eta = eta;
            VqedPlan plan;
            plan.input = ensemble_of(in);
            DenseOperator oracle_p = DenseOperator::identity(cutoff);
            if (p["decomposition"] == "continuous") {
                plan.projectors = {StabilizerDecomposition::continuous_cps(gamma, eta)};
                oracle_p = exact_projector_form(ProjectorKind::CPS, gamma, pp, cutoff);
            } else {
                SmearedProjector sp = build_smeared_projector(ProjectorKind::CPS, gamma, pp, grid_from(p["grid"], gamma));
                plan.projectors = {StabilizerDecomposition::from_projector(sp)};
                oracle_p = dense_sum(sp, cutoff);
            }
            plan.observable = Observable::nullifier_square(NullifierKind::cps_parabola(eta), cutoff);
            plan.samples = p["samples"].get<int>();
            plan.seed = ctx.seed;
            plan.mode = p["mode"] == "exact" ? VqedMode::ExactExpectation : VqedMode::ShotSampled;
            plan.shots = p["shots"].get<int>();
            plan.threads = ctx.threads;
            EstimatorReport rep;
            try {
                rep = vqed_estimate(plan);
            } catch (const Error &e) {
                fail(e.kind(), "sweep point r=" + num(r) + " delta_r=" + num(dr) + ": " + e.what());
            }
            PureProjection oracle = apply_projector(oracle_p, in);
            double m = expectation(oracle.state.normalized(), plan.observable.to_dense()).real();
            t.rows.push_back({num(r), num(dr), num(eta), "nullifier_square", num(rep.ratio), num(rep.ratio_se), num(m),
                              num((rep.ratio - m) / rep.ratio_se)});
            t.rows.push_back({num(r), num(dr), num(eta), "probability", num(rep.probability), num(rep.probability_se),
                              num(oracle.probability), num((rep.probability - oracle.probability) / rep.probability_se)});
        }
    }
    return t;
}

Table run_knit(const Context &ctx) {
    const Json &p = ctx.params;
    const int ic = p["input_cutoff"].get<int>();
    std::vector<FockVector> inputs;
    for (const auto &in : p["inputs"]) {
        const Json &a = in["alpha"];
        cplx alpha = a.is_number() ? cplx(a.get<double>(), 0) : cplx(a[0].get<double>(), a[1].get<double>());
        inputs.push_back(coherent_state(alpha, ic));
    }
    const double gamma = p.contains("gamma") ? p["gamma"].get<double>() : gamma_from_delta_r(list(p, "delta_r")[0], 0);
    const double g = p["g"].get<double>();
    KnitParams kp;
    kp.samples = p["samples"].get<int>();
    kp.seed = ctx.seed;
    kp.threads = ctx.threads;
    kp.model.output_cutoff = p["output_cutoff"].get<int>();
    kp.model.x_max = p["x_max"].get<double>();
    kp.model.x_points = p["x_points"].get<int>();
    kp.model.outcome_points = p["outcome_points"].get<int>();
    kp.model.outcome_sigmas = p["outcome_sigmas"].get<double>();
    const int co = kp.model.output_cutoff;
    auto [xo, po] = quadratures(co + 2);
    Mat x = xo.matrix().topLeftCorner(co, co), pm = po.matrix().topLeftCorner(co, co);
    Mat id = Mat::Identity(co, co);
    const std::vector<std::pair<std::string, std::pair<Mat, Mat>>> named = {
        {"x1", {x, id}}, {"p1", {pm, id}}, {"x2", {id, x}}, {"p2", {id, pm}}, {"x1x2", {x, x}}, {"p1p2", {pm, pm}}};
    std::vector<Observable> obs;
    for (const auto &[name, f] : named) {
        obs.push_back(Observable::products(co, 2, {{1, {f.first, f.second}}}));
    }
    KnitReport rep = knit_czp_expectation(inputs[0], inputs[1], obs, gamma, g, kp);
    if (rep.cross_cut_operations != 0) {
        fail(ErrorKind::Structural, "knitted circuit has operations across the cut");
    }
    // Physical-resource oracle at the implied squeezing.
    std::optional<DensityOperator> oracle;
    if (gamma < 1 && g == 1) {
        oracle = teleport_czp(inputs[0], inputs[1], TeleportResource::cluster(implied_cluster_squeezing(gamma)),
                              kp.model)
                     .output;
    }
    Table t;
    t.columns = {"observable", "estimate", "stderr", "oracle", "z_score", "gamma", "implied_r"};
    for (size_t i = 0; i < obs.size(); i++) {
        const EstimatorReport &r = rep.observables[i];
        std::string o = "", z = "";
        if (oracle) {
            double v = expectation(*oracle, obs[i].to_dense()).real();
            o = num(v);
            z = num((r.ratio - v) / r.ratio_se);
        }
        t.rows.push_back({named[i].first, num(r.ratio), num(r.ratio_se), o, z, num(gamma), num(rep.implied_r)});
    }
    const EstimatorReport &r0 = rep.observables.front();
    double qa = gamma / (1 + gamma);
    t.rows.push_back({"probability", num(r0.probability), num(r0.probability_se), g == 1 ? num(qa) : "",
                      g == 1 ? num((r0.probability - qa) / r0.probability_se) : "", num(gamma), num(rep.implied_r)});
    return t;
}

Table run_wigner_table(const Context &ctx) {
    const Json &p = ctx.params;
    const int cutoff = p["cutoff"].get<int>();
    ResourceStateSpec spec = resource_from_json(p["state"], "params.state");
    if (spec.modes() != 1) {
        fail(ErrorKind::Validation, "params.state: Wigner dumps need a single-mode state");
    }
    FockVector psi = build_resource_state(spec, cutoff).state;
    std::optional<DensityOperator> rho;
    if (p.contains("loss")) {
        rho = apply_loss(psi, loss_from_json(p["loss"], "params.loss"));
    }
    if (p.contains("projector")) {
        const Json &pr = p["projector"];
        ProjectorKind kind = ProjectorKind::Sq;
        ProjectorParams pp;
        if (spec.kind == ResourceKind::AntiSqueezedVacuum) {
            kind = ProjectorKind::Asq;
        } else if (spec.kind == ResourceKind::CPS) {
            kind = ProjectorKind::CPS;
            pp.eta = spec.eta.value_or(0);
        }
        const double dr = pr["delta_r"][0].get<double>();
        if (dr > 0) {
            const double gamma = gamma_from_delta_r(dr, spec.r);
            SmearedProjector sp = build_smeared_projector(kind, gamma, pp, grid_from(pr, gamma));
            if (rho) {
                rho = apply_projector(dense_sum(sp, cutoff), *rho).state.normalized();
            } else {
                psi = apply_projector(sp, psi).state.normalized();
            }
        }
    }
    const Json &g = p["grid"];
    WignerGridSpec ws;
    ws.x_min = g["x_min"].get<double>();
    ws.x_max = g["x_max"].get<double>();
    ws.p_min = g["p_min"].get<double>();
    ws.p_max = g["p_max"].get<double>();
    ws.resolution = g["resolution"].get<int>();
    PhaseSpaceGrid grid = rho ? wigner(*rho, ws) : wigner(psi, ws);
    Table t;
    t.columns = {"x", "p", "W"};
    for (int i = 0; i < grid.resolution; i++) {
        for (int j = 0; j < grid.resolution; j++) {
            t.rows.push_back({num(grid.x(i)), num(grid.p(j)), num(grid.at(i, j))});
        }
    }
    return t;
}

std::string resolve_output_dir(const Json &config, const RunOptions &options) {
    if (!options.output_dir.empty()) {
        return options.output_dir;
    }
    if (config.contains("output_dir") && !config["output_dir"].get<std::string>().empty()) {
        return config["output_dir"].get<std::string>();
    }
    if (const char *env = std::getenv(kOutputDirEnv); env != nullptr && *env != 0) {
        return env;
    }
    return ".";
}

void write_text(const std::filesystem::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorKind::Validation, "cannot write '" + path.string() + "'");
    }
    out << text;
}

RunOutcome execute(const Json &raw, const RunOptions &options, bool wigner_only) {
    auto start = std::chrono::steady_clock::now();
    Json config = validate_config(raw);
    ExperimentKind kind = parse_experiment(config["experiment"].get<std::string>());
    if (wigner_only && kind != ExperimentKind::WignerDump) {
        fail(ErrorKind::Validation, "config.experiment: the wigner command needs a WignerDump config");
    }
    Context ctx;
    ctx.config = config;
    ctx.params = config["params"];
    ctx.threads = options.single_thread ? 1 : ctx.params["threads"].get<int>();
    ctx.seed = config.contains("seed") ? config["seed"].get<uint64_t>() : 0;

    // The hash covers everything that determines the numbers: the normalized config without
    // output location or worker count, plus the library version.
    Json hashed = config;
    hashed.erase("output_dir");
    hashed["params"].erase("threads");
    ctx.hash = sha256_hex(hashed.dump() + "|" + library_version());

    Table table;
    switch (kind) {
        case ExperimentKind::ProjectSq:
        case ExperimentKind::ProjectCps:
        case ExperimentKind::ProjectCluster:
            table = run_project(kind, ctx);
            break;
        case ExperimentKind::Fig5Sweep:
            table = run_fig5(ctx);
            break;
        case ExperimentKind::Fig6LossSweep:
            table = run_fig6(ctx);
            break;
        case ExperimentKind::LcuCps:
            table = run_lcu(ctx);
            break;
        case ExperimentKind::VqedCps:
            table = run_vqed(ctx);
            break;
        case ExperimentKind::KnitCzp:
            table = run_knit(ctx);
            break;
        case ExperimentKind::WignerDump:
            table = run_wigner_table(ctx);
            break;
    }
    const bool triples = kind == ExperimentKind::WignerDump;
    std::ostringstream csv;
    for (size_t i = 0; i < table.columns.size(); i++) {
        csv << (i ? "," : "") << table.columns[i];
    }
    if (!triples) {
        csv << ",manifest_hash";
    }
    csv << "\n";
    for (const auto &row : table.rows) {
        for (size_t i = 0; i < row.size(); i++) {
            csv << (i ? "," : "") << row[i];
        }
        if (!triples) {
            csv << "," << ctx.hash;
        }
        csv << "\n";
    }

    std::filesystem::path dir = resolve_output_dir(config, options);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const std::string name = config["name"].get<std::string>();
    RunOutcome out;
    out.csv_path = (dir / (name + ".csv")).string();
    out.manifest_path = (dir / (name + ".manifest.json")).string();
    out.manifest_hash = ctx.hash;
    out.rows = table.rows.size();
    write_text(out.csv_path, csv.str());

    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.manifest = {{"experiment", experiment_name(kind)},
                    {"config", config},
                    {"seed", config.contains("seed") ? Json(config["seed"]) : Json(nullptr)},
                    {"version", library_version()},
                    {"wall_time_s", wall},
                    {"threads", ctx.threads},
                    {"manifest_hash", ctx.hash},
                    {"outputs", {out.csv_path}},
                    {"rows", out.rows}};
    write_text(out.manifest_path, out.manifest.dump(2) + "\n");
    return out;
}

}  // namespace

RunOutcome run_experiment(const Json &config, const RunOptions &options) {
    return execute(config, options, false);
}

RunOutcome run_wigner(const Json &config, const RunOptions &options) {
    return execute(config, options, true);
}

}  // namespace cvsq
