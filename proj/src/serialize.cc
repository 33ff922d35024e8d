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

#include "cvsq/serialize.h"

#include <cmath>

namespace cvsq {

namespace {

[[noreturn]] void invalid(const std::string &path, const std::string &what) {
    fail(ErrorKind::Validation, path + ": " + what);
}

Json complex_array(const cplx *data, size_t n) {
    Json arr = Json::array();
    for (size_t i = 0; i < n; i++) {
        arr.push_back({data[i].real(), data[i].imag()});
    }
    return arr;
}

Json envelope(const char *kind, int cutoff, int modes, Json data) {
    return {{"version", kEnvelopeVersion}, {"kind", kind}, {"cutoff", cutoff}, {"modes", modes}, {"data", std::move(data)}};
}

Json row_major(const Mat &m) {
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = m;
    return complex_array(r.data(), static_cast<size_t>(r.size()));
}

struct Header {
    int cutoff;
    int modes;
    size_t dim;
};

Header read_header(const Json &j, const char *kind) {
    if (!j.is_object()) {
        invalid("envelope", "expected an object");
    }
    int version = get_int(j, "version", "envelope");
    if (version != kEnvelopeVersion) {
        invalid("envelope.version", "unsupported version " + std::to_string(version));
    }
    std::string k = get_string(j, "kind", "envelope", "");
    if (k != kind) {
        invalid("envelope.kind", "expected '" + std::string(kind) + "', found '" + k + "'");
    }
    Header h{get_int(j, "cutoff", "envelope"), get_int(j, "modes", "envelope"), 0};
    if (h.cutoff < 1 || h.modes < 1) {
        invalid("envelope", "cutoff and modes must be positive");
    }
    h.dim = space_dimension(h.cutoff, h.modes);
    return h;
}

Vec read_data(const Json &j, size_t expected) {
    const Json &data = require_field(j, "data", "envelope");
    if (!data.is_array() || data.size() != expected) {
        invalid("envelope.data", "expected " + std::to_string(expected) + " entries");
    }
    Vec v(static_cast<Eigen::Index>(expected));
    for (size_t i = 0; i < expected; i++) {
        const Json &e = data[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
            invalid("envelope.data[" + std::to_string(i) + "]", "expected [re, im]");
        }
        v[static_cast<Eigen::Index>(i)] = cplx(e[0].get<double>(), e[1].get<double>());
    }
    return v;
}

Mat read_matrix(const Json &j, size_t dim) {
    Vec flat = read_data(j, dim * dim);
    Mat m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (size_t r = 0; r < dim; r++) {
        for (size_t c = 0; c < dim; c++) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat[static_cast<Eigen::Index>(r * dim + c)];
        }
    }
    return m;
}

}  // namespace

Json to_json(const FockVector &psi) {
    return envelope("ket", psi.cutoff(), psi.modes(), complex_array(psi.amplitudes().data(), psi.dimension()));
}

Json to_json(const DensityOperator &rho) {
    return envelope("density", rho.cutoff(), rho.modes(), row_major(rho.matrix()));
}

Json to_json(const DenseOperator &op) {
    Json j = envelope("operator", op.cutoff(), op.modes(), row_major(op.matrix()));
    j["unitary"] = op.is_unitary();
    return j;
}

FockVector ket_from_json(const Json &j) {
    Header h = read_header(j, "ket");
    return FockVector(h.cutoff, h.modes, read_data(j, h.dim));
}

DensityOperator density_from_json(const Json &j) {
    Header h = read_header(j, "density");
    return DensityOperator(h.cutoff, h.modes, read_matrix(j, h.dim));
}

DenseOperator operator_from_json(const Json &j) {
    Header h = read_header(j, "operator");
    bool unitary = j.contains("unitary") && j["unitary"].is_boolean() && j["unitary"].get<bool>();
    return DenseOperator(h.cutoff, h.modes, read_matrix(j, h.dim), unitary);
}

const Json &require_field(const Json &j, const std::string &key, const std::string &path) {
    if (!j.is_object()) {
        invalid(path, "expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        invalid(path + "." + key, "required field is missing");
    }
    return *it;
}

double get_number(const Json &j, const std::string &key, const std::string &path) {
    const Json &v = require_field(j, key, path);
    if (!v.is_number()) {
        invalid(path + "." + key, "expected a number");
    }
    double d = v.get<double>();
    if (!std::isfinite(d)) {
        invalid(path + "." + key, "expected a finite number");
    }
    return d;
}

double get_number(const Json &j, const std::string &key, const std::string &path, double fallback) {
    if (!j.is_object() || !j.contains(key)) {
        return fallback;
    }
    return get_number(j, key, path);
}

int get_int(const Json &j, const std::string &key, const std::string &path) {
    const Json &v = require_field(j, key, path);
    if (!v.is_number_integer()) {
        invalid(path + "." + key, "expected an integer");
    }
    return v.get<int>();
}

int get_int(const Json &j, const std::string &key, const std::string &path, int fallback) {
    if (!j.is_object() || !j.contains(key)) {
        return fallback;
    }
    return get_int(j, key, path);
}

std::vector<double> get_number_list(const Json &j, const std::string &key, const std::string &path) {
    const Json &v = require_field(j, key, path);
    if (!v.is_array() || v.empty()) {
        invalid(path + "." + key, "expected a non-empty list of numbers");
    }
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); i++) {
        if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
            invalid(path + "." + key + "[" + std::to_string(i) + "]", "expected a finite number");
        }
        out.push_back(v[i].get<double>());
    }
    return out;
}

std::string get_string(const Json &j, const std::string &key, const std::string &path, const std::string &fallback) {
    if (!j.is_object() || !j.contains(key)) {
        return fallback;
    }
    const Json &v = j.at(key);
    if (!v.is_string()) {
        invalid(path + "." + key, "expected a string");
    }
    return v.get<std::string>();
}

namespace {

cplx get_complex(const Json &j, const std::string &key, const std::string &path) {
    const Json &v = require_field(j, key, path);
    if (v.is_number()) {
        return {v.get<double>(), 0};
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        return {v[0].get<double>(), v[1].get<double>()};
    }
    invalid(path + "." + key, "expected a number or [re, im]");
}

template <typename Enum, typename Parse>
Enum parse_named(const Json &j, const std::string &key, const std::string &path, Parse parse) {
    const Json &v = require_field(j, key, path);
    if (!v.is_string()) {
        invalid(path + "." + key, "expected a string");
    }
    try {
        return parse(v.get<std::string>());
    } catch (const Error &e) {
        invalid(path + "." + key, e.what());
    }
}

}  // namespace

Json to_json(const GateSpec &g) {
    Json j = {{"kind", gate_kind_name(g.kind)}, {"targets", g.targets}};
    if (g.kind == GateKind::Displacement) {
        j["alpha"] = {g.alpha.real(), g.alpha.imag()};
    } else if (g.kind != GateKind::BeamSplitter5050) {
        j["value"] = g.value;
    }
    return j;
}

GateSpec gate_from_json(const Json &j, const std::string &path) {
    GateSpec g;
    g.kind = parse_named<GateKind>(j, "kind", path, parse_gate_kind);
    if (g.kind == GateKind::Displacement) {
        g.alpha = get_complex(j, "alpha", path);
    } else if (g.kind != GateKind::BeamSplitter5050) {
        g.value = get_number(j, "value", path);
    }
    if (j.contains("targets")) {
        const Json &t = j["targets"];
        if (!t.is_array() || t.empty()) {
            invalid(path + ".targets", "expected a non-empty list of mode indices");
        }
        g.targets.clear();
        for (const auto &m : t) {
            if (!m.is_number_integer()) {
                invalid(path + ".targets", "expected integers");
            }
            g.targets.push_back(m.get<int>());
        }
    } else {
        g.targets = g.arity() == 1 ? std::vector<int>{0} : std::vector<int>{0, 1};
    }
    return g;
}

Json to_json(const ResourceStateSpec &s) {
    Json j = {{"kind", resource_kind_name(s.kind)}, {"r", s.r}};
    if (s.eta) {
        j["eta"] = *s.eta;
    }
    if (s.g) {
        j["g"] = *s.g;
    }
    return j;
}

ResourceStateSpec resource_from_json(const Json &j, const std::string &path) {
    ResourceStateSpec s;
    s.kind = parse_named<ResourceKind>(j, "kind", path, parse_resource_kind);
    if (j.contains("r_db")) {
        s.r = std::log(10.0) * get_number(j, "r_db", path) / 20;
    } else {
        s.r = get_number(j, "r", path, 0.0);
    }
    if (j.contains("eta")) {
        s.eta = get_number(j, "eta", path);
    }
    if (j.contains("g")) {
        s.g = get_number(j, "g", path);
    }
    try {
        s.validate();
    } catch (const Error &e) {
        invalid(path, e.what());
    }
    return s;
}

Json to_json(const LossSpec &l) {
    return {{"loss", l.loss}, {"n_max", l.n_max}, {"modes", l.modes}};
}

LossSpec loss_from_json(const Json &j, const std::string &path) {
    LossSpec l;
    l.loss = get_number(j, "loss", path);
    l.n_max = get_int(j, "n_max", path, -1);
    if (j.contains("modes")) {
        for (const auto &m : j["modes"]) {
            if (!m.is_number_integer()) {
                invalid(path + ".modes", "expected integers");
            }
            l.modes.push_back(m.get<int>());
        }
    }
    try {
        l.validate();
    } catch (const Error &e) {
        invalid(path, e.what());
    }
    return l;
}

Json describe(const SmearedProjector &p) {
    Json params = Json::object();
    if (p.params.eta) {
        params["eta"] = *p.params.eta;
    }
    if (p.params.g) {
        params["g"] = *p.params.g;
    }
    return {{"kind", projector_kind_name(p.kind)},
            {"gamma", p.gamma},
            {"params", params},
            {"grid_policy", span_policy_name(p.grid.policy)},
            {"k_sigma", p.grid.k_sigma},
            {"points", p.grid.count},
            {"terms", p.terms.size()}};
}

Json to_json(const EstimatorReport &r) {
    return {{"mean_num", r.mean_num},       {"mean_den", r.mean_den},   {"se_num", r.se_num},
            {"se_den", r.se_den},           {"ratio", r.ratio},         {"ratio_se", r.ratio_se},
            {"mean_im_den", r.mean_im_den}, {"se_im_den", r.se_im_den}, {"norm_constant", r.norm_constant},
            {"probability", r.probability}, {"probability_se", r.probability_se},
            {"trajectories", r.trajectories}, {"seed", r.seed}};
}

}  // namespace cvsq
