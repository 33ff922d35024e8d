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

#ifndef CVSQ_SERIALIZE_H
#define CVSQ_SERIALIZE_H

#include <string>

#include "json.hpp"

#include "cvsq/channels.h"
#include "cvsq/fock.h"
#include "cvsq/gates.h"
#include "cvsq/projectors.h"
#include "cvsq/vqed.h"

namespace cvsq {

using Json = nlohmann::json;

constexpr int kEnvelopeVersion = 1;

/// {"version", "kind": "ket" | "density" | "operator", "cutoff", "modes", "data": [[re, im], ...]}
/// with density and operator data in row-major order.
Json to_json(const FockVector &psi);
Json to_json(const DensityOperator &rho);
Json to_json(const DenseOperator &op);

FockVector ket_from_json(const Json &j);
DensityOperator density_from_json(const Json &j);
DenseOperator operator_from_json(const Json &j);

/// Spec forms used by experiment configs. Parsing failures raise Validation naming the path.
Json to_json(const GateSpec &g);
GateSpec gate_from_json(const Json &j, const std::string &path = "gate");
Json to_json(const ResourceStateSpec &s);
ResourceStateSpec resource_from_json(const Json &j, const std::string &path = "state");
Json to_json(const LossSpec &l);
LossSpec loss_from_json(const Json &j, const std::string &path = "loss");
/// Description only (kind, gamma, params, grid policy, point count); terms are never written.
Json describe(const SmearedProjector &p);
Json to_json(const EstimatorReport &r);

/// Typed field access with messages of the form "<path>.<key>: ...".
const Json &require_field(const Json &j, const std::string &key, const std::string &path);
double get_number(const Json &j, const std::string &key, const std::string &path);
double get_number(const Json &j, const std::string &key, const std::string &path, double fallback);
int get_int(const Json &j, const std::string &key, const std::string &path, int fallback);
int get_int(const Json &j, const std::string &key, const std::string &path);
std::vector<double> get_number_list(const Json &j, const std::string &key, const std::string &path);
std::string get_string(const Json &j, const std::string &key, const std::string &path, const std::string &fallback);

}  // namespace cvsq

#endif
