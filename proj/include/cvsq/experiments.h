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

#ifndef CVSQ_EXPERIMENTS_H
#define CVSQ_EXPERIMENTS_H

#include <string>
#include <vector>

#include "cvsq/error.h"
#include "cvsq/serialize.h"

namespace cvsq {

enum class ExperimentKind {
    ProjectSq,
    ProjectCps,
    ProjectCluster,
    Fig5Sweep,
    Fig6LossSweep,
    LcuCps,
    VqedCps,
    KnitCzp,
    WignerDump,
};

const char *experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment(const std::string &name);
bool is_stochastic(ExperimentKind kind);

/// Environment variable naming the default output directory.
constexpr const char *kOutputDirEnv = "CVSQ_OUTPUT_DIR";

const char *library_version();

/// Reads and parses a config file; parse errors raise Validation.
Json load_config(const std::string &path);

/// Checks the config against the experiment contract and fills defaults. The returned object is
/// what gets echoed into the manifest and hashed.
Json validate_config(const Json &config);

struct RunOptions {
    /// Empty: config "output_dir", then $CVSQ_OUTPUT_DIR, then ".".
    std::string output_dir;
    bool single_thread = false;
};

struct RunOutcome {
    std::string csv_path;
    std::string manifest_path;
    std::string manifest_hash;
    Json manifest;
    size_t rows = 0;
};

RunOutcome run_experiment(const Json &config, const RunOptions &options = {});

/// Only WignerDump configs; writes the x, p, W triples.
RunOutcome run_wigner(const Json &config, const RunOptions &options = {});

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string &data);

/// 0 ok, 2 validation, 3 numeric or diagnostic failure.
int exit_code_for(ErrorKind kind);

}  // namespace cvsq

#endif
