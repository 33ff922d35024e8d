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

#include <iostream>

#include "CLI11.hpp"

#include "cvsq/experiments.h"

namespace {

int guarded(const std::function<void()> &fn) {
    try {
        fn();
        return 0;
    } catch (const cvsq::Error &e) {
        std::cerr << "error [" << cvsq::error_kind_name(e.kind()) << "] " << e.what() << "\n";
        return cvsq::exit_code_for(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "error " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"cvsq: truncated-Fock simulations of unitary-transformed projective squeezing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", cvsq::library_version());

    std::string config_path;
    std::string output_dir;
    bool single_thread = false;

    auto *run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("-o,--output-dir", output_dir, std::string("Output directory (default: config, then $") +
                                                       cvsq::kOutputDirEnv + ", then .)");
    run->add_flag("--single-thread", single_thread, "Use one worker for bit-exact reproduction");

    auto *validate = app.add_subcommand("validate", "Check a config file and print the normalized form");
    validate->add_option("config", config_path, "Experiment config (JSON)")->required();

    auto *wigner = app.add_subcommand("wigner", "Write the Wigner grid of a WignerDump config");
    wigner->add_option("config", config_path, "WignerDump config (JSON)")->required();
    wigner->add_option("-o,--output-dir", output_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    cvsq::RunOptions options;
    options.output_dir = output_dir;
    options.single_thread = single_thread;

    if (*validate) {
        return guarded([&] {
            cvsq::Json normalized = cvsq::validate_config(cvsq::load_config(config_path));
            std::cout << normalized.dump(2) << "\n";
        });
    }
    return guarded([&] {
        cvsq::Json config = cvsq::load_config(config_path);
        cvsq::RunOutcome out =
            *wigner ? cvsq::run_wigner(config, options) : cvsq::run_experiment(config, options);
        std::cout << out.csv_path << "\n" << out.manifest_path << "\n";
    });
}
