// SPDX-License-Identifier: Apache-2.0
//
// fdacov: near-field FDA covert-region simulation and optimization
// Copyright (C) 2026 The fdacov authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#include <fdacov/fdacov.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    using namespace fdacov;

    CLI::App app{"Near-field FDA covert-region simulator"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string replay_path;
    std::vector<std::string> overrides;
    std::string out_dir = ".";
    std::string plan_path;
    unsigned threads = 0;
    bool quiet = false;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"heatmap", "normalized beampattern per scheme (field_<scheme>.csv)"},
        {"region", "non-covert masks and area summary (mask_<scheme>.csv, region_summary.csv)"},
        {"sweep-n", "non-covert area fraction against antenna count (sweep_n.csv)"},
        {"sweep-fdelta", "non-covert area fraction against frequency increment (sweep_fdelta.csv)"},
        {"rate", "Monte-Carlo covert rate against N and F (rate.csv)"},
        {"optimize", "optimized frequency offsets (optimize.json)"},
        {"selftest", "quick invariant checks (selftest.txt)"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config_path, "INI configuration file");
        sub->add_option("--replay", replay_path, "rebuild the configuration embedded in an emitted file");
        sub->add_option("-s,--set", overrides, "override, section.key=value (repeatable)");
        sub->add_option("-o,--out", out_dir, "output directory");
        sub->add_option("-j,--threads", threads, "worker threads (default: FDACOV_THREADS or all cores)");
        sub->add_option("--plan", plan_path, "optimize.json whose offsets replace the optimized_fda solve");
        sub->add_flag("-q,--quiet", quiet, "suppress progress messages");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_code::ok : exit_code::config_error;
    }

    const auto sub = parse_subcommand(app.get_subcommands().front()->get_name());
    ExperimentConfig cfg;
    KeyOrigins origins;
    try {
        if (!config_path.empty() && !replay_path.empty())
            throw ConfigError("--config and --replay are mutually exclusive");
        if (!config_path.empty())
            cfg = load_config_file(config_path, &origins);
        if (!replay_path.empty()) {
            std::ifstream in(replay_path);
            if (!in)
                throw ConfigError(replay_path + ": cannot open");
            cfg = config_from_metadata(in, replay_path);
        }
        for (const auto& o : overrides)
            apply_override(cfg, o, &origins);
        validate_config(cfg, origins);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_code::config_error;
    }

    RunOptions opts;
    opts.out_dir = out_dir;
    opts.threads = threads;
    if (!plan_path.empty())
        opts.plan_file = plan_path;
    opts.log = quiet ? nullptr : &std::cerr;

    try {
        return run(*sub, cfg, opts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_code::config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code::runtime_error;
    }
}
