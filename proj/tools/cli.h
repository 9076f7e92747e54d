// Copyright 2026 The macroent Authors
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

#ifndef MACROENT_TOOLS_CLI_H
#define MACROENT_TOOLS_CLI_H

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "macroent/optimizer.h"

namespace macroent::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
    kOk = 0,
    kInvalidArgument = 1,
    kUnknownState = 2,
    kCapacityExceeded = 3,
    kUnwritableOutput = 4,
    kVerificationFailed = 5,
};

class CliError : public std::runtime_error {
   public:
    CliError(int code, const std::string &msg) : std::runtime_error(msg), code_(code) {}
    int code() const { return code_; }

   private:
    int code_;
};

struct RunConfig {
    std::string command;
    /// Family name, optionally with a parameter: ex2prime(0.3), product(5).
    std::string state = "cat";
    double w = 0.5;
    std::uint64_t state_seed = 1;
    std::string state_file;
    /// Single N, a range a:b:s, or a comma list. Empty selects the command default.
    std::string n;
    std::string mode = "optimized";
    OptimizerConfig optimizer;
    std::string output;
    /// csv or json.
    std::string format;
    int site = 1;
    double threshold_exponent = 1.0;
    std::string choice = "canonical";
};

/// Parses argv, merging a --config JSON file underneath explicit flags. Throws CliError.
RunConfig parse_args(int argc, const char *const *argv);

/// The config as embedded in every output document.
std::string config_json(const RunConfig &cfg);

/// Runs one command. Results go to cfg.output (or `out`), diagnostics to `err`.
int run(const RunConfig &cfg, std::ostream &out, std::ostream &err);

/// parse_args + run with error reporting.
int main_entry(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace macroent::cli

#endif
