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

#ifndef MACROENT_SCALING_H
#define MACROENT_SCALING_H

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "macroent/optimizer.h"
#include "macroent/states.h"

namespace macroent {

/// A named, parameterized state family: cat, psi1, psi2, ex1, ex2, ex3, ex3random,
/// ex2prime, ex3prime, product, random.
struct StateFamily {
    std::string name;
    /// Mixing weight for ex2prime / ex3prime.
    double w = 0.5;
    /// Seed for product / ex3random.
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument for unknown names or bad parameters.
    MixedState make(int n) const;
    /// True when the family produces pure states.
    bool is_pure() const;
    /// Index value attributed to the family in the literature (q for mixed, q = p for pure).
    std::optional<double> expected_index() const;
};

/// Resolves a name (optionally written as name(param)) into a family.
StateFamily parse_family(const std::string &spec, double default_w = 0.5, std::uint64_t default_seed = 1);
const std::vector<std::string> &family_names();

enum class SweepMode {
    /// Full search over A with the spectral eta (q objective).
    Optimized,
    /// A = M_z with the family's canonical eta.
    Canonical,
    /// Maximum variance over A (p objective, pure families only).
    Variance,
};

SweepMode parse_sweep_mode(const std::string &name);
std::string to_string(SweepMode mode);

/// A = M_z with the ensemble-component projector for ensembles, the spectral projector otherwise.
double canonical_value(const MixedState &s);

struct SweepPoint {
    int n = 0;
    double raw_value = 0;
    /// max(raw_value, n).
    double effective_value = 0;
    std::optional<Optimum> optimum;
    double wall_time = 0;
    /// Non-empty when this point failed (for example on a capacity cap).
    std::string error;

    bool ok() const { return error.empty(); }
};

/// One point per N; failures are recorded per point and the sweep continues.
std::vector<SweepPoint> sweep(
    const StateFamily &family, const std::vector<int> &n_values, const OptimizerConfig &cfg, SweepMode mode);

struct IndexFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    /// Slope between the last two points.
    double terminal_secant = 0;
    std::vector<SweepPoint> points;
};

/// Least squares of log(effective_value) on log(n) over successful points (at least 3).
IndexFit fit_index(const std::vector<SweepPoint> &points);
/// Slopes between consecutive successful points.
std::vector<double> secant_slopes(const std::vector<SweepPoint> &points);
/// Fit slope over the first k+1 successful points; NaN for the first.
std::vector<double> running_slopes(const std::vector<SweepPoint> &points);

/// Parses "a:b:s" (inclusive) or a comma list into ascending N values.
std::vector<int> parse_n_range(const std::string &text);

/// Columns n,raw_value,effective_value,slope_running,seed,restarts,wall_time_s; numbers at 17
/// significant digits.
void write_sweep_csv(
    std::ostream &out, const std::vector<SweepPoint> &points, std::uint64_t seed, int restarts, bool include_wall_time = true);

/// Formats with 17 significant digits ("nan", "inf" for non-finite values).
std::string format_number(double x);

}  // namespace macroent

#endif
