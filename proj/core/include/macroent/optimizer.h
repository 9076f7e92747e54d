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

#ifndef MACROENT_OPTIMIZER_H
#define MACROENT_OPTIMIZER_H

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "macroent/linalg.h"
#include "macroent/observables.h"
#include "macroent/states.h"

namespace macroent {

struct OptimizerConfig {
    int restarts = 32;
    int max_iters = 500;
    double step_init = 0.5;
    double step_shrink = 0.5;
    double grad_tol = 1e-7;
    std::uint64_t seed = 0;
    /// Worker threads for independent restarts.
    int jobs = 1;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

struct Optimum {
    AdditiveObservable observable;
    double value = 0;
    int iterations = 0;
    int restart_index = 0;
    bool converged = false;
    /// Every site's coefficient vector sits on the unit sphere.
    bool on_boundary = false;
};

/// Rescales each site's 3-vector to norm min(|c_l|, 1). Idempotent.
RealVector project_feasible(const RealVector &stack);

/// Sum of positive eigenvalues of K(A(c)) with its (sub)gradient in c.
///
/// Low-rank dense states are converted to ensembles at construction; the objective is
/// unchanged by that conversion.
class QObjective {
   public:
    explicit QObjective(const MixedState &s);

    struct Evaluation {
        double value = 0;
        RealVector gradient;
        /// Smallest |lambda| over the computed spectrum of K; small values flag sign crossings.
        double spectral_gap = 0;
    };

    /// Accepts any stack, feasible or not.
    Evaluation evaluate(const RealVector &stack, bool with_gradient = true) const;
    int n_sites() const { return state_.n_sites(); }
    const MixedState &state() const { return state_; }

   private:
    MixedState state_;
};

/// max over |c_l| <= 1 of Var(A(c)) = c^T V c.
Optimum maximize_variance(const PureState &s, const OptimizerConfig &cfg);

/// max over A of max over eta of <C>: projected gradient ascent with restarts.
/// Capacity: dense N <= 12; ensembles with 3 x rank <= 256 and N <= 20.
Optimum maximize_c(const MixedState &s, const OptimizerConfig &cfg);

/// Single ascent from a given observable (restart_index 0).
Optimum maximize_c_from(const MixedState &s, const AdditiveObservable &start, const OptimizerConfig &cfg);

/// Projected ascent of an arbitrary smooth objective over the per-site unit balls.
/// `f` returns the value and writes the gradient when the pointer is non-null.
struct AscentResult {
    RealVector stack;
    double value = 0;
    int iterations = 0;
    bool converged = false;
    /// Objective at the start and after every accepted step.
    std::vector<double> accepted_values;
};
using StackObjective = std::function<double(const RealVector &, RealVector *)>;
AscentResult projected_ascent(const StackObjective &f, const RealVector &start, const OptimizerConfig &cfg);

}  // namespace macroent

#endif
