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

#ifndef MACROENT_ORACLE_H
#define MACROENT_ORACLE_H

#include <cstdint>
#include <string>
#include <vector>

#include "macroent/correlation.h"
#include "macroent/linalg.h"
#include "macroent/observables.h"
#include "macroent/states.h"

namespace macroent::oracle {

// Brute-force reference implementations. Everything here is built from explicit matrices and
// elementary arithmetic so that it can be used to cross-check the production paths.

struct OracleReport {
    std::string name;
    double max_deviation = 0;
    double tolerance = 0;
    int trials = 0;
    bool passed = false;
    /// Largest sampled value, when the check samples one.
    double max_value = 0;
};

OracleReport make_report(std::string name, double max_deviation, double tolerance, int trials, double max_value = 0);

/// Cyclic complex Jacobi rotations. Values ascending, vectors as columns.
EigenDecomposition jacobi_eigh(const ComplexMatrix &m);

/// Kronecker-product construction of a dense additive observable.
ComplexMatrix kron_observable(const AdditiveObservable &a);

/// Sum of rank-1 terms for ensembles, the stored matrix for dense states.
ComplexMatrix density_matrix(const MixedState &s);

/// [A,[A,rho]] by plain matrix products.
ComplexMatrix dense_k(const ComplexMatrix &a, const ComplexMatrix &rho);

/// Sum of eigenvalues above 1e-10 times the largest magnitude.
double positive_eigenvalue_sum(const ComplexMatrix &k);

/// Samples random projectors of ranks 1..dim/2 and checks Tr(k eta) never exceeds the positive
/// eigenvalue sum of k.
OracleReport random_projector_check(const ComplexMatrix &k, int trials, std::uint64_t seed, double tolerance = 1e-9);

inline constexpr int kReferenceMaxSites = 3;

/// <C> as the explicit double sum over A-eigenbasis pairs. n_sites <= 3.
double expansion_reference(const AdditiveObservable &a, const ProjectorSpec &eta, const MixedState &s);

struct TwoBranchValues {
    double var = 0;
    double lambda_max = 0;
};

/// Closed form for amp1|a1> + amp2|a2> where |a_i> are A-eigenstates with eigenvalues a_i.
TwoBranchValues two_branch_analytic(double amp1, double amp2, double a1, double a2);

inline constexpr int kGridMaxPerAxis = 9;

struct GridSearchResult {
    double best_value = 0;
    RealVector best_stack;
    std::size_t evaluations = 0;
};

/// Exhaustive scan over unit per-site directions on a (theta, phi) grid. n_sites <= 3.
GridSearchResult grid_search_a(const MixedState &s, int grid_per_axis);

/// The checks run by the `verify` command.
std::vector<OracleReport> run_oracle_suite();

}  // namespace macroent::oracle

#endif
