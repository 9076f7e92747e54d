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

#include "macroent/oracle.h"

#include <gtest/gtest.h>

#include "macroent/optimizer.h"
#include "test_helpers.h"

using namespace macroent;
using namespace macroent::oracle;

TEST(oracle, jacobi_diagonalizes) {
    ComplexMatrix m = macroent::testing::random_hermitian(12, 3);
    auto e = jacobi_eigh(m);
    ComplexMatrix rebuilt = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    EXPECT_LE((m - rebuilt).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-12);
    for (int i = 1; i < 12; ++i) {
        EXPECT_LE(e.values[i - 1], e.values[i]);
    }
}

TEST(oracle, kron_observable_single_site_paulis) {
    auto x = kron_observable(AdditiveObservable(1, {{1, 0, 0}}));
    auto y = kron_observable(AdditiveObservable(1, {{0, 1, 0}}));
    auto z = kron_observable(AdditiveObservable(1, {{0, 0, 1}}));
    // sigma_z |up> = +|up>, up is index 1.
    EXPECT_EQ(z(1, 1), Complex(1, 0));
    EXPECT_EQ(z(0, 0), Complex(-1, 0));
    // sigma_y |up> = i |down>.
    EXPECT_EQ(y(0, 1), Complex(0, 1));
    EXPECT_LE((x * y - Complex(0, 1) * z).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(oracle, random_projector_diagonal) {
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = 3;
    d(1, 1) = -1;
    d(2, 2) = -2;
    auto r = random_projector_check(d, 200, 1, 1e-12);
    EXPECT_TRUE(r.passed);
    EXPECT_LE(r.max_value, 3 + 1e-12);
    EXPECT_EQ(r.trials, 200);
}

TEST(oracle, random_projector_cat3) {
    auto k = dense_k(kron_observable(AdditiveObservable::magnetization(3)), density_matrix(make_cat(3)));
    EXPECT_NEAR(positive_eigenvalue_sum(k), 18, 1e-12);
    auto r = random_projector_check(k, 300, 5);
    EXPECT_TRUE(r.passed);
    EXPECT_LE(r.max_value, 18);
}

TEST(oracle, random_projector_zero) {
    auto r = random_projector_check(ComplexMatrix::Zero(8, 8), 50, 2);
    EXPECT_EQ(r.max_value, 0);
    EXPECT_EQ(r.max_deviation, 0);
    EXPECT_THROW(random_projector_check(ComplexMatrix::Zero(512, 512), 1, 1), CapacityError);
}

TEST(oracle, expansion_examples) {
    auto cat = make_cat(2);
    auto mz = AdditiveObservable::magnetization(2);
    EXPECT_NEAR(expansion_reference(mz, ProjectorSpec::onto(cat.vector()), cat), 8, 1e-12);
    std::mt19937_64 rng(23);
    for (int n = 1; n <= 3; ++n) {
        auto a = AdditiveObservable::random(n, rng);
        auto s = make_random_ensemble(n, 2, 23);
        EXPECT_NEAR(expansion_reference(a, ProjectorSpec::identity(s.dim()), s), 0, 1e-12);
    }
    auto a = AdditiveObservable::random(3, rng);
    auto s = make_random_pure(3, 23);
    ComplexVector v = macroent::testing::random_vector(8, rng);
    auto eta = ProjectorSpec::onto(v.normalized());
    EXPECT_NEAR(expansion_reference(a, eta, s), c_expectation(a, eta, s), 1e-8);
    EXPECT_THROW(expansion_reference(AdditiveObservable::magnetization(4), ProjectorSpec::identity(16), make_cat(4)),
                 CapacityError);
}

TEST(oracle, two_branch_examples) {
    for (int n : {2, 5, 9}) {
        auto cat = two_branch_analytic(std::sqrt(0.5), std::sqrt(0.5), -n, n);
        EXPECT_NEAR(cat.var, n * n, 1e-12);
        EXPECT_NEAR(cat.lambda_max, 2.0 * n * n, 1e-12);
        auto psi1 = two_branch_analytic(std::sqrt(1 - 1.0 / n), std::sqrt(1.0 / n), -n, n);
        EXPECT_NEAR(psi1.var, 4.0 * n - 4, 1e-11);
        EXPECT_NEAR(psi1.lambda_max, 4.0 * n * std::sqrt(n - 1.0), 1e-11);
    }
    auto trivial = two_branch_analytic(1, 0, -3, 3);
    EXPECT_EQ(trivial.var, 0);
    EXPECT_EQ(trivial.lambda_max, 0);
    EXPECT_THROW(two_branch_analytic(1, 1, -1, 1), std::invalid_argument);
}

TEST(oracle, two_branch_matches_dense_k) {
    for (int n = 2; n <= 8; ++n) {
        auto mz = AdditiveObservable::magnetization(n);
        ComplexMatrix a = kron_observable(mz);
        for (const auto &[s, amp1, amp2] :
             {std::tuple{make_cat(n), std::sqrt(0.5), std::sqrt(0.5)},
              std::tuple{make_psi1(n), std::sqrt(1 - 1.0 / n), std::sqrt(1.0 / n)}}) {
            double want = two_branch_analytic(amp1, amp2, -n, n).lambda_max;
            double got = jacobi_eigh(dense_k(a, density_matrix(s))).values.maxCoeff();
            EXPECT_LE(macroent::testing::rel_err(got, want), 1e-9) << n;
        }
    }
}

TEST(oracle, grid_search_examples) {
    auto cat = grid_search_a(make_cat(2), 9);
    EXPECT_GE(cat.best_value, 8 * (1 - 1e-9));
    EXPECT_EQ(cat.best_stack.size(), 6);

    auto ex1 = grid_search_a(make_ex1(2), 9);
    EXPECT_LE(ex1.best_value, 4 + 1e-9);
    // Commuting choices (all-z) give exactly zero.
    ComplexMatrix k = dense_k(kron_observable(AdditiveObservable::magnetization(2)), density_matrix(make_ex1(2)));
    EXPECT_EQ(k.cwiseAbs().maxCoeff(), 0);

    auto mixed = make_random_ensemble(2, 2, 3);
    OptimizerConfig cfg;
    cfg.restarts = 8;
    cfg.seed = 3;
    EXPECT_GE(maximize_c(mixed, cfg).value, grid_search_a(mixed, 7).best_value - 1e-6);

    EXPECT_THROW(grid_search_a(make_cat(4), 3), CapacityError);
    EXPECT_THROW(grid_search_a(make_cat(2), 10), std::invalid_argument);
}

TEST(oracle, suite_passes) {
    auto reports = run_oracle_suite();
    EXPECT_GE(reports.size(), 8u);
    for (const auto &r : reports) {
        EXPECT_TRUE(r.passed) << r.name << " deviation " << r.max_deviation;
        EXPECT_EQ(r.passed, r.max_deviation <= r.tolerance);
    }
}
