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

#include "macroent/correlation.h"

#include <gtest/gtest.h>

#include "macroent/oracle.h"
#include "test_helpers.h"

using namespace macroent;
using macroent::testing::rel_err;

namespace {

std::vector<double> nonzero_spectrum(const HermitianOperator &k) {
    RealVector v = k.eig().values;
    std::vector<double> out;
    double scale = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    for (double x : v) {
        if (std::abs(x) > 1e-9 * std::max(1.0, scale)) {
            out.push_back(x);
        }
    }
    return out;
}

std::vector<double> dense_nonzero_spectrum(const ComplexMatrix &k) {
    RealVector v = oracle::jacobi_eigh(k).values;
    std::vector<double> out;
    double scale = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    for (double x : v) {
        if (std::abs(x) > 1e-9 * std::max(1.0, scale)) {
            out.push_back(x);
        }
    }
    return out;
}

}  // namespace

TEST(correlation, build_k_examples) {
    auto mz4 = AdditiveObservable::magnetization(4);
    EXPECT_TRUE(nonzero_spectrum(build_k(mz4, make_ex1(4))).empty());

    auto cat = nonzero_spectrum(build_k(mz4, make_cat(4)));
    ASSERT_EQ(cat.size(), 2u);
    EXPECT_NEAR(cat[0], -32, 1e-12);
    EXPECT_NEAR(cat[1], 32, 1e-12);

    auto psi1 = nonzero_spectrum(build_k(mz4, make_psi1(4)));
    ASSERT_EQ(psi1.size(), 2u);
    EXPECT_NEAR(psi1[0], -16 * std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(psi1[1], 16 * std::sqrt(3.0), 1e-12);
}

TEST(correlation, build_k_is_hermitian_and_traceless) {
    std::mt19937_64 rng(2);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto a = AdditiveObservable::random(4, rng);
        ComplexMatrix k = build_k(a, make_random_ensemble(4, 3, seed)).to_dense();
        EXPECT_LE((k - k.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(std::abs(k.trace()), 0, 1e-11);
    }
}

TEST(correlation, dense_state_above_cap_rejected) {
    EXPECT_THROW(MixedState::dense(13, ComplexMatrix::Identity(2, 2)), CapacityError);
    EXPECT_THROW(to_dense_matrix(MixedState(make_cat(13))), CapacityError);
    EXPECT_THROW(build_k(AdditiveObservable::magnetization(8), make_random_ensemble(8, 90, 1)), CapacityError);
}

TEST(correlation, c_expectation_examples) {
    auto mz4 = AdditiveObservable::magnetization(4);
    auto cat = make_cat(4);
    EXPECT_NEAR(c_expectation(mz4, ProjectorSpec::onto(cat.vector()), cat), 32, 1e-12);
    EXPECT_NEAR(c_expectation(mz4, ProjectorSpec::identity(16), cat), 0, 1e-12);

    auto ex2 = make_ex2_ensemble(6);
    EXPECT_NEAR(c_expectation(AdditiveObservable::magnetization(6), component_projector(ex2), ex2), 32, 1e-12);
}

TEST(correlation, c_expectation_rejects_non_projector) {
    ComplexMatrix b = ComplexMatrix::Zero(4, 2);
    b(0, 0) = 1;
    b(0, 1) = 1;
    EXPECT_THROW(ProjectorSpec{b}, std::invalid_argument);
}

TEST(correlation, c_expectation_matches_expansion_oracle) {
    std::mt19937_64 rng(41);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        int n = 1 + static_cast<int>(seed % 3);
        auto s = make_random_ensemble(n, 2, seed);
        auto a = AdditiveObservable::random(n, rng);
        ComplexVector v = macroent::testing::random_vector(static_cast<Eigen::Index>(s.dim()), rng);
        auto eta = ProjectorSpec::onto(v.normalized());
        EXPECT_NEAR(c_expectation(a, eta, s), oracle::expansion_reference(a, eta, s), 1e-8);
    }
}

TEST(correlation, eta_optimal_examples) {
    auto mz4 = AdditiveObservable::magnetization(4);
    auto cat = make_cat(4);
    auto r = eta_optimal(mz4, cat);
    EXPECT_NEAR(r.value, 32, 1e-12);
    ASSERT_EQ(r.eta_rank(), 1);
    EXPECT_NEAR(std::abs(r.optimal_eta.basis().col(0).dot(cat.vector())), 1, 1e-12);

    auto ex1 = eta_optimal(mz4, make_ex1(4));
    EXPECT_EQ(ex1.value, 0);
    EXPECT_EQ(ex1.eta_rank(), 0);

    EXPECT_NEAR(eta_optimal(mz4, make_psi1(4)).value, 16 * std::sqrt(3.0), 1e-12);
    EXPECT_EQ(eta_optimal(mz4, make_random_state(4)).value, 0);
}

TEST(correlation, eta_optimal_result_invariants) {
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto a = AdditiveObservable::random(4, rng);
        MixedState s = seed % 2 ? MixedState(make_random_pure(4, seed)) : make_random_ensemble(4, 3, seed);
        auto r = eta_optimal(a, s);
        double pos = 0, sum = 0, abs_sum = 0;
        for (double x : r.k_spectrum) {
            pos += x > 0 ? x : 0;
            sum += x;
            abs_sum += std::abs(x);
        }
        EXPECT_NEAR(r.value, pos, 1e-9 * std::max(1.0, r.value));
        EXPECT_LE(std::abs(sum), 1e-8 * abs_sum);
        EXPECT_NEAR(c_expectation(a, r.optimal_eta, s), r.value, 1e-9 * std::max(1.0, r.value));
        EXPECT_LE(r.value, 4 * a.norm_bound() * a.norm_bound() + 1e-9);
    }
}

TEST(correlation, eta_optimality_against_random_projectors) {
    std::mt19937_64 rng(99);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        auto a = AdditiveObservable::random(4, rng);
        MixedState s = seed % 2 ? MixedState(make_random_pure(4, seed)) : make_random_ensemble(4, 2, seed);
        ComplexMatrix k = build_k(a, s).to_dense();
        double value = eta_optimal(a, s).value;
        auto report = oracle::random_projector_check(k, 500, seed);
        EXPECT_LE(report.max_value, value + 1e-9 * (1 + std::abs(value)));
    }
}

TEST(correlation, pure_state_k_has_single_positive_eigenvalue) {
    std::mt19937_64 rng(50);
    for (int n : {3, 4, 5}) {
        for (std::uint64_t seed = 0; seed < 17; ++seed) {
            auto a = AdditiveObservable::random(n, rng);
            auto s = make_random_pure(n, 1000 * static_cast<std::uint64_t>(n) + seed);
            RealVector values = oracle::jacobi_eigh(build_k(a, s).to_dense()).values;
            double thr = k_zero_threshold(values, a.norm_bound());
            int positive = 0;
            for (double x : values) {
                positive += x > thr;
            }
            EXPECT_LE(positive, 1);
        }
    }
}

TEST(correlation, factored_spectrum_matches_dense) {
    std::mt19937_64 rng(7);
    for (int n : {3, 4, 5, 6}) {
        for (int rank : {1, 2, 4}) {
            auto s = make_random_ensemble(n, rank, static_cast<std::uint64_t>(10 * n + rank));
            auto a = AdditiveObservable::random(n, rng);
            HermitianOperator k = build_k(a, s);
            ASSERT_TRUE(k.is_factored());
            auto got = nonzero_spectrum(k);
            auto want = dense_nonzero_spectrum(oracle::dense_k(oracle::kron_observable(a), oracle::density_matrix(s)));
            ASSERT_EQ(got.size(), want.size()) << n << " " << rank;
            for (std::size_t i = 0; i < got.size(); ++i) {
                EXPECT_NEAR(got[i], want[i], 1e-8);
            }
        }
    }
}

TEST(correlation, c_expectation_linear_in_state) {
    std::mt19937_64 rng(3);
    auto a = AdditiveObservable::random(4, rng);
    auto s1 = make_random_ensemble(4, 2, 1);
    auto s2 = make_random_ensemble(4, 3, 2);
    ComplexVector v = macroent::testing::random_vector(16, rng);
    auto eta = ProjectorSpec::onto(v.normalized());
    for (double w : {0.1, 0.5, 0.8}) {
        double lhs = c_expectation(a, eta, mix(s1, s2, w));
        double rhs = w * c_expectation(a, eta, s1) + (1 - w) * c_expectation(a, eta, s2);
        EXPECT_NEAR(lhs, rhs, 1e-10);
    }
}

TEST(correlation, pure_max_eta_examples) {
    EXPECT_NEAR(pure_max_eta(AdditiveObservable::magnetization(6), make_cat(6)).value, 72, 1e-11);
    EXPECT_EQ(pure_max_eta(AdditiveObservable::magnetization(4), PureState::basis(4, 15)).value, 0);

    auto mz8 = AdditiveObservable::magnetization(8);
    auto psi2 = make_psi2(8);
    ComplexMatrix k = oracle::dense_k(oracle::kron_observable(mz8), oracle::density_matrix(psi2));
    double want = oracle::jacobi_eigh(k).values.maxCoeff();
    EXPECT_LE(rel_err(pure_max_eta(mz8, psi2).value, want), 1e-9);
}

TEST(correlation, pure_max_eta_agrees_with_eta_optimal) {
    std::mt19937_64 rng(17);
    for (int n : {3, 4, 5}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto a = AdditiveObservable::random(n, rng);
            auto s = make_random_pure(n, seed + 300);
            double want = eta_optimal(a, s).value;
            EXPECT_LE(rel_err(pure_max_eta(a, s).value, want), 1e-9);
        }
    }
}

TEST(correlation, cauchy_schwarz_examples) {
    auto mz4 = AdditiveObservable::magnetization(4);
    auto psi1 = cauchy_schwarz_bound(mz4, make_psi1(4));
    EXPECT_NEAR(psi1.lhs, 16 * std::sqrt(3.0), 1e-11);
    EXPECT_NEAR(psi1.rhs, 16 * std::sqrt(3.0), 1e-11);
    EXPECT_NEAR(psi1.variance_phi, 16, 1e-11);
    EXPECT_NEAR(psi1.variance_psi, 12, 1e-11);

    auto cat = cauchy_schwarz_bound(mz4, make_cat(4));
    EXPECT_NEAR(cat.lhs, 32, 1e-11);
    EXPECT_NEAR(cat.rhs, 32, 1e-11);

    auto basis = cauchy_schwarz_bound(mz4, PureState::basis(4, 5));
    EXPECT_NEAR(basis.lhs, 0, 1e-10);
    std::mt19937_64 rng(4);
    auto prod = cauchy_schwarz_bound(AdditiveObservable::random(4, rng), make_product(4, 2));
    EXPECT_LE(prod.lhs, prod.rhs + 1e-9);
}

TEST(correlation, cauchy_schwarz_holds_on_random_states) {
    std::mt19937_64 rng(61);
    for (int n : {3, 4, 5}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto b = cauchy_schwarz_bound(AdditiveObservable::random(n, rng), make_random_pure(n, seed));
            EXPECT_LE(b.lhs, b.rhs + 1e-9);
        }
    }
}

TEST(correlation, sufficient_condition_ex2) {
    auto r = check_sufficient_condition(make_ex2_ensemble(6), AdditiveObservable::magnetization(6), 1.5);
    EXPECT_TRUE(r.orthonormal);
    EXPECT_TRUE(r.offdiagonal_vanishes);
    EXPECT_EQ(r.macroscopic_count, 6);
    EXPECT_NEAR(r.macroscopic_weight, 1, 1e-12);
    EXPECT_TRUE(r.sufficient);
}

TEST(correlation, sufficient_condition_ex3) {
    // Component variances at N = 6 are 16 and 4, so both count as macroscopic only for
    // exponents up to log_6(4).
    auto mz = AdditiveObservable::magnetization(6);
    auto r = check_sufficient_condition(make_ex3_ensemble(6), mz, 0.5);
    EXPECT_TRUE(r.orthonormal);
    EXPECT_TRUE(r.offdiagonal_vanishes);
    EXPECT_NEAR(r.macroscopic_weight, 1, 1e-12);
    EXPECT_TRUE(r.sufficient);
    auto strict = check_sufficient_condition(make_ex3_ensemble(6), mz, 1.0);
    EXPECT_NEAR(strict.macroscopic_weight, 0.5, 1e-12);
}

TEST(correlation, sufficient_condition_reports_violations) {
    auto bad = MixedState::ensemble({0.5, 0.5}, {PureState::basis(2, 0), make_cat(2)});
    auto r = check_sufficient_condition(bad, AdditiveObservable::magnetization(2), 1.0);
    EXPECT_FALSE(r.orthonormal);
    ASSERT_TRUE(r.first_overlap_violation.has_value());
    EXPECT_EQ(*r.first_overlap_violation, std::make_pair(1, 2));
    EXPECT_FALSE(r.sufficient);
    EXPECT_THROW(check_sufficient_condition(make_random_state(2), AdditiveObservable::magnetization(2), 1.0),
                 std::invalid_argument);
}

TEST(correlation, mermin_examples) {
    auto cat = mermin_score(make_cat(5));
    EXPECT_NEAR(cat.raw, 16, 1e-12);
    EXPECT_NEAR(cat.lhv_bound, 4, 1e-15);
    EXPECT_NEAR(cat.ratio, 4, 1e-12);
    EXPECT_FALSE(cat.even_n);

    auto psi1 = mermin_score(make_psi1(4));
    EXPECT_NEAR(psi1.ratio, 4 * std::sqrt(3.0) / (2 * std::sqrt(2.0)), 1e-12);
    EXPECT_TRUE(psi1.even_n);

    EXPECT_EQ(mermin_score(make_ex1(4)).raw, 0);
}

TEST(correlation, mermin_two_branch_raw) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    for (int n = 1; n <= 10; ++n) {
        double theta = u(rng) * 3.14159;
        Complex a(std::cos(theta), 0), b = std::polar(std::sin(theta), u(rng) * 6.28);
        auto s = TwoBranchState::make(n, 0, a, (std::uint64_t{1} << n) - 1, b);
        double want = std::pow(2.0, n) * std::abs(a * b);
        EXPECT_NEAR(mermin_score(s.to_pure()).raw, want, 1e-12 * std::max(1.0, want));
        EXPECT_NEAR(mermin_score(s).raw, want, 1e-12 * std::max(1.0, want));
    }
}

TEST(correlation, chsh_single_spin_is_tsirelson) {
    EXPECT_NEAR(macro_chsh_lambda_max(2, canonical_chsh_choice(2)), 2 * std::sqrt(2.0), 1e-12);
}

TEST(correlation, chsh_commuting_choice_is_two) {
    for (int n : {2, 4, 6}) {
        EXPECT_NEAR(macro_chsh_lambda_max(n, commuting_chsh_choice(n)), 2, 1e-12) << n;
    }
}

TEST(correlation, chsh_n8_matches_dense_oracle_and_decreases) {
    // Independent construction: Kronecker observables, products, Jacobi eigenvalues.
    const int n = 8;
    auto choice = canonical_chsh_choice(n);
    ComplexMatrix a = oracle::kron_observable(choice.a), ap = oracle::kron_observable(choice.a_prime);
    ComplexMatrix b = oracle::kron_observable(choice.b), bp = oracle::kron_observable(choice.b_prime);
    ComplexMatrix c = (a * b + ap * b - a * bp + ap * bp) / 16.0;
    double want = oracle::jacobi_eigh(c).values.maxCoeff();
    double got = macro_chsh_lambda_max(n, choice);
    EXPECT_NEAR(got, want, 1e-9);
    EXPECT_NEAR(got, std::sqrt(11.0) / 2, 1e-9);
    EXPECT_LT(got, macro_chsh_lambda_max(4, canonical_chsh_choice(4)));
    EXPECT_LT(got, 2 * std::sqrt(2.0));
}

TEST(correlation, chsh_rejects_odd_n_and_wrong_support) {
    EXPECT_THROW(macro_chsh_lambda_max(3, canonical_chsh_choice(4)), std::invalid_argument);
    EXPECT_THROW(canonical_chsh_choice(5), std::invalid_argument);
    auto bad = canonical_chsh_choice(4);
    bad.a = AdditiveObservable::magnetization(4);
    EXPECT_THROW(macro_chsh_lambda_max(4, bad), std::invalid_argument);
}

TEST(correlation, local_decomposition_examples) {
    auto cat = make_cat(2);
    auto mz2 = AdditiveObservable::magnetization(2);
    auto eta = ProjectorSpec::onto(cat.vector());
    EXPECT_NEAR(local_decomposition_expectation(mz2, eta, cat), 8, 1e-12);
    EXPECT_NEAR(c_expectation(mz2, eta, cat), 8, 1e-12);

    auto s = make_random_pure(3, 11);
    std::mt19937_64 rng(11);
    ComplexVector v = macroent::testing::random_vector(8, rng);
    auto eta3 = ProjectorSpec::onto(v.normalized());
    auto mz3 = AdditiveObservable::magnetization(3);
    double want = oracle::expansion_reference(mz3, eta3, s);
    EXPECT_NEAR(c_expectation(mz3, eta3, s), want, 1e-8);
    EXPECT_NEAR(local_decomposition_expectation(mz3, eta3, s), want, 1e-8);

    auto down = ProjectorSpec::onto(PureState::basis(2, 0).vector());
    EXPECT_NEAR(local_decomposition_expectation(mz2, down, cat), 0, 1e-15);

    EXPECT_THROW(local_decomposition_expectation(AdditiveObservable::magnetization(5),
                                                 ProjectorSpec::identity(32), make_cat(5)),
                 CapacityError);
}

TEST(correlation, conversion_examples) {
    auto psi1 = single_site_conversion(TwoBranchState::psi1(4), 1);
    EXPECT_NEAR(psi1.success_prob, 0.375, 1e-15);
    EXPECT_NEAR(std::norm(psi1.post_state.amp1), std::norm(psi1.post_state.amp2), 1e-12);
    EXPECT_EQ(psi1.post_state.n_sites, 3);

    auto cat = single_site_conversion(TwoBranchState::cat(4), 2);
    EXPECT_NEAR(cat.success_prob, 0.5, 1e-15);
    EXPECT_NEAR(std::abs(cat.post_state.amp1), 1 / std::sqrt(2.0), 1e-15);

    double prev = 1;
    for (int n : {4, 8, 16, 32}) {
        auto r = single_site_conversion(TwoBranchState::psi1(n), n);
        EXPECT_NEAR(r.success_prob, 2.0 * (n - 1) / (n * n), 1e-15) << n;
        EXPECT_LT(r.success_prob, prev);
        prev = r.success_prob;
    }
    EXPECT_NEAR(single_site_conversion(TwoBranchState::psi1(16), 3).success_prob, 30.0 / 256, 1e-15);
}

TEST(correlation, conversion_rejects_non_two_branch) {
    EXPECT_THROW(TwoBranchState::from_pure(make_psi2(3)), std::invalid_argument);
    EXPECT_THROW(TwoBranchState::make(3, 0, Complex(1 / std::sqrt(2.0)), 3, Complex(1 / std::sqrt(2.0))),
                 std::invalid_argument);
    EXPECT_THROW(single_site_conversion(TwoBranchState::psi1(4), 5), std::invalid_argument);
    auto round = TwoBranchState::from_pure(make_psi1(5));
    EXPECT_NEAR(std::abs(round.amp2), std::sqrt(0.2), 1e-15);
}
