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

#ifndef MACROENT_CORRELATION_H
#define MACROENT_CORRELATION_H

#include <cstdint>
#include <optional>
#include <vector>

#include "macroent/linalg.h"
#include "macroent/observables.h"
#include "macroent/states.h"

namespace macroent {

/// eta = sum_j |phi_j><phi_j| over orthonormal columns phi_j; rank M = column count.
class ProjectorSpec {
   public:
    /// Validates orthonormality within 1e-10.
    explicit ProjectorSpec(ComplexMatrix basis);
    static ProjectorSpec from_vectors(const std::vector<ComplexVector> &vs);
    /// Rank-1 projector onto a (normalized) vector.
    static ProjectorSpec onto(const ComplexVector &v);
    static ProjectorSpec identity(std::size_t dim);

    const ComplexMatrix &basis() const { return basis_; }
    int rank() const { return static_cast<int>(basis_.cols()); }
    std::size_t dim() const { return static_cast<std::size_t>(basis_.rows()); }

   private:
    ComplexMatrix basis_;
};

struct CorrelationResult {
    /// <C> = Tr(K eta).
    double value = 0;
    ProjectorSpec optimal_eta{ComplexMatrix(0, 0)};
    /// Nonzero eigenvalues of K, ascending.
    std::vector<double> k_spectrum;

    int eta_rank() const { return optimal_eta.rank(); }
};

/// K = [A, [A, rho]], so that Tr(rho [A,[A,eta]]) = Tr(K eta).
///
/// Ensembles of rank r come back factored over span{psi, A psi, A^2 psi} (dimension <= 3r),
/// which contains the range of K. Dense states come back dense (N <= 12). The maximally mixed
/// state gives the zero operator.
HermitianOperator build_k(const AdditiveObservable &a, const MixedState &s);

/// Tr(K eta) evaluated without materializing K.
double c_expectation(const AdditiveObservable &a, const ProjectorSpec &eta, const MixedState &s);

/// Zero threshold used for sign decisions on K's spectrum.
/// `norm_bound` is sum_l |c_l| of the observable that produced K.
double k_zero_threshold(const RealVector &eigenvalues, double norm_bound);

/// max over projectors eta of Tr(K eta): the projector onto K's positive eigenspace.
CorrelationResult eta_optimal(const AdditiveObservable &a, const MixedState &s);
CorrelationResult eta_optimal(const AdditiveObservable &a, const HermitianOperator &k);

/// Projector onto the orthonormalized components of an ensemble.
ProjectorSpec component_projector(const MixedState &ensemble);

struct PureMaxEta {
    double value = 0;
    /// Maximizing |phi_A>, normalized.
    ComplexVector eigvec;
};

/// Largest eigenvalue of [A,[A,|psi><psi|]] from a three-step Lanczos recurrence on A
/// started at psi. The operator lives in span{psi, A psi, A^2 psi}.
PureMaxEta pure_max_eta(const AdditiveObservable &a, const PureState &s);

struct CauchySchwarzBound {
    double lhs = 0;
    double rhs = 0;
    double variance_phi = 0;
    double variance_psi = 0;
};

/// lhs = pure_max_eta value; rhs = 2 sqrt(Var_phi(A) Var_psi(A)) with phi the maximizer.
CauchySchwarzBound cauchy_schwarz_bound(const AdditiveObservable &a, const PureState &s);

/// Per-condition report for the orthogonal-ensemble sufficient condition for q = 2.
struct SufficientConditionReport {
    double max_overlap_error = 0;
    bool orthonormal = false;
    /// max over lambda != lambda' of |<psi_l|A|psi_l'>|.
    double max_offdiagonal = 0;
    bool offdiagonal_vanishes = false;
    std::vector<double> variances;
    /// Var_lambda(A) >= N^exponent.
    std::vector<bool> macroscopic;
    double variance_threshold = 0;
    int macroscopic_count = 0;
    /// Sum of the weights of macroscopic components.
    double macroscopic_weight = 0;
    /// Both structural conditions hold and the macroscopic weight is positive.
    bool sufficient = false;
    /// First offending pair (1-based component indices), if any.
    std::optional<std::pair<int, int>> first_overlap_violation;
    std::optional<std::pair<int, int>> first_offdiagonal_violation;
};

SufficientConditionReport check_sufficient_condition(
    const MixedState &ensemble, const AdditiveObservable &a, double threshold_exponent);

struct MerminReport {
    /// |Tr(rho prod_l (sigma_x(l) + i sigma_y(l)))|.
    double raw = 0;
    /// 2^{(N-1)/2}, used for every N.
    double lhv_bound = 0;
    double ratio = 0;
    /// The bound above is the odd-N value; even N is flagged.
    bool even_n = false;
};

MerminReport mermin_score(const MixedState &s);

/// Four additive observables for the macroscopic CHSH correlation.
struct ChshChoice {
    AdditiveObservable a, a_prime, b, b_prime;
};

/// A = sum x, A' = sum z on the first half; B, B' = sum (x +- z)/sqrt2 on the second half.
ChshChoice canonical_chsh_choice(int n);
/// All four equal to the z magnetization of their half.
ChshChoice commuting_chsh_choice(int n);

/// Largest eigenvalue of (AB + A'B - AB' + A'B')/(N/2)^2 after rescaling each observable
/// so that sum_l |c_l| = N/2. A, A' must vanish on the second half and B, B' on the first.
double macro_chsh_lambda_max(int n, const ChshChoice &choice);

/// Largest local-decomposition size (terms grow as 4^N 2^N).
inline constexpr int kLocalDecompositionMaxSites = 4;

/// <C> assembled from the product-of-local-Hermitian-operators expansion of [A,[A,eta]] over
/// the local eigenbases of each a(l). Exact; N <= 4.
double local_decomposition_expectation(const AdditiveObservable &a, const ProjectorSpec &eta, const MixedState &s);

/// amp1 |index1> + amp2 |index2> with the two product branches differing at every site.
/// Stored without the 2^N vector so large N stays cheap.
struct TwoBranchState {
    int n_sites = 0;
    std::uint64_t index1 = 0;
    std::uint64_t index2 = 0;
    Complex amp1;
    Complex amp2;

    /// Validates the branch structure and normalization (1e-12).
    static TwoBranchState make(int n_sites, std::uint64_t index1, Complex amp1, std::uint64_t index2, Complex amp2);
    /// Extracts the two branches from a full vector; rejects anything else.
    static TwoBranchState from_pure(const PureState &s);
    static TwoBranchState psi1(int n);
    static TwoBranchState cat(int n);
    PureState to_pure() const;
};

MerminReport mermin_score(const TwoBranchState &s);

struct ConversionResult {
    int site = 0;
    /// Probability of the outcome that leaves equal branch weights.
    double success_prob = 0;
    /// Measured local state alpha|b1> + beta|b2>, where b1 and b2 are the branch values at the site.
    double alpha = 0;
    double beta = 0;
    /// Post-measurement state on the remaining N - 1 sites.
    TwoBranchState post_state;
};

/// Optimal single-site projective measurement converting a two-branch state into an
/// equal-weight superposition of the surviving branches.
ConversionResult single_site_conversion(const TwoBranchState &s, int site);

}  // namespace macroent

#endif
