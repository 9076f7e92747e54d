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

#ifndef MACROENT_STATES_H
#define MACROENT_STATES_H

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "macroent/linalg.h"

namespace macroent {

/// Largest N for which full 2^N amplitude vectors are materialized.
inline constexpr int kMaxPureSites = 20;

/// Normalized amplitude vector over N spin-1/2 sites.
class PureState {
   public:
    /// Validates length 2^n and unit norm (within 1e-12).
    PureState(int n_sites, ComplexVector amplitudes);
    /// Rescales to unit norm before validating; rejects the zero vector.
    static PureState normalized(int n_sites, ComplexVector amplitudes);
    /// Computational basis state; bit l-1 of `index` is site l (1 = up).
    static PureState basis(int n_sites, std::uint64_t index);

    int n_sites() const { return n_sites_; }
    std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
    const ComplexVector &vector() const { return amplitudes_; }
    Complex operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

   private:
    int n_sites_;
    ComplexVector amplitudes_;
};

/// Weighted mixture of pure states; weights in [0, 1] summing to 1.
struct Ensemble {
    std::vector<double> weights;
    std::vector<PureState> states;
};

/// Dense density matrix. The maximally mixed state is flagged and never allocated.
struct Dense {
    ComplexMatrix rho;
    bool uniform = false;
};

class MixedState {
   public:
    /// Rank-1 ensemble. Implicit so pure states can be passed wherever a state is accepted.
    MixedState(PureState pure);  // NOLINT(google-explicit-constructor)

    static MixedState ensemble(std::vector<double> weights, std::vector<PureState> states);
    /// Validates Hermiticity, unit trace (1e-10) and positivity (smallest eigenvalue >= -1e-10).
    static MixedState dense(int n_sites, ComplexMatrix rho);
    /// Identity / 2^N, stored without allocating the matrix.
    static MixedState maximally_mixed(int n_sites);

    int n_sites() const { return n_sites_; }
    std::size_t dim() const { return std::size_t{1} << n_sites_; }
    bool is_ensemble() const { return std::holds_alternative<Ensemble>(form_); }
    bool is_dense() const { return std::holds_alternative<Dense>(form_); }
    bool is_maximally_mixed() const { return is_dense() && std::get<Dense>(form_).uniform; }
    const Ensemble &as_ensemble() const;
    const Dense &as_dense() const;
    /// The single component of a weight-1 rank-1 ensemble, if that is what this is.
    std::optional<PureState> as_pure() const;

   private:
    MixedState(int n_sites, std::variant<Ensemble, Dense> form);

    int n_sites_;
    std::variant<Ensemble, Dense> form_;
};

// Named states.
PureState make_cat(int n);
PureState make_psi1(int n);
PureState make_psi2(int n);
/// Uniform mixture of (|down..up_l..down> + |up..down_l..up>)/sqrt2 for l = 1..n.
MixedState make_ex2_ensemble(int n);
/// Uniform mixture over lambda = 1..n/3 of (|lambda> + |lambda-bar>)/sqrt2 with |lambda> the
/// first lambda spins up.
MixedState make_ex3_ensemble(int n);
/// As make_ex3_ensemble but each |lambda> is a seeded random placement of lambda up spins.
MixedState make_ex3_random_ensemble(int n, std::uint64_t seed);
/// (|down..down><..| + |up..up><..|) / 2.
MixedState make_ex1(int n);
MixedState make_random_state(int n);
/// Tensor product of cos(t_l)|down> + e^{i p_l} sin(t_l)|up> with seeded angles.
PureState make_product(int n, std::uint64_t seed);
/// Haar-like random pure state (normalized complex Gaussian vector).
PureState make_random_pure(int n, std::uint64_t seed);
/// Ensemble of `rank` seeded random pure states with random weights.
MixedState make_random_ensemble(int n, int rank, std::uint64_t seed);

/// w a + (1 - w) b. Ensemble inputs stay ensembles; anything dense is materialized.
MixedState mix(const MixedState &a, const MixedState &b, double w);

/// Dense density matrix (N <= 12).
ComplexMatrix to_dense_matrix(const MixedState &s);
/// Spectral decomposition of a dense state into an ensemble, dropping eigenvalues below
/// 1e-12 of the largest.
MixedState to_ensemble(const MixedState &s);

/// Plain-text amplitudes: one "re im" pair per line, 2^N lines. Blank lines and '#' comments
/// are ignored. The vector is normalized on load.
PureState parse_amplitudes(const std::string &text);
std::string format_amplitudes(const PureState &s);

}  // namespace macroent

#endif
