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

#ifndef MACROENT_OBSERVABLES_H
#define MACROENT_OBSERVABLES_H

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "macroent/linalg.h"
#include "macroent/pauli.h"
#include "macroent/states.h"

namespace macroent {

/// A = sum_l a(l) with a(l) = c_l . sigma(l) and per-site |c_l| <= 1.
///
/// Identity components are left out: they cancel in every variance and commutator.
class AdditiveObservable {
   public:
    AdditiveObservable(int n_sites, std::vector<SiteCoeffs> locals);
    /// Flat coefficient stack (x1, y1, z1, x2, ...), length 3N.
    static AdditiveObservable from_stack(int n_sites, const RealVector &stack);
    static AdditiveObservable magnetization(int n_sites, Axis axis = Axis::Z);
    /// sum_l (-1)^l sigma_axis(l), sites counted from 1.
    static AdditiveObservable staggered(int n_sites, Axis axis = Axis::Z);
    /// Independent uniformly random directions with norms uniform in [0, 1].
    static AdditiveObservable random(int n_sites, std::mt19937_64 &rng);

    int n_sites() const { return n_sites_; }
    const std::vector<SiteCoeffs> &locals() const { return locals_; }
    RealVector stack() const;
    /// sum_l |c_l|, an upper bound on the operator norm.
    double norm_bound() const;
    /// True when every site has |c_l| = 1 within 1e-9.
    bool on_boundary() const;

   private:
    int n_sites_;
    std::vector<SiteCoeffs> locals_;
};

/// A|v>, site by site.
ComplexVector apply(const AdditiveObservable &a, const ComplexVector &v);
/// A applied to every column of m.
ComplexMatrix apply_columns(const AdditiveObservable &a, const ComplexMatrix &m);
/// Dense 2^N x 2^N matrix of A (N <= 12).
ComplexMatrix dense_matrix(const AdditiveObservable &a);

/// <sigma_alpha(l)> for every site and axis, packed at 3(l-1) + alpha.
RealVector site_expectations(const MixedState &s);

double expectation(const AdditiveObservable &a, const MixedState &s);
/// <(A - <A>)^2> for a pure state.
double variance(const AdditiveObservable &a, const PureState &s);

/// V_{(l,a),(l',b)} = Re <d sigma_a(l) d sigma_b(l')> with d X = X - <X>.
/// For every coefficient stack c, variance(A(c), s) = c^T V c.
RealMatrix covariance_matrix(const PureState &s);

/// |Tr(s1 B) - Tr(s2 B)|.
double additive_deviation(const MixedState &s1, const MixedState &s2, const AdditiveObservable &b);
/// Max of additive_deviation over `trials` seeded random B.
double additive_indistinguishability(const MixedState &s1, const MixedState &s2, int trials, std::uint64_t seed);

/// One line per site with three coefficients.
std::string to_text(const AdditiveObservable &a);
AdditiveObservable observable_from_text(const std::string &text);

}  // namespace macroent

#endif
