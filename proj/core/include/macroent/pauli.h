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

#ifndef MACROENT_PAULI_H
#define MACROENT_PAULI_H

#include <array>
#include <vector>

#include "macroent/linalg.h"

// Site-local Pauli kernels on the 2^N computational basis.
//
// Site l = 1..N lives on bit l-1 of the basis index; bit 0 is |down>, bit 1 is |up>,
// and sigma_z |up> = +|up>. Coefficient triples are ordered (x, y, z).

namespace macroent {

using SiteCoeffs = std::array<double, 3>;

enum class Axis { X = 0, Y = 1, Z = 2 };

/// 2x2 matrix c_x sigma_x + c_y sigma_y + c_z sigma_z in the (down, up) ordering.
Eigen::Matrix2cd local_matrix(const SiteCoeffs &c);

/// out = sum_l a(l) in, computed site by site.
void apply_site_sum(const std::vector<SiteCoeffs> &coeffs, const ComplexVector &in, ComplexVector &out);

/// <u| sigma_alpha(l) |v> for every site and axis, packed at index 3*(l-1) + alpha.
ComplexVector site_transitions(const ComplexVector &u, const ComplexVector &v, int n_sites);

/// Tr(sigma_alpha(l) W) for a general square W, packed like site_transitions.
ComplexVector site_traces(const ComplexMatrix &w, int n_sites);

}  // namespace macroent

#endif
