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

#include "macroent/pauli.h"

#include <stdexcept>

namespace macroent {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_length(const ComplexVector &v, int n_sites) {
    if (v.size() != (Eigen::Index{1} << n_sites)) {
        throw std::invalid_argument("vector length does not match 2^N");
    }
}

}  // namespace

Eigen::Matrix2cd local_matrix(const SiteCoeffs &c) {
    // Row/column 0 is |down>, 1 is |up>.
    Eigen::Matrix2cd m;
    m(0, 0) = -c[2];
    m(1, 1) = c[2];
    m(0, 1) = Complex(c[0], c[1]);
    m(1, 0) = Complex(c[0], -c[1]);
    return m;
}

void apply_site_sum(const std::vector<SiteCoeffs> &coeffs, const ComplexVector &in, ComplexVector &out) {
    auto n = static_cast<int>(coeffs.size());
    require_length(in, n);
    out.setZero(in.size());
    const Eigen::Index dim = in.size();
    for (int l = 0; l < n; ++l) {
        const auto &c = coeffs[static_cast<std::size_t>(l)];
        if (c[0] == 0 && c[1] == 0 && c[2] == 0) {
            continue;
        }
        const Complex down_from_up(c[0], c[1]);
        const Complex up_from_down(c[0], -c[1]);
        const double cz = c[2];
        const Eigen::Index mask = Eigen::Index{1} << l;
        for (Eigen::Index base = 0; base < dim; base += 2 * mask) {
            for (Eigen::Index i = base; i < base + mask; ++i) {
                const Eigen::Index j = i | mask;
                const Complex vd = in[i];
                const Complex vu = in[j];
                out[i] += -cz * vd + down_from_up * vu;
                out[j] += cz * vu + up_from_down * vd;
            }
        }
    }
}

ComplexVector site_transitions(const ComplexVector &u, const ComplexVector &v, int n_sites) {
    require_length(u, n_sites);
    require_length(v, n_sites);
    ComplexVector out = ComplexVector::Zero(3 * n_sites);
    const Eigen::Index dim = u.size();
    for (int l = 0; l < n_sites; ++l) {
        const Eigen::Index mask = Eigen::Index{1} << l;
        Complex tx = 0, ty = 0, tz = 0;
        for (Eigen::Index base = 0; base < dim; base += 2 * mask) {
            for (Eigen::Index i = base; i < base + mask; ++i) {
                const Eigen::Index j = i | mask;
                const Complex ud = std::conj(u[i]);
                const Complex uu = std::conj(u[j]);
                tx += ud * v[j] + uu * v[i];
                ty += ud * (kI * v[j]) - uu * (kI * v[i]);
                tz += uu * v[j] - ud * v[i];
            }
        }
        out[3 * l + 0] = tx;
        out[3 * l + 1] = ty;
        out[3 * l + 2] = tz;
    }
    return out;
}

ComplexVector site_traces(const ComplexMatrix &w, int n_sites) {
    if (w.rows() != w.cols() || w.rows() != (Eigen::Index{1} << n_sites)) {
        throw std::invalid_argument("site_traces: matrix shape does not match 2^N");
    }
    ComplexVector out = ComplexVector::Zero(3 * n_sites);
    const Eigen::Index dim = w.rows();
    for (int l = 0; l < n_sites; ++l) {
        const Eigen::Index mask = Eigen::Index{1} << l;
        Complex tx = 0, ty = 0, tz = 0;
        for (Eigen::Index base = 0; base < dim; base += 2 * mask) {
            for (Eigen::Index i = base; i < base + mask; ++i) {
                const Eigen::Index j = i | mask;
                // sigma_{ij} with i down, j up: x -> 1, y -> i, z -> 0 (diagonal handled apart).
                tx += w(j, i) + w(i, j);
                ty += kI * w(j, i) - kI * w(i, j);
                tz += w(j, j) - w(i, i);
            }
        }
        out[3 * l + 0] = tx;
        out[3 * l + 1] = ty;
        out[3 * l + 2] = tz;
    }
    return out;
}

}  // namespace macroent
