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

#include "macroent/observables.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace macroent {

namespace {

constexpr double kNormBudgetTol = 1e-12;

double site_norm(const SiteCoeffs &c) {
    return std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
}

void require_sites_match(const AdditiveObservable &a, int n_sites) {
    if (a.n_sites() != n_sites) {
        throw std::invalid_argument(
            "observable has " + std::to_string(a.n_sites()) + " sites but the state has " + std::to_string(n_sites));
    }
}

}  // namespace

AdditiveObservable::AdditiveObservable(int n_sites, std::vector<SiteCoeffs> locals)
    : n_sites_(n_sites), locals_(std::move(locals)) {
    if (n_sites < 1 || locals_.size() != static_cast<std::size_t>(n_sites)) {
        throw std::invalid_argument("AdditiveObservable: need exactly one coefficient triple per site");
    }
    for (std::size_t l = 0; l < locals_.size(); ++l) {
        double norm = site_norm(locals_[l]);
        if (!std::isfinite(norm) || norm > 1 + kNormBudgetTol) {
            throw std::invalid_argument(
                "AdditiveObservable: site " + std::to_string(l + 1) + " has |c| = " + std::to_string(norm) + " > 1");
        }
    }
}

AdditiveObservable AdditiveObservable::from_stack(int n_sites, const RealVector &stack) {
    if (stack.size() != 3 * n_sites) {
        throw std::invalid_argument("from_stack: coefficient stack length is not 3N");
    }
    std::vector<SiteCoeffs> locals(static_cast<std::size_t>(n_sites));
    for (int l = 0; l < n_sites; ++l) {
        locals[static_cast<std::size_t>(l)] = {stack[3 * l], stack[3 * l + 1], stack[3 * l + 2]};
    }
    return AdditiveObservable(n_sites, std::move(locals));
}

AdditiveObservable AdditiveObservable::magnetization(int n_sites, Axis axis) {
    SiteCoeffs c{0, 0, 0};
    c[static_cast<std::size_t>(axis)] = 1;
    return AdditiveObservable(n_sites, std::vector<SiteCoeffs>(static_cast<std::size_t>(n_sites), c));
}

AdditiveObservable AdditiveObservable::staggered(int n_sites, Axis axis) {
    std::vector<SiteCoeffs> locals(static_cast<std::size_t>(n_sites), SiteCoeffs{0, 0, 0});
    for (int l = 1; l <= n_sites; ++l) {
        locals[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(axis)] = (l % 2 == 0) ? 1.0 : -1.0;
    }
    return AdditiveObservable(n_sites, std::move(locals));
}

AdditiveObservable AdditiveObservable::random(int n_sites, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<SiteCoeffs> locals(static_cast<std::size_t>(n_sites));
    for (auto &c : locals) {
        SiteCoeffs d{g(rng), g(rng), g(rng)};
        double norm = site_norm(d);
        double r = u(rng);
        for (int k = 0; k < 3; ++k) {
            c[static_cast<std::size_t>(k)] = norm > 0 ? r * d[static_cast<std::size_t>(k)] / norm : 0.0;
        }
    }
    return AdditiveObservable(n_sites, std::move(locals));
}

RealVector AdditiveObservable::stack() const {
    RealVector s(3 * n_sites_);
    for (int l = 0; l < n_sites_; ++l) {
        for (int k = 0; k < 3; ++k) {
            s[3 * l + k] = locals_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
        }
    }
    return s;
}

double AdditiveObservable::norm_bound() const {
    double total = 0;
    for (const auto &c : locals_) {
        total += site_norm(c);
    }
    return total;
}

bool AdditiveObservable::on_boundary() const {
    for (const auto &c : locals_) {
        if (std::abs(site_norm(c) - 1) > 1e-9) {
            return false;
        }
    }
    return true;
}

ComplexVector apply(const AdditiveObservable &a, const ComplexVector &v) {
    if (v.size() != (Eigen::Index{1} << a.n_sites())) {
        throw std::invalid_argument("apply: vector length does not match the observable's 2^N");
    }
    ComplexVector out;
    apply_site_sum(a.locals(), v, out);
    return out;
}

ComplexMatrix apply_columns(const AdditiveObservable &a, const ComplexMatrix &m) {
    ComplexMatrix out(m.rows(), m.cols());
    ComplexVector col;
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        apply_site_sum(a.locals(), m.col(k), col);
        out.col(k) = col;
    }
    return out;
}

ComplexMatrix dense_matrix(const AdditiveObservable &a) {
    auto dim = std::size_t{1} << a.n_sites();
    if (dim > kDenseDimCap) {
        throw CapacityError("dense_matrix: N exceeds the dense cap of 12");
    }
    auto d = static_cast<Eigen::Index>(dim);
    return apply_columns(a, ComplexMatrix::Identity(d, d));
}

RealVector site_expectations(const MixedState &s) {
    const int n = s.n_sites();
    if (s.is_maximally_mixed()) {
        return RealVector::Zero(3 * n);
    }
    if (s.is_dense()) {
        return site_traces(s.as_dense().rho, n).real();
    }
    RealVector out = RealVector::Zero(3 * n);
    const auto &e = s.as_ensemble();
    for (std::size_t k = 0; k < e.states.size(); ++k) {
        const auto &v = e.states[k].vector();
        out += e.weights[k] * site_transitions(v, v, n).real();
    }
    return out;
}

double expectation(const AdditiveObservable &a, const MixedState &s) {
    require_sites_match(a, s.n_sites());
    return a.stack().dot(site_expectations(s));
}

double variance(const AdditiveObservable &a, const PureState &s) {
    require_sites_match(a, s.n_sites());
    ComplexVector av = macroent::apply(a, s.vector());
    double mean = s.vector().dot(av).real();
    double second = av.squaredNorm();
    return std::max(0.0, second - mean * mean);
}

RealMatrix covariance_matrix(const PureState &s) {
    const int n = s.n_sites();
    const auto m = static_cast<Eigen::Index>(3 * n);
    const auto dim = static_cast<Eigen::Index>(s.dim());
    ComplexMatrix w(dim, m);
    for (int l = 0; l < n; ++l) {
        for (int k = 0; k < 3; ++k) {
            std::vector<SiteCoeffs> single(static_cast<std::size_t>(n), SiteCoeffs{0, 0, 0});
            single[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = 1;
            ComplexVector out;
            apply_site_sum(single, s.vector(), out);
            w.col(3 * l + k) = out;
        }
    }
    ComplexVector means = w.adjoint() * s.vector();
    RealMatrix v = (w.adjoint() * w).real();
    RealVector mu = means.real();
    v -= mu * mu.transpose();
    return (v + v.transpose()) * 0.5;
}

double additive_deviation(const MixedState &s1, const MixedState &s2, const AdditiveObservable &b) {
    return std::abs(expectation(b, s1) - expectation(b, s2));
}

double additive_indistinguishability(const MixedState &s1, const MixedState &s2, int trials, std::uint64_t seed) {
    if (s1.n_sites() != s2.n_sites()) {
        throw std::invalid_argument("additive_indistinguishability: states have different site counts");
    }
    RealVector m1 = site_expectations(s1);
    RealVector m2 = site_expectations(s2);
    RealVector diff = m1 - m2;
    std::mt19937_64 rng(seed);
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        auto b = AdditiveObservable::random(s1.n_sites(), rng);
        worst = std::max(worst, std::abs(b.stack().dot(diff)));
    }
    return worst;
}

std::string to_text(const AdditiveObservable &a) {
    std::ostringstream out;
    out.precision(17);
    for (const auto &c : a.locals()) {
        out << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
    }
    return out.str();
}

AdditiveObservable observable_from_text(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::vector<SiteCoeffs> locals;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream fields(line);
        SiteCoeffs c{};
        if (!(fields >> c[0] >> c[1] >> c[2])) {
            throw std::invalid_argument("observable text: expected three coefficients per line");
        }
        locals.push_back(c);
    }
    const int n = static_cast<int>(locals.size());
    return AdditiveObservable(n, std::move(locals));
}

}  // namespace macroent
