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

#include "macroent/states.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace macroent {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kWeightTol = 1e-12;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = 1e-10;

void require_sites(int n, int min_n, const char *what) {
    if (n < min_n) {
        throw std::invalid_argument(std::string(what) + ": need at least " + std::to_string(min_n) + " sites, got " + std::to_string(n));
    }
    if (n > kMaxPureSites) {
        throw CapacityError(std::string(what) + ": " + std::to_string(n) + " sites exceeds the pure-state cap of " + std::to_string(kMaxPureSites));
    }
}

std::uint64_t all_ones(int n) {
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

PureState two_term(int n, std::uint64_t i1, Complex a1, std::uint64_t i2, Complex a2) {
    ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << n);
    v[static_cast<Eigen::Index>(i1)] += a1;
    v[static_cast<Eigen::Index>(i2)] += a2;
    return PureState::normalized(n, std::move(v));
}

}  // namespace

PureState::PureState(int n_sites, ComplexVector amplitudes) : n_sites_(n_sites), amplitudes_(std::move(amplitudes)) {
    if (n_sites < 1) {
        throw std::invalid_argument("PureState: n_sites must be positive");
    }
    if (n_sites > kMaxPureSites) {
        throw CapacityError("PureState: " + std::to_string(n_sites) + " sites exceeds the cap of " + std::to_string(kMaxPureSites));
    }
    if (amplitudes_.size() != (Eigen::Index{1} << n_sites)) {
        throw std::invalid_argument("PureState: amplitude count is not 2^N");
    }
    double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > kNormTol) {
        throw std::invalid_argument("PureState: norm " + std::to_string(norm) + " is not 1");
    }
}

PureState PureState::normalized(int n_sites, ComplexVector amplitudes) {
    double norm = amplitudes.norm();
    if (norm == 0 || !std::isfinite(norm)) {
        throw std::invalid_argument("PureState: cannot normalize a zero or non-finite vector");
    }
    amplitudes /= norm;
    return PureState(n_sites, std::move(amplitudes));
}

PureState PureState::basis(int n_sites, std::uint64_t index) {
    require_sites(n_sites, 1, "basis");
    if (index > all_ones(n_sites)) {
        throw std::invalid_argument("basis: index out of range");
    }
    ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << n_sites);
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return PureState(n_sites, std::move(v));
}

MixedState::MixedState(PureState pure)
    : n_sites_(pure.n_sites()), form_(Ensemble{{1.0}, {std::move(pure)}}) {
}

MixedState::MixedState(int n_sites, std::variant<Ensemble, Dense> form) : n_sites_(n_sites), form_(std::move(form)) {
}

MixedState MixedState::ensemble(std::vector<double> weights, std::vector<PureState> states) {
    if (weights.size() != states.size() || states.empty()) {
        throw std::invalid_argument("ensemble: need matching, non-empty weights and states");
    }
    int n = states.front().n_sites();
    double total = 0;
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (states[k].n_sites() != n) {
            throw std::invalid_argument("ensemble: components have different site counts");
        }
        if (!(weights[k] >= 0 && weights[k] <= 1)) {
            throw std::invalid_argument("ensemble: weight outside [0, 1]");
        }
        total += weights[k];
    }
    if (std::abs(total - 1.0) > kWeightTol) {
        throw std::invalid_argument("ensemble: weights sum to " + std::to_string(total) + ", not 1");
    }
    return MixedState(n, Ensemble{std::move(weights), std::move(states)});
}

MixedState MixedState::dense(int n_sites, ComplexMatrix rho) {
    if (n_sites < 1 || (std::size_t{1} << n_sites) > kDenseDimCap) {
        throw CapacityError("dense state: " + std::to_string(n_sites) + " sites is outside the dense range 1..12");
    }
    if (rho.rows() != (Eigen::Index{1} << n_sites) || rho.cols() != rho.rows()) {
        throw std::invalid_argument("dense state: matrix shape is not 2^N x 2^N");
    }
    RealVector ev = hermitian_eigenvalues(rho);
    double trace = rho.trace().real();
    if (std::abs(trace - 1.0) > kTraceTol) {
        throw std::invalid_argument("dense state: trace " + std::to_string(trace) + " is not 1");
    }
    if (ev.minCoeff() < -kPsdTol) {
        throw std::invalid_argument("dense state: not positive semidefinite (min eigenvalue " + std::to_string(ev.minCoeff()) + ")");
    }
    return MixedState(n_sites, Dense{std::move(rho), false});
}

MixedState MixedState::maximally_mixed(int n_sites) {
    require_sites(n_sites, 1, "maximally_mixed");
    return MixedState(n_sites, Dense{ComplexMatrix(), true});
}

const Ensemble &MixedState::as_ensemble() const {
    if (!is_ensemble()) {
        throw std::invalid_argument("state is not in ensemble form");
    }
    return std::get<Ensemble>(form_);
}

const Dense &MixedState::as_dense() const {
    if (!is_dense()) {
        throw std::invalid_argument("state is not in dense form");
    }
    return std::get<Dense>(form_);
}

std::optional<PureState> MixedState::as_pure() const {
    if (!is_ensemble()) {
        return std::nullopt;
    }
    const auto &e = std::get<Ensemble>(form_);
    if (e.states.size() == 1) {
        return e.states.front();
    }
    return std::nullopt;
}

PureState make_cat(int n) {
    require_sites(n, 1, "cat");
    const double a = std::numbers::sqrt2 / 2;
    return two_term(n, 0, a, all_ones(n), a);
}

PureState make_psi1(int n) {
    require_sites(n, 2, "psi1");
    return two_term(n, 0, std::sqrt(1.0 - 1.0 / n), all_ones(n), std::sqrt(1.0 / n));
}

PureState make_psi2(int n) {
    require_sites(n, 1, "psi2");
    ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << n);
    const double a = 1.0 / std::sqrt(n + 1.0);
    // |up>^k |down>^(n-k): the first k sites (low bits) up.
    for (int k = 0; k <= n; ++k) {
        v[static_cast<Eigen::Index>(all_ones(k))] = a;
    }
    return PureState::normalized(n, std::move(v));
}

MixedState make_ex2_ensemble(int n) {
    require_sites(n, 3, "ex2");
    const double a = std::numbers::sqrt2 / 2;
    std::vector<PureState> states;
    for (int l = 0; l < n; ++l) {
        std::uint64_t flipped = std::uint64_t{1} << l;
        states.push_back(two_term(n, flipped, a, all_ones(n) ^ flipped, a));
    }
    return MixedState::ensemble(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n), std::move(states));
}

namespace {

MixedState ex3_from_patterns(int n, const std::vector<std::uint64_t> &patterns) {
    const double a = std::numbers::sqrt2 / 2;
    std::vector<PureState> states;
    for (auto p : patterns) {
        states.push_back(two_term(n, p, a, all_ones(n) ^ p, a));
    }
    auto count = patterns.size();
    return MixedState::ensemble(std::vector<double>(count, 1.0 / static_cast<double>(count)), std::move(states));
}

void require_ex3_sites(int n) {
    require_sites(n, 3, "ex3");
    if (n % 3 != 0) {
        throw std::invalid_argument("ex3: n must be divisible by 3, got " + std::to_string(n));
    }
}

}  // namespace

MixedState make_ex3_ensemble(int n) {
    require_ex3_sites(n);
    std::vector<std::uint64_t> patterns;
    for (int lambda = 1; lambda <= n / 3; ++lambda) {
        patterns.push_back(all_ones(lambda));
    }
    return ex3_from_patterns(n, patterns);
}

MixedState make_ex3_random_ensemble(int n, std::uint64_t seed) {
    require_ex3_sites(n);
    std::mt19937_64 rng(seed);
    std::vector<int> sites(static_cast<std::size_t>(n));
    std::iota(sites.begin(), sites.end(), 0);
    std::vector<std::uint64_t> patterns;
    for (int lambda = 1; lambda <= n / 3; ++lambda) {
        std::shuffle(sites.begin(), sites.end(), rng);
        std::uint64_t p = 0;
        for (int k = 0; k < lambda; ++k) {
            p |= std::uint64_t{1} << sites[static_cast<std::size_t>(k)];
        }
        patterns.push_back(p);
    }
    return ex3_from_patterns(n, patterns);
}

MixedState make_ex1(int n) {
    require_sites(n, 1, "ex1");
    return MixedState::ensemble({0.5, 0.5}, {PureState::basis(n, 0), PureState::basis(n, all_ones(n))});
}

MixedState make_random_state(int n) {
    return MixedState::maximally_mixed(n);
}

PureState make_product(int n, std::uint64_t seed) {
    require_sites(n, 1, "product");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> theta(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> phi(0.0, 2 * std::numbers::pi);
    ComplexVector v = ComplexVector::Ones(1);
    for (int l = 0; l < n; ++l) {
        double t = theta(rng);
        double p = phi(rng);
        Eigen::Vector2cd site(std::cos(t), std::polar(std::sin(t), p));
        // New site occupies the next-higher bit.
        ComplexVector next(2 * v.size());
        next.head(v.size()) = v * site[0];
        next.tail(v.size()) = v * site[1];
        v = std::move(next);
    }
    return PureState::normalized(n, std::move(v));
}

PureState make_random_pure(int n, std::uint64_t seed) {
    require_sites(n, 1, "random_pure");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    ComplexVector v(Eigen::Index{1} << n);
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double re = g(rng);
        double im = g(rng);
        v[i] = Complex(re, im);
    }
    return PureState::normalized(n, std::move(v));
}

MixedState make_random_ensemble(int n, int rank, std::uint64_t seed) {
    if (rank < 1) {
        throw std::invalid_argument("random ensemble: rank must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> w;
    std::vector<PureState> states;
    for (int k = 0; k < rank; ++k) {
        w.push_back(u(rng));
        states.push_back(make_random_pure(n, rng()));
    }
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto &x : w) {
        x /= total;
    }
    return MixedState::ensemble(std::move(w), std::move(states));
}

MixedState mix(const MixedState &a, const MixedState &b, double w) {
    if (a.n_sites() != b.n_sites()) {
        throw std::invalid_argument("mix: states have different site counts");
    }
    if (!(w >= 0 && w <= 1)) {
        throw std::invalid_argument("mix: w must lie in [0, 1]");
    }
    if (w == 1) {
        return a;
    }
    if (w == 0) {
        return b;
    }
    if (a.is_ensemble() && b.is_ensemble()) {
        std::vector<double> weights;
        std::vector<PureState> states;
        for (const auto &[src, scale] : {std::pair{&a, w}, std::pair{&b, 1 - w}}) {
            const auto &e = src->as_ensemble();
            for (std::size_t k = 0; k < e.states.size(); ++k) {
                if (e.weights[k] * scale > 0) {
                    weights.push_back(e.weights[k] * scale);
                    states.push_back(e.states[k]);
                }
            }
        }
        double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (auto &x : weights) {
            x /= total;
        }
        return MixedState::ensemble(std::move(weights), std::move(states));
    }
    if (a.is_maximally_mixed() && b.is_maximally_mixed()) {
        return a;
    }
    ComplexMatrix rho = w * to_dense_matrix(a) + (1 - w) * to_dense_matrix(b);
    rho /= rho.trace().real();
    return MixedState::dense(a.n_sites(), std::move(rho));
}

ComplexMatrix to_dense_matrix(const MixedState &s) {
    if (s.dim() > kDenseDimCap) {
        throw CapacityError("to_dense_matrix: " + std::to_string(s.n_sites()) + " sites exceeds the dense cap of 12");
    }
    auto dim = static_cast<Eigen::Index>(s.dim());
    if (s.is_dense()) {
        const auto &d = s.as_dense();
        if (d.uniform) {
            return ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
        }
        return d.rho;
    }
    const auto &e = s.as_ensemble();
    ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < e.states.size(); ++k) {
        const auto &v = e.states[k].vector();
        rho.noalias() += e.weights[k] * v * v.adjoint();
    }
    return rho;
}

MixedState to_ensemble(const MixedState &s) {
    if (s.is_ensemble()) {
        return s;
    }
    EigenDecomposition e = hermitian_eig(to_dense_matrix(s));
    double cutoff = 1e-12 * e.values.cwiseAbs().maxCoeff();
    std::vector<double> w;
    std::vector<PureState> states;
    for (Eigen::Index k = e.values.size() - 1; k >= 0; --k) {
        if (e.values[k] > cutoff) {
            w.push_back(e.values[k]);
            states.push_back(PureState::normalized(s.n_sites(), e.vectors.col(k)));
        }
    }
    double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto &x : w) {
        x /= total;
    }
    return MixedState::ensemble(std::move(w), std::move(states));
}

PureState parse_amplitudes(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::vector<Complex> amps;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream fields(line);
        double re = 0, im = 0;
        std::string extra;
        if (!(fields >> re >> im) || (fields >> extra)) {
            throw std::invalid_argument("amplitude file line " + std::to_string(line_no) + ": expected 're im'");
        }
        amps.emplace_back(re, im);
    }
    int n = log2_exact(amps.size());
    if (n < 1) {
        throw std::invalid_argument("amplitude file: need at least 2 amplitudes");
    }
    ComplexVector v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = amps[i];
    }
    return PureState::normalized(n, std::move(v));
}

std::string format_amplitudes(const PureState &s) {
    std::ostringstream out;
    out.precision(17);
    for (Eigen::Index i = 0; i < s.vector().size(); ++i) {
        out << s.vector()[i].real() << ' ' << s.vector()[i].imag() << '\n';
    }
    return out.str();
}

}  // namespace macroent
