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

// Acceptance gate: one PASS/FAIL line per criterion, at the stated tolerances.

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <fmt/format.h>

#include "macroent/correlation.h"
#include "macroent/optimizer.h"
#include "macroent/oracle.h"
#include "macroent/scaling.h"
#include "macroent/states.h"

using namespace macroent;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double rel(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

std::vector<SweepPoint> as_points(const std::vector<int> &ns, const std::vector<double> &values) {
    std::vector<SweepPoint> pts;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        SweepPoint p;
        p.n = ns[i];
        p.raw_value = values[i];
        p.effective_value = std::max(values[i], static_cast<double>(ns[i]));
        pts.push_back(p);
    }
    return pts;
}

Outcome cat_optimum() {
    Outcome o;
    std::vector<int> ns = {4, 6, 8, 10, 12};
    std::vector<double> values;
    double worst_canonical = 0;
    for (int n : ns) {
        PureState s = make_cat(n);
        double want = 2.0 * n * n;
        Optimum opt = maximize_c(s, OptimizerConfig{});
        double canonical = eta_optimal(AdditiveObservable::magnetization(n), s).value;
        worst_canonical = std::max(worst_canonical, std::abs(canonical - want) / want);
        o.pass &= opt.value >= want * (1 - 1e-6);
        o.pass &= std::abs(canonical - want) <= 1e-9 * want;
        values.push_back(opt.value);
    }
    double slope = fit_index(as_points(ns, values)).slope;
    o.pass &= std::abs(slope - 2) <= 0.01;
    o.detail = fmt::format("optimized N=12 {:.9g} (2N^2=288), M_z rel err {:.1e}, slope {:.6f}", values.back(),
                           worst_canonical, slope);
    return o;
}

Outcome ex2_identity() {
    Outcome o;
    std::vector<int> ns = {6, 8, 10, 12};
    std::vector<double> values;
    double worst = 0;
    for (int n : ns) {
        MixedState s = make_ex2_ensemble(n);
        double v = c_expectation(AdditiveObservable::magnetization(n), component_projector(s), s);
        double want = 2.0 * (n - 2) * (n - 2);
        worst = std::max(worst, std::abs(v - want) / want);
        values.push_back(v);
    }
    o.pass = worst <= 1e-9;
    auto secants = secant_slopes(as_points(ns, values));
    bool approaching = true;
    for (std::size_t i = 1; i < secants.size(); ++i) {
        approaching &= std::abs(secants[i] - 2) < std::abs(secants[i - 1] - 2);
    }
    o.pass &= secants.back() >= 1.8 && approaching;
    o.detail = fmt::format("max rel err {:.1e}; secants {:.4f} {:.4f} {:.4f} (approaching 2 from above)", worst,
                           secants[0], secants[1], secants[2]);
    return o;
}

Outcome ex3_values() {
    Outcome o;
    std::vector<int> ns = {6, 9, 12, 15, 18};
    std::vector<double> values;
    double worst = 0;
    for (int n : ns) {
        double want = 0;
        for (int lambda = 1; lambda <= n / 3; ++lambda) {
            want += (n - 2.0 * lambda) * (n - 2.0 * lambda);
        }
        want *= 2.0 * 3.0 / n;
        MixedState s = make_ex3_ensemble(n);
        double v = c_expectation(AdditiveObservable::magnetization(n), component_projector(s), s);
        worst = std::max(worst, std::abs(v - want) / want);
        values.push_back(v);
    }
    double terminal = secant_slopes(as_points(ns, values)).back();
    o.pass = worst <= 1e-9 && std::abs(values[0] - 20) <= 1e-9 * 20 && terminal >= 1.6;
    o.detail = fmt::format("N=6 value {:.12g}, max rel err {:.1e}, terminal secant (15->18) {:.4f}", values[0],
                           worst, terminal);
    return o;
}

Outcome zero_cases() {
    Outcome o;
    std::vector<int> ns = {4, 6, 8, 10, 12};
    OptimizerConfig cfg;
    for (const std::string name : {"ex1", "random"}) {
        StateFamily f = parse_family(name);
        std::vector<double> raw;
        for (int n : ns) {
            MixedState s = f.make(n);
            HermitianOperator k = build_k(AdditiveObservable::magnetization(n), s);
            bool zero = k.block().size() == 0 || k.block().cwiseAbs().maxCoeff() == 0;
            o.pass &= zero && eta_optimal(AdditiveObservable::magnetization(n), s).value == 0;
            raw.push_back(maximize_c(s, cfg).value);
        }
        auto pts = as_points(ns, raw);
        double slope = fit_index(pts).slope;
        o.pass &= slope <= 1.1;
        for (const auto &p : pts) {
            o.pass &= p.effective_value >= p.n;
        }
        if (name == "random") {
            for (const auto &p : pts) {
                o.pass &= p.effective_value == p.n;
            }
        }
        o.detail += fmt::format("{}: K=0 at M_z, optimized N=12 {:.6g}, slope {:.4f}; ", name, raw.back(), slope);
    }
    return o;
}

Outcome mermin_factors() {
    Outcome o;
    double worst = 0;
    for (int n : {5, 7, 9, 11}) {
        auto r = mermin_score(make_cat(n));
        worst = std::max(worst, rel(r.ratio, std::pow(2.0, (n - 1) / 2.0)));
    }
    double ratio16 = 0;
    for (int n : {4, 8, 16}) {
        auto r = mermin_score(make_psi1(n));
        worst = std::max(worst, rel(r.ratio, std::pow(2.0, (n + 1) / 2.0) * std::sqrt(n - 1.0) / n));
        ratio16 = r.ratio;
    }
    double approx = std::pow(2.0, (16 - std::log2(16.0) + 1) / 2);
    double band = std::abs(ratio16 / approx - 1);
    o.pass = worst <= 1e-9 && band <= 0.05;
    o.detail = fmt::format("max rel err {:.1e}; psi1 N=16 ratio {:.6f} vs 2^((N-log2 N+1)/2) = {:.6f} ({:.2f}%)", worst,
                           ratio16, approx, 100 * band);
    return o;
}

Outcome macro_chsh() {
    Outcome o;
    std::vector<int> ns = {4, 6, 8, 10, 12};
    std::vector<double> lambda;
    for (int n : ns) {
        lambda.push_back(macro_chsh_lambda_max(n, canonical_chsh_choice(n)));
    }
    std::string vals;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (i > 0) {
            o.pass &= lambda[i] < lambda[i - 1];
        }
        double bound = (lambda[0] - 2) * (4.0 / ns[i]) * (4.0 / ns[i]) * 1.5;
        o.pass &= lambda[i] - 2 <= bound;
        vals += fmt::format(" {}:{:.6f}", ns[i], lambda[i]);
    }
    o.detail = "lambda_max" + vals;
    return o;
}

Outcome eta_optimality() {
    Outcome o;
    int states = 0;
    double worst = -1e300;
    std::mt19937_64 rng(2025);
    for (int n = 2; n <= 4; ++n) {
        for (std::uint64_t seed = 0; seed < 18; ++seed) {
            MixedState s = [&]() -> MixedState {
                switch (seed % 4) {
                    case 0: return make_random_pure(n, seed);
                    case 1: return make_random_ensemble(n, 2, seed);
                    case 2: return mix(make_random_ensemble(n, 3, seed), make_random_state(n), 0.6);
                    default: return make_cat(n);
                }
            }();
            auto a = AdditiveObservable::random(n, rng);
            double value = eta_optimal(a, s).value;
            auto r = oracle::random_projector_check(build_k(a, s).to_dense(), 500, seed + 100 * static_cast<std::uint64_t>(n));
            worst = std::max(worst, r.max_value - value);
            o.pass &= r.max_value <= value + 1e-9;
            ++states;
        }
    }
    o.pass &= states >= 50;
    o.detail = fmt::format("{} states x 500 projectors; max (sample - sum of positive eigenvalues) = {:.3e}", states, worst);
    return o;
}

Outcome expansion_agreement() {
    Outcome o;
    double worst = 0;
    std::mt19937_64 rng(12);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        int n = 1 + static_cast<int>(seed % 3);
        MixedState s = seed % 2 ? MixedState(make_random_pure(n, seed)) : make_random_ensemble(n, 2, seed);
        auto a = AdditiveObservable::random(n, rng);
        std::normal_distribution<double> g;
        const auto dim = static_cast<Eigen::Index>(s.dim());
        const Eigen::Index rank = std::min<Eigen::Index>(dim - 1, 1 + static_cast<Eigen::Index>(seed % 2));
        ComplexMatrix m(dim, rank);
        for (Eigen::Index j = 0; j < m.size(); ++j) {
            m.data()[j] = Complex(g(rng), g(rng));
        }
        Eigen::HouseholderQR<ComplexMatrix> qr(m);
        ProjectorSpec eta(qr.householderQ() * ComplexMatrix::Identity(dim, rank));
        double c = c_expectation(a, eta, s);
        worst = std::max(worst, std::abs(oracle::expansion_reference(a, eta, s) - c));
        worst = std::max(worst, std::abs(local_decomposition_expectation(a, eta, s) - c));
    }
    o.pass = worst <= 1e-8;
    o.detail = fmt::format("20 instances, max |difference| {:.2e}", worst);
    return o;
}

Outcome pure_relations() {
    Outcome o;
    std::mt19937_64 rng(9);
    int max_positive = 0;
    double worst_cs = -1e300, worst_pure = 0;
    for (int i = 0; i < 50; ++i) {
        int n = 3 + i % 3;
        auto s = make_random_pure(n, 500 + static_cast<std::uint64_t>(i));
        auto a = AdditiveObservable::random(n, rng);
        RealVector values = hermitian_eigenvalues(build_k(a, s).to_dense());
        double thr = k_zero_threshold(values, a.norm_bound());
        int positive = 0;
        for (double x : values) {
            positive += x > thr;
        }
        max_positive = std::max(max_positive, positive);
        auto cs = cauchy_schwarz_bound(a, s);
        worst_cs = std::max(worst_cs, cs.lhs - cs.rhs);
        worst_pure = std::max(worst_pure, rel(pure_max_eta(a, s).value, eta_optimal(a, s).value));
    }
    o.pass = max_positive <= 1 && worst_cs <= 1e-9 && worst_pure <= 1e-9;
    o.detail = fmt::format("max positive eigenvalues {}, max (lhs - rhs) {:.2e}, pure vs general rel err {:.1e}",
                           max_positive, worst_cs, worst_pure);
    return o;
}

Outcome conversion() {
    Outcome o;
    double worst = 0, worst_w = 0;
    for (int n : {4, 8, 16, 32}) {
        auto r = single_site_conversion(TwoBranchState::psi1(n), 1);
        worst = std::max(worst, std::abs(r.success_prob - 2.0 * (n - 1) / (n * n)));
        worst_w = std::max(worst_w, std::abs(std::norm(r.post_state.amp1) - std::norm(r.post_state.amp2)));
    }
    o.pass = worst <= 1e-15 && worst_w <= 1e-12;
    o.detail = fmt::format("max |P - 2(N-1)/N^2| {:.1e}, max branch weight gap {:.1e}", worst, worst_w);
    return o;
}

Outcome psi1_diagnostic() {
    Outcome o;
    double worst = 0;
    std::vector<int> ns = {4, 6, 8, 10, 12};
    for (int n : ns) {
        double v = eta_optimal(AdditiveObservable::magnetization(n), make_psi1(n)).value;
        worst = std::max(worst, rel(v, 4.0 * n * std::sqrt(n - 1.0)));
    }
    StateFamily f = parse_family("psi1");
    auto pts = sweep(f, ns, OptimizerConfig{}, SweepMode::Canonical);
    double slope = fit_index(pts).slope;
    bool flagged = f.expected_index().has_value() && std::abs(slope - *f.expected_index()) > 0.25;
    o.pass = worst <= 1e-9 && flagged && std::abs(slope - 1.5) <= 0.15;
    o.detail = fmt::format("max rel err {:.1e}; measured slope {:.4f} vs stated q = 1: tension {}", worst, slope,
                           flagged ? "flagged" : "NOT flagged");
    return o;
}

Outcome optimizer_soundness() {
    Outcome o;
    double worst_gap = -1e300;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        int n = seed < 5 ? 2 : 3;
        MixedState s = seed % 2 ? MixedState(make_random_pure(n, seed + 40)) : make_random_ensemble(n, 2, seed + 40);
        OptimizerConfig cfg;
        cfg.seed = seed;
        double grid = oracle::grid_search_a(s, n == 2 ? 9 : 5).best_value;
        double opt = maximize_c(s, cfg).value;
        worst_gap = std::max(worst_gap, grid - opt);
        o.pass &= opt >= grid - 1e-6;
    }
    std::mt19937_64 rng(77);
    int checked = 0;
    double worst_fd = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        MixedState s = t % 2 ? MixedState(make_random_pure(4, t + 900)) : make_random_ensemble(4, 2, t + 900);
        QObjective obj(s);
        RealVector c = AdditiveObservable::random(4, rng).stack();
        auto ev = obj.evaluate(c);
        if (ev.spectral_gap < 1e-6) {
            continue;
        }
        RealVector fd(c.size());
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            RealVector up = c, down = c;
            up[i] += 1e-5;
            down[i] -= 1e-5;
            fd[i] = (obj.evaluate(up, false).value - obj.evaluate(down, false).value) / 2e-5;
        }
        double err = (fd - ev.gradient).norm() / std::max(1.0, ev.gradient.norm());
        worst_fd = std::max(worst_fd, err);
        o.pass &= err <= 1e-4;
        ++checked;
    }
    o.detail = fmt::format("max (grid - optimizer) {:.2e} over 10 states; gradient rel err {:.1e} on {} pairs",
                           worst_gap, worst_fd, checked);
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"cat-state optimum", cat_optimum},
        {"ex2 identity", ex2_identity},
        {"ex3 canonical values", ex3_values},
        {"degenerate and zero cases", zero_cases},
        {"Mermin factors", mermin_factors},
        {"macroscopic CHSH", macro_chsh},
        {"eta-optimality oracle", eta_optimality},
        {"commutator expansion and local decomposition", expansion_agreement},
        {"pure-state relations", pure_relations},
        {"conversion experiment", conversion},
        {"psi1 diagnostic", psi1_diagnostic},
        {"optimizer soundness", optimizer_soundness},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception &ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failed += !out.pass;
        fmt::print("{} {:2d} {}: {} [{:.1f}s]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, out.detail,
                   secs);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
