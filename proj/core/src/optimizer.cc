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

#include "macroent/optimizer.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "macroent/correlation.h"
#include "macroent/pauli.h"

namespace macroent {

namespace {

constexpr double kKrylovDropTol = 1e-10;
constexpr int kMaxFactoredColumns = 256;

std::vector<SiteCoeffs> to_coeffs(const RealVector &stack) {
    std::vector<SiteCoeffs> c(static_cast<std::size_t>(stack.size() / 3));
    for (std::size_t l = 0; l < c.size(); ++l) {
        auto i = static_cast<Eigen::Index>(3 * l);
        c[l] = {stack[i], stack[i + 1], stack[i + 2]};
    }
    return c;
}

double stack_norm_bound(const RealVector &stack) {
    double total = 0;
    for (Eigen::Index i = 0; i < stack.size(); i += 3) {
        total += stack.segment(i, 3).norm();
    }
    return total;
}

ComplexVector apply_raw(const std::vector<SiteCoeffs> &c, const ComplexVector &v) {
    ComplexVector out;
    apply_site_sum(c, v, out);
    return out;
}

ComplexMatrix apply_raw_columns(const std::vector<SiteCoeffs> &c, const ComplexMatrix &m) {
    ComplexMatrix out(m.rows(), m.cols());
    ComplexVector col;
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        apply_site_sum(c, m.col(k), col);
        out.col(k) = col;
    }
    return out;
}

MixedState prepare_state(const MixedState &s) {
    if (s.is_ensemble()) {
        const auto r = static_cast<int>(s.as_ensemble().states.size());
        if (3 * r > kMaxFactoredColumns) {
            throw CapacityError(
                "maximize_c: ensemble rank " + std::to_string(r) + " exceeds the cap (3 x rank <= 256)");
        }
        return s;
    }
    if (s.is_maximally_mixed()) {
        return s;
    }
    if (s.dim() > kDenseDimCap) {
        throw CapacityError("maximize_c: dense state exceeds the dense cap of N = 12");
    }
    // Exact low-rank form when it fits the factored path.
    MixedState e = to_ensemble(s);
    if (3 * e.as_ensemble().states.size() <= static_cast<std::size_t>(kMaxFactoredColumns)) {
        return e;
    }
    return s;
}

struct Spectrum {
    RealVector values;
    ComplexMatrix vectors;
    double threshold = 0;
};

}  // namespace

void OptimizerConfig::validate() const {
    if (restarts < 1) {
        throw std::invalid_argument("optimizer: restarts must be >= 1");
    }
    if (max_iters < 1) {
        throw std::invalid_argument("optimizer: max_iters must be >= 1");
    }
    if (!(step_init > 0)) {
        throw std::invalid_argument("optimizer: step_init must be > 0");
    }
    if (!(step_shrink > 0 && step_shrink < 1)) {
        throw std::invalid_argument("optimizer: step_shrink must lie in (0, 1)");
    }
    if (!(grad_tol > 0)) {
        throw std::invalid_argument("optimizer: grad_tol must be > 0");
    }
    if (jobs < 1) {
        throw std::invalid_argument("optimizer: jobs must be >= 1");
    }
}

RealVector project_feasible(const RealVector &stack) {
    if (stack.size() % 3 != 0) {
        throw std::invalid_argument("project_feasible: stack length is not a multiple of 3");
    }
    RealVector out = stack;
    for (Eigen::Index i = 0; i < out.size(); i += 3) {
        double norm = out.segment(i, 3).norm();
        if (norm > 1) {
            out.segment(i, 3) /= norm;
        }
    }
    return out;
}

QObjective::QObjective(const MixedState &s) : state_(prepare_state(s)) {
}

QObjective::Evaluation QObjective::evaluate(const RealVector &stack, bool with_gradient) const {
    const int n = state_.n_sites();
    if (stack.size() != 3 * n) {
        throw std::invalid_argument("QObjective: stack length is not 3N");
    }
    Evaluation out;
    out.gradient = RealVector::Zero(3 * n);
    if (state_.is_maximally_mixed()) {
        return out;
    }
    const auto coeffs = to_coeffs(stack);
    const double bound = stack_norm_bound(stack);

    if (state_.is_dense()) {
        const ComplexMatrix &rho = state_.as_dense().rho;
        ComplexMatrix x = apply_raw_columns(coeffs, rho);
        ComplexMatrix k = apply_raw_columns(coeffs, x);
        ComplexMatrix axd = apply_raw_columns(coeffs, x.adjoint());
        k = (k + k.adjoint()).eval() - 2.0 * axd;
        k = (k + k.adjoint()).eval() * 0.5;
        EigenDecomposition e = hermitian_eig(k);
        const double thr = k_zero_threshold(e.values, bound);
        std::vector<Eigen::Index> pos;
        for (Eigen::Index i = 0; i < e.values.size(); ++i) {
            if (e.values[i] > thr) {
                out.value += e.values[i];
                pos.push_back(i);
            }
        }
        out.spectral_gap = e.values.cwiseAbs().minCoeff();
        if (with_gradient && !pos.empty()) {
            ComplexMatrix vp(rho.rows(), static_cast<Eigen::Index>(pos.size()));
            for (std::size_t j = 0; j < pos.size(); ++j) {
                vp.col(static_cast<Eigen::Index>(j)) = e.vectors.col(pos[j]);
            }
            ComplexMatrix p = vp * vp.adjoint();
            // W = A P rho + P rho A - 2 P A rho; dTr(PK)/dc = 2 Re Tr(sigma W).
            ComplexMatrix w = apply_raw_columns(coeffs, p * rho) + p * x.adjoint() - 2.0 * (p * x);
            out.gradient = 2.0 * site_traces(w, n).real();
        }
        return out;
    }

    const auto &e = state_.as_ensemble();
    const auto r = static_cast<Eigen::Index>(e.states.size());
    const auto d = static_cast<Eigen::Index>(state_.dim());
    ComplexMatrix psi(d, r), apsi(d, r), a2psi(d, r);
    for (Eigen::Index k = 0; k < r; ++k) {
        psi.col(k) = e.states[static_cast<std::size_t>(k)].vector();
        apsi.col(k) = apply_raw(coeffs, psi.col(k));
        a2psi.col(k) = apply_raw(coeffs, apsi.col(k));
    }
    ComplexMatrix all(d, 3 * r);
    all << psi, apsi, a2psi;
    ComplexMatrix q = orthonormalize_columns(all, kKrylovDropTol);
    ComplexMatrix x = q.adjoint() * psi;
    ComplexMatrix y = q.adjoint() * apsi;
    ComplexMatrix z = q.adjoint() * a2psi;
    ComplexMatrix block = ComplexMatrix::Zero(q.cols(), q.cols());
    for (Eigen::Index k = 0; k < r; ++k) {
        const double w = e.weights[static_cast<std::size_t>(k)];
        block.noalias() += w * (z.col(k) * x.col(k).adjoint() + x.col(k) * z.col(k).adjoint());
        block.noalias() -= (2 * w) * (y.col(k) * y.col(k).adjoint());
    }
    block = (block + block.adjoint()).eval() * 0.5;
    if (block.size() == 0) {
        return out;
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(block);
    const RealVector &ev = solver.eigenvalues();
    const double thr = k_zero_threshold(ev, bound);
    std::vector<Eigen::Index> pos;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > thr) {
            out.value += ev[i];
            pos.push_back(i);
        }
    }
    out.spectral_gap = ev.cwiseAbs().minCoeff();
    if (!with_gradient || pos.empty()) {
        return out;
    }
    ComplexMatrix vp(q.cols(), static_cast<Eigen::Index>(pos.size()));
    for (std::size_t j = 0; j < pos.size(); ++j) {
        vp.col(static_cast<Eigen::Index>(j)) = solver.eigenvectors().col(pos[j]);
    }
    // Gradient of Tr(P K) at fixed P:
    //   dF/dc = 2 Re sum_k w_k [<psi|s|A P psi> + <A psi|s|P psi> - 2 <psi|s|P A psi>].
    RealVector g = RealVector::Zero(3 * n);
    for (Eigen::Index k = 0; k < r; ++k) {
        const double w = e.weights[static_cast<std::size_t>(k)];
        ComplexVector p_psi = q * (vp * (vp.adjoint() * x.col(k)));
        ComplexVector p_apsi = q * (vp * (vp.adjoint() * y.col(k)));
        ComplexVector ap_psi = apply_raw(coeffs, p_psi);
        const ComplexVector &v = psi.col(k);
        ComplexVector av = apsi.col(k);
        ComplexVector t = site_transitions(v, ap_psi, n) + site_transitions(av, p_psi, n) -
                          2.0 * site_transitions(v, p_apsi, n);
        g += (2 * w) * t.real();
    }
    out.gradient = g;
    return out;
}

AscentResult projected_ascent(const StackObjective &f, const RealVector &start, const OptimizerConfig &cfg) {
    AscentResult res;
    res.stack = project_feasible(start);
    RealVector grad;
    res.value = f(res.stack, &grad);
    res.accepted_values.push_back(res.value);
    double step = cfg.step_init;
    while (res.iterations < cfg.max_iters) {
        ++res.iterations;
        const double gnorm = grad.norm();
        if (gnorm == 0 || !std::isfinite(gnorm)) {
            res.converged = gnorm == 0;
            break;
        }
        RealVector trial = project_feasible(res.stack + (step / gnorm) * grad);
        RealVector move = trial - res.stack;
        if (move.norm() < cfg.grad_tol) {
            // The gradient points out of the feasible set everywhere it is active.
            res.converged = true;
            break;
        }
        RealVector trial_grad;
        double value = f(trial, &trial_grad);
        if (value > res.value) {
            res.stack = std::move(trial);
            res.value = value;
            grad = std::move(trial_grad);
            res.accepted_values.push_back(value);
            step = std::min(2 * step, cfg.step_init);
        } else {
            step *= cfg.step_shrink;
            if (step < cfg.grad_tol) {
                res.converged = true;
                break;
            }
        }
    }
    return res;
}

namespace {

RealVector random_unit_stack(int n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    RealVector s(3 * n);
    for (int l = 0; l < n; ++l) {
        Eigen::Vector3d v(g(rng), g(rng), g(rng));
        s.segment(3 * l, 3) = v / v.norm();
    }
    return s;
}

RealVector top_covariance_start(const RealMatrix &v, int n) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(v);
    RealVector top = es.eigenvectors().col(v.rows() - 1);
    for (int l = 0; l < n; ++l) {
        double norm = top.segment(3 * l, 3).norm();
        if (norm > 1e-12) {
            top.segment(3 * l, 3) /= norm;
        }
    }
    return top;
}

std::mt19937_64 restart_rng(std::uint64_t seed, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart)};
    return std::mt19937_64(seq);
}

/// Runs `run(k)` for k in [0, count) on up to `jobs` threads; results land by index.
template <typename T, typename F>
std::vector<T> run_restarts(int count, int jobs, F run) {
    std::vector<std::optional<T>> slots(static_cast<std::size_t>(count));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int k = next++; k < count; k = next++) {
            try {
                slots[static_cast<std::size_t>(k)].emplace(run(k));
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    int threads = std::min(jobs, count);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    std::vector<T> out;
    out.reserve(slots.size());
    for (auto &s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

struct RestartOutcome {
    AscentResult ascent;
    int restart = 0;
};

RestartOutcome best_of(std::vector<RestartOutcome> outcomes) {
    // Highest value wins; ties go to the lowest restart index.
    std::size_t best = 0;
    for (std::size_t k = 1; k < outcomes.size(); ++k) {
        if (outcomes[k].ascent.value > outcomes[best].ascent.value) {
            best = k;
        }
    }
    return std::move(outcomes[best]);
}

}  // namespace

Optimum maximize_variance(const PureState &s, const OptimizerConfig &cfg) {
    cfg.validate();
    const int n = s.n_sites();
    const RealMatrix v = covariance_matrix(s);
    StackObjective f = [&v](const RealVector &c, RealVector *grad) {
        RealVector vc = v * c;
        if (grad) {
            *grad = 2 * vc;
        }
        return c.dot(vc);
    };
    const RealVector cov_start = top_covariance_start(v, n);
    auto outcomes = run_restarts<RestartOutcome>(cfg.restarts, cfg.jobs, [&](int k) {
        RealVector start;
        switch (k) {
            case 0: start = cov_start; break;
            case 1: start = AdditiveObservable::magnetization(n).stack(); break;
            case 2: start = AdditiveObservable::staggered(n).stack(); break;
            default: {
                auto rng = restart_rng(cfg.seed, k);
                start = random_unit_stack(n, rng);
            }
        }
        return RestartOutcome{projected_ascent(f, start, cfg), k};
    });
    RestartOutcome best = best_of(std::move(outcomes));
    auto obs = AdditiveObservable::from_stack(n, best.ascent.stack);
    double value = variance(obs, s);
    bool boundary = obs.on_boundary();
    return Optimum{std::move(obs), value, best.ascent.iterations, best.restart, best.ascent.converged, boundary};
}

namespace {

Optimum finish_q(const MixedState &s, const RestartOutcome &best) {
    auto obs = AdditiveObservable::from_stack(s.n_sites(), best.ascent.stack);
    double value = eta_optimal(obs, s).value;
    bool boundary = obs.on_boundary();
    return Optimum{std::move(obs), value, best.ascent.iterations, best.restart, best.ascent.converged, boundary};
}

}  // namespace

Optimum maximize_c(const MixedState &s, const OptimizerConfig &cfg) {
    cfg.validate();
    const QObjective objective(s);
    const int n = s.n_sites();
    StackObjective f = [&objective](const RealVector &c, RealVector *grad) {
        auto e = objective.evaluate(c, grad != nullptr);
        if (grad) {
            *grad = std::move(e.gradient);
        }
        return e.value;
    };
    std::optional<RealVector> cov_start;
    if (auto pure = s.as_pure()) {
        cov_start = top_covariance_start(covariance_matrix(*pure), n);
    }
    auto outcomes = run_restarts<RestartOutcome>(cfg.restarts, cfg.jobs, [&](int k) {
        RealVector start;
        if (k == 0) {
            start = AdditiveObservable::magnetization(n).stack();
        } else if (k == 1) {
            start = AdditiveObservable::staggered(n).stack();
        } else if (k == 2 && cov_start) {
            start = *cov_start;
        } else {
            auto rng = restart_rng(cfg.seed, k);
            start = random_unit_stack(n, rng);
        }
        return RestartOutcome{projected_ascent(f, start, cfg), k};
    });
    return finish_q(objective.state(), best_of(std::move(outcomes)));
}

Optimum maximize_c_from(const MixedState &s, const AdditiveObservable &start, const OptimizerConfig &cfg) {
    cfg.validate();
    if (start.n_sites() != s.n_sites()) {
        throw std::invalid_argument("maximize_c_from: observable and state sizes differ");
    }
    const QObjective objective(s);
    StackObjective f = [&objective](const RealVector &c, RealVector *grad) {
        auto e = objective.evaluate(c, grad != nullptr);
        if (grad) {
            *grad = std::move(e.gradient);
        }
        return e.value;
    };
    return finish_q(objective.state(), RestartOutcome{projected_ascent(f, start.stack(), cfg), 0});
}

}  // namespace macroent
