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

#include "macroent/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "macroent/optimizer.h"

namespace macroent::oracle {

namespace {

constexpr Complex kI{0.0, 1.0};

ComplexMatrix identity_matrix(Eigen::Index d) {
    return ComplexMatrix::Identity(d, d);
}

ComplexMatrix kron(const ComplexMatrix &x, const ComplexMatrix &y) {
    ComplexMatrix out(x.rows() * y.rows(), x.cols() * y.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        }
    }
    return out;
}

// Basis order (down, up); sigma_z |up> = +|up>.
ComplexMatrix pauli(int axis) {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    if (axis == 0) {
        m(0, 1) = 1;
        m(1, 0) = 1;
    } else if (axis == 1) {
        m(0, 1) = kI;
        m(1, 0) = -kI;
    } else {
        m(0, 0) = -1;
        m(1, 1) = 1;
    }
    return m;
}

void require_small(int n) {
    if (n > kReferenceMaxSites) {
        throw CapacityError("oracle reference limited to N <= " + std::to_string(kReferenceMaxSites));
    }
}

// Modified Gram-Schmidt on Gaussian columns; full rank with probability one.
ComplexMatrix random_orthonormal(Eigen::Index dim, Eigen::Index rank, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    ComplexMatrix q(dim, rank);
    for (Eigen::Index j = 0; j < rank; ++j) {
        ComplexVector v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            v[i] = Complex(g(rng), g(rng));
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index k = 0; k < j; ++k) {
                Complex overlap = 0;
                for (Eigen::Index i = 0; i < dim; ++i) {
                    overlap += std::conj(q(i, k)) * v[i];
                }
                for (Eigen::Index i = 0; i < dim; ++i) {
                    v[i] -= overlap * q(i, k);
                }
            }
        }
        double norm = 0;
        for (Eigen::Index i = 0; i < dim; ++i) {
            norm += std::norm(v[i]);
        }
        q.col(j) = v / std::sqrt(norm);
    }
    return q;
}

double trace_product_real(const ComplexMatrix &k, const ComplexMatrix &q) {
    double total = 0;
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        for (Eigen::Index r = 0; r < k.rows(); ++r) {
            Complex kq = 0;
            for (Eigen::Index c = 0; c < k.cols(); ++c) {
                kq += k(r, c) * q(c, j);
            }
            total += std::real(std::conj(q(r, j)) * kq);
        }
    }
    return total;
}

ComplexMatrix random_hermitian(Eigen::Index dim, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    ComplexMatrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            m(i, j) = Complex(g(rng), g(rng));
        }
    }
    return (m + m.adjoint()) / 2.0;
}

double relative(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

OracleReport make_report(std::string name, double max_deviation, double tolerance, int trials, double max_value) {
    OracleReport r;
    r.name = std::move(name);
    r.max_deviation = max_deviation;
    r.tolerance = tolerance;
    r.trials = trials;
    r.passed = max_deviation <= tolerance;
    r.max_value = max_value;
    return r;
}

EigenDecomposition jacobi_eigh(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("jacobi_eigh: matrix must be square");
    }
    const Eigen::Index n = m.rows();
    ComplexMatrix a = (m + m.adjoint()) / 2.0;
    ComplexMatrix v = identity_matrix(n);
    double scale = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            scale += std::norm(a(i, j));
        }
    }
    scale = std::sqrt(scale);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                off += std::norm(a(p, q));
            }
        }
        if (std::sqrt(off) <= 1e-15 * scale || scale == 0) {
            break;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                double mag = std::abs(a(p, q));
                if (mag == 0) {
                    continue;
                }
                Complex phase = std::conj(a(p, q)) / mag;  // e^{-i phi}
                double theta = 0.5 * std::atan2(2 * mag, std::real(a(q, q)) - std::real(a(p, p)));
                double c = std::cos(theta);
                double s = std::sin(theta);
                for (Eigen::Index k = 0; k < n; ++k) {
                    Complex akp = a(k, p);
                    Complex akq = a(k, q);
                    a(k, p) = c * akp - s * phase * akq;
                    a(k, q) = s * akp + c * phase * akq;
                    Complex vkp = v(k, p);
                    Complex vkq = v(k, q);
                    v(k, p) = c * vkp - s * phase * vkq;
                    v(k, q) = s * vkp + c * phase * vkq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    Complex apk = a(p, k);
                    Complex aqk = a(q, k);
                    a(p, k) = c * apk - s * std::conj(phase) * aqk;
                    a(q, k) = s * apk + c * std::conj(phase) * aqk;
                }
                a(p, q) = 0;
                a(q, p) = 0;
            }
        }
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        order[static_cast<std::size_t>(i)] = i;
    }
    std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return std::real(a(x, x)) < std::real(a(y, y));
    });
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.values[i] = std::real(a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]));
        out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
    }
    return out;
}

ComplexMatrix kron_observable(const AdditiveObservable &a) {
    const int n = a.n_sites();
    if (n > 12) {
        throw CapacityError("kron_observable limited to N <= 12");
    }
    const Eigen::Index dim = Eigen::Index{1} << n;
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    for (int l = 1; l <= n; ++l) {
        const auto &c = a.locals()[static_cast<std::size_t>(l - 1)];
        ComplexMatrix local = c[0] * pauli(0) + c[1] * pauli(1) + c[2] * pauli(2);
        // Site l is bit l-1, so it sits to the right of the higher sites.
        ComplexMatrix term = kron(identity_matrix(Eigen::Index{1} << (n - l)), kron(local, identity_matrix(Eigen::Index{1} << (l - 1))));
        total += term;
    }
    return total;
}

ComplexMatrix density_matrix(const MixedState &s) {
    if (s.is_dense()) {
        return s.as_dense().rho;
    }
    const auto &e = s.as_ensemble();
    const auto dim = static_cast<Eigen::Index>(s.dim());
    ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
    for (std::size_t k = 0; k < e.states.size(); ++k) {
        const ComplexVector &v = e.states[k].vector();
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                rho(i, j) += e.weights[k] * v[i] * std::conj(v[j]);
            }
        }
    }
    return rho;
}

ComplexMatrix dense_k(const ComplexMatrix &a, const ComplexMatrix &rho) {
    ComplexMatrix inner = a * rho - rho * a;
    return a * inner - inner * a;
}

double positive_eigenvalue_sum(const ComplexMatrix &k) {
    RealVector values = jacobi_eigh(k).values;
    double largest = values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
    double total = 0;
    for (double x : values) {
        if (x > 1e-10 * largest) {
            total += x;
        }
    }
    return total;
}

OracleReport random_projector_check(const ComplexMatrix &k, int trials, std::uint64_t seed, double tolerance) {
    const Eigen::Index dim = k.rows();
    if (dim > 256) {
        throw CapacityError("random_projector_check limited to dimension 256");
    }
    if (dim < 2 || trials < 1) {
        throw std::invalid_argument("random_projector_check: need dimension >= 2 and trials >= 1");
    }
    const double bound = positive_eigenvalue_sum(k);
    std::mt19937_64 rng(seed);
    double best = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        Eigen::Index rank = 1 + t % (dim / 2);
        best = std::max(best, trace_product_real(k, random_orthonormal(dim, rank, rng)));
    }
    return make_report("random_projector", std::max(0.0, best - bound), tolerance, trials, best);
}

double expansion_reference(const AdditiveObservable &a, const ProjectorSpec &eta, const MixedState &s) {
    require_small(s.n_sites());
    if (a.n_sites() != s.n_sites() || eta.dim() != s.dim()) {
        throw std::invalid_argument("expansion_reference: dimension mismatch");
    }
    EigenDecomposition ea = jacobi_eigh(kron_observable(a));
    ComplexMatrix rho = density_matrix(s);
    // rho and the eta vectors expressed in the A eigenbasis.
    ComplexMatrix rho_a = ea.vectors.adjoint() * rho * ea.vectors;
    ComplexMatrix u = ea.vectors.adjoint() * eta.basis();
    const Eigen::Index dim = rho.rows();
    Complex total = 0;
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        for (Eigen::Index nu = 0; nu < dim; ++nu) {
            for (Eigen::Index mu = 0; mu < dim; ++mu) {
                double gap = ea.values[nu] - ea.values[mu];
                total += gap * gap * std::conj(u(mu, j)) * rho_a(mu, nu) * u(nu, j);
            }
        }
    }
    return std::real(total);
}

TwoBranchValues two_branch_analytic(double amp1, double amp2, double a1, double a2) {
    if (std::abs(amp1 * amp1 + amp2 * amp2 - 1) > 1e-12) {
        throw std::invalid_argument("two_branch_analytic: amplitudes must satisfy amp1^2 + amp2^2 = 1");
    }
    double p1 = amp1 * amp1;
    double p2 = amp2 * amp2;
    double mean = p1 * a1 + p2 * a2;
    double second = p1 * a1 * a1 + p2 * a2 * a2;
    TwoBranchValues out;
    out.var = second - mean * mean;
    out.lambda_max = (a1 - a2) * (a1 - a2) * std::abs(amp1 * amp2);
    return out;
}

GridSearchResult grid_search_a(const MixedState &s, int grid_per_axis) {
    const int n = s.n_sites();
    require_small(n);
    if (grid_per_axis < 2 || grid_per_axis > kGridMaxPerAxis) {
        throw std::invalid_argument("grid_search_a: grid_per_axis must lie in [2, 9]");
    }
    const int g = grid_per_axis;
    std::vector<SiteCoeffs> dirs;
    dirs.push_back({0, 0, 1});
    dirs.push_back({0, 0, -1});
    for (int i = 1; i < g - 1; ++i) {
        double theta = std::numbers::pi * i / (g - 1);
        for (int j = 0; j < g; ++j) {
            double phi = 2 * std::numbers::pi * j / g;
            dirs.push_back({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});
        }
    }
    ComplexMatrix rho = density_matrix(s);
    std::vector<std::vector<ComplexMatrix>> site_ops(static_cast<std::size_t>(n));
    for (int l = 1; l <= n; ++l) {
        for (const auto &d : dirs) {
            std::vector<SiteCoeffs> locals(static_cast<std::size_t>(n), SiteCoeffs{0, 0, 0});
            locals[static_cast<std::size_t>(l - 1)] = d;
            site_ops[static_cast<std::size_t>(l - 1)].push_back(kron_observable(AdditiveObservable(n, locals)));
        }
    }
    GridSearchResult best;
    best.best_value = -1;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        ComplexMatrix a = site_ops[0][idx[0]];
        for (int l = 1; l < n; ++l) {
            a += site_ops[static_cast<std::size_t>(l)][idx[static_cast<std::size_t>(l)]];
        }
        double value = positive_eigenvalue_sum(dense_k(a, rho));
        ++best.evaluations;
        if (value > best.best_value) {
            best.best_value = value;
            best.best_stack.resize(3 * n);
            for (int l = 0; l < n; ++l) {
                for (int alpha = 0; alpha < 3; ++alpha) {
                    best.best_stack[3 * l + alpha] = dirs[idx[static_cast<std::size_t>(l)]][static_cast<std::size_t>(alpha)];
                }
            }
        }
        int l = 0;
        while (l < n && ++idx[static_cast<std::size_t>(l)] == dirs.size()) {
            idx[static_cast<std::size_t>(l)] = 0;
            ++l;
        }
        if (l == n) {
            break;
        }
    }
    return best;
}

std::vector<OracleReport> run_oracle_suite() {
    std::vector<OracleReport> reports;

    {
        std::mt19937_64 rng(7);
        ComplexMatrix m = random_hermitian(8, rng);
        RealVector got = hermitian_eigenvalues(m);
        RealVector want = jacobi_eigh(m).values;
        reports.push_back(make_report("eigenvalues_vs_jacobi", (got - want).cwiseAbs().maxCoeff(), 1e-9, 1));
    }
    {
        double dev = 0;
        std::mt19937_64 rng(3);
        for (int t = 0; t < 10; ++t) {
            auto a = AdditiveObservable::random(3, rng);
            ComplexMatrix want = kron_observable(a);
            dev = std::max(dev, (dense_matrix(a) - want).cwiseAbs().maxCoeff());
            auto v = make_random_pure(3, 100 + static_cast<std::uint64_t>(t)).vector();
            dev = std::max(dev, (macroent::apply(a, v) - want * v).cwiseAbs().maxCoeff());
        }
        reports.push_back(make_report("apply_vs_kronecker", dev, 1e-12, 10));
    }
    {
        ComplexMatrix d = ComplexMatrix::Zero(3, 3);
        d(0, 0) = 3;
        d(1, 1) = -1;
        d(2, 2) = -2;
        auto r = random_projector_check(d, 200, 1, 1e-12);
        r.name = "random_projector_diagonal";
        reports.push_back(r);

        auto mz = AdditiveObservable::magnetization(3);
        auto rc = random_projector_check(dense_k(kron_observable(mz), density_matrix(make_cat(3))), 200, 2);
        rc.name = "random_projector_cat3";
        rc.max_deviation = std::max(rc.max_deviation, std::max(0.0, rc.max_value - 18.0));
        rc.passed = rc.max_deviation <= rc.tolerance;
        reports.push_back(rc);
    }
    {
        double dev = 0;
        int trials = 0;
        for (int n = 2; n <= 4; ++n) {
            for (std::uint64_t seed = 0; seed < 20; ++seed) {
                MixedState s = seed % 2 ? MixedState(make_random_pure(n, seed)) : make_random_ensemble(n, 2, seed);
                std::mt19937_64 rng(seed + 1000);
                auto a = AdditiveObservable::random(n, rng);
                ComplexMatrix k = dense_k(kron_observable(a), density_matrix(s));
                double want = positive_eigenvalue_sum(k);
                dev = std::max(dev, relative(eta_optimal(a, s).value, want));
                auto r = random_projector_check(k, 100, seed);
                dev = std::max(dev, r.max_deviation);
                ++trials;
            }
        }
        reports.push_back(make_report("eta_optimal_vs_dense", dev, 1e-9, trials));
    }
    {
        double dev = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            int n = 2 + static_cast<int>(seed % 2);
            MixedState s = make_random_ensemble(n, 2, seed + 23);
            std::mt19937_64 rng(seed + 23);
            auto a = AdditiveObservable::random(n, rng);
            auto eta = ProjectorSpec(random_orthonormal(static_cast<Eigen::Index>(s.dim()), 1 + static_cast<Eigen::Index>(seed % 3), rng));
            double want = expansion_reference(a, eta, s);
            dev = std::max(dev, std::abs(c_expectation(a, eta, s) - want));
            dev = std::max(dev, std::abs(local_decomposition_expectation(a, eta, s) - want));
        }
        reports.push_back(make_report("expansion_and_local_decomposition", dev, 1e-8, 20));
    }
    {
        double dev = 0;
        int trials = 0;
        for (int n = 2; n <= 10; ++n) {
            auto mz = AdditiveObservable::magnetization(n);
            auto cat = two_branch_analytic(std::sqrt(0.5), std::sqrt(0.5), -n, n);
            dev = std::max(dev, relative(eta_optimal(mz, make_cat(n)).value, cat.lambda_max));
            dev = std::max(dev, relative(variance(mz, make_cat(n)), cat.var));
            auto psi1 = two_branch_analytic(std::sqrt(1 - 1.0 / n), std::sqrt(1.0 / n), -n, n);
            dev = std::max(dev, relative(eta_optimal(mz, make_psi1(n)).value, psi1.lambda_max));
            trials += 2;
        }
        reports.push_back(make_report("two_branch_vs_eta_optimal", dev, 1e-9, trials));
    }
    {
        auto mz = AdditiveObservable::magnetization(8);
        PureState s = make_psi2(8);
        double want = positive_eigenvalue_sum(dense_k(kron_observable(mz), density_matrix(s)));
        reports.push_back(make_report("psi2_8_vs_dense", relative(eta_optimal(mz, s).value, want), 1e-9, 1));
    }
    {
        OptimizerConfig cfg;
        cfg.restarts = 8;
        double dev = 0;
        int trials = 0;
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            MixedState s = seed == 0 ? MixedState(make_cat(2)) : make_random_ensemble(2, 2, seed + 2);
            cfg.seed = seed;
            double grid = grid_search_a(s, 7).best_value;
            double opt = maximize_c(s, cfg).value;
            dev = std::max(dev, grid - opt);
            ++trials;
        }
        reports.push_back(make_report("optimizer_vs_grid", std::max(0.0, dev), 1e-6, trials));
    }
    return reports;
}

}  // namespace macroent::oracle
