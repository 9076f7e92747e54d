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

#include "macroent/correlation.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace macroent {

namespace {

constexpr double kProjectorTol = 1e-10;
// Residual cutoff when building span{psi, A psi, A^2 psi}.
constexpr double kKrylovDropTol = 1e-10;

void require_sites_match(const AdditiveObservable &a, int n_sites) {
    if (a.n_sites() != n_sites) {
        throw std::invalid_argument(
            "observable has " + std::to_string(a.n_sites()) + " sites but the state has " + std::to_string(n_sites));
    }
}

std::uint64_t all_ones(int n) {
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

}  // namespace

ProjectorSpec::ProjectorSpec(ComplexMatrix basis) : basis_(std::move(basis)) {
    double err = orthonormality_error(basis_);
    if (err > kProjectorTol) {
        throw std::invalid_argument("ProjectorSpec: basis is not orthonormal (error " + std::to_string(err) + ")");
    }
}

ProjectorSpec ProjectorSpec::from_vectors(const std::vector<ComplexVector> &vs) {
    if (vs.empty()) {
        return ProjectorSpec(ComplexMatrix(0, 0));
    }
    ComplexMatrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
    for (std::size_t k = 0; k < vs.size(); ++k) {
        m.col(static_cast<Eigen::Index>(k)) = vs[k];
    }
    return ProjectorSpec(std::move(m));
}

ProjectorSpec ProjectorSpec::onto(const ComplexVector &v) {
    ComplexMatrix m = v / v.norm();
    return ProjectorSpec(std::move(m));
}

ProjectorSpec ProjectorSpec::identity(std::size_t dim) {
    auto d = static_cast<Eigen::Index>(dim);
    return ProjectorSpec(ComplexMatrix::Identity(d, d));
}

HermitianOperator build_k(const AdditiveObservable &a, const MixedState &s) {
    require_sites_match(a, s.n_sites());
    const std::size_t dim = s.dim();
    if (s.is_maximally_mixed()) {
        return HermitianOperator::zero(dim);
    }
    if (s.is_dense()) {
        const ComplexMatrix &rho = s.as_dense().rho;
        ComplexMatrix x = apply_columns(a, rho);                 // A rho
        ComplexMatrix ax = apply_columns(a, x);                  // A^2 rho
        ComplexMatrix axd = apply_columns(a, x.adjoint());       // A rho A
        ComplexMatrix k = ax + ax.adjoint() - 2.0 * axd;
        k = (k + k.adjoint()).eval() * 0.5;
        return HermitianOperator::dense(std::move(k));
    }
    const auto &e = s.as_ensemble();
    const auto r = static_cast<Eigen::Index>(e.states.size());
    const auto d = static_cast<Eigen::Index>(dim);
    if (3 * r > 256) {
        throw CapacityError("build_k: ensemble rank " + std::to_string(r) + " exceeds the factored cap (3 x rank <= 256)");
    }
    ComplexMatrix psi(d, r), apsi(d, r), a2psi(d, r);
    for (Eigen::Index k = 0; k < r; ++k) {
        psi.col(k) = e.states[static_cast<std::size_t>(k)].vector();
        apsi.col(k) = macroent::apply(a, psi.col(k));
        a2psi.col(k) = macroent::apply(a, apsi.col(k));
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
    return HermitianOperator::factored(std::move(q), std::move(block), dim);
}

double c_expectation(const AdditiveObservable &a, const ProjectorSpec &eta, const MixedState &s) {
    require_sites_match(a, s.n_sites());
    if (eta.rank() == 0 || s.is_maximally_mixed()) {
        return 0;
    }
    if (eta.dim() != s.dim()) {
        throw std::invalid_argument("c_expectation: projector dimension does not match the state");
    }
    // <phi|K|phi> = 2 Re <A^2 phi|rho|phi> - 2 <A phi|rho|A phi>.
    double total = 0;
    for (Eigen::Index j = 0; j < eta.basis().cols(); ++j) {
        ComplexVector phi = eta.basis().col(j);
        ComplexVector aphi = macroent::apply(a, phi);
        ComplexVector a2phi = macroent::apply(a, aphi);
        if (s.is_dense()) {
            const auto &rho = s.as_dense().rho;
            total += 2 * a2phi.dot(rho * phi).real() - 2 * aphi.dot(rho * aphi).real();
            continue;
        }
        const auto &e = s.as_ensemble();
        for (std::size_t k = 0; k < e.states.size(); ++k) {
            const auto &psi = e.states[k].vector();
            Complex p_phi = psi.dot(phi);
            Complex p_a2phi = psi.dot(a2phi);
            Complex p_aphi = psi.dot(aphi);
            total += e.weights[k] * (2 * (std::conj(p_a2phi) * p_phi).real() - 2 * std::norm(p_aphi));
        }
    }
    return total;
}

double k_zero_threshold(const RealVector &eigenvalues, double norm_bound) {
    double scale = std::max(1.0, norm_bound);
    return zero_threshold(eigenvalues, 1e-12 * scale * scale);
}

CorrelationResult eta_optimal(const AdditiveObservable &a, const HermitianOperator &k) {
    EigenDecomposition e = k.eig();
    CorrelationResult out;
    double thr = k_zero_threshold(e.values, a.norm_bound());
    std::vector<Eigen::Index> positive;
    for (Eigen::Index i = 0; i < e.values.size(); ++i) {
        if (std::abs(e.values[i]) > thr) {
            out.k_spectrum.push_back(e.values[i]);
        }
        if (e.values[i] > thr) {
            positive.push_back(i);
            out.value += e.values[i];
        }
    }
    ComplexMatrix basis(static_cast<Eigen::Index>(k.full_dim()), static_cast<Eigen::Index>(positive.size()));
    for (std::size_t j = 0; j < positive.size(); ++j) {
        basis.col(static_cast<Eigen::Index>(j)) = e.vectors.col(positive[j]);
    }
    out.optimal_eta = ProjectorSpec(std::move(basis));
    return out;
}

CorrelationResult eta_optimal(const AdditiveObservable &a, const MixedState &s) {
    return eta_optimal(a, build_k(a, s));
}

ProjectorSpec component_projector(const MixedState &ensemble) {
    const auto &e = ensemble.as_ensemble();
    std::vector<ComplexVector> vs;
    for (const auto &st : e.states) {
        vs.push_back(st.vector());
    }
    return ProjectorSpec::from_vectors(orthonormalize(vs, kKrylovDropTol));
}

PureMaxEta pure_max_eta(const AdditiveObservable &a, const PureState &s) {
    require_sites_match(a, s.n_sites());
    const ComplexVector &q0 = s.vector();
    const double scale = std::max(1.0, a.norm_bound());
    const double tiny = 1e-12 * scale;

    ComplexVector w = macroent::apply(a, q0);
    const double alpha0 = q0.dot(w).real();
    ComplexVector r = w - alpha0 * q0;
    const double beta1 = r.norm();
    if (beta1 <= tiny) {
        return {0.0, q0};
    }
    ComplexVector q1 = r / beta1;
    w = macroent::apply(a, q1);
    const double alpha1 = q1.dot(w).real();
    r = w - alpha1 * q1 - beta1 * q0;
    // Re-orthogonalize once; the recurrence alone loses orthogonality in one step at large N.
    r -= q0 * q0.dot(r);
    r -= q1 * q1.dot(r);
    double beta2 = r.norm();
    ComplexVector q2 = ComplexVector::Zero(q0.size());
    if (beta2 > tiny) {
        q2 = r / beta2;
    } else {
        beta2 = 0;
    }

    // K in the Lanczos frame (A shifted by alpha0, which leaves K unchanged).
    const double delta = alpha1 - alpha0;
    Eigen::Matrix3d k;
    k << 2 * beta1, delta, beta2,
         delta, -2 * beta1, 0,
         beta2, 0, 0;
    k *= beta1;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(k);
    const double top = solver.eigenvalues()[2];
    Eigen::Vector3d v = solver.eigenvectors().col(2);
    ComplexVector phi = v[0] * q0 + v[1] * q1 + v[2] * q2;
    phi /= phi.norm();
    return {std::max(0.0, top), phi};
}

CauchySchwarzBound cauchy_schwarz_bound(const AdditiveObservable &a, const PureState &s) {
    PureMaxEta top = pure_max_eta(a, s);
    CauchySchwarzBound out;
    out.lhs = top.value;
    out.variance_psi = variance(a, s);
    out.variance_phi = variance(a, PureState::normalized(s.n_sites(), top.eigvec));
    out.rhs = 2 * std::sqrt(out.variance_phi * out.variance_psi);
    return out;
}

SufficientConditionReport check_sufficient_condition(
    const MixedState &ensemble, const AdditiveObservable &a, double threshold_exponent) {
    if (!ensemble.is_ensemble()) {
        throw std::invalid_argument("check_sufficient_condition: needs an ensemble; the conditions refer to its components");
    }
    require_sites_match(a, ensemble.n_sites());
    const auto &e = ensemble.as_ensemble();
    const std::size_t r = e.states.size();
    const double n = ensemble.n_sites();
    SufficientConditionReport rep;
    rep.variance_threshold = std::pow(n, threshold_exponent);
    const double offdiag_tol = kProjectorTol * std::max(1.0, a.norm_bound());

    std::vector<ComplexVector> applied;
    applied.reserve(r);
    for (const auto &st : e.states) {
        applied.push_back(macroent::apply(a, st.vector()));
    }
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = i; j < r; ++j) {
            Complex overlap = e.states[i].vector().dot(e.states[j].vector());
            double err = std::abs(overlap - (i == j ? 1.0 : 0.0));
            if (err > rep.max_overlap_error) {
                rep.max_overlap_error = err;
            }
            if (err > kProjectorTol && !rep.first_overlap_violation) {
                rep.first_overlap_violation = {static_cast<int>(i + 1), static_cast<int>(j + 1)};
            }
            if (i != j) {
                double off = std::abs(e.states[i].vector().dot(applied[j]));
                rep.max_offdiagonal = std::max(rep.max_offdiagonal, off);
                if (off > offdiag_tol && !rep.first_offdiagonal_violation) {
                    rep.first_offdiagonal_violation = {static_cast<int>(i + 1), static_cast<int>(j + 1)};
                }
            }
        }
    }
    rep.orthonormal = rep.max_overlap_error <= kProjectorTol;
    rep.offdiagonal_vanishes = rep.max_offdiagonal <= offdiag_tol;

    for (std::size_t k = 0; k < r; ++k) {
        double var = variance(a, e.states[k]);
        bool macro = var >= rep.variance_threshold;
        rep.variances.push_back(var);
        rep.macroscopic.push_back(macro);
        if (macro) {
            ++rep.macroscopic_count;
            rep.macroscopic_weight += e.weights[k];
        }
    }
    rep.sufficient = rep.orthonormal && rep.offdiagonal_vanishes && rep.macroscopic_weight > 0;
    return rep;
}

namespace {

MerminReport mermin_from_coherence(int n, double coherence_modulus) {
    MerminReport m;
    m.raw = std::ldexp(coherence_modulus, n);
    m.lhv_bound = std::pow(2.0, (n - 1) / 2.0);
    m.ratio = m.raw / m.lhv_bound;
    m.even_n = n % 2 == 0;
    return m;
}

}  // namespace

MerminReport mermin_score(const MixedState &s) {
    // prod_l (sigma_x + i sigma_y)(l) = 2^N |up..up><down..down|, so the trace picks <down..down|rho|up..up>.
    const auto last = static_cast<Eigen::Index>(s.dim() - 1);
    Complex coherence = 0;
    if (s.is_maximally_mixed()) {
        coherence = 0;
    } else if (s.is_dense()) {
        coherence = s.as_dense().rho(0, last);
    } else {
        const auto &e = s.as_ensemble();
        for (std::size_t k = 0; k < e.states.size(); ++k) {
            const auto &v = e.states[k].vector();
            coherence += e.weights[k] * v[0] * std::conj(v[last]);
        }
    }
    return mermin_from_coherence(s.n_sites(), std::abs(coherence));
}

MerminReport mermin_score(const TwoBranchState &s) {
    const std::uint64_t top = all_ones(s.n_sites);
    bool extremes = (s.index1 == 0 && s.index2 == top) || (s.index2 == 0 && s.index1 == top);
    return mermin_from_coherence(s.n_sites, extremes ? std::abs(s.amp1 * s.amp2) : 0.0);
}

namespace {

AdditiveObservable half_sum(int n, bool first_half, SiteCoeffs c) {
    std::vector<SiteCoeffs> locals(static_cast<std::size_t>(n), SiteCoeffs{0, 0, 0});
    for (int l = 0; l < n; ++l) {
        if ((l < n / 2) == first_half) {
            locals[static_cast<std::size_t>(l)] = c;
        }
    }
    return AdditiveObservable(n, std::move(locals));
}

void require_even(int n) {
    if (n < 2 || n % 2 != 0) {
        throw std::invalid_argument("macroscopic CHSH needs an even number of sites, got " + std::to_string(n));
    }
}

void require_support(const AdditiveObservable &o, bool first_half, const char *name) {
    const int n = o.n_sites();
    for (int l = 0; l < n; ++l) {
        bool in_first = l < n / 2;
        const auto &c = o.locals()[static_cast<std::size_t>(l)];
        if (in_first != first_half && (c[0] != 0 || c[1] != 0 || c[2] != 0)) {
            throw std::invalid_argument(std::string("macro CHSH: ") + name + " has support on the wrong half");
        }
    }
}

}  // namespace

ChshChoice canonical_chsh_choice(int n) {
    require_even(n);
    const double h = std::numbers::sqrt2 / 2;
    return {half_sum(n, true, {1, 0, 0}), half_sum(n, true, {0, 0, 1}), half_sum(n, false, {h, 0, h}),
            half_sum(n, false, {h, 0, -h})};
}

ChshChoice commuting_chsh_choice(int n) {
    require_even(n);
    return {half_sum(n, true, {0, 0, 1}), half_sum(n, true, {0, 0, 1}), half_sum(n, false, {0, 0, 1}),
            half_sum(n, false, {0, 0, 1})};
}

double macro_chsh_lambda_max(int n, const ChshChoice &choice) {
    require_even(n);
    for (const auto *o : {&choice.a, &choice.a_prime, &choice.b, &choice.b_prime}) {
        if (o->n_sites() != n) {
            throw std::invalid_argument("macro CHSH: observable site count differs from n");
        }
    }
    require_support(choice.a, true, "A");
    require_support(choice.a_prime, true, "A'");
    require_support(choice.b, false, "B");
    require_support(choice.b_prime, false, "B'");
    const std::size_t dim = std::size_t{1} << n;
    if (dim > kDenseDimCap) {
        throw CapacityError("macro CHSH: N = " + std::to_string(n) + " exceeds the dense cap of 12");
    }
    const double half = n / 2.0;
    auto scale = [&](const AdditiveObservable &o) {
        double b = o.norm_bound();
        if (b == 0) {
            throw std::invalid_argument("macro CHSH: observable is identically zero");
        }
        return half / b;
    };
    const double sa = scale(choice.a), sap = scale(choice.a_prime), sb = scale(choice.b), sbp = scale(choice.b_prime);
    const double norm = 1.0 / (half * half);

    // C = A (B - B') + A' (B + B'); A-type and B-type factors act on disjoint halves.
    const auto d = static_cast<Eigen::Index>(dim);
    ComplexMatrix c(d, d);
    ComplexVector e = ComplexVector::Zero(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        e.setZero();
        e[k] = 1;
        ComplexVector bv = sb * macroent::apply(choice.b, e);
        ComplexVector bpv = sbp * macroent::apply(choice.b_prime, e);
        ComplexVector col = sa * macroent::apply(choice.a, bv - bpv) + sap * macroent::apply(choice.a_prime, bv + bpv);
        c.col(k) = norm * col;
    }
    c = (c + c.adjoint()).eval() * 0.5;
    RealVector ev = hermitian_eigenvalues(c);
    return ev[ev.size() - 1];
}

double local_decomposition_expectation(const AdditiveObservable &a, const ProjectorSpec &eta, const MixedState &s) {
    require_sites_match(a, s.n_sites());
    const int n = s.n_sites();
    if (n > kLocalDecompositionMaxSites) {
        throw CapacityError(
            "local decomposition: N = " + std::to_string(n) + " exceeds the cap of " +
            std::to_string(kLocalDecompositionMaxSites) + " sites");
    }
    if (eta.dim() != s.dim()) {
        throw std::invalid_argument("local decomposition: projector dimension does not match the state");
    }
    const std::size_t dim = s.dim();
    const ComplexMatrix rho = to_dense_matrix(s);

    // Local eigenbases |a_l mu_l>; column m of vecs[l] is the local eigenvector with label m.
    std::vector<Eigen::Matrix2cd> vecs(static_cast<std::size_t>(n));
    std::vector<Eigen::Vector2d> vals(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(local_matrix(a.locals()[static_cast<std::size_t>(l)]));
        vecs[static_cast<std::size_t>(l)] = es.eigenvectors();
        vals[static_cast<std::size_t>(l)] = es.eigenvalues();
    }
    auto bit = [](std::size_t x, int l) { return static_cast<int>((x >> l) & 1u); };

    // Product eigenvectors, indexed by label pattern; A eigenvalue per pattern.
    const auto d = static_cast<Eigen::Index>(dim);
    ComplexMatrix product(d, d);
    RealVector a_value(d);
    for (std::size_t k = 0; k < dim; ++k) {
        double total = 0;
        for (int l = 0; l < n; ++l) {
            total += vals[static_cast<std::size_t>(l)][bit(k, l)];
        }
        a_value[static_cast<Eigen::Index>(k)] = total;
        for (std::size_t i = 0; i < dim; ++i) {
            Complex amp = 1;
            for (int l = 0; l < n; ++l) {
                amp *= vecs[static_cast<std::size_t>(l)](bit(i, l), bit(k, l));
            }
            product(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = amp;
        }
    }
    // u(k, j) = <k|phi_j>.
    const ComplexMatrix u = product.adjoint() * eta.basis();

    constexpr Complex kI{0, 1};
    double total = 0;
    for (std::size_t k = 0; k < dim; ++k) {
        for (std::size_t kp = 0; kp < dim; ++kp) {
            const double gap = a_value[static_cast<Eigen::Index>(k)] - a_value[static_cast<Eigen::Index>(kp)];
            if (gap == 0) {
                continue;
            }
            // Coefficient of |k'><k| in C.
            Complex coeff = gap * gap * u.row(static_cast<Eigen::Index>(k)).dot(u.row(static_cast<Eigen::Index>(kp)));
            if (coeff == Complex(0)) {
                continue;
            }
            // |k'_l><k_l| = phi'_l + i phi''_l with both local operators Hermitian.
            std::vector<Eigen::Matrix2cd> re_part(static_cast<std::size_t>(n)), im_part(static_cast<std::size_t>(n));
            for (int l = 0; l < n; ++l) {
                Eigen::Vector2cd ket = vecs[static_cast<std::size_t>(l)].col(bit(kp, l));
                Eigen::Vector2cd bra = vecs[static_cast<std::size_t>(l)].col(bit(k, l));
                Eigen::Matrix2cd dyad = ket * bra.adjoint();
                re_part[static_cast<std::size_t>(l)] = (dyad + dyad.adjoint()) / 2.0;
                im_part[static_cast<std::size_t>(l)] = (dyad - dyad.adjoint()) / (2.0 * kI);
            }
            // Expand prod_l (phi'_l + i phi''_l) over subsets S taking phi'' on S.
            Complex expanded = 0;
            for (std::size_t subset = 0; subset < (std::size_t{1} << n); ++subset) {
                // Tr(rho O) with O = tensor product of local Hermitian factors.
                Complex tr = 0;
                for (std::size_t i = 0; i < dim; ++i) {
                    for (std::size_t ip = 0; ip < dim; ++ip) {
                        Complex elem = 1;
                        for (int l = 0; l < n; ++l) {
                            const auto &f = bit(subset, l) ? im_part[static_cast<std::size_t>(l)] : re_part[static_cast<std::size_t>(l)];
                            elem *= f(bit(i, l), bit(ip, l));
                        }
                        tr += elem * rho(static_cast<Eigen::Index>(ip), static_cast<Eigen::Index>(i));
                    }
                }
                // Products of Hermitian factors on distinct sites are Hermitian: Tr is real.
                static constexpr Complex kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
                Complex phase = kPhases[std::popcount(subset) % 4];
                expanded += phase * tr.real();
            }
            total += (coeff * expanded).real();
        }
    }
    return total;
}

TwoBranchState TwoBranchState::make(int n_sites, std::uint64_t index1, Complex amp1, std::uint64_t index2, Complex amp2) {
    if (n_sites < 1 || n_sites > 63) {
        throw std::invalid_argument("two-branch state: n_sites must be in 1..63");
    }
    const std::uint64_t top = all_ones(n_sites);
    if (index1 > top || index2 > top || (index1 ^ index2) != top) {
        throw std::invalid_argument("two-branch state: branches must differ at every site");
    }
    double norm2 = std::norm(amp1) + std::norm(amp2);
    if (std::abs(norm2 - 1) > 1e-12) {
        throw std::invalid_argument("two-branch state: amplitudes are not normalized");
    }
    return {n_sites, index1, index2, amp1, amp2};
}

TwoBranchState TwoBranchState::from_pure(const PureState &s) {
    const double cutoff = 1e-14;
    std::vector<std::uint64_t> support;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        if (std::abs(s[i]) > cutoff) {
            support.push_back(i);
            if (support.size() > 2) {
                break;
            }
        }
    }
    if (support.size() != 2) {
        throw std::invalid_argument("state is not a superposition of exactly two product branches");
    }
    Complex a1 = s[support[0]];
    Complex a2 = s[support[1]];
    double norm = std::sqrt(std::norm(a1) + std::norm(a2));
    return make(s.n_sites(), support[0], a1 / norm, support[1], a2 / norm);
}

TwoBranchState TwoBranchState::psi1(int n) {
    if (n < 2) {
        throw std::invalid_argument("psi1: need at least 2 sites");
    }
    return make(n, 0, std::sqrt(1.0 - 1.0 / n), all_ones(n), std::sqrt(1.0 / n));
}

TwoBranchState TwoBranchState::cat(int n) {
    const double h = std::numbers::sqrt2 / 2;
    return make(n, 0, h, all_ones(n), h);
}

PureState TwoBranchState::to_pure() const {
    if (n_sites > kMaxPureSites) {
        throw CapacityError("two-branch state: too many sites for a full amplitude vector");
    }
    ComplexVector v = ComplexVector::Zero(Eigen::Index{1} << n_sites);
    v[static_cast<Eigen::Index>(index1)] = amp1;
    v[static_cast<Eigen::Index>(index2)] = amp2;
    return PureState::normalized(n_sites, std::move(v));
}

ConversionResult single_site_conversion(const TwoBranchState &s, int site) {
    if (s.n_sites < 2) {
        throw std::invalid_argument("conversion: need at least 2 sites");
    }
    if (site < 1 || site > s.n_sites) {
        throw std::invalid_argument("conversion: site out of range");
    }
    const int bitpos = site - 1;
    auto drop_bit = [bitpos](std::uint64_t x) {
        std::uint64_t low = x & ((std::uint64_t{1} << bitpos) - 1);
        std::uint64_t high = x >> (bitpos + 1);
        return low | (high << bitpos);
    };
    const double m1 = std::abs(s.amp1);
    const double m2 = std::abs(s.amp2);
    ConversionResult out;
    out.site = site;
    // Outcome alpha|b1> + beta|b2> leaves branch weights alpha |amp1| and beta |amp2|.
    out.alpha = m2;
    out.beta = m1;
    out.success_prob = out.alpha * out.alpha * m1 * m1 + out.beta * out.beta * m2 * m2;
    if (out.success_prob == 0) {
        throw std::invalid_argument("conversion: one branch has zero amplitude");
    }
    const double norm = std::sqrt(out.success_prob);
    Complex p1 = out.alpha * s.amp1 / norm;
    Complex p2 = out.beta * s.amp2 / norm;
    double renorm = std::sqrt(std::norm(p1) + std::norm(p2));
    out.post_state = TwoBranchState::make(s.n_sites - 1, drop_bit(s.index1), p1 / renorm, drop_bit(s.index2), p2 / renorm);
    return out;
}

}  // namespace macroent
