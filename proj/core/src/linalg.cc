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

#include "macroent/linalg.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace macroent {

NonHermitianError::NonHermitianError(double asymmetry, double scale)
    : std::invalid_argument(
          "matrix is not Hermitian: relative asymmetry " + std::to_string(asymmetry) + " exceeds " +
          std::to_string(scale)),
      asymmetry_(asymmetry) {
}

bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

int log2_exact(std::size_t n) {
    if (!is_power_of_two(n)) {
        throw std::invalid_argument("length " + std::to_string(n) + " is not a power of two");
    }
    int k = 0;
    while ((std::size_t{1} << k) < n) {
        ++k;
    }
    return k;
}

double relative_asymmetry(const ComplexMatrix &m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("matrix is not square");
    }
    double scale = m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
    if (scale == 0) {
        return 0;
    }
    double worst = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i <= j; ++i) {
            worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
        }
    }
    return worst / scale;
}

namespace {

void require_hermitian(const ComplexMatrix &m, double tol) {
    double asym = relative_asymmetry(m);
    if (asym > tol) {
        throw NonHermitianError(asym, tol);
    }
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix &m, double symmetry_tol) {
    require_hermitian(m, symmetry_tol);
    if (m.size() == 0) {
        return {};
    }
    ComplexMatrix sym = (m + m.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eig: eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector hermitian_eigenvalues(const ComplexMatrix &m, double symmetry_tol) {
    require_hermitian(m, symmetry_tol);
    if (m.size() == 0) {
        return {};
    }
    bool real = m.imag().cwiseAbs().maxCoeff() == 0.0;
    if (real) {
        RealMatrix r = m.real();
        return symmetric_eigenvalues(r, symmetry_tol);
    }
    ComplexMatrix sym = (m + m.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eigenvalues: eigensolver did not converge");
    }
    return solver.eigenvalues();
}

RealVector symmetric_eigenvalues(const RealMatrix &m, double symmetry_tol) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("matrix is not square");
    }
    if (m.size() == 0) {
        return {};
    }
    double scale = m.cwiseAbs().maxCoeff();
    double asym = scale == 0 ? 0 : (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
    if (asym > symmetry_tol) {
        throw NonHermitianError(asym, symmetry_tol);
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symmetric_eigenvalues: eigensolver did not converge");
    }
    return solver.eigenvalues();
}

ComplexMatrix orthonormalize_columns(const ComplexMatrix &columns, double tol) {
    if (!(tol > 0)) {
        throw std::invalid_argument("orthonormalize: tol must be positive");
    }
    ComplexMatrix out(columns.rows(), columns.cols());
    Eigen::Index kept = 0;
    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
        ComplexVector v = columns.col(c);
        double input_norm = v.norm();
        if (input_norm == 0) {
            continue;
        }
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index k = 0; k < kept; ++k) {
                v -= out.col(k) * out.col(k).dot(v);
            }
        }
        double residual = v.norm();
        if (residual < tol * input_norm) {
            continue;
        }
        out.col(kept++) = v / residual;
    }
    out.conservativeResize(Eigen::NoChange, kept);
    return out;
}

std::vector<ComplexVector> orthonormalize(const std::vector<ComplexVector> &vs, double tol) {
    if (vs.empty()) {
        return {};
    }
    ComplexMatrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
    for (std::size_t k = 0; k < vs.size(); ++k) {
        if (vs[k].size() != m.rows()) {
            throw std::invalid_argument("orthonormalize: vectors have different lengths");
        }
        m.col(static_cast<Eigen::Index>(k)) = vs[k];
    }
    ComplexMatrix q = orthonormalize_columns(m, tol);
    std::vector<ComplexVector> out;
    out.reserve(static_cast<std::size_t>(q.cols()));
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        out.emplace_back(q.col(k));
    }
    return out;
}

ComplexMatrix project_into_subspace(const ComplexMatrix &m, const ComplexMatrix &basis) {
    if (m.rows() != m.cols() || basis.rows() != m.rows()) {
        throw std::invalid_argument("project_into_subspace: dimension mismatch");
    }
    ComplexMatrix b = basis.adjoint() * (m * basis);
    return (b + b.adjoint()) * 0.5;
}

ComplexMatrix project_into_subspace(const ComplexMatrix &m, const std::vector<ComplexVector> &basis) {
    ComplexMatrix q(m.rows(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        q.col(static_cast<Eigen::Index>(k)) = basis[k];
    }
    return project_into_subspace(m, q);
}

double orthonormality_error(const ComplexMatrix &columns) {
    if (columns.cols() == 0) {
        return 0;
    }
    ComplexMatrix gram = columns.adjoint() * columns;
    gram -= ComplexMatrix::Identity(gram.rows(), gram.cols());
    return gram.cwiseAbs().maxCoeff();
}

double zero_threshold(const RealVector &eigenvalues, double absolute_floor, double tol) {
    double largest = eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
    return std::max(tol * largest, absolute_floor);
}

HermitianOperator::HermitianOperator(bool factored, std::size_t full_dim, ComplexMatrix basis, ComplexMatrix block)
    : factored_(factored), full_dim_(full_dim), basis_(std::move(basis)), block_(std::move(block)) {
}

HermitianOperator HermitianOperator::dense(ComplexMatrix m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("HermitianOperator: matrix is not square");
    }
    auto dim = static_cast<std::size_t>(m.rows());
    if (dim > kDenseDimCap) {
        throw CapacityError(
            "dense operator of dimension " + std::to_string(dim) + " exceeds the dense cap " +
            std::to_string(kDenseDimCap));
    }
    require_hermitian(m, kSymmetryTol);
    return HermitianOperator(false, dim, ComplexMatrix(), std::move(m));
}

HermitianOperator HermitianOperator::factored(ComplexMatrix basis, ComplexMatrix block, std::size_t full_dim) {
    if (basis.cols() != block.rows() || block.rows() != block.cols() ||
        static_cast<std::size_t>(basis.rows()) != full_dim) {
        throw std::invalid_argument("HermitianOperator: factored shapes are inconsistent");
    }
    require_hermitian(block, kSymmetryTol);
    if (orthonormality_error(basis) > kSymmetryTol) {
        throw std::invalid_argument("HermitianOperator: factored basis is not orthonormal");
    }
    return HermitianOperator(true, full_dim, std::move(basis), std::move(block));
}

HermitianOperator HermitianOperator::zero(std::size_t full_dim) {
    return HermitianOperator(true, full_dim, ComplexMatrix(static_cast<Eigen::Index>(full_dim), 0), ComplexMatrix(0, 0));
}

EigenDecomposition HermitianOperator::eig() const {
    EigenDecomposition e = hermitian_eig(block_);
    if (factored_) {
        e.vectors = basis_ * e.vectors;
    }
    return e;
}

ComplexMatrix HermitianOperator::to_dense() const {
    if (!factored_) {
        return block_;
    }
    if (full_dim_ > kDenseDimCap) {
        throw CapacityError("to_dense: dimension " + std::to_string(full_dim_) + " exceeds the dense cap");
    }
    return basis_ * block_ * basis_.adjoint();
}

double HermitianOperator::quadratic_form(const ComplexVector &v) const {
    if (factored_) {
        ComplexVector c = basis_.adjoint() * v;
        return c.dot(block_ * c).real();
    }
    return v.dot(block_ * v).real();
}

}  // namespace macroent
