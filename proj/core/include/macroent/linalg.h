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

#ifndef MACROENT_LINALG_H
#define MACROENT_LINALG_H

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace macroent {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Largest Hilbert-space dimension for which dense 2^N x 2^N matrices are built (N = 12).
inline constexpr std::size_t kDenseDimCap = 4096;

/// Default tolerances. All are scaled by the largest entry magnitude of the operand.
inline constexpr double kSymmetryTol = 1e-10;
inline constexpr double kOrthonormalTol = 1e-12;
inline constexpr double kZeroEigenvalueTol = 1e-10;

/// Raised when a requested computation exceeds a documented size cap.
class CapacityError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Raised by hermitian_eig when the input is not Hermitian. Carries the measured asymmetry.
class NonHermitianError : public std::invalid_argument {
   public:
    NonHermitianError(double asymmetry, double scale);
    double asymmetry() const { return asymmetry_; }

   private:
    double asymmetry_;
};

bool is_power_of_two(std::size_t n);
/// log2 of a power of two; throws std::invalid_argument otherwise.
int log2_exact(std::size_t n);

/// Eigenpairs of a Hermitian matrix. Eigenvalues ascending; eigenvectors are the columns.
struct EigenDecomposition {
    RealVector values;
    ComplexMatrix vectors;
};

/// max |m - m^dagger| divided by max |m_ij| (0 for the zero matrix).
double relative_asymmetry(const ComplexMatrix &m);

EigenDecomposition hermitian_eig(const ComplexMatrix &m, double symmetry_tol = kSymmetryTol);
RealVector hermitian_eigenvalues(const ComplexMatrix &m, double symmetry_tol = kSymmetryTol);
/// Real symmetric fast path; roughly 4x cheaper than the complex solver at equal size.
RealVector symmetric_eigenvalues(const RealMatrix &m, double symmetry_tol = kSymmetryTol);

/// Gram-Schmidt (two passes) over the columns. Columns whose residual norm after
/// projection falls below `tol` times their input norm are dropped.
ComplexMatrix orthonormalize_columns(const ComplexMatrix &columns, double tol);
std::vector<ComplexVector> orthonormalize(const std::vector<ComplexVector> &vs, double tol);

/// B_jk = <basis_j| m |basis_k>, symmetrized.
ComplexMatrix project_into_subspace(const ComplexMatrix &m, const ComplexMatrix &basis);
ComplexMatrix project_into_subspace(const ComplexMatrix &m, const std::vector<ComplexVector> &basis);

/// max |<v_i|v_j> - delta_ij| over the columns.
double orthonormality_error(const ComplexMatrix &columns);

/// Threshold below which |lambda| counts as zero: tol * max|lambda|, never below `absolute_floor`.
double zero_threshold(const RealVector &eigenvalues, double absolute_floor = 0.0, double tol = kZeroEigenvalueTol);

/// Hermitian operator on the 2^N space, stored either densely or as Q B Q^dagger with
/// orthonormal columns Q (full-space vectors) and a small Hermitian block B.
class HermitianOperator {
   public:
    static HermitianOperator dense(ComplexMatrix m);
    static HermitianOperator factored(ComplexMatrix basis, ComplexMatrix block, std::size_t full_dim);
    static HermitianOperator zero(std::size_t full_dim);

    bool is_factored() const { return factored_; }
    std::size_t full_dim() const { return full_dim_; }
    /// Full matrix for the dense form, the small block for the factored form.
    const ComplexMatrix &block() const { return block_; }
    /// Empty for the dense form.
    const ComplexMatrix &basis() const { return basis_; }

    /// Eigen-decomposition with eigenvectors expressed in the full space. For the factored
    /// form only the block's eigenpairs are returned (the rest of the spectrum is zero).
    EigenDecomposition eig() const;
    ComplexMatrix to_dense() const;
    /// <v| K |v>.
    double quadratic_form(const ComplexVector &v) const;

   private:
    HermitianOperator(bool factored, std::size_t full_dim, ComplexMatrix basis, ComplexMatrix block);

    bool factored_;
    std::size_t full_dim_;
    ComplexMatrix basis_;
    ComplexMatrix block_;
};

}  // namespace macroent

#endif
