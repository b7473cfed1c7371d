#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qpt {

using Complex = std::complex<double>;

// Default tolerances used across the library: structural checks
// (hermiticity, trace preservation) and "exact zero" element tests.
inline constexpr double kStructuralTol = 1e-10;
inline constexpr double kExactZeroTol = 1e-12;

/// Dense complex matrix, row-major. The universal carrier for density
/// matrices (4x4), superoperators, chi- and lambda-matrices (16x16).
class CMatrix {
public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}
    CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

    static CMatrix identity(std::size_t n);
    static CMatrix diagonal(std::span<const Complex> d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    // Row-major entries; for a density matrix this is exactly the
    // vectorization rho_<ij> = rho_ij used by the superoperator algebra.
    std::span<const Complex> entries() const { return a_; }
    std::span<Complex> entries() { return a_; }

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(Complex s);

    CMatrix adjoint() const;
    CMatrix transpose() const;
    CMatrix conj() const;
    Complex trace() const;
    double max_abs() const;
    double frobenius_norm() const;
    double one_norm() const;  // max column sum

    bool is_hermitian(double tol = kStructuralTol) const;
    bool is_psd(double tol = kStructuralTol) const;
    double hermiticity_residual() const;  // max |a_ij - conj(a_ji)|

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Complex> a_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(Complex s, CMatrix a);
CMatrix operator*(CMatrix a, Complex s);
CMatrix operator-(CMatrix a);

/// Kronecker product; dimensions multiply.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Matrix exponential by scaling-and-squaring with the degree-13 Pade
/// approximant. Robust for the non-normal generators produced by
/// coherent + dissipative parts.
CMatrix expm(const CMatrix& a);

/// Tr sqrt(A^dag A) = sum of singular values. For (numerically) Hermitian
/// input this reduces to the sum of |eigenvalues|.
double trace_norm(const CMatrix& a);

/// Partial trace over one tensor factor of a (dim1*dim2)x(dim1*dim2)
/// matrix with block sizes dim1, dim2. subsystem selects the factor that
/// is traced OUT: partial_trace(chi, 2, ...) returns the dim1 x dim1
/// reduction sum_{m2} chi_{<m1 m2><n1 m2>}.
CMatrix partial_trace(const CMatrix& m, int subsystem, std::size_t dim1, std::size_t dim2);

struct EigResult {
    std::vector<double> eigenvalues;  // ascending
    CMatrix eigenvectors;             // columns; A V = V diag(w)
};

/// Cyclic Jacobi eigensolver for Hermitian matrices.
EigResult hermitian_eig(const CMatrix& a, double hermitian_tol = kStructuralTol);

/// Gaussian elimination with partial pivoting.
CMatrix solve(CMatrix a, CMatrix b);  // a x = b
CMatrix inverse(const CMatrix& a);

double min_eigenvalue(const CMatrix& hermitian);

}  // namespace qpt
