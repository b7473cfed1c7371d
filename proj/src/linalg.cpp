#include "qpt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace qpt {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != rows_ * cols_)
        throw std::invalid_argument("CMatrix: entries.size() != rows*cols");
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diagonal(std::span<const Complex> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("CMatrix: shape mismatch in +=");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("CMatrix: shape mismatch in -=");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
    for (auto& v : a_) v *= s;
    return *this;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

CMatrix CMatrix::transpose() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

CMatrix CMatrix::conj() const {
    CMatrix m = *this;
    for (auto& v : m.a_) v = std::conj(v);
    return m;
}

Complex CMatrix::trace() const {
    if (!is_square()) throw std::invalid_argument("CMatrix::trace: non-square");
    Complex t = 0;
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::max_abs() const {
    double m = 0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
}

double CMatrix::frobenius_norm() const {
    double s = 0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

double CMatrix::one_norm() const {
    double m = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0;
        for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
        m = std::max(m, s);
    }
    return m;
}

double CMatrix::hermiticity_residual() const {
    if (!is_square()) throw std::invalid_argument("hermiticity_residual: non-square");
    double m = 0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i; j < cols_; ++j)
            m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return m;
}

bool CMatrix::is_hermitian(double tol) const {
    return is_square() && hermiticity_residual() <= tol;
}

bool CMatrix::is_psd(double tol) const {
    if (!is_hermitian(std::max(tol, kStructuralTol))) return false;
    return min_eigenvalue(*this) >= -tol;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { a += b; return a; }
CMatrix operator-(CMatrix a, const CMatrix& b) { a -= b; return a; }
CMatrix operator*(Complex s, CMatrix a) { a *= s; return a; }
CMatrix operator*(CMatrix a, Complex s) { a *= s; return a; }
CMatrix operator-(CMatrix a) { a *= -1.0; return a; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("CMatrix: shape mismatch in *");
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            if (aij == 0.0) continue;
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return c;
}

CMatrix solve(CMatrix a, CMatrix b) {
    if (!a.is_square() || a.rows() != b.rows())
        throw std::invalid_argument("solve: shape mismatch");
    const std::size_t n = a.rows(), m = b.cols();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > best) { best = std::abs(a(r, col)); piv = r; }
        if (best == 0.0) throw std::invalid_argument("solve: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
            for (std::size_t j = 0; j < m; ++j) std::swap(b(col, j), b(piv, j));
        }
        const Complex d = a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex f = a(r, col) / d;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            for (std::size_t j = 0; j < m; ++j) b(r, j) -= f * b(col, j);
        }
    }
    for (std::size_t ri = n; ri-- > 0;) {
        for (std::size_t j = 0; j < m; ++j) {
            Complex s = b(ri, j);
            for (std::size_t k = ri + 1; k < n; ++k) s -= a(ri, k) * b(k, j);
            b(ri, j) = s / a(ri, ri);
        }
    }
    return b;
}

CMatrix inverse(const CMatrix& a) { return solve(a, CMatrix::identity(a.rows())); }

CMatrix expm(const CMatrix& a) {
    if (!a.is_square()) throw std::invalid_argument("expm: non-square input");
    const std::size_t n = a.rows();
    // degree-13 Pade coefficients (Higham)
    static constexpr double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
        960960.0, 16380.0, 182.0, 1.0};
    constexpr double theta13 = 5.371920351148152;

    int squarings = 0;
    const double nrm = a.one_norm();
    if (nrm > theta13)
        squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
    CMatrix A = a;
    if (squarings > 0) A *= std::ldexp(1.0, -squarings);

    const CMatrix I = CMatrix::identity(n);
    const CMatrix A2 = A * A;
    const CMatrix A4 = A2 * A2;
    const CMatrix A6 = A2 * A4;
    CMatrix U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) +
                     b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    CMatrix V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) +
                b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    CMatrix R = solve(V - U, V + U);
    for (int s = 0; s < squarings; ++s) R = R * R;
    return R;
}

EigResult hermitian_eig(const CMatrix& a, double hermitian_tol) {
    if (!a.is_square()) throw std::invalid_argument("hermitian_eig: non-square input");
    if (a.hermiticity_residual() > hermitian_tol * std::max(1.0, a.max_abs()))
        throw std::invalid_argument("hermitian_eig: input not Hermitian within tolerance");

    const std::size_t n = a.rows();
    // work on the Hermitian part; discards fp-level asymmetry
    CMatrix A(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            A(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    CMatrix V = CMatrix::identity(n);

    auto off_norm = [&] {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += std::norm(A(i, j));
        return std::sqrt(2 * s);
    };

    const double scale = std::max(A.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 60 && off_norm() > 1e-15 * scale * n; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const Complex apq = A(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                // complex Jacobi rotation zeroing A(p,q):
                // c = cos t, s = sin t * e^{i phi} with apq = |apq| e^{i phi}
                const Complex phase = apq / std::abs(apq);
                const double app = A(p, p).real(), aqq = A(q, q).real();
                const double tau = (aqq - app) / (2.0 * std::abs(apq));
                const double t = (tau >= 0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const Complex s = t * c * phase;

                for (std::size_t k = 0; k < n; ++k) {
                    const Complex akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - std::conj(s) * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = std::conj(s) * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - std::conj(s) * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = A(i, i).real();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto x, auto y) { return w[x] < w[y]; });

    EigResult r;
    r.eigenvalues.resize(n);
    r.eigenvectors = CMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        r.eigenvalues[j] = w[order[j]];
        for (std::size_t i = 0; i < n; ++i) r.eigenvectors(i, j) = V(i, order[j]);
    }
    return r;
}

double min_eigenvalue(const CMatrix& hermitian) {
    const auto eig = hermitian_eig(hermitian, 1e-6);
    return eig.eigenvalues.front();
}

double trace_norm(const CMatrix& a) {
    if (!a.is_square()) throw std::invalid_argument("trace_norm: non-square input");
    if (a.hermiticity_residual() <= kExactZeroTol * std::max(1.0, a.max_abs())) {
        const auto eig = hermitian_eig(a, 1e-6);
        double s = 0;
        for (double w : eig.eigenvalues) s += std::abs(w);
        return s;
    }
    // general case: singular values via the Hermitian PSD matrix A^dag A
    const auto eig = hermitian_eig(a.adjoint() * a, 1e-6);
    double s = 0;
    for (double w : eig.eigenvalues) s += std::sqrt(std::max(0.0, w));
    return s;
}

CMatrix partial_trace(const CMatrix& m, int subsystem, std::size_t dim1, std::size_t dim2) {
    if (m.rows() != dim1 * dim2 || m.cols() != dim1 * dim2)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (subsystem != 1 && subsystem != 2)
        throw std::invalid_argument("partial_trace: subsystem must be 1 or 2");
    if (subsystem == 2) {
        CMatrix out(dim1, dim1);
        for (std::size_t m1 = 0; m1 < dim1; ++m1)
            for (std::size_t n1 = 0; n1 < dim1; ++n1)
                for (std::size_t m2 = 0; m2 < dim2; ++m2)
                    out(m1, n1) += m(m1 * dim2 + m2, n1 * dim2 + m2);
        return out;
    }
    CMatrix out(dim2, dim2);
    for (std::size_t m2 = 0; m2 < dim2; ++m2)
        for (std::size_t n2 = 0; n2 < dim2; ++n2)
            for (std::size_t m1 = 0; m1 < dim1; ++m1)
                out(m2, n2) += m(m1 * dim2 + m2, m1 * dim2 + n2);
    return out;
}

}  // namespace qpt
