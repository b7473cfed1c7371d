#include "qpt/bases.hpp"

#include <stdexcept>

namespace qpt {

namespace {
constexpr Complex kI{0.0, 1.0};
}

CMatrix pauli_i() { return CMatrix::identity(2); }

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m(0, 1) = m(1, 0) = 1.0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m(2, 2);
    m(0, 1) = -kI;
    m(1, 0) = kI;
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return m;
}

double OperatorBasis::gram_residual() const {
    double worst = 0;
    for (std::size_t n = 0; n < ops.size(); ++n)
        for (std::size_t m = 0; m < ops.size(); ++m) {
            const Complex g = (ops[n].adjoint() * ops[m]).trace();
            const Complex want = (n == m) ? Complex(Q) : Complex(0);
            worst = std::max(worst, std::abs(g - want));
        }
    return worst;
}

OperatorBasis pauli_basis_1q() {
    return {{pauli_i(), pauli_x(), pauli_y(), pauli_z()}, 2.0, true, "pauli_1q"};
}

OperatorBasis pauli_basis_2q() {
    OperatorBasis b1 = pauli_basis_1q();
    OperatorBasis b;
    b.Q = 4.0;
    b.orthogonal = true;
    b.name = "pauli";
    for (std::size_t n1 = 0; n1 < 4; ++n1)
        for (std::size_t n2 = 0; n2 < 4; ++n2) b.ops.push_back(kron(b1.ops[n1], b1.ops[n2]));
    return b;
}

OperatorBasis modified_pauli_basis_2q() {
    OperatorBasis one{{pauli_i(), pauli_x(), -kI * pauli_y(), pauli_z()}, 2.0, true, ""};
    OperatorBasis b = product_basis(one, one);
    b.name = "modified_pauli";
    return b;
}

OperatorBasis elementary_basis(std::size_t d) {
    if (d < 2) throw std::invalid_argument("elementary_basis: d must be >= 2");
    OperatorBasis b;
    b.Q = 1.0;
    b.orthogonal = true;
    b.name = "elementary";
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            CMatrix m(d, d);
            m(i, j) = 1.0;
            b.ops.push_back(std::move(m));
        }
    return b;
}

OperatorBasis product_basis(const OperatorBasis& b1, const OperatorBasis& b2) {
    OperatorBasis b;
    b.Q = b1.Q * b2.Q;
    b.orthogonal = b1.orthogonal && b2.orthogonal;
    b.name = b1.name.empty() && b2.name.empty() ? "" : b1.name + "x" + b2.name;
    for (const auto& e1 : b1.ops)
        for (const auto& e2 : b2.ops) b.ops.push_back(kron(e1, e2));
    return b;
}

std::string product_label(const OperatorBasis& b1, const OperatorBasis& b2) {
    if (b1.name == "pauli_1q" && b2.name == "pauli_1q") return "pauli";
    if (b1.name == "elementary" && b2.name == "elementary") return "elementary";
    return b1.name + "x" + b2.name;
}

CMatrix ebold_matrix(const OperatorBasis& basis) {
    const std::size_t d = basis.dim();
    CMatrix E(d * d, basis.count());
    for (std::size_t n = 0; n < basis.count(); ++n) {
        const auto v = basis.ops[n].entries();
        for (std::size_t k = 0; k < v.size(); ++k) E(k, n) = v[k];
    }
    return E;
}

CMatrix reorder_L_to_J(const CMatrix& L, std::size_t d) {
    if (L.rows() != d * d || L.cols() != d * d)
        throw std::invalid_argument("reorder_L_to_J: L must be d^2 x d^2");
    CMatrix J(d * d, d * d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t l = 0; l < d; ++l)
                    J(d * i + j, d * k + l) = L(d * i + k, d * j + l);
    return J;
}

CMatrix reorder_L_to_Jtilde(const CMatrix& L, const IndexConvention& conv) {
    const std::size_t n = conv.total();
    if (L.rows() != n || L.cols() != n)
        throw std::invalid_argument("reorder_L_to_Jtilde: dimension mismatch");
    CMatrix Jt(n, n);
    const std::size_t d1 = conv.d1, d2 = conv.d2;
    for (std::size_t i1 = 0; i1 < d1; ++i1)
        for (std::size_t k1 = 0; k1 < d1; ++k1)
            for (std::size_t i2 = 0; i2 < d2; ++i2)
                for (std::size_t k2 = 0; k2 < d2; ++k2)
                    for (std::size_t j1 = 0; j1 < d1; ++j1)
                        for (std::size_t l1 = 0; l1 < d1; ++l1)
                            for (std::size_t j2 = 0; j2 < d2; ++j2)
                                for (std::size_t l2 = 0; l2 < d2; ++l2)
                                    Jt(conv.pack_ijij(i1, k1, i2, k2),
                                       conv.pack_ijij(j1, l1, j2, l2)) =
                                        L(conv.pack_iijj(i1, i2, j1, j2),
                                          conv.pack_iijj(k1, k2, l1, l2));
    return Jt;
}

CMatrix chi_from_Jtilde(const CMatrix& Jt, const OperatorBasis& b1, const OperatorBasis& b2) {
    if (!b1.orthogonal || !b2.orthogonal)
        throw std::invalid_argument(
            "chi_from_Jtilde: requires orthogonal subsystem bases "
            "(general oblique bases are out of scope for bipartite conversion)");
    const CMatrix EE = kron(ebold_matrix(b1), ebold_matrix(b2));
    const double q = b1.Q * b2.Q;
    return (1.0 / (q * q)) * (EE.adjoint() * Jt * EE);
}

CMatrix chi_from_J(const CMatrix& J, const OperatorBasis& basis) {
    if (basis.dim() > 4)
        throw std::invalid_argument("chi_from_J: single-system route exposed for d <= 4 only");
    const CMatrix E = ebold_matrix(basis);
    if (basis.orthogonal) {
        const double q = basis.Q;
        return (1.0 / (q * q)) * (E.adjoint() * J * E);
    }
    const CMatrix Einv = inverse(E);
    return Einv * J * Einv.adjoint();
}

CMatrix basis_change(const CMatrix& chi, const OperatorBasis& from, const OperatorBasis& to) {
    if (from.count() != to.count() || from.dim() != to.dim())
        throw std::invalid_argument("basis_change: bases must span the same space");
    // E_m = sum_n V_nm E'_n  <=>  Ebold(from) = Ebold(to) V
    const CMatrix V = solve(ebold_matrix(to), ebold_matrix(from));
    return V * chi * V.adjoint();
}

CMatrix identity_chi(const OperatorBasis& basis) {
    const std::size_t n = basis.count();
    CMatrix chi(n, n);
    if (basis.orthogonal) {
        std::vector<Complex> tr(n);
        for (std::size_t m = 0; m < n; ++m) tr[m] = basis.ops[m].trace();
        for (std::size_t m = 0; m < n; ++m)
            for (std::size_t k = 0; k < n; ++k)
                chi(m, k) = std::conj(tr[m]) * tr[k] / (basis.Q * basis.Q);
        return chi;
    }
    const std::size_t d = basis.dim();
    const CMatrix Einv = inverse(ebold_matrix(basis));
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t k = 0; k < n; ++k) {
            Complex s = 0;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    s += Einv(m, d * i + i) * std::conj(Einv(k, d * j + j));
            chi(m, k) = s;
        }
    return chi;
}

}  // namespace qpt
