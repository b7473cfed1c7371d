#pragma once

#include <string>
#include <vector>

#include "qpt/linalg.hpp"

namespace qpt {

/// Index pairing and four-index packings for a bipartite system with
/// subsystem Hilbert dimensions d1, d2. The pair index is <ij> = d*i + j;
/// the two four-index packings are
///   <i1 j1 i2 j2> = i1*d1*d2^2 + j1*d2^2 + i2*d2 + j2
///   <i1 i2 j1 j2> = i1*d1*d2^2 + i2*d1*d2 + j1*d2 + j2
/// both bijections on 0 .. d1^2*d2^2 - 1.
struct IndexConvention {
    std::size_t d1 = 2, d2 = 2;

    std::size_t total() const { return d1 * d1 * d2 * d2; }
    static std::size_t pair(std::size_t i, std::size_t j, std::size_t d) { return d * i + j; }
    std::size_t pack_ijij(std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2) const {
        return i1 * d1 * d2 * d2 + j1 * d2 * d2 + i2 * d2 + j2;
    }
    std::size_t pack_iijj(std::size_t i1, std::size_t i2, std::size_t j1, std::size_t j2) const {
        return i1 * d1 * d2 * d2 + i2 * d1 * d2 + j1 * d2 + j2;
    }
};

/// Ordered operator basis {E_n} with its normalization Q:
/// Tr(E_n^dag E_m) = Q delta_nm when the orthogonal flag holds.
struct OperatorBasis {
    std::vector<CMatrix> ops;
    double Q = 0;
    bool orthogonal = false;
    std::string name;

    std::size_t count() const { return ops.size(); }
    std::size_t dim() const { return ops.empty() ? 0 : ops.front().rows(); }

    /// Largest deviation of the Gram matrix from Q*I.
    double gram_residual() const;
};

// single-qubit Paulis
CMatrix pauli_i();
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

/// {I, X, Y, Z}, Q = 2.
OperatorBasis pauli_basis_1q();
/// 16 products X_{n1} (x) X_{n2} in base-4 order, Q = 4.
OperatorBasis pauli_basis_2q();
/// Pauli basis with Y -> -iY on both qubits (literature variant).
OperatorBasis modified_pauli_basis_2q();
/// d^2 matrix units |i><j| ordered by <ij>, Q = 1.
OperatorBasis elementary_basis(std::size_t d);
/// Product basis E_<n1 n2> = E1_{n1} (x) E2_{n2}.
OperatorBasis product_basis(const OperatorBasis& b1, const OperatorBasis& b2);

/// Canonical label of a product basis: "pauli" for pauli_1q x pauli_1q,
/// "elementary" for elementary x elementary, else the concatenation.
std::string product_label(const OperatorBasis& b1, const OperatorBasis& b2);

/// d^2 x d^2 matrix whose n-th column is the row-major vectorization of
/// E_n, i.e. Ebold_{<ij> n} = (E_n)_{ij}.
CMatrix ebold_matrix(const OperatorBasis& basis);

/// J_{<ij><kl>} = L_{<ik><jl>} (an involution).
CMatrix reorder_L_to_J(const CMatrix& L, std::size_t d);

/// Jt_{<i1k1i2k2><j1l1j2l2>} = L_{<i1i2j1j2><k1k2l1l2>}.
/// The same reindexing maps the dissipative generator to nu.
CMatrix reorder_L_to_Jtilde(const CMatrix& L, const IndexConvention& conv);

/// chi = (Q1 Q2)^{-2} (E1^dag (x) E2^dag) Jt (E1 (x) E2)
/// for orthogonal subsystem bases.
CMatrix chi_from_Jtilde(const CMatrix& Jt, const OperatorBasis& b1, const OperatorBasis& b2);

/// Single-system conversion chi = Einv J Einv^dag (general basis) or
/// Q^{-2} E^dag J E (orthogonal fast path). Exposed for d <= 4.
CMatrix chi_from_J(const CMatrix& J, const OperatorBasis& basis);

/// chi' = V chi V^dag with V solving Ebold(from) = Ebold(to) * V.
/// For an orthogonal target this is V_nm = Tr(E'_n^dag E_m)/Q'.
CMatrix basis_change(const CMatrix& chi, const OperatorBasis& from, const OperatorBasis& to);

/// Identity-map process matrix: chi^I_mn = Q^{-2} (Tr E_m)^* Tr E_n for an
/// orthogonal basis (general route via Ebold^{-1} otherwise).
CMatrix identity_chi(const OperatorBasis& basis);

}  // namespace qpt
