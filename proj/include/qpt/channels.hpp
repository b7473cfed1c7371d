#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qpt/bases.hpp"
#include "qpt/decoherence.hpp"
#include "qpt/linalg.hpp"

namespace qpt {

enum class GateKind { Identity, SqrtISwap, XYEvolution, DetunedIdle };

std::string gate_kind_name(GateKind k);

/// Gate context: coupling strength (angular frequency, rad/s), optional
/// detuning (rad/s) and duration (s). SqrtISwap fixes t = pi/(2S).
struct GateSpec {
    GateKind kind = GateKind::Identity;
    double coupling = 0;   // S, rad/s
    double detuning = 0;   // Delta omega, rad/s (DetunedIdle only)
    double duration = 0;   // s

    static GateSpec identity(double t);
    static GateSpec sqrt_iswap(double s);
    static GateSpec xy_evolution(double s, double t);
    // requires |detuning| >= min_ratio * |s|
    static GateSpec detuned_idle(double s, double detuning, double t, double min_ratio = 10.0);

    /// sqrt((dw)^2 + S^2) with the sign of dw: the eigenfrequency split.
    double detuning_eff() const;
    double gate_time() const { return duration; }
};

/// H/hbar in rad/s, computational basis <j1 j2> = 2 j1 + j2. For
/// DetunedIdle only the time-independent level-repulsion term.
CMatrix hamiltonian(const GateSpec& spec);

/// 16x16 generator of -(i/hbar)[H, rho]:
/// (Lcoh)_{<ij><kl>} = i (H_lj d_ik - H_ik d_jl).
CMatrix coherent_generator(const CMatrix& h);

/// e^{-iHt/hbar} for the resonant gate kinds (DetunedIdle has a
/// time-dependent frame and is rejected).
CMatrix unitary(const GateSpec& spec);

/// Rank-1 process matrix of rho -> K rho K^dag in an orthogonal basis:
/// chi_mn = k_m conj(k_n) with k_n = Tr(E_n^dag K)/Q.
CMatrix chi_from_kraus(const CMatrix& k, const OperatorBasis& basis);

/// Superoperator of rho -> U rho U^dag in row-major vectorization.
CMatrix unitary_superop(const CMatrix& u);

/// chi-matrix tagged with its basis and gate context.
struct ProcessMatrix {
    CMatrix chi;
    std::string basis;
    GateSpec gate;
    std::optional<CMatrix> chi_ideal;

    double trace_real() const { return chi.trace().real(); }
    double hermiticity_residual() const { return chi.hermiticity_residual(); }
    double min_eig() const;
    /// Hermitian within tol and Tr <= 1 + tol.
    bool physical(double tol = kStructuralTol) const;
};

/// The full evolution map L = expm((Lcoh + sum L_model) t) with its context.
struct EvolutionMap {
    CMatrix Lmat;  // 16x16 propagator
    IndexConvention convention{2, 2};
    GateSpec spec;
    std::vector<DecoherenceModel> models;

    CMatrix apply(const CMatrix& rho) const;
    ProcessMatrix chi(const OperatorBasis& b1, const OperatorBasis& b2) const;
};

/// Builds the evolution map. DetunedIdle specs are rejected (the detuned
/// route goes through detuned_chi_approx); detuned-only generators are
/// rejected for resonant specs.
EvolutionMap evolution_map(const GateSpec& spec, const std::vector<DecoherenceModel>& models);

/// First-order-in-decoherence map
///   e^{Lcoh t} + int_0^t e^{Lcoh (t-s)} L e^{Lcoh s} ds,
/// evaluated via a block exponential. This is the object whose chi the
/// weak-decoherence approximation study compares against lambda*t.
EvolutionMap first_order_map(const GateSpec& spec, const std::vector<DecoherenceModel>& models);

/// chi of the map by direct conversion (reorder to Jtilde, then the
/// product-basis transform).
ProcessMatrix chi_of_map(const EvolutionMap& map, const OperatorBasis& b1,
                         const OperatorBasis& b2);

/// Detuned-idle approximation chi = chi^I + dchi^c + lambda t. Accepts
/// LocalBloch / CorrelatedDephasing / DetunedNoisyCoupling models;
/// resonant NoisyCoupling is rejected (its rate must be replaced by
/// gamma_s_prime in the detuned frame).
ProcessMatrix detuned_chi_approx(const GateSpec& spec, const std::vector<DecoherenceModel>& models,
                                 bool averaged = true);

/// The 16 product initial states |psi_{n1}><psi_{n1}| (x) |psi_{n2}><psi_{n2}|
/// with psi in {|0>, |1>, |+>, |+i>}, indexed <n1 n2> = 4 n1 + n2.
std::array<CMatrix, 16> qpt_initial_states();

/// Closed-form inverse of the one-qubit initial-state matrix R0.
CMatrix r0_inverse_1q();

struct QptResult {
    ProcessMatrix chi;
    double linearity_residual;  // hermiticity-preservation residual of the map
    double trace_residual;      // max |Tr rho_out - 1|
};

/// Standard-QPT extraction: L' = R [(R0^1)^-1 (x) (R0^2)^-1], column
/// permutation <i1 i2 j1 j2> <- <i1 j1 i2 j2>, reorder to Jtilde, then the
/// product-basis transform. Outputs must be indexed like
/// qpt_initial_states(); each must be 4x4 and Hermitian within tol.
QptResult qpt_extract(std::span<const CMatrix> outputs, const OperatorBasis& b1,
                      const OperatorBasis& b2, double tol = kStructuralTol);

/// Unitary connecting Schroedinger- and interaction-picture chi:
/// V_nm = Tr(E_n^dag e^{-iHt/hbar} E_m)/Q.
CMatrix interaction_frame_v(const GateSpec& spec, const OperatorBasis& basis);

}  // namespace qpt
