#pragma once

#include <string>
#include <variant>
#include <vector>

#include "qpt/bases.hpp"
#include "qpt/linalg.hpp"

namespace qpt {

// All rates in 1/s, times in s. Markovian validity (Gamma*tau_c << 1,
// S*tau_c << 1) is an assumption of the models, not a runtime check.

/// Independent Bloch-equation decoherence of the two qubits. Per qubit:
/// down/up relaxation rates and total dephasing time T2, with the
/// pure-dephasing part 1/T2 - (Gamma_d + Gamma_u)/2 required nonnegative.
struct LocalBloch {
    double gamma_d_q1 = 0, gamma_u_q1 = 0, t2_q1 = 0;  // t2 <= 0 means no dephasing
    double gamma_d_q2 = 0, gamma_u_q2 = 0, t2_q2 = 0;

    double t2_inv_q1() const { return t2_q1 > 0 ? 1.0 / t2_q1 : (gamma_d_q1 + gamma_u_q1) / 2; }
    double t2_inv_q2() const { return t2_q2 > 0 ? 1.0 / t2_q2 : (gamma_d_q2 + gamma_u_q2) / 2; }
    double pure_dephasing_q1() const { return t2_inv_q1() - (gamma_d_q1 + gamma_u_q1) / 2; }
    double pure_dephasing_q2() const { return t2_inv_q2() - (gamma_d_q2 + gamma_u_q2) / 2; }
    void validate() const;
};

/// Correlated pure dephasing with per-qubit rates and correlation
/// kappa in [-1, 1]; the common-dephasing rate is 2*kappa*sqrt(G1*G2).
struct CorrelatedDephasing {
    double gamma_1 = 0, gamma_2 = 0;
    double kappa = 0;

    double gamma_bar() const;
    void validate() const;
};

/// Fluctuating inter-qubit coupling, rate gamma_s (resonant qubits).
struct NoisyCoupling {
    double gamma_s = 0;
    void validate() const;
};

/// Noisy coupling for strongly detuned qubits (secular limit), rate
/// gamma_s_prime.
struct DetunedNoisyCoupling {
    double gamma_s_prime = 0;
    void validate() const;
};

using DecoherenceModel =
    std::variant<LocalBloch, CorrelatedDephasing, NoisyCoupling, DetunedNoisyCoupling>;

void validate(const DecoherenceModel& model);
std::string model_name(const DecoherenceModel& model);
bool detuned_only(const DecoherenceModel& model);

/// 4x4 one-qubit Bloch generator in by-element indexing <ij> = 2i + j:
/// populations relax with gamma_d/gamma_u, coherences decay at 1/T2.
CMatrix local_bloch_generator_1q(double gamma_d, double gamma_u, double t2_inv);

/// Two-qubit generator of independent local decoherence,
/// L_{<i1 i2 j1 j2><k1 k2 l1 l2>} = L1_{<i1 j1><k1 l1>} d_{i2k2} d_{j2l2}
///                                 + L2_{<i2 j2><k2 l2>} d_{i1k1} d_{j1l1}.
CMatrix lift_local(const CMatrix& l1, const CMatrix& l2);

/// 16x16 generator of correlated dephasing: entrywise damping of the
/// density matrix, diagonal untouched.
CMatrix cd_generator(const CorrelatedDephasing& model);

/// 16x16 generator of noisy coupling (resonant frame).
CMatrix nc_generator(const NoisyCoupling& model);

/// Noisy-coupling generator for strongly detuned qubits: same as
/// nc_generator with the rho_21 / rho_12 cross terms dropped (secular
/// approximation) and rate gamma_s_prime.
CMatrix detuned_nc_generator(const DetunedNoisyCoupling& model);

/// Dissipative generator of a model (16x16).
CMatrix generator(const DecoherenceModel& model);
CMatrix combined_generator(const std::vector<DecoherenceModel>& models);

/// Decoherence counterpart of chi: Hermitian, traceless for
/// trace-preserving generators.
struct LambdaMatrix {
    CMatrix mat;
    std::string basis;
    std::string provenance;
};

/// lambda = (Q1 Q2)^{-2} (E1^dag (x) E2^dag) nu (E1 (x) E2) with nu the
/// Jtilde-type reindexing of the generator. lambda = nu for the
/// elementary product basis.
LambdaMatrix lambda_from_generator(const CMatrix& L, const OperatorBasis& b1,
                                   const OperatorBasis& b2);
LambdaMatrix lambda_of_model(const DecoherenceModel& model, const OperatorBasis& b1,
                             const OperatorBasis& b2);

/// Pauli-basis lambda of the detuned noisy-coupling model, built from its
/// closed-form entries.
LambdaMatrix detuned_nc_lambda(double gamma_s_prime);

/// Coherent chi-correction for a detuned idle: four imaginary entries
/// i*S/(4*dw) at (0,9),(6,0),(0,6),(9,0) after time-averaging; the
/// unaveraged variant multiplies them by (1 - cos(dw*t)) and adds the
/// oscillating (0,5),(0,10),(5,0),(10,0) terms.
CMatrix detuned_coherent_correction(double coupling, double detuning_eff, bool averaged,
                                    double t = 0.0, double min_ratio = 10.0);

/// Number of entries with |entry| > tol (absolute tolerance).
std::size_t nonzero_count(const CMatrix& mat, double tol);

/// Parse a list of models from a config document with fields
/// t1_q1, t2_q1, gamma_u_q1, t1_q2, t2_q2, gamma_u_q2,
/// gamma_pd_1, gamma_pd_2, kappa, gamma_s, gamma_s_prime
/// (seconds and 1/s). Implemented in io.cpp.

}  // namespace qpt
