#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qpt/channels.hpp"
#include "qpt/decoherence.hpp"

namespace qpt {

using Position = std::pair<std::size_t, std::size_t>;

/// Nonlocality of decoherence from the chi-matrix:
/// Tr|chi - (Tr2 chi)(x)(Tr1 chi)| / Tr|chi - chi_ideal|.
/// Meaningful only without Hamiltonian coupling; enforced as
/// identity-gate context. Throws when the denominator vanishes
/// (no decoherence present).
double epsilon_nl(const ProcessMatrix& chi, const CMatrix& chi_ideal);

/// Nonlocality of the decoherence generator:
/// Tr|lambda - lambda_tilde| / Tr|lambda| with
/// lambda_tilde = (Tr2 lambda)(x)chi^I + chi^I(x)(Tr1 lambda).
double epsilon_nl_prime(const LambdaMatrix& lambda);
double epsilon_nl_prime(const CMatrix& lambda, const OperatorBasis& b1, const OperatorBasis& b2);

/// Exact sqrt-iSWAP chi for completely correlated dephasing (kappa = 1):
/// the {0,5,10,15} block with f/g coefficients plus the four equal
/// dephasing extras.
CMatrix exact_cd_chi(double gamma_pd, double coupling);

/// Exact sqrt-iSWAP chi for noisy coupling: the {0,5,10,15} block with
/// h_pm = sqrt(2) gc +- gc^4; no extra elements.
CMatrix exact_nc_chi(double gamma_s, double coupling);

enum class FirstOrderMechanism { EnergyRelaxation, LocalPureDephasing, CorrelatedDephasing,
                                 NoisyCoupling };

/// Ratio above which the first-order formulas stop being quantitative.
inline constexpr double kWeakDecoherenceRatio = 0.2;
bool weak_decoherence(double rate, double coupling, double threshold = kWeakDecoherenceRatio);

/// Analytic first-order extra chi elements of the sqrt-iSWAP gate for one
/// mechanism, as a sparse map position -> value. rate is 1/T1 (ER),
/// Gamma_PD (dephasing) or Gamma_s (NC; returns no extras). The smaller
/// ER families ship at numerically resolved positions.
std::map<Position, Complex> first_order_extras(FirstOrderMechanism mechanism, double rate,
                                               double coupling, double kappa = 0.0);

/// epsilon = Tr|dchi - lambda*tau| / Tr|dchi| with dchi = chi - chi_ideal.
/// Throws when Tr|dchi| vanishes.
double approx_error(const ProcessMatrix& chi, const LambdaMatrix& lambda, double tau_gate);

/// Max of |dchi - lambda*tau|/|dchi| over the extra positions whose |dchi|
/// is within `within` of the maximal extra magnitude (the "largest extra
/// elements").
double largest_extra_deviation(const ProcessMatrix& chi, const LambdaMatrix& lambda,
                               double tau_gate, double within = 0.9);

struct MechanismEvidence {
    double evidence = 0;  // signature mass / total extra mass, in [0,1]
    bool flagged = false;
    std::vector<Position> matched_positions;
    std::map<std::string, double> estimated_rates;
    std::vector<std::string> notes;
};

struct FingerprintReport {
    // keyed "er", "lpd", "cd", "nc"
    std::map<std::string, MechanismEvidence> mechanisms;
    double total_extra_mass = 0;
    double residual_extra_mass = 0;  // extra mass at unmatched positions
    std::vector<std::string> notes;

    const MechanismEvidence& of(const std::string& key) const { return mechanisms.at(key); }
};

struct FingerprintOptions {
    double noise_sigma = 0;        // per-element noise scale for the NC one-sided test
    double flag_threshold = 0.1;   // evidence level at which a mechanism is flagged
    double position_tol = 1e-9;    // |dchi| below this is not a matched position
};

/// Pattern analysis of a Pauli-basis chi for gate contexts Identity,
/// SqrtISwap and DetunedIdle. Aggregates extra-element mass at each
/// mechanism's signature positions, runs the one-sided noisy-coupling
/// test for sqrt-iSWAP, and inverts the signature elements to rate
/// estimates (through the exact single-mechanism forward model for the
/// sqrt-iSWAP gate, through dchi/t for idle gates).
FingerprintReport fingerprint(const ProcessMatrix& chi, const FingerprintOptions& opts = {});

/// Signature position sets (extra elements only).
const std::vector<Position>& er_signature_positions();
const std::vector<Position>& lpd_signature_positions();
const std::vector<Position>& cd_signature_positions();       // incl. the (0,15) overlap
const std::vector<Position>& nc_signature_positions();       // identity-gate, incl. overlap
const std::vector<Position>& nc_detuned_signature_positions();
const std::vector<Position>& nc_watch_positions();           // sqrt-iSWAP |chi_{5,15}| family

struct RefineParams {
    double gamma_er_q1 = 0;  // 1/T1 per qubit
    double gamma_er_q2 = 0;
    double gamma_pd = 0;
    double kappa = 0;
    double gamma_s = 0;
};

struct RefineResult {
    RefineParams params;
    double objective = 0;  // Frobenius distance of model chi to input
    std::size_t evaluations = 0;
};

/// Coordinate-descent least squares of the full model against the input
/// chi, starting from the fingerprint estimates. Stops when the step
/// improvement falls below 1e-12.
RefineResult refine_fit(const ProcessMatrix& chi_in, const RefineParams& start);

/// Starting point for refine_fit from a fingerprint report.
RefineParams refine_start_from(const FingerprintReport& report);

}  // namespace qpt
