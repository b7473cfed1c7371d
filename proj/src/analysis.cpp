#include "qpt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qpt {

namespace {
constexpr Complex kI{0.0, 1.0};
const double kSqrt2 = std::sqrt(2.0);

const OperatorBasis& pauli1q() {
    static const OperatorBasis b = pauli_basis_1q();
    return b;
}
const OperatorBasis& pauli2q() {
    static const OperatorBasis b = pauli_basis_2q();
    return b;
}

CMatrix chi_identity_16() {
    CMatrix c(16, 16);
    c(0, 0) = 1.0;
    return c;
}
}  // namespace

double epsilon_nl(const ProcessMatrix& chi, const CMatrix& chi_ideal) {
    if (chi.gate.kind != GateKind::Identity)
        throw std::invalid_argument(
            "epsilon_nl: meaningful only without Hamiltonian coupling (identity gate)");
    const double denom = trace_norm(chi.chi - chi_ideal);
    if (denom < 1e-14)
        throw std::invalid_argument("epsilon_nl: no decoherence present, metric undefined");
    const CMatrix red1 = partial_trace(chi.chi, 2, 4, 4);
    const CMatrix red2 = partial_trace(chi.chi, 1, 4, 4);
    return trace_norm(chi.chi - kron(red1, red2)) / denom;
}

double epsilon_nl_prime(const CMatrix& lambda, const OperatorBasis& b1, const OperatorBasis& b2) {
    const double denom = trace_norm(lambda);
    if (denom < 1e-14) throw std::invalid_argument("epsilon_nl_prime: zero lambda");
    const std::size_t n1 = b1.count(), n2 = b2.count();
    const CMatrix red1 = partial_trace(lambda, 2, n1, n2);
    const CMatrix red2 = partial_trace(lambda, 1, n1, n2);
    const CMatrix tilde =
        kron(red1, identity_chi(b2)) + kron(identity_chi(b1), red2);
    return trace_norm(lambda - tilde) / denom;
}

double epsilon_nl_prime(const LambdaMatrix& lambda) {
    return epsilon_nl_prime(lambda.mat, pauli1q(), pauli1q());
}

CMatrix exact_cd_chi(double gamma_pd, double coupling) {
    if (gamma_pd < 0 || coupling <= 0)
        throw std::invalid_argument("exact_cd_chi: requires gamma_pd >= 0, coupling > 0");
    const double gd = std::exp(-M_PI * gamma_pd / (2 * coupling));
    const double g4 = gd * gd * gd * gd;
    const double fp = 2 + g4 + 2 * kSqrt2 * gd, fm = 2 + g4 - 2 * kSqrt2 * gd;
    const double gp = kSqrt2 * gd + 1, gm = kSqrt2 * gd - 1;
    CMatrix chi(16, 16);
    const std::size_t idx[4] = {0, 5, 10, 15};
    const Complex blk[4][4] = {{fp, kI * gp, kI * gp, g4},
                               {-kI * gp, 1, 1, -kI * gm},
                               {-kI * gp, 1, 1, -kI * gm},
                               {g4, kI * gm, kI * gm, fm}};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) chi(idx[a], idx[b]) = blk[a][b] / 8.0;
    const double e = (1 - std::exp(-2 * M_PI * gamma_pd / coupling)) / 8;
    chi(3, 3) = chi(3, 12) = chi(12, 3) = chi(12, 12) = e;
    return chi;
}

CMatrix exact_nc_chi(double gamma_s, double coupling) {
    if (gamma_s < 0 || coupling <= 0)
        throw std::invalid_argument("exact_nc_chi: requires gamma_s >= 0, coupling > 0");
    const double gc = std::exp(-M_PI * gamma_s / (2 * coupling));
    const double g4 = gc * gc * gc * gc;
    const double hp = kSqrt2 * gc + g4, hm = kSqrt2 * gc - g4;
    CMatrix chi(16, 16);
    const std::size_t idx[4] = {0, 5, 10, 15};
    const Complex blk[4][4] = {{3 + 2 * kSqrt2 * gc, kI * hp, kI * hp, 1},
                               {-kI * hp, 1, 1, -kI * hm},
                               {-kI * hp, 1, 1, -kI * hm},
                               {1, kI * hm, kI * hm, 3 - 2 * kSqrt2 * gc}};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) chi(idx[a], idx[b]) = blk[a][b] / 8.0;
    return chi;
}

bool weak_decoherence(double rate, double coupling, double threshold) {
    return coupling > 0 && rate / coupling <= threshold;
}

std::map<Position, Complex> first_order_extras(FirstOrderMechanism mechanism, double rate,
                                               double coupling, double kappa) {
    if (rate < 0 || coupling <= 0)
        throw std::invalid_argument("first_order_extras: requires rate >= 0, coupling > 0");
    std::map<Position, Complex> out;
    const double x = rate / coupling;
    switch (mechanism) {
        case FirstOrderMechanism::EnergyRelaxation: {
            const double c1 = (M_PI + 2 * kSqrt2) / 16;
            const double c2 = M_PI * (2 + kSqrt2) / 32;
            // the remaining families are numerically resolved from the
            // first-order pipeline; magnitudes agree with the quoted
            // pi/(16 sqrt2), 0.06 and 0.02 values
            const double c3 = M_PI / (16 * kSqrt2);
            const double c4 = M_PI * (2 - kSqrt2) / 32;
            const double c5 = (M_PI - 2 * kSqrt2) / 16;
            for (auto p : {Position{1, 1}, {2, 2}, {4, 4}, {8, 8}}) out[p] = c1 * x;
            for (auto p : {Position{2, 1}, {8, 4}}) out[p] = kI * c1 * x;
            for (auto p : {Position{1, 2}, {4, 8}}) out[p] = -kI * c1 * x;
            for (auto p : {Position{0, 3}, {3, 0}, {0, 12}, {12, 0}}) out[p] = c2 * x;
            for (auto p : {Position{3, 5}, {3, 10}, {12, 5}, {12, 10}}) out[p] = kI * c3 * x;
            for (auto p : {Position{5, 3}, {10, 3}, {5, 12}, {10, 12}}) out[p] = -kI * c3 * x;
            for (auto p : {Position{3, 15}, {15, 3}, {12, 15}, {15, 12}}) out[p] = c4 * x;
            for (auto p : {Position{7, 7}, {11, 11}, {13, 13}, {14, 14}}) out[p] = c5 * x;
            for (auto p : {Position{11, 7}, {14, 13}}) out[p] = kI * c5 * x;
            for (auto p : {Position{7, 11}, {13, 14}}) out[p] = -kI * c5 * x;
            break;
        }
        case FirstOrderMechanism::LocalPureDephasing:
            out[{3, 3}] = out[{12, 12}] = (3 * M_PI + 2) / 16 * x;
            break;
        case FirstOrderMechanism::CorrelatedDephasing: {
            const double a = (3 * M_PI + 2) / 16, b = (M_PI - 2) / 16;
            out[{3, 3}] = out[{12, 12}] = (a + b * kappa) * x;
            out[{3, 12}] = out[{12, 3}] = (b + a * kappa) * x;
            const double small = b * (1 - kappa) * x;
            out[{6, 6}] = out[{9, 9}] = small;
            out[{6, 9}] = out[{9, 6}] = -small;
            break;
        }
        case FirstOrderMechanism::NoisyCoupling:
            break;  // no extra elements for the sqrt-iSWAP gate
    }
    return out;
}

double approx_error(const ProcessMatrix& chi, const LambdaMatrix& lambda, double tau_gate) {
    if (!chi.chi_ideal)
        throw std::invalid_argument("approx_error: chi_ideal reference required");
    const CMatrix dchi = chi.chi - *chi.chi_ideal;
    const double denom = trace_norm(dchi);
    if (denom < 1e-14) throw std::invalid_argument("approx_error: Tr|dchi| vanishes");
    return trace_norm(dchi - tau_gate * lambda.mat) / denom;
}

double largest_extra_deviation(const ProcessMatrix& chi, const LambdaMatrix& lambda,
                               double tau_gate, double within) {
    if (!chi.chi_ideal)
        throw std::invalid_argument("largest_extra_deviation: chi_ideal reference required");
    const CMatrix& ideal = *chi.chi_ideal;
    const CMatrix dchi = chi.chi - ideal;
    double max_extra = 0;
    for (std::size_t m = 0; m < 16; ++m)
        for (std::size_t n = 0; n < 16; ++n)
            if (std::abs(ideal(m, n)) < kExactZeroTol)
                max_extra = std::max(max_extra, std::abs(dchi(m, n)));
    if (max_extra == 0)
        throw std::invalid_argument("largest_extra_deviation: no extra elements");
    double worst = 0;
    for (std::size_t m = 0; m < 16; ++m)
        for (std::size_t n = 0; n < 16; ++n) {
            if (std::abs(ideal(m, n)) >= kExactZeroTol) continue;
            const double mag = std::abs(dchi(m, n));
            if (mag < within * max_extra) continue;
            worst = std::max(worst, std::abs(dchi(m, n) - tau_gate * lambda.mat(m, n)) / mag);
        }
    return worst;
}

const std::vector<Position>& er_signature_positions() {
    static const std::vector<Position> p = {{1, 1}, {2, 2}, {4, 4}, {8, 8},
                                            {0, 3}, {3, 0}, {0, 12}, {12, 0},
                                            {2, 1}, {1, 2}, {8, 4}, {4, 8}};
    return p;
}
const std::vector<Position>& lpd_signature_positions() {
    static const std::vector<Position> p = {{3, 3}, {12, 12}};
    return p;
}
const std::vector<Position>& cd_signature_positions() {
    static const std::vector<Position> p = {{3, 12}, {12, 3}, {0, 15}, {15, 0}};
    return p;
}
const std::vector<Position>& nc_signature_positions() {
    static const std::vector<Position> p = {{5, 5}, {10, 10}, {5, 10}, {10, 5}, {0, 15}, {15, 0}};
    return p;
}
const std::vector<Position>& nc_detuned_signature_positions() {
    static const std::vector<Position> p = {{5, 5}, {10, 10}, {5, 10}, {10, 5},
                                            {6, 6}, {9, 9}, {6, 9}, {9, 6}, {0, 15}, {15, 0}};
    return p;
}
const std::vector<Position>& nc_watch_positions() {
    static const std::vector<Position> p = {{5, 15}, {15, 5}, {10, 15}, {15, 10}};
    return p;
}

namespace {

struct SignatureAggregates {
    double er_diag = 0;   // mean |dchi| of the four ER diagonal positions
    double pd = 0;        // mean Re dchi at (3,3),(12,12)
    double cd = 0;        // mean Re dchi at (3,12),(12,3)
};

SignatureAggregates aggregates(const CMatrix& dchi) {
    SignatureAggregates s;
    for (auto [m, n] : {Position{1, 1}, {2, 2}, {4, 4}, {8, 8}}) s.er_diag += std::abs(dchi(m, n));
    s.er_diag /= 4;
    s.pd = 0.5 * (dchi(3, 3).real() + dchi(12, 12).real());
    s.cd = 0.5 * (dchi(3, 12).real() + dchi(12, 3).real());
    return s;
}

// Invert the mean ER diagonal magnitude through the exact pure-ER pipeline.
double invert_er_rate(double m_in, double coupling) {
    const double c1 = (M_PI + 2 * kSqrt2) / 16;
    double t1 = c1 / (coupling * m_in);  // first-order start
    const GateSpec gate = GateSpec::sqrt_iswap(coupling);
    for (int it = 0; it < 60; ++it) {
        LocalBloch lb;
        lb.gamma_d_q1 = lb.gamma_d_q2 = 1 / t1;
        const auto chi = evolution_map(gate, {lb}).chi(pauli1q(), pauli1q());
        const auto agg = aggregates(chi.chi - *chi.chi_ideal);
        const double ratio = agg.er_diag / m_in;
        t1 *= ratio;
        if (std::abs(ratio - 1) < 1e-12) break;
    }
    return 1 / t1;
}

// Invert the (pd, cd) pair through the exact pure-dephasing pipeline.
std::pair<double, double> invert_dephasing(double p_in, double q_in, double coupling) {
    const double a = (3 * M_PI + 2) / 16, b = (M_PI - 2) / 16;
    auto kappa_of_ratio = [&](double r) {
        return std::clamp((a * r - b) / (a - b * r), -1.0, 1.0);
    };
    const double r_in = q_in / p_in;
    double kap = kappa_of_ratio(r_in);
    double g = coupling * p_in / (a + b * kap);
    const GateSpec gate = GateSpec::sqrt_iswap(coupling);
    for (int it = 0; it < 80; ++it) {
        const auto chi =
            evolution_map(gate, {CorrelatedDephasing{g, g, kap}}).chi(pauli1q(), pauli1q());
        const auto agg = aggregates(chi.chi - *chi.chi_ideal);
        const double pr = agg.pd / p_in;
        g /= pr;
        kap = std::clamp(kap + kappa_of_ratio(r_in) - kappa_of_ratio(agg.cd / agg.pd), -1.0, 1.0);
        if (std::abs(pr - 1) < 1e-12 && std::abs(agg.cd - q_in) < 1e-12 * std::max(p_in, 1e-30))
            break;
    }
    return {g, kap};
}

CMatrix ideal_for_gate(const ProcessMatrix& chi) {
    if (chi.chi_ideal) return *chi.chi_ideal;
    switch (chi.gate.kind) {
        case GateKind::Identity:
            return chi_identity_16();
        case GateKind::DetunedIdle:
            return chi_identity_16() + detuned_coherent_correction(chi.gate.coupling,
                                                                   chi.gate.detuning_eff(), true);
        default:
            return chi_from_kraus(unitary(chi.gate), pauli2q());
    }
}

}  // namespace

FingerprintReport fingerprint(const ProcessMatrix& chi, const FingerprintOptions& opts) {
    if (chi.basis != "pauli")
        throw std::invalid_argument("fingerprint: chi must be in the Pauli basis, got '" +
                                    chi.basis + "'");
    const GateKind kind = chi.gate.kind;
    if (kind == GateKind::XYEvolution)
        throw std::invalid_argument("fingerprint: unsupported gate context");

    const CMatrix ideal = ideal_for_gate(chi);
    const CMatrix dchi = chi.chi - ideal;
    const double pos_tol = std::max(opts.position_tol, 3 * opts.noise_sigma);

    std::set<Position> extra;
    double total_extra = 0;
    for (std::size_t m = 0; m < 16; ++m)
        for (std::size_t n = 0; n < 16; ++n)
            if (std::abs(ideal(m, n)) < kExactZeroTol) {
                extra.insert({m, n});
                total_extra += std::abs(dchi(m, n));
            }

    FingerprintReport rep;
    rep.total_extra_mass = total_extra;

    auto mass_of = [&](const std::vector<Position>& sig, std::vector<Position>& matched) {
        double mass = 0;
        for (auto p : sig) {
            if (!extra.count(p)) continue;
            const double v = std::abs(dchi(p.first, p.second));
            mass += v;
            if (v > pos_tol) matched.push_back(p);
        }
        return mass;
    };

    MechanismEvidence er, lpd, cd, nc;
    std::set<Position> claimed;
    const bool has_extra = total_extra > pos_tol;

    const double er_mass = mass_of(er_signature_positions(), er.matched_positions);
    const double lpd_mass = mass_of(lpd_signature_positions(), lpd.matched_positions);
    const double cd_mass = mass_of(cd_signature_positions(), cd.matched_positions);
    const auto& nc_sig = (kind == GateKind::DetunedIdle) ? nc_detuned_signature_positions()
                                                         : nc_signature_positions();
    const double nc_mass = mass_of(nc_sig, nc.matched_positions);

    if (has_extra) {
        er.evidence = er_mass / total_extra;
        lpd.evidence = lpd_mass / total_extra;
        cd.evidence = cd_mass / total_extra;
        nc.evidence = nc_mass / total_extra;
    }

    // one-sided growth test replaces the position test for sqrt-iSWAP,
    // where noisy coupling adds no extra elements
    if (kind == GateKind::SqrtISwap) {
        double excess = 0;
        nc.matched_positions.clear();
        for (auto p : nc_watch_positions()) {
            const double e = std::abs(chi.chi(p.first, p.second)) - (kSqrt2 - 1) / 8;
            if (e > 3 * opts.noise_sigma + opts.position_tol) {
                excess += e;
                nc.matched_positions.push_back(p);
            }
        }
        nc.evidence = (excess > 0) ? excess / (excess + total_extra) : 0.0;
        if (excess > 0) {
            nc.notes.push_back("consistent with noisy coupling (one-sided test; "
                               "absence of growth would not exclude it)");
            const double gc = std::clamp((8 * chi.chi(0, 0).real() - 3) / (2 * kSqrt2), 1e-12, 1.0);
            nc.estimated_rates["gamma_s_per_s"] =
                -2 * chi.gate.coupling * std::log(gc) / M_PI;
        }
    }

    // rate estimates
    const double S = chi.gate.coupling;
    const auto agg = aggregates(dchi);
    if (kind == GateKind::SqrtISwap) {
        if (agg.er_diag > pos_tol) {
            const double g_er = invert_er_rate(agg.er_diag, S);
            er.estimated_rates["t1_s"] = 1 / g_er;
            if (!weak_decoherence(g_er, S))
                er.notes.push_back("rate/S exceeds the weak-decoherence threshold; "
                                   "first-order identification is qualitative");
        }
        if (agg.pd > pos_tol) {
            const auto [g_pd, kap] = invert_dephasing(agg.pd, agg.cd, S);
            lpd.estimated_rates["gamma_pd_per_s"] = g_pd;
            cd.estimated_rates["gamma_pd_per_s"] = g_pd;
            cd.estimated_rates["kappa"] = kap;
            if (std::abs(agg.cd) < 0.1 * std::abs(agg.pd))
                cd.notes.push_back("kappa estimate unreliable: correlation elements below 10% "
                                   "of the dephasing diagonal");
        }
    } else {
        // idle gates: dchi ~ lambda t, invert the lambda entries directly
        const double t = chi.gate.duration;
        if (t > 0) {
            const CMatrix lam_hat = (1.0 / t) * dchi;
            const double gp1 = lam_hat(4, 4).real();   // qubit-1 (Gd+Gu)/4
            const double gp2 = lam_hat(1, 1).real();
            const double gm1 = lam_hat(0, 12).real();  // qubit-1 (Gd-Gu)/4
            const double gm2 = lam_hat(0, 3).real();
            if (gp1 > pos_tol / t) {
                er.estimated_rates["t1_q1_s"] = 1 / (4 * gp1);
                er.estimated_rates["gamma_d_q1_per_s"] = 2 * (gp1 + gm1);
                er.estimated_rates["gamma_u_q1_per_s"] = std::max(0.0, 2 * (gp1 - gm1));
            }
            if (gp2 > pos_tol / t) {
                er.estimated_rates["t1_q2_s"] = 1 / (4 * gp2);
                er.estimated_rates["gamma_d_q2_per_s"] = 2 * (gp2 + gm2);
                er.estimated_rates["gamma_u_q2_per_s"] = std::max(0.0, 2 * (gp2 - gm2));
            }
            const double g2 = 2 * lam_hat(3, 3).real();    // qubit-2 dephasing
            const double g1 = 2 * lam_hat(12, 12).real();  // qubit-1 dephasing
            if (g1 > pos_tol / t) lpd.estimated_rates["gamma_pd_1_per_s"] = g1;
            if (g2 > pos_tol / t) lpd.estimated_rates["gamma_pd_2_per_s"] = g2;
            if (g1 > pos_tol / t && g2 > pos_tol / t) {
                const double gbar = 4 * lam_hat(3, 12).real();
                const double kap = std::clamp(gbar / (2 * std::sqrt(g1 * g2)), -1.0, 1.0);
                cd.estimated_rates["kappa"] = kap;
                if (std::abs(lam_hat(3, 12).real()) < 0.1 * std::abs(lam_hat(3, 3).real()))
                    cd.notes.push_back("kappa estimate unreliable: correlation elements below "
                                       "10% of the dephasing diagonal");
            }
            if (kind == GateKind::DetunedIdle) {
                double acc = 0;
                for (auto p : {Position{5, 5}, {10, 10}, {5, 10}, {10, 5}, {6, 6}, {9, 9}})
                    acc += lam_hat(p.first, p.second).real();
                acc -= lam_hat(6, 9).real() + lam_hat(9, 6).real();
                const double gsp = acc / 2;  // eight entries of magnitude g/4
                if (gsp > pos_tol / t) nc.estimated_rates["gamma_s_prime_per_s"] = gsp;
            } else {
                double acc = 0;
                for (auto p : {Position{5, 5}, {10, 10}, {5, 10}, {10, 5}})
                    acc += lam_hat(p.first, p.second).real();
                const double gs = acc / 2;
                if (gs > pos_tol / t) nc.estimated_rates["gamma_s_per_s"] = gs;
            }
        }
    }

    for (auto* m : {&er, &lpd, &cd, &nc}) m->flagged = m->evidence >= opts.flag_threshold;

    // residual: extra mass at positions not matched by any signature
    std::set<Position> all_sig(er_signature_positions().begin(), er_signature_positions().end());
    for (const auto& v : {lpd_signature_positions(), cd_signature_positions(), nc_sig})
        all_sig.insert(v.begin(), v.end());
    double matched_mass = 0;
    for (auto p : all_sig)
        if (extra.count(p)) matched_mass += std::abs(dchi(p.first, p.second));
    rep.residual_extra_mass = std::max(0.0, total_extra - matched_mass);

    rep.mechanisms["er"] = std::move(er);
    rep.mechanisms["lpd"] = std::move(lpd);
    rep.mechanisms["cd"] = std::move(cd);
    rep.mechanisms["nc"] = std::move(nc);
    if (!has_extra && kind != GateKind::SqrtISwap)
        rep.notes.push_back("no extra elements above tolerance");
    return rep;
}

RefineParams refine_start_from(const FingerprintReport& report) {
    RefineParams p;
    const auto& er = report.of("er").estimated_rates;
    if (auto it = er.find("t1_s"); it != er.end())
        p.gamma_er_q1 = p.gamma_er_q2 = 1 / it->second;
    if (auto it = er.find("t1_q1_s"); it != er.end()) p.gamma_er_q1 = 1 / it->second;
    if (auto it = er.find("t1_q2_s"); it != er.end()) p.gamma_er_q2 = 1 / it->second;
    const auto& lpd = report.of("lpd").estimated_rates;
    if (auto it = lpd.find("gamma_pd_per_s"); it != lpd.end()) p.gamma_pd = it->second;
    if (auto it = lpd.find("gamma_pd_1_per_s"); it != lpd.end()) p.gamma_pd = it->second;
    const auto& cd = report.of("cd").estimated_rates;
    if (auto it = cd.find("kappa"); it != cd.end()) p.kappa = it->second;
    const auto& nc = report.of("nc").estimated_rates;
    if (auto it = nc.find("gamma_s_per_s"); it != nc.end()) p.gamma_s = it->second;
    return p;
}

namespace {
double refine_objective(const ProcessMatrix& chi_in, const RefineParams& p) {
    std::vector<DecoherenceModel> models;
    LocalBloch lb;
    lb.gamma_d_q1 = p.gamma_er_q1;
    lb.gamma_d_q2 = p.gamma_er_q2;
    models.push_back(lb);
    models.push_back(CorrelatedDephasing{p.gamma_pd, p.gamma_pd, p.kappa});
    models.push_back(NoisyCoupling{p.gamma_s});
    const auto chi = evolution_map(chi_in.gate, models).chi(pauli1q(), pauli1q());
    return (chi.chi - chi_in.chi).frobenius_norm();
}
}  // namespace

RefineResult refine_fit(const ProcessMatrix& chi_in, const RefineParams& start) {
    if (chi_in.gate.kind == GateKind::DetunedIdle)
        throw std::invalid_argument("refine_fit: supported for resonant gate contexts");
    RefineResult res;
    res.params = start;
    res.params.kappa = std::clamp(res.params.kappa, -1.0, 1.0);

    auto rates = [](RefineParams& p) {
        return std::array<double*, 5>{&p.gamma_er_q1, &p.gamma_er_q2, &p.gamma_pd, &p.kappa,
                                      &p.gamma_s};
    };
    const double rate_scale = std::max({start.gamma_er_q1, start.gamma_er_q2, start.gamma_pd,
                                        start.gamma_s, 0.002 * chi_in.gate.coupling});
    std::array<double, 5> step = {rate_scale / 4, rate_scale / 4, rate_scale / 4, 0.25,
                                  rate_scale / 4};

    double f = refine_objective(chi_in, res.params);
    ++res.evaluations;
    for (int iter = 0; iter < 200; ++iter) {
        double improvement = 0;
        for (int i = 0; i < 5; ++i) {
            for (double sign : {+1.0, -1.0}) {
                RefineParams trial = res.params;
                double* v = rates(trial)[i];
                *v += sign * step[i];
                if (i == 3)
                    *v = std::clamp(*v, -1.0, 1.0);
                else if (*v < 0)
                    continue;
                const double ft = refine_objective(chi_in, trial);
                ++res.evaluations;
                if (ft < f) {
                    improvement += f - ft;
                    f = ft;
                    res.params = trial;
                    break;
                }
            }
        }
        if (improvement < 1e-12) {
            bool shrunk = false;
            for (auto& s : step)
                if (s > (&s == &step[3] ? 1e-10 : rate_scale * 1e-10)) {
                    s *= 0.5;
                    shrunk = true;
                }
            if (!shrunk) break;
        }
    }
    res.objective = f;
    return res;
}

}  // namespace qpt
