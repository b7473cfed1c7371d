#include "qpt/decoherence.hpp"

#include <cmath>
#include <stdexcept>

namespace qpt {

namespace {
constexpr Complex kI{0.0, 1.0};

void require_nonneg(double v, const char* what) {
    if (v < 0 || !std::isfinite(v))
        throw std::invalid_argument(std::string(what) + " must be a nonnegative finite rate");
}
}  // namespace

void LocalBloch::validate() const {
    require_nonneg(gamma_d_q1, "gamma_d_q1");
    require_nonneg(gamma_u_q1, "gamma_u_q1");
    require_nonneg(gamma_d_q2, "gamma_d_q2");
    require_nonneg(gamma_u_q2, "gamma_u_q2");
    if (pure_dephasing_q1() < -kExactZeroTol * std::max(1.0, t2_inv_q1()))
        throw std::invalid_argument(
            "LocalBloch: 1/t2_q1 < (gamma_d_q1+gamma_u_q1)/2 (negative pure-dephasing rate)");
    if (pure_dephasing_q2() < -kExactZeroTol * std::max(1.0, t2_inv_q2()))
        throw std::invalid_argument(
            "LocalBloch: 1/t2_q2 < (gamma_d_q2+gamma_u_q2)/2 (negative pure-dephasing rate)");
}

double CorrelatedDephasing::gamma_bar() const { return 2.0 * kappa * std::sqrt(gamma_1 * gamma_2); }

void CorrelatedDephasing::validate() const {
    require_nonneg(gamma_1, "gamma_1");
    require_nonneg(gamma_2, "gamma_2");
    if (std::abs(kappa) > 1.0)
        throw std::invalid_argument("CorrelatedDephasing: |kappa| must be <= 1");
}

void NoisyCoupling::validate() const { require_nonneg(gamma_s, "gamma_s"); }

void DetunedNoisyCoupling::validate() const { require_nonneg(gamma_s_prime, "gamma_s_prime"); }

void validate(const DecoherenceModel& model) {
    std::visit([](const auto& m) { m.validate(); }, model);
}

std::string model_name(const DecoherenceModel& model) {
    struct V {
        std::string operator()(const LocalBloch&) const { return "local_bloch"; }
        std::string operator()(const CorrelatedDephasing&) const { return "correlated_dephasing"; }
        std::string operator()(const NoisyCoupling&) const { return "noisy_coupling"; }
        std::string operator()(const DetunedNoisyCoupling&) const {
            return "detuned_noisy_coupling";
        }
    };
    return std::visit(V{}, model);
}

bool detuned_only(const DecoherenceModel& model) {
    return std::holds_alternative<DetunedNoisyCoupling>(model);
}

CMatrix local_bloch_generator_1q(double gamma_d, double gamma_u, double t2_inv) {
    require_nonneg(gamma_d, "gamma_d");
    require_nonneg(gamma_u, "gamma_u");
    if (t2_inv - (gamma_d + gamma_u) / 2 < -kExactZeroTol * std::max(1.0, t2_inv))
        throw std::invalid_argument("local_bloch_generator_1q: negative pure-dephasing rate");
    CMatrix L(4, 4);
    L(0, 0) = -gamma_u;
    L(0, 3) = gamma_d;
    L(1, 1) = -t2_inv;
    L(2, 2) = -t2_inv;
    L(3, 0) = gamma_u;
    L(3, 3) = -gamma_d;
    return L;
}

CMatrix lift_local(const CMatrix& l1, const CMatrix& l2) {
    if (l1.rows() != 4 || l1.cols() != 4 || l2.rows() != 4 || l2.cols() != 4)
        throw std::invalid_argument("lift_local: inputs must be 4x4 one-qubit generators");
    CMatrix L(16, 16);
    for (std::size_t i1 = 0; i1 < 2; ++i1)
        for (std::size_t i2 = 0; i2 < 2; ++i2)
            for (std::size_t j1 = 0; j1 < 2; ++j1)
                for (std::size_t j2 = 0; j2 < 2; ++j2)
                    for (std::size_t k1 = 0; k1 < 2; ++k1)
                        for (std::size_t k2 = 0; k2 < 2; ++k2)
                            for (std::size_t l1i = 0; l1i < 2; ++l1i)
                                for (std::size_t l2i = 0; l2i < 2; ++l2i) {
                                    const std::size_t r = 8 * i1 + 4 * i2 + 2 * j1 + j2;
                                    const std::size_t c = 8 * k1 + 4 * k2 + 2 * l1i + l2i;
                                    Complex v = 0;
                                    if (i2 == k2 && j2 == l2i) v += l1(2 * i1 + j1, 2 * k1 + l1i);
                                    if (i1 == k1 && j1 == l1i) v += l2(2 * i2 + j2, 2 * k2 + l2i);
                                    L(r, c) += v;
                                }
    return L;
}

CMatrix cd_generator(const CorrelatedDephasing& model) {
    model.validate();
    const double g1 = model.gamma_1, g2 = model.gamma_2;
    const double gp = g1 + g2 + model.gamma_bar();
    const double gm = g1 + g2 - model.gamma_bar();
    // entrywise damping rates of rho in the computational basis
    const double damp[4][4] = {{0, g2, g1, gp}, {g2, 0, gm, g1}, {g1, gm, 0, g2}, {gp, g1, g2, 0}};
    CMatrix L(16, 16);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) L(4 * i + j, 4 * i + j) = -damp[i][j];
    return L;
}

namespace {
CMatrix nc_generator_impl(double gs, bool detuned) {
    CMatrix L(16, 16);
    auto at = [](std::size_t i, std::size_t j) { return 4 * i + j; };
    for (auto [i, j] : {std::pair<std::size_t, std::size_t>{0, 1}, {0, 2}, {1, 0}, {2, 0},
                        {1, 3}, {3, 1}, {2, 3}, {3, 2}})
        L(at(i, j), at(i, j)) = -gs;
    L(at(1, 1), at(1, 1)) = -2 * gs;
    L(at(1, 1), at(2, 2)) = 2 * gs;
    L(at(2, 2), at(1, 1)) = 2 * gs;
    L(at(2, 2), at(2, 2)) = -2 * gs;
    L(at(1, 2), at(1, 2)) = -2 * gs;
    L(at(2, 1), at(2, 1)) = -2 * gs;
    if (!detuned) {
        // these cross terms average out for strongly detuned qubits
        L(at(1, 2), at(2, 1)) = 2 * gs;
        L(at(2, 1), at(1, 2)) = 2 * gs;
    }
    return L;
}
}  // namespace

CMatrix nc_generator(const NoisyCoupling& model) {
    model.validate();
    return nc_generator_impl(model.gamma_s, false);
}

CMatrix detuned_nc_generator(const DetunedNoisyCoupling& model) {
    model.validate();
    return nc_generator_impl(model.gamma_s_prime, true);
}

CMatrix generator(const DecoherenceModel& model) {
    struct V {
        CMatrix operator()(const LocalBloch& m) const {
            m.validate();
            return lift_local(
                local_bloch_generator_1q(m.gamma_d_q1, m.gamma_u_q1, m.t2_inv_q1()),
                local_bloch_generator_1q(m.gamma_d_q2, m.gamma_u_q2, m.t2_inv_q2()));
        }
        CMatrix operator()(const CorrelatedDephasing& m) const { return cd_generator(m); }
        CMatrix operator()(const NoisyCoupling& m) const { return nc_generator(m); }
        CMatrix operator()(const DetunedNoisyCoupling& m) const { return detuned_nc_generator(m); }
    };
    return std::visit(V{}, model);
}

CMatrix combined_generator(const std::vector<DecoherenceModel>& models) {
    CMatrix L(16, 16);
    for (const auto& m : models) L += generator(m);
    return L;
}

LambdaMatrix lambda_from_generator(const CMatrix& L, const OperatorBasis& b1,
                                   const OperatorBasis& b2) {
    if (!b1.orthogonal || !b2.orthogonal)
        throw std::invalid_argument("lambda_from_generator: requires orthogonal bases");
    const IndexConvention conv{b1.dim(), b2.dim()};
    const CMatrix nu = reorder_L_to_Jtilde(L, conv);
    LambdaMatrix lam;
    lam.mat = chi_from_Jtilde(nu, b1, b2);
    lam.basis = b1.name + "x" + b2.name;
    return lam;
}

LambdaMatrix lambda_of_model(const DecoherenceModel& model, const OperatorBasis& b1,
                             const OperatorBasis& b2) {
    LambdaMatrix lam = lambda_from_generator(generator(model), b1, b2);
    lam.provenance = model_name(model);
    return lam;
}

LambdaMatrix detuned_nc_lambda(double gamma_s_prime) {
    if (gamma_s_prime < 0)
        throw std::invalid_argument("detuned_nc_lambda: gamma_s_prime must be >= 0");
    const double g = gamma_s_prime;
    CMatrix m(16, 16);
    m(0, 0) = -g;
    m(0, 15) = m(15, 0) = g / 2;
    m(5, 5) = m(10, 10) = m(5, 10) = m(10, 5) = g / 4;
    m(6, 6) = m(9, 9) = g / 4;
    m(6, 9) = m(9, 6) = -g / 4;
    return {std::move(m), "pauli", "detuned_noisy_coupling"};
}

CMatrix detuned_coherent_correction(double coupling, double detuning_eff, bool averaged, double t,
                                    double min_ratio) {
    if (coupling != 0 && std::abs(detuning_eff) < min_ratio * std::abs(coupling))
        throw std::invalid_argument(
            "detuned_coherent_correction: detuning too small for the strong-detuning expansion");
    CMatrix c(16, 16);
    if (coupling == 0) return c;
    const Complex base = kI * coupling / (4.0 * detuning_eff);
    const Complex amp = averaged ? base : base * (1.0 - std::cos(detuning_eff * t));
    c(0, 9) = c(6, 0) = amp;
    c(0, 6) = c(9, 0) = -amp;
    if (!averaged) {
        const Complex osc = base * std::sin(detuning_eff * t);
        c(0, 5) = c(0, 10) = osc;
        c(5, 0) = c(10, 0) = -osc;
    }
    return c;
}

std::size_t nonzero_count(const CMatrix& mat, double tol) {
    std::size_t n = 0;
    for (const auto& v : mat.entries())
        if (std::abs(v) > tol) ++n;
    return n;
}

}  // namespace qpt
