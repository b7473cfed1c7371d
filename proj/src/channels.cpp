#include "qpt/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace qpt {

namespace {
constexpr Complex kI{0.0, 1.0};

const OperatorBasis& pauli2q() {
    static const OperatorBasis b = pauli_basis_2q();
    return b;
}
const OperatorBasis& pauli1q() {
    static const OperatorBasis b = pauli_basis_1q();
    return b;
}
}  // namespace

std::string gate_kind_name(GateKind k) {
    switch (k) {
        case GateKind::Identity: return "identity";
        case GateKind::SqrtISwap: return "sqrt_iswap";
        case GateKind::XYEvolution: return "xy_evolution";
        case GateKind::DetunedIdle: return "detuned_idle";
    }
    return "unknown";
}

GateSpec GateSpec::identity(double t) {
    if (t < 0) throw std::invalid_argument("GateSpec: negative duration");
    return {GateKind::Identity, 0, 0, t};
}

GateSpec GateSpec::sqrt_iswap(double s) {
    if (s <= 0) throw std::invalid_argument("GateSpec: sqrt_iswap requires coupling > 0");
    return {GateKind::SqrtISwap, s, 0, M_PI / (2 * s)};
}

GateSpec GateSpec::xy_evolution(double s, double t) {
    if (t < 0) throw std::invalid_argument("GateSpec: negative duration");
    return {GateKind::XYEvolution, s, 0, t};
}

GateSpec GateSpec::detuned_idle(double s, double detuning, double t, double min_ratio) {
    if (t < 0) throw std::invalid_argument("GateSpec: negative duration");
    if (std::abs(detuning) < min_ratio * std::abs(s))
        throw std::invalid_argument("GateSpec: detuned_idle requires |detuning| >= " +
                                    std::to_string(min_ratio) + " |coupling|");
    return {GateKind::DetunedIdle, s, detuning, t};
}

double GateSpec::detuning_eff() const {
    const double mag = std::sqrt(detuning * detuning + coupling * coupling);
    return detuning >= 0 ? mag : -mag;
}

CMatrix hamiltonian(const GateSpec& spec) {
    CMatrix h(4, 4);
    switch (spec.kind) {
        case GateKind::Identity:
            break;
        case GateKind::SqrtISwap:
        case GateKind::XYEvolution:
            h(1, 2) = h(2, 1) = spec.coupling / 2;
            break;
        case GateKind::DetunedIdle: {
            // level-repulsion term; the oscillating coupling term is handled
            // by the averaged corrections, not exponentiated
            const double shift = (spec.detuning - spec.detuning_eff()) / 2;
            h(1, 1) = -shift;  // |1><1| (x) I  -  I (x) |1><1| on <j1 j2>
            h(2, 2) = shift;
            break;
        }
    }
    return h;
}

CMatrix coherent_generator(const CMatrix& h) {
    if (!h.is_square()) throw std::invalid_argument("coherent_generator: non-square H");
    if (h.hermiticity_residual() > kStructuralTol * std::max(1.0, h.max_abs()))
        throw std::invalid_argument("coherent_generator: H must be Hermitian");
    const std::size_t d = h.rows();
    const CMatrix eye = CMatrix::identity(d);
    return -kI * (kron(h, eye) - kron(eye, h.transpose()));
}

CMatrix unitary(const GateSpec& spec) {
    if (spec.kind == GateKind::DetunedIdle)
        throw std::invalid_argument(
            "unitary: detuned idle has a time-dependent frame; no closed-form gate unitary");
    CMatrix u = CMatrix::identity(4);
    if (spec.kind == GateKind::Identity) return u;
    const double half = spec.coupling * spec.duration / 2;
    u(1, 1) = u(2, 2) = std::cos(half);
    u(1, 2) = u(2, 1) = -kI * std::sin(half);
    return u;
}

CMatrix chi_from_kraus(const CMatrix& k, const OperatorBasis& basis) {
    if (!basis.orthogonal)
        throw std::invalid_argument("chi_from_kraus: requires an orthogonal basis");
    const std::size_t n = basis.count();
    std::vector<Complex> coeff(n);
    for (std::size_t m = 0; m < n; ++m)
        coeff[m] = (basis.ops[m].adjoint() * k).trace() / basis.Q;
    CMatrix chi(n, n);
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t l = 0; l < n; ++l) chi(m, l) = coeff[m] * std::conj(coeff[l]);
    return chi;
}

CMatrix unitary_superop(const CMatrix& u) { return kron(u, u.conj()); }

double ProcessMatrix::min_eig() const {
    return min_eigenvalue(chi);
}

bool ProcessMatrix::physical(double tol) const {
    return chi.hermiticity_residual() <= tol && trace_real() <= 1.0 + tol;
}

CMatrix EvolutionMap::apply(const CMatrix& rho) const {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw std::invalid_argument("EvolutionMap::apply: expected a 4x4 density matrix");
    CMatrix out(4, 4);
    auto rv = rho.entries();
    for (std::size_t r = 0; r < 16; ++r) {
        Complex s = 0;
        for (std::size_t c = 0; c < 16; ++c) s += Lmat(r, c) * rv[c];
        out(r / 4, r % 4) = s;
    }
    return out;
}

ProcessMatrix EvolutionMap::chi(const OperatorBasis& b1, const OperatorBasis& b2) const {
    return chi_of_map(*this, b1, b2);
}

namespace {
void check_model_mix(const GateSpec& spec, const std::vector<DecoherenceModel>& models) {
    for (const auto& m : models) {
        validate(m);
        if (detuned_only(m) && spec.kind != GateKind::DetunedIdle)
            throw std::invalid_argument(
                "evolution_map: detuned noisy coupling requires a detuned-idle gate");
    }
}
}  // namespace

EvolutionMap evolution_map(const GateSpec& spec, const std::vector<DecoherenceModel>& models) {
    if (spec.kind == GateKind::DetunedIdle)
        throw std::invalid_argument(
            "evolution_map: detuned idle is not exponentiated exactly; use detuned_chi_approx");
    check_model_mix(spec, models);
    const CMatrix gen = coherent_generator(hamiltonian(spec)) + combined_generator(models);
    EvolutionMap map;
    map.Lmat = expm(spec.duration * gen);
    map.spec = spec;
    map.models = models;
    return map;
}

EvolutionMap first_order_map(const GateSpec& spec, const std::vector<DecoherenceModel>& models) {
    if (spec.kind == GateKind::DetunedIdle)
        throw std::invalid_argument("first_order_map: detuned idle not supported");
    check_model_mix(spec, models);
    const CMatrix lcoh = coherent_generator(hamiltonian(spec));
    const CMatrix ldis = combined_generator(models);
    // block trick: expm([[Lcoh, L], [0, Lcoh]] t) has the first-order
    // integral int_0^t e^{Lcoh(t-s)} L e^{Lcoh s} ds in the upper-right block
    CMatrix blk(32, 32);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) {
            blk(i, j) = lcoh(i, j) * spec.duration;
            blk(16 + i, 16 + j) = lcoh(i, j) * spec.duration;
            blk(i, 16 + j) = ldis(i, j) * spec.duration;
        }
    const CMatrix e = expm(blk);
    EvolutionMap map;
    map.Lmat = CMatrix(16, 16);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) map.Lmat(i, j) = e(i, j) + e(i, 16 + j);
    map.spec = spec;
    map.models = models;
    return map;
}

ProcessMatrix chi_of_map(const EvolutionMap& map, const OperatorBasis& b1,
                         const OperatorBasis& b2) {
    const CMatrix jtilde = reorder_L_to_Jtilde(map.Lmat, map.convention);
    ProcessMatrix pm;
    pm.chi = chi_from_Jtilde(jtilde, b1, b2);
    pm.basis = b1.name + "x" + b2.name;
    pm.gate = map.spec;
    if (map.spec.kind != GateKind::DetunedIdle)
        pm.chi_ideal = chi_from_kraus(unitary(map.spec), product_basis(b1, b2));
    return pm;
}

ProcessMatrix detuned_chi_approx(const GateSpec& spec, const std::vector<DecoherenceModel>& models,
                                 bool averaged) {
    if (spec.kind != GateKind::DetunedIdle)
        throw std::invalid_argument("detuned_chi_approx: spec must be a detuned idle");
    CMatrix chi(16, 16);
    chi(0, 0) = 1.0;
    chi += detuned_coherent_correction(spec.coupling, spec.detuning_eff(), averaged,
                                       spec.duration);
    for (const auto& m : models) {
        validate(m);
        if (std::holds_alternative<NoisyCoupling>(m))
            throw std::invalid_argument(
                "detuned_chi_approx: resonant noisy coupling is not valid for detuned qubits; "
                "use DetunedNoisyCoupling (gamma_s_prime)");
        CMatrix lam = std::holds_alternative<DetunedNoisyCoupling>(m)
                          ? detuned_nc_lambda(std::get<DetunedNoisyCoupling>(m).gamma_s_prime).mat
                          : lambda_of_model(m, pauli1q(), pauli1q()).mat;
        chi += spec.duration * lam;
    }
    ProcessMatrix pm;
    pm.chi = std::move(chi);
    pm.basis = "pauli_1qxpauli_1q";
    pm.gate = spec;
    CMatrix ideal(16, 16);
    ideal(0, 0) = 1.0;
    pm.chi_ideal = std::move(ideal);
    return pm;
}

std::array<CMatrix, 16> qpt_initial_states() {
    const Complex h{0.5, 0};
    std::array<CMatrix, 4> one;
    for (auto& m : one) m = CMatrix(2, 2);
    one[0](0, 0) = 1.0;                                      // |0>
    one[1](1, 1) = 1.0;                                      // |1>
    one[2](0, 0) = one[2](0, 1) = one[2](1, 0) = one[2](1, 1) = h;  // |+>
    one[3](0, 0) = one[3](1, 1) = h;                         // |+i>
    one[3](0, 1) = -kI * h;
    one[3](1, 0) = kI * h;
    std::array<CMatrix, 16> states;
    for (std::size_t n1 = 0; n1 < 4; ++n1)
        for (std::size_t n2 = 0; n2 < 4; ++n2) states[4 * n1 + n2] = kron(one[n1], one[n2]);
    return states;
}

CMatrix r0_inverse_1q() {
    CMatrix m(4, 4);
    m(0, 0) = 1.0;
    m(0, 1) = Complex(-0.5, -0.5);
    m(0, 2) = Complex(-0.5, 0.5);
    m(1, 1) = Complex(-0.5, -0.5);
    m(1, 2) = Complex(-0.5, 0.5);
    m(1, 3) = 1.0;
    m(2, 1) = 1.0;
    m(2, 2) = 1.0;
    m(3, 1) = kI;
    m(3, 2) = -kI;
    return m;
}

QptResult qpt_extract(std::span<const CMatrix> outputs, const OperatorBasis& b1,
                      const OperatorBasis& b2, double tol) {
    if (outputs.size() != 16)
        throw std::invalid_argument("qpt_extract: expected 16 output density matrices");
    double trace_residual = 0;
    for (std::size_t n = 0; n < 16; ++n) {
        const CMatrix& r = outputs[n];
        if (r.rows() != 4 || r.cols() != 4)
            throw std::invalid_argument("qpt_extract: output " + std::to_string(n) +
                                        " is not 4x4");
        if (r.hermiticity_residual() > tol)
            throw std::invalid_argument("qpt_extract: output " + std::to_string(n) +
                                        " is not Hermitian within tolerance");
        trace_residual = std::max(trace_residual, std::abs(r.trace().real() - 1.0));
    }

    CMatrix R(16, 16);
    for (std::size_t n = 0; n < 16; ++n) {
        auto v = outputs[n].entries();
        for (std::size_t r = 0; r < 16; ++r) R(r, n) = v[r];
    }
    const CMatrix r0inv = r0_inverse_1q();
    const CMatrix lprime = R * kron(r0inv, r0inv);
    // column permutation: L'_{m <i1 j1 i2 j2>} = L_{m <i1 i2 j1 j2>}
    EvolutionMap map;
    map.Lmat = CMatrix(16, 16);
    for (std::size_t i1 = 0; i1 < 2; ++i1)
        for (std::size_t j1 = 0; j1 < 2; ++j1)
            for (std::size_t i2 = 0; i2 < 2; ++i2)
                for (std::size_t j2 = 0; j2 < 2; ++j2) {
                    const std::size_t src = 8 * i1 + 4 * j1 + 2 * i2 + j2;
                    const std::size_t dst = 8 * i1 + 4 * i2 + 2 * j1 + j2;
                    for (std::size_t m = 0; m < 16; ++m) map.Lmat(m, dst) = lprime(m, src);
                }

    QptResult result{chi_of_map(map, b1, b2), 0.0, trace_residual};
    result.chi.chi_ideal.reset();  // reconstruction carries no gate context
    result.chi.gate = GateSpec{};
    // with 16 independent inputs a linear map always exists; the meaningful
    // consistency check is that it preserves Hermiticity, i.e. chi is Hermitian
    result.linearity_residual = result.chi.chi.hermiticity_residual();
    return result;
}

CMatrix interaction_frame_v(const GateSpec& spec, const OperatorBasis& basis) {
    const CMatrix u = unitary(spec);
    const std::size_t n = basis.count();
    CMatrix v(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            v(a, b) = (basis.ops[a].adjoint() * u * basis.ops[b]).trace() / basis.Q;
    return v;
}

}  // namespace qpt
