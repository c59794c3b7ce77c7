#pragma once

// Minimal state-vector simulator: registers, a fixed gate set, sampled and
// branch-enumerating measurement, EPR pairs and dense coding. Registers are
// plain values; every operation returns a new value.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qonline/errors.hpp"

namespace qonline::qcore {

using Complex = std::complex<double>;

inline constexpr int kMaxQubits = 24;
inline constexpr double kNormTolerance = 1e-12;
// Measurement branches below this probability are dropped as float dust and
// the remainder renormalized.
inline constexpr double kBranchPrune = 1e-15;
inline constexpr double kFidelityTolerance = 1e-9;

// Normalized amplitude vector over num_qubits qubits. Qubit 0 is the leftmost
// position of the ket string, i.e. the most significant bit of the amplitude
// index: |q0 q1 ... q_{n-1}> lives at index q0*2^{n-1} + ... + q_{n-1}.
class QuantumRegister {
public:
    // |0...0>
    explicit QuantumRegister(int num_qubits)
        : num_qubits_(check_capacity(num_qubits)),
          amps_(std::size_t{1} << num_qubits, Complex{0.0, 0.0}) {
        amps_[0] = Complex{1.0, 0.0};
    }

    QuantumRegister(int num_qubits, std::vector<Complex> amplitudes)
        : num_qubits_(check_capacity(num_qubits)), amps_(std::move(amplitudes)) {
        if (amps_.size() != (std::size_t{1} << num_qubits_)) {
            throw ConfigError("amplitude vector length must be 2^num_qubits");
        }
        double n2 = 0.0;
        for (const auto& a : amps_) n2 += std::norm(a);
        if (std::abs(n2 - 1.0) > 1e-9) {
            throw ConfigError("amplitude vector is not normalized");
        }
        const double scale = 1.0 / std::sqrt(n2);
        if (scale != 1.0) {
            for (auto& a : amps_) a *= scale;
        }
    }

    static QuantumRegister basis(int num_qubits, std::uint64_t index) {
        QuantumRegister reg(num_qubits);
        if (index >= reg.dim()) throw ConfigError("basis index out of range");
        reg.amps_[0] = Complex{0.0, 0.0};
        reg.amps_[index] = Complex{1.0, 0.0};
        return reg;
    }

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<Complex>& amplitudes() const { return amps_; }
    Complex amplitude(std::size_t index) const { return amps_.at(index); }

    double norm() const {
        double n2 = 0.0;
        for (const auto& a : amps_) n2 += std::norm(a);
        return std::sqrt(n2);
    }

    Complex inner_product(const QuantumRegister& other) const {
        if (other.num_qubits_ != num_qubits_) {
            throw ConfigError("inner product requires equal register widths");
        }
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            acc += std::conj(amps_[i]) * other.amps_[i];
        }
        return acc;
    }

    // |<a|b>|^2; global phase drops out, so this is the state-equality metric.
    double fidelity(const QuantumRegister& other) const {
        return std::norm(inner_product(other));
    }

private:
    friend QuantumRegister with_amplitudes_unchecked(const QuantumRegister&,
                                                     std::vector<Complex>);

    static int check_capacity(int num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxQubits) {
            throw ConfigError("register width must be in [1, " +
                              std::to_string(kMaxQubits) + "], got " +
                              std::to_string(num_qubits));
        }
        return num_qubits;
    }

    int num_qubits_;
    std::vector<Complex> amps_;
};

// Internal: rebuild a register from amplitudes already known to be normalized
// (gate application preserves norm exactly up to rounding).
inline QuantumRegister with_amplitudes_unchecked(const QuantumRegister& like,
                                                 std::vector<Complex> amps) {
    QuantumRegister reg(like.num_qubits());
    reg.amps_ = std::move(amps);
    return reg;
}

enum class GateKind { H, X, Z, Rot, Cnot, Crot };

// One gate from the fixed set, bound to target qubit indices (control first
// for the controlled gates). Rot(theta) is the real rotation
// [[cos t, -sin t], [sin t, cos t]].
class GateSpec {
public:
    static GateSpec h(int target) { return GateSpec(GateKind::H, {target}, 0.0); }
    static GateSpec x(int target) { return GateSpec(GateKind::X, {target}, 0.0); }
    static GateSpec z(int target) { return GateSpec(GateKind::Z, {target}, 0.0); }
    static GateSpec rot(int target, double angle) {
        return GateSpec(GateKind::Rot, {target}, angle);
    }
    static GateSpec cnot(int control, int target) {
        return GateSpec(GateKind::Cnot, {control, target}, 0.0);
    }
    static GateSpec crot(int control, int target, double angle) {
        return GateSpec(GateKind::Crot, {control, target}, angle);
    }

    GateKind kind() const { return kind_; }
    double angle() const { return angle_; }
    const std::vector<int>& targets() const { return targets_; }
    int arity() const { return static_cast<int>(targets_.size()); }

    // Explicit matrix (row-major, dimension 2^arity); basis order follows the
    // targets() list with the first listed qubit as the high bit.
    std::vector<Complex> matrix() const {
        const double c = std::cos(angle_);
        const double s = std::sin(angle_);
        const double h = 1.0 / std::sqrt(2.0);
        switch (kind_) {
            case GateKind::H:
                return {h, h, h, -h};
            case GateKind::X:
                return {0, 1, 1, 0};
            case GateKind::Z:
                return {1, 0, 0, -1};
            case GateKind::Rot:
                return {c, -s, s, c};
            case GateKind::Cnot:
                return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0};
            case GateKind::Crot:
                return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, c, -s, 0, 0, s, c};
        }
        throw ConfigError("unknown gate kind");
    }

    std::string name() const {
        switch (kind_) {
            case GateKind::H: return "H";
            case GateKind::X: return "X";
            case GateKind::Z: return "Z";
            case GateKind::Rot: return "ROT";
            case GateKind::Cnot: return "CNOT";
            case GateKind::Crot: return "CROT";
        }
        return "?";
    }

private:
    GateSpec(GateKind kind, std::vector<int> targets, double angle)
        : kind_(kind), targets_(std::move(targets)), angle_(angle) {
        if (targets_.size() == 2 && targets_[0] == targets_[1]) {
            throw ConfigError("controlled gate needs two distinct qubits");
        }
    }

    GateKind kind_;
    std::vector<int> targets_;
    double angle_;
};

namespace detail {

inline std::uint64_t qubit_mask(const QuantumRegister& reg, int qubit) {
    if (qubit < 0 || qubit >= reg.num_qubits()) {
        throw ConfigError("qubit index " + std::to_string(qubit) +
                          " out of range for " + std::to_string(reg.num_qubits()) +
                          "-qubit register");
    }
    return std::uint64_t{1} << (reg.num_qubits() - 1 - qubit);
}

inline std::vector<Complex> apply_single(const QuantumRegister& reg,
                                         const Complex* u, int target) {
    const std::uint64_t mask = qubit_mask(reg, target);
    std::vector<Complex> out(reg.amplitudes());
    for (std::uint64_t i = 0; i < out.size(); ++i) {
        if (i & mask) continue;
        const Complex a0 = reg.amplitudes()[i];
        const Complex a1 = reg.amplitudes()[i | mask];
        out[i] = u[0] * a0 + u[1] * a1;
        out[i | mask] = u[2] * a0 + u[3] * a1;
    }
    return out;
}

inline std::vector<Complex> apply_controlled(const QuantumRegister& reg,
                                             const Complex* u, int control,
                                             int target) {
    const std::uint64_t cmask = qubit_mask(reg, control);
    const std::uint64_t tmask = qubit_mask(reg, target);
    std::vector<Complex> out(reg.amplitudes());
    for (std::uint64_t i = 0; i < out.size(); ++i) {
        if (!(i & cmask) || (i & tmask)) continue;
        const Complex a0 = reg.amplitudes()[i];
        const Complex a1 = reg.amplitudes()[i | tmask];
        out[i] = u[0] * a0 + u[1] * a1;
        out[i | tmask] = u[2] * a0 + u[3] * a1;
    }
    return out;
}

}  // namespace detail

inline QuantumRegister apply_gate(const QuantumRegister& state, const GateSpec& gate) {
    switch (gate.kind()) {
        case GateKind::H:
        case GateKind::X:
        case GateKind::Z:
        case GateKind::Rot: {
            const auto m = gate.matrix();
            return with_amplitudes_unchecked(
                state, detail::apply_single(state, m.data(), gate.targets()[0]));
        }
        case GateKind::Cnot: {
            const Complex x[4] = {0, 1, 1, 0};
            return with_amplitudes_unchecked(
                state, detail::apply_controlled(state, x, gate.targets()[0],
                                                gate.targets()[1]));
        }
        case GateKind::Crot: {
            const double c = std::cos(gate.angle());
            const double s = std::sin(gate.angle());
            const Complex r[4] = {c, -s, s, c};
            return with_amplitudes_unchecked(
                state, detail::apply_controlled(state, r, gate.targets()[0],
                                                gate.targets()[1]));
        }
    }
    throw ConfigError("unknown gate kind");
}

inline QuantumRegister apply_gates(QuantumRegister state,
                                   std::span<const GateSpec> gates) {
    for (const auto& g : gates) state = apply_gate(state, g);
    return state;
}

// One outcome of measuring a qubit subset: the observed bits (first measured
// qubit is the high bit of `bits`), its probability, and the collapsed,
// renormalized post-measurement state.
struct BranchOutcome {
    std::uint64_t bits = 0;
    double probability = 0.0;
    QuantumRegister post_state;
};

// Every outcome with nonzero probability, pruned at kBranchPrune and
// renormalized so the probabilities sum to exactly one.
inline std::vector<BranchOutcome> measure_branches(const QuantumRegister& state,
                                                   std::span<const int> qubits) {
    if (qubits.empty()) throw ConfigError("measurement needs at least one qubit");
    std::vector<std::uint64_t> masks;
    masks.reserve(qubits.size());
    for (int q : qubits) masks.push_back(detail::qubit_mask(state, q));

    const std::size_t num_outcomes = std::size_t{1} << qubits.size();
    std::vector<double> prob(num_outcomes, 0.0);
    const auto& amps = state.amplitudes();
    auto outcome_of = [&](std::uint64_t index) {
        std::uint64_t o = 0;
        for (std::size_t j = 0; j < masks.size(); ++j) {
            o = (o << 1) | ((index & masks[j]) ? 1u : 0u);
        }
        return o;
    };
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
        prob[outcome_of(i)] += std::norm(amps[i]);
    }

    double kept = 0.0;
    for (double p : prob) {
        if (p >= kBranchPrune) kept += p;
    }
    if (kept <= 0.0) throw ConfigError("no measurement outcome above prune threshold");

    std::vector<BranchOutcome> branches;
    for (std::uint64_t o = 0; o < num_outcomes; ++o) {
        if (prob[o] < kBranchPrune) continue;
        const double p = prob[o] / kept;
        std::vector<Complex> post(amps.size(), Complex{0.0, 0.0});
        const double scale = 1.0 / std::sqrt(prob[o]);
        for (std::uint64_t i = 0; i < amps.size(); ++i) {
            if (outcome_of(i) == o) post[i] = amps[i] * scale;
        }
        branches.push_back(
            BranchOutcome{o, p, with_amplitudes_unchecked(state, std::move(post))});
    }
    return branches;
}

struct SampledMeasurement {
    std::uint64_t bits = 0;
    QuantumRegister post_state;
};

// Reproducible uniform double in [0,1); avoids std::uniform_real_distribution,
// whose output is implementation-defined.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline SampledMeasurement measure_sampled(const QuantumRegister& state,
                                          std::span<const int> qubits,
                                          std::uint64_t seed) {
    auto branches = measure_branches(state, qubits);
    std::mt19937_64 rng(seed);
    const double r = uniform01(rng);
    double acc = 0.0;
    for (auto& b : branches) {
        acc += b.probability;
        if (r < acc) return SampledMeasurement{b.bits, std::move(b.post_state)};
    }
    auto& last = branches.back();
    return SampledMeasurement{last.bits, std::move(last.post_state)};
}

// Prepare |0>, apply H, measure: the textbook fair coin.
inline std::vector<BranchOutcome> quantum_coin_branches() {
    QuantumRegister q = apply_gate(QuantumRegister(1), GateSpec::h(0));
    const int qubits[] = {0};
    return measure_branches(q, qubits);
}

inline int quantum_coin_sample(std::uint64_t seed) {
    QuantumRegister q = apply_gate(QuantumRegister(1), GateSpec::h(0));
    const int qubits[] = {0};
    return static_cast<int>(measure_sampled(q, qubits, seed).bits);
}

// Two qubits in the singlet sqrt(1/2)|01> - sqrt(1/2)|10|.
inline QuantumRegister make_epr_pair() {
    const double s = 1.0 / std::sqrt(2.0);
    return QuantumRegister(2, {Complex{0, 0}, Complex{s, 0}, Complex{-s, 0}, Complex{0, 0}});
}

// Gates the sender applies to their half (qubit 0) of a fresh EPR pair to
// encode two classical bits: 00 -> none, 01 -> X, 10 -> Z, 11 -> Z then X.
inline std::vector<GateSpec> superdense_encode(int first_bit, int second_bit) {
    if ((first_bit & ~1) || (second_bit & ~1)) {
        throw ConfigError("superdense_encode takes two bits");
    }
    std::vector<GateSpec> gates;
    if (first_bit == 1) gates.push_back(GateSpec::z(0));
    if (second_bit == 1) gates.push_back(GateSpec::x(0));
    return gates;
}

// The four joint states reachable by superdense_encode from the EPR pair,
// indexed by (first_bit, second_bit) packed as first*2 + second.
inline std::vector<QuantumRegister> superdense_basis() {
    std::vector<QuantumRegister> basis;
    basis.reserve(4);
    for (int pair = 0; pair < 4; ++pair) {
        auto gates = superdense_encode(pair >> 1, pair & 1);
        basis.push_back(apply_gates(make_epr_pair(), gates));
    }
    return basis;
}

// Joint measurement in the encoded basis, realized as CNOT(0->1), H(0), then a
// computational-basis readout. Deterministic for any exactly encoded state.
inline std::pair<int, int> superdense_decode(const QuantumRegister& state) {
    if (state.num_qubits() != 2) {
        throw DecodeError("superdense_decode expects a 2-qubit state");
    }
    bool in_basis = false;
    for (const auto& b : superdense_basis()) {
        if (state.fidelity(b) >= 1.0 - kFidelityTolerance) {
            in_basis = true;
            break;
        }
    }
    if (!in_basis) {
        throw DecodeError("state is not one of the four encoded basis states");
    }
    QuantumRegister rotated =
        apply_gate(apply_gate(state, GateSpec::cnot(0, 1)), GateSpec::h(0));
    const int qubits[] = {0, 1};
    auto branches = measure_branches(rotated, qubits);
    const BranchOutcome* best = &branches.front();
    for (const auto& b : branches) {
        if (b.probability > best->probability) best = &b;
    }
    // Measured (m0, m1) maps back through the encode table as the complement.
    const int m0 = static_cast<int>((best->bits >> 1) & 1);
    const int m1 = static_cast<int>(best->bits & 1);
    return {1 - m0, 1 - m1};
}

}  // namespace qonline::qcore
