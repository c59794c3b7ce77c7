#pragma once

// The (n,r,w) parity-number-of-equality-hats problem: like pnh but each block
// contributes the equality of its two halves instead of a counting parity.
// The first two blocks are tested by a streaming quantum fingerprint with
// verified one-sided error.

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qonline/bits.hpp"
#include "qonline/errors.hpp"
#include "qonline/game.hpp"
#include "qonline/pnh.hpp"
#include "qonline/qcore.hpp"

namespace qonline::pneh {

struct PnehParams {
    double r = 1.0;
    double w = 2.0;
};

inline void validate_params(const PnehParams& p) {
    if (!(p.r > 0.0) || !(p.w > 0.0)) throw ConfigError("costs must be positive");
    if (!(p.r < p.w)) throw ConfigError("r < w is required");
}

// 1 iff the first half of X equals the second half. Odd lengths are rejected:
// halves of different lengths are never equal, which collapses the function.
inline int eq_m(const BitString& block) {
    if (block.size() < 2 || block.size() % 2 != 0) {
        throw DomainError("block length must be even and at least 2");
    }
    const std::size_t half = block.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        if (block[i] != block[half + i]) return 0;
    }
    return 1;
}

struct PnehProblem {
    using Instance = std::vector<int>;

    PnehParams params;

    explicit PnehProblem(PnehParams p) : params(p) { validate_params(params); }

    void validate(const Instance& symbols) const {
        auto blocks = pnh::PnhProblem::split_blocks(symbols);
        for (const auto& block : blocks) {
            if (block.size() < 2 || block.size() % 2 != 0) {
                throw ValidationError("block lengths must be even and at least 2");
            }
        }
    }

    std::vector<int> requests(const Instance& symbols) const { return symbols; }

    std::array<int, 3> eq_values(const Instance& symbols) const {
        auto blocks = pnh::PnhProblem::split_blocks(symbols);
        return {eq_m(blocks[0]), eq_m(blocks[1]), eq_m(blocks[2])};
    }

    std::array<int, 3> z_values(const Instance& symbols) const {
        auto eq = eq_values(symbols);
        return {eq[0] ^ eq[1] ^ eq[2], eq[1] ^ eq[2], eq[2]};
    }

    double cost(const Instance& symbols, std::span<const int> output) const {
        if (output.size() != symbols.size()) {
            throw ValidationError("output length must match instance length");
        }
        const auto z = z_values(symbols);
        const auto pos = pnh::PnhProblem::guardian_positions(symbols);
        for (int j = 0; j < 3; ++j) {
            if (output[pos[j]] != z[j]) return params.w;
        }
        return params.r;
    }

    double opt_cost(const Instance&) const { return params.r; }
};

// --- Fingerprint configuration ---------------------------------------------------

// Rotation coefficients for the streaming equality test. A block of length 2L
// reduces to the difference D of its halves modulo q = 2^L; the test accepts
// with probability ((1/t) sum_i cos(2 pi k_i D / q))^2, so the verified bound
// below caps the error on unequal halves while equal halves always accept.
struct FingerprintConfig {
    int L = 0;
    std::uint32_t q = 0;  // 2^L
    int t = 0;            // number of coefficients, a power of two
    int tau = 0;          // log2(t) index qubits
    double epsilon = 0.0;
    std::vector<std::uint32_t> coefficients;  // in [1, q-1]
    std::uint64_t seed = 0;
};

inline double accept_probability_closed_form(const FingerprintConfig& config,
                                             std::uint32_t d) {
    const double two_pi = 2.0 * std::acos(-1.0);
    double sum = 0.0;
    for (std::uint32_t ki : config.coefficients) {
        sum += std::cos(two_pi * static_cast<double>(ki) * static_cast<double>(d) /
                        static_cast<double>(config.q));
    }
    const double avg = sum / static_cast<double>(config.t);
    return avg * avg;
}

struct VerificationResult {
    double max_accept = 0.0;
    std::uint32_t worst_d = 0;
};

// Exhausts every nonzero difference D; the maximum accept probability is the
// config's actual one-sided error.
inline VerificationResult verify_fingerprint_config(const FingerprintConfig& config) {
    if (config.L < 1 || config.q != (1u << config.L)) {
        throw ValidationError("config modulus must be q = 2^L with L >= 1");
    }
    if (config.t < 1 || (config.t & (config.t - 1)) != 0 ||
        config.coefficients.size() != static_cast<std::size_t>(config.t)) {
        throw ValidationError("config needs t coefficients with t a power of two");
    }
    for (std::uint32_t ki : config.coefficients) {
        if (ki < 1 || ki >= config.q) {
            throw ValidationError("coefficients must lie in [1, q-1]");
        }
    }
    VerificationResult result;
    for (std::uint32_t d = 1; d < config.q; ++d) {
        const double p = accept_probability_closed_form(config, d);
        if (p > result.max_accept) {
            result.max_accept = p;
            result.worst_d = d;
        }
    }
    return result;
}

// Draws coefficient sets at random (seeded) until one passes the exhaustive
// verification, or fails after max_retries draws.
inline FingerprintConfig build_fingerprint_config(int L, double epsilon, int t,
                                                  std::uint64_t seed,
                                                  int max_retries = 10) {
    if (L < 1 || L > 16) throw ConfigError("L must be in [1, 16]");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must be in (0, 1)");
    if (t < 2 || (t & (t - 1)) != 0) {
        throw ConfigError("t must be a power of two, at least 2");
    }
    if (max_retries < 1) throw ConfigError("max_retries must be positive");

    FingerprintConfig config;
    config.L = L;
    config.q = 1u << L;
    config.t = t;
    config.tau = 0;
    while ((1 << config.tau) < t) ++config.tau;
    config.epsilon = epsilon;
    config.seed = seed;

    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        config.coefficients.clear();
        config.coefficients.reserve(static_cast<std::size_t>(t));
        for (int i = 0; i < t; ++i) {
            config.coefficients.push_back(
                1u + static_cast<std::uint32_t>(rng() % (config.q - 1)));
        }
        if (verify_fingerprint_config(config).max_accept <= epsilon) {
            return config;
        }
    }
    throw SearchError("no verified coefficient set after " +
                      std::to_string(max_retries) + " draws; increase t");
}

// --- Streaming fingerprint --------------------------------------------------------

namespace detail {

// Rotates the target qubit (the last one) by angles[i] on the subspace where
// the index register reads i. Block-diagonal and unitary by construction.
inline qcore::QuantumRegister rotate_target_by_index(const qcore::QuantumRegister& reg,
                                                     std::span<const double> angles) {
    const auto& amps = reg.amplitudes();
    std::vector<qcore::Complex> out(amps.size());
    for (std::size_t idx = 0; idx < angles.size(); ++idx) {
        const double c = std::cos(angles[idx]);
        const double s = std::sin(angles[idx]);
        const std::size_t base = idx << 1;
        out[base] = c * amps[base] - s * amps[base | 1];
        out[base | 1] = s * amps[base] + c * amps[base | 1];
    }
    return qcore::with_amplitudes_unchecked(reg, std::move(out));
}

}  // namespace detail

// Streams one block through the fingerprint register: tau index qubits in
// uniform superposition plus one target qubit. Bit j of the first half feeds
// weight +2^{j-1}, bit j of the second half -2^{j-1}; after the closing
// Hadamards the all-zero outcome means "halves equal".
class FingerprintStream {
public:
    FingerprintStream(const FingerprintConfig& config, int block_length)
        : config_(config),
          block_length_(block_length),
          state_(config.tau + 1) {
        if (block_length < 2 || block_length % 2 != 0) {
            throw ConfigError("fingerprinted block length must be even, at least 2");
        }
        if (block_length != 2 * config.L) {
            throw ConfigError("block length " + std::to_string(block_length) +
                              " does not match 2L = " + std::to_string(2 * config.L));
        }
        for (int qubit = 0; qubit < config_.tau; ++qubit) {
            state_ = qcore::apply_gate(state_, qcore::GateSpec::h(qubit));
        }
    }

    int qubit_count() const { return config_.tau + 1; }
    int feeds_expected() const { return block_length_; }
    int feeds_seen() const { return feeds_; }

    // Signed weight of the feed at 0-based position within the block.
    static std::int64_t position_weight(int position, int block_length) {
        const int half = block_length / 2;
        const int j = position % half;  // 0-based within the half
        const std::int64_t magnitude = std::int64_t{1} << j;
        return position < half ? magnitude : -magnitude;
    }

    void feed(int bit, std::int64_t signed_weight) {
        if (feeds_ >= block_length_) {
            throw ProtocolError("fingerprint already received its " +
                                std::to_string(block_length_) + " feeds");
        }
        ++feeds_;
        if (bit == 0) return;
        const double two_pi = 2.0 * std::acos(-1.0);
        const auto q = static_cast<std::int64_t>(config_.q);
        const std::int64_t w = ((signed_weight % q) + q) % q;
        std::vector<double> angles(static_cast<std::size_t>(config_.t));
        for (int i = 0; i < config_.t; ++i) {
            angles[static_cast<std::size_t>(i)] =
                two_pi * static_cast<double>(config_.coefficients[i]) *
                static_cast<double>(w) / static_cast<double>(config_.q);
        }
        // Unused index values (t is a power of two, so there are none) would
        // simply get angle zero.
        state_ = detail::rotate_target_by_index(state_, angles);
    }

    void feed_position(int bit, int position) {
        feed(bit, position_weight(position, block_length_));
    }

    // Applies the closing Hadamards and hands the register to the caller for
    // measurement: outcome all-zeros across the tau+1 qubits accepts.
    qcore::QuantumRegister finalize() {
        if (feeds_ != block_length_) {
            throw ProtocolError("fingerprint finalized after " + std::to_string(feeds_) +
                                " of " + std::to_string(block_length_) + " feeds");
        }
        qcore::QuantumRegister out = state_;
        for (int qubit = 0; qubit < config_.tau; ++qubit) {
            out = qcore::apply_gate(out, qcore::GateSpec::h(qubit));
        }
        return out;
    }

    // Probability of the accepting (all-zero) outcome, by direct simulation.
    double accept_probability() const {
        FingerprintStream copy = *this;
        const qcore::QuantumRegister out = copy.finalize();
        return std::norm(out.amplitude(0));
    }

private:
    FingerprintConfig config_;
    int block_length_;
    qcore::QuantumRegister state_;
    int feeds_ = 0;
};

// Convenience: stream a whole block and report the accept probability.
inline double fingerprint_accept_probability(const FingerprintConfig& config,
                                             const BitString& block) {
    FingerprintStream stream(config, static_cast<int>(block.size()));
    for (std::size_t i = 0; i < block.size(); ++i) {
        stream.feed_position(block[i], static_cast<int>(i));
    }
    return stream.accept_probability();
}

// --- Algorithm 2 -------------------------------------------------------------------

// Real mode streams the first two blocks through the verified fingerprint;
// idealized mode replaces it with a one-sided oracle that errs with
// probability exactly epsilon on unequal halves. Only the idealized mode
// reproduces the closed-form cell probabilities exactly, because a real
// fingerprint's error depends on the instance (it is merely <= epsilon).
struct Alg2Mode {
    static Alg2Mode real(FingerprintConfig config) {
        Alg2Mode m;
        m.config = std::move(config);
        return m;
    }
    static Alg2Mode idealized(double epsilon) {
        if (!(epsilon >= 0.0 && epsilon < 1.0)) {
            throw ConfigError("epsilon must be in [0, 1)");
        }
        Alg2Mode m;
        m.epsilon = epsilon;
        return m;
    }

    std::optional<FingerprintConfig> config;
    double epsilon = 0.0;
};

namespace detail {

class Alg2Run final : public game::AlgorithmRun {
public:
    Alg2Run(game::RunContext& ctx, const Alg2Mode& mode) : mode_(mode) {
        auto lease = ctx.lease_qubits(1);
        qcore::QuantumRegister coin =
            qcore::apply_gate(qcore::QuantumRegister(1), qcore::GateSpec::h(0));
        const int qubits[] = {0};
        y_ = static_cast<int>(ctx.measure(coin, qubits));
    }

    int answer(game::RunContext& ctx, int request) override {
        if (request == 2) {
            ++guardians_;
            if (guardians_ == 1) return y_;
            if (guardians_ <= 3) {
                const int v = block_value(ctx);
                begin_block();  // returns the fingerprint qubits before the CNOT step
                apply_cnot_update(ctx, v);
                return y_;
            }
            return 0;
        }
        if (guardians_ >= 1 && guardians_ < 3) {
            consume_block_bit(ctx, request);
        }
        return 0;
    }

private:
    void begin_block() {
        stream_.reset();
        stream_lease_.reset();
        block_.clear();
        position_ = 0;
    }

    void consume_block_bit(game::RunContext& ctx, int bit) {
        if (mode_.config) {
            if (!stream_) {
                stream_lease_ = ctx.lease_qubits(mode_.config->tau + 1);
                stream_.emplace(*mode_.config, 2 * mode_.config->L);
            }
            stream_->feed_position(bit, position_);
        } else {
            block_.push_back(bit);
        }
        ++position_;
    }

    int block_value(game::RunContext& ctx) {
        if (mode_.config) {
            if (!stream_) {
                throw ConfigError("block length does not match the fingerprint config");
            }
            qcore::QuantumRegister reg = stream_->finalize();
            std::vector<int> qubits(static_cast<std::size_t>(mode_.config->tau) + 1);
            for (std::size_t i = 0; i < qubits.size(); ++i) qubits[i] = static_cast<int>(i);
            const std::uint64_t bits = ctx.measure(reg, qubits);
            return bits == 0 ? 1 : 0;
        }
        const int eq = eq_m(block_);
        if (eq == 1) return 1;
        if (mode_.epsilon <= 0.0) return 0;
        const double flip[] = {1.0 - mode_.epsilon, mode_.epsilon};
        return static_cast<int>(ctx.choose(flip));
    }

    // Loads |v>|y> into a fresh two-qubit register, applies CNOT with v as
    // control, and measures the answer qubit: y <- y XOR v.
    void apply_cnot_update(game::RunContext& ctx, int v) {
        auto lease = ctx.lease_qubits(2);
        auto reg = qcore::QuantumRegister::basis(
            2, (static_cast<std::uint64_t>(v) << 1) | static_cast<std::uint64_t>(y_));
        reg = qcore::apply_gate(reg, qcore::GateSpec::cnot(0, 1));
        const int qubits[] = {1};
        y_ = static_cast<int>(ctx.measure(reg, qubits));
    }

    Alg2Mode mode_;
    int y_ = 0;
    int guardians_ = 0;
    int position_ = 0;
    BitString block_;
    std::optional<FingerprintStream> stream_;
    game::QubitLease stream_lease_;
};

class Alg2Quantum final : public game::OnlineAlgorithm {
public:
    explicit Alg2Quantum(Alg2Mode mode) : mode_(std::move(mode)) {
        info_.id = mode_.config ? "pneh-alg2-fingerprint" : "pneh-alg2-idealized";
        info_.resources.kind = game::AlgorithmKind::Quantum;
        info_.resources.qubits = mode_.config ? mode_.config->tau + 1 : 2;
    }

    const game::AlgorithmInfo& info() const override { return info_; }

    std::unique_ptr<game::AlgorithmRun> start(game::RunContext& ctx,
                                              const BitString&) const override {
        return std::make_unique<Alg2Run>(ctx, mode_);
    }

private:
    Alg2Mode mode_;
    game::AlgorithmInfo info_;
};

}  // namespace detail

inline std::unique_ptr<game::OnlineAlgorithm> alg2_quantum(Alg2Mode mode) {
    return std::make_unique<detail::Alg2Quantum>(std::move(mode));
}

// --- Closed forms -----------------------------------------------------------------

// Classes are labelled by the per-block equality values (v1 v2 v3), packed
// with v1 as the high bit.
inline std::array<int, 3> class_bits(int eq_class) {
    if (eq_class < 0 || eq_class > 7) throw DomainError("class label must be in [0, 7]");
    return {(eq_class >> 2) & 1, (eq_class >> 1) & 1, eq_class & 1};
}

inline double pneh_expected_cost_closed_form(int eq_class, double r, double w,
                                             double epsilon) {
    const auto e = class_bits(eq_class);
    const int error_prone = (e[0] == 0 ? 1 : 0) + (e[1] == 0 ? 1 : 0);
    switch (error_prone) {
        case 0:
            return r / 2.0 + w / 2.0;
        case 1:
            return r * (1.0 - epsilon) / 2.0 + w * (1.0 + epsilon) / 2.0;
        default:
            return r * (1.0 - epsilon) * (1.0 - epsilon) / 2.0 +
                   w * ((1.0 - epsilon * epsilon) / 2.0 + epsilon);
    }
}

// Probability of answer triple (y1,y2,y3) on a class-(v1,v2,v3) instance:
// y1 is a fair coin, y2 = y1 XOR v1', y3 = y2 XOR v2', where vi' reports an
// equal block faithfully and an unequal one as equal with probability epsilon.
inline double table_cell_probability(int eq_class, int y_triple, double epsilon) {
    const auto e = class_bits(eq_class);
    if (y_triple < 0 || y_triple > 7) throw DomainError("answer label must be in [0, 7]");
    const int y1 = (y_triple >> 2) & 1;
    const int y2 = (y_triple >> 1) & 1;
    const int y3 = y_triple & 1;
    auto report_prob = [epsilon](int eq, int reported) {
        if (eq == 1) return reported == 1 ? 1.0 : 0.0;
        return reported == 1 ? epsilon : 1.0 - epsilon;
    };
    return 0.5 * report_prob(e[0], y1 ^ y2) * report_prob(e[1], y2 ^ y3);
}

inline double table_cell_cost(int eq_class, int y_triple, double r, double w) {
    const auto e = class_bits(eq_class);
    const std::array<int, 3> z = {e[0] ^ e[1] ^ e[2], e[1] ^ e[2], e[2]};
    const int correct = (z[0] << 2) | (z[1] << 1) | z[2];
    return y_triple == correct ? r : w;
}

// --- Instance construction ----------------------------------------------------------

// One block of the requested length with the requested equality value.
inline BitString make_eq_block(int eq, int length, std::mt19937_64& rng) {
    if (length < 2 || length % 2 != 0) throw ConfigError("even length >= 2 required");
    const int half = length / 2;
    BitString first(static_cast<std::size_t>(half));
    for (auto& b : first) b = static_cast<int>(rng() & 1);
    BitString block = first;
    if (eq == 1) {
        block.insert(block.end(), first.begin(), first.end());
    } else {
        BitString second = first;
        const std::size_t flip = static_cast<std::size_t>(rng() % half);
        second[flip] ^= 1;
        block.insert(block.end(), second.begin(), second.end());
    }
    return block;
}

// One instance per equality class (v1,v2,v3), labelled 0..7.
inline std::vector<PnehProblem::Instance> enumerate_pneh_family(
    std::array<int, 3> block_lengths, std::uint64_t seed) {
    std::vector<PnehProblem::Instance> family;
    family.reserve(8);
    std::mt19937_64 rng(seed);
    for (int eq_class = 0; eq_class < 8; ++eq_class) {
        const auto e = class_bits(eq_class);
        std::array<BitString, 3> blocks = {make_eq_block(e[0], block_lengths[0], rng),
                                           make_eq_block(e[1], block_lengths[1], rng),
                                           make_eq_block(e[2], block_lengths[2], rng)};
        family.push_back(pnh::assemble_instance(blocks));
    }
    return family;
}

}  // namespace qonline::pneh
