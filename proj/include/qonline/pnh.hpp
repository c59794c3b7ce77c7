#pragma once

// The (n,k,r,w) parity-for-number-of-hats problem: three guardian requests
// ('2') separate three 0/1 blocks; guardian j must output the XOR of the
// block multiplicity parities from block j onward. Cost is r if all three
// guardians are right and w otherwise.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qonline/bits.hpp"
#include "qonline/errors.hpp"
#include "qonline/game.hpp"
#include "qonline/qcore.hpp"

namespace qonline::pnh {

struct PnhParams {
    int k = 0;
    double r = 1.0;
    double w = 2.0;
};

inline void validate_params(const PnhParams& p) {
    if (p.k < 0 || p.k > 16) throw ConfigError("k must be in [0, 16]");
    if (!(p.r > 0.0) || !(p.w > 0.0)) throw ConfigError("costs must be positive");
    if (!(p.r < p.w)) throw ConfigError("r < w is required");
}

// Parity of v where the block contains exactly v * 2^k ones, v >= 2.
inline int partial_mod(const BitString& block, int k) {
    if (k < 0 || k > 30) throw DomainError("k out of range");
    const int ones = count_ones(block);
    const int unit = 1 << k;
    if (ones % unit != 0) {
        throw DomainError("ones count " + std::to_string(ones) +
                          " is not a multiple of 2^k = " + std::to_string(unit));
    }
    const int v = ones / unit;
    if (v < 2) throw DomainError("multiplicity v = " + std::to_string(v) + " is below 2");
    return v % 2;
}

struct PnhProblem {
    using Instance = std::vector<int>;

    PnhParams params;

    explicit PnhProblem(PnhParams p) : params(p) { validate_params(params); }

    // Shape 2,X1,2,X2,2,X3 with exactly three '2' markers.
    static std::array<BitString, 3> split_blocks(const Instance& symbols) {
        std::array<BitString, 3> blocks;
        int guardian = -1;
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            const int s = symbols[i];
            if (s == 2) {
                ++guardian;
                if (guardian > 2) throw ValidationError("more than three '2' markers");
            } else if (s == 0 || s == 1) {
                if (guardian < 0) throw ValidationError("input must start with '2'");
                blocks[guardian].push_back(s);
            } else {
                throw ValidationError("symbols must be 0, 1 or 2");
            }
        }
        if (guardian != 2) throw ValidationError("exactly three '2' markers required");
        return blocks;
    }

    static std::array<std::size_t, 3> guardian_positions(const Instance& symbols) {
        std::array<std::size_t, 3> pos{};
        int seen = 0;
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            if (symbols[i] == 2) {
                if (seen > 2) throw ValidationError("more than three '2' markers");
                pos[seen++] = i;
            }
        }
        if (seen != 3) throw ValidationError("exactly three '2' markers required");
        return pos;
    }

    void validate(const Instance& symbols) const {
        auto blocks = split_blocks(symbols);
        const int min_len = 1 << (params.k + 1);
        for (const auto& block : blocks) {
            if (static_cast<int>(block.size()) < min_len) {
                throw ValidationError("block length " + std::to_string(block.size()) +
                                      " is below 2^(k+1) = " + std::to_string(min_len));
            }
            try {
                (void)partial_mod(block, params.k);
            } catch (const DomainError& e) {
                throw ValidationError(std::string("invalid block: ") + e.what());
            }
        }
    }

    std::vector<int> requests(const Instance& symbols) const { return symbols; }

    std::array<int, 3> block_mods(const Instance& symbols) const {
        auto blocks = split_blocks(symbols);
        return {partial_mod(blocks[0], params.k), partial_mod(blocks[1], params.k),
                partial_mod(blocks[2], params.k)};
    }

    // z_j = XOR of the block parities from block j onward.
    std::array<int, 3> z_values(const Instance& symbols) const {
        auto mods = block_mods(symbols);
        return {mods[0] ^ mods[1] ^ mods[2], mods[1] ^ mods[2], mods[2]};
    }

    double cost(const Instance& symbols, std::span<const int> output) const {
        if (output.size() != symbols.size()) {
            throw ValidationError("output length must match instance length");
        }
        const auto z = z_values(symbols);
        const auto pos = guardian_positions(symbols);
        for (int j = 0; j < 3; ++j) {
            if (output[pos[j]] != z[j]) return params.w;
        }
        return params.r;
    }

    double opt_cost(const Instance&) const { return params.r; }
};

// Block with exactly v * 2^k ones followed by zeros.
inline BitString make_block(int v, int k, int length) {
    const int ones = v << k;
    if (ones > length) throw ConfigError("block too short for v * 2^k ones");
    BitString block(static_cast<std::size_t>(length), 0);
    for (int i = 0; i < ones; ++i) block[i] = 1;
    return block;
}

inline PnhProblem::Instance assemble_instance(const std::array<BitString, 3>& blocks) {
    PnhProblem::Instance symbols;
    for (const auto& block : blocks) {
        symbols.push_back(2);
        symbols.insert(symbols.end(), block.begin(), block.end());
    }
    return symbols;
}

inline PnhProblem::Instance parse_pnh_symbols(std::string_view line) {
    PnhProblem::Instance symbols;
    symbols.reserve(line.size());
    for (char c : line) {
        if (c == '0' || c == '1' || c == '2') {
            symbols.push_back(c - '0');
        } else if (c == ' ' || c == '\t' || c == '\r') {
            continue;
        } else {
            throw ValidationError("instance line may contain only 0, 1, 2");
        }
    }
    return symbols;
}

namespace detail {

// Fisher-Yates with an explicit generator so results do not depend on the
// standard library's std::shuffle implementation.
inline void stable_shuffle(BitString& bits, std::mt19937_64& rng) {
    for (std::size_t i = bits.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(bits[i - 1], bits[j]);
    }
}

}  // namespace detail

struct PnhFamilyOptions {
    // Candidate uniform block lengths; empty selects {2^{k+1}, 3*2^k, 2^{k+2}}.
    std::vector<int> block_lengths;
    int shuffles_per_instance = 1;
    std::uint64_t seed = 17;
};

// Enumerates every multiplicity parity pattern (v1,v2,v3) in {2,3}^3 over the
// candidate block lengths, in the ones-first layout plus seeded shuffles.
// Parities, not positions, determine costs; the shuffles probe exactly that.
inline std::vector<PnhProblem::Instance> enumerate_pnh_family(
    const PnhParams& params, const PnhFamilyOptions& options = {}) {
    validate_params(params);
    std::vector<int> lengths = options.block_lengths;
    if (lengths.empty()) {
        lengths = {1 << (params.k + 1), 3 << params.k, 1 << (params.k + 2)};
    }
    std::vector<PnhProblem::Instance> family;
    std::mt19937_64 rng(options.seed);
    for (int length : lengths) {
        for (int pattern = 0; pattern < 8; ++pattern) {
            const std::array<int, 3> vs = {2 + ((pattern >> 2) & 1),
                                           2 + ((pattern >> 1) & 1), 2 + (pattern & 1)};
            if ((std::max({vs[0], vs[1], vs[2]}) << params.k) > length) continue;
            std::array<BitString, 3> blocks = {make_block(vs[0], params.k, length),
                                               make_block(vs[1], params.k, length),
                                               make_block(vs[2], params.k, length)};
            family.push_back(assemble_instance(blocks));
            for (int s = 0; s < options.shuffles_per_instance; ++s) {
                auto shuffled = blocks;
                for (auto& block : shuffled) detail::stable_shuffle(block, rng);
                family.push_back(assemble_instance(shuffled));
            }
        }
    }
    return family;
}

// --- Algorithms ----------------------------------------------------------------

namespace detail {

// Shared run for the single-qubit rotation algorithms: the working qubit is
// prepared (superposed or from advice), measured for y1, rotated by
// pi / 2^{k+1} per '1' of the first two blocks, and measured at each guardian.
class RotationRun final : public game::AlgorithmRun {
public:
    RotationRun(game::RunContext& ctx, double angle, std::optional<int> advice_bit)
        : angle_(angle), lease_(ctx.lease_qubits(1)) {
        if (advice_bit) {
            reg_.emplace(qcore::QuantumRegister::basis(1, static_cast<std::uint64_t>(*advice_bit)));
        } else {
            reg_.emplace(qcore::apply_gate(qcore::QuantumRegister(1), qcore::GateSpec::h(0)));
        }
        const int qubits[] = {0};
        first_answer_ = static_cast<int>(ctx.measure(*reg_, qubits));
    }

    int answer(game::RunContext& ctx, int request) override {
        if (request == 2) {
            ++guardians_;
            if (guardians_ == 1) return first_answer_;
            if (guardians_ <= 3 && reg_) {
                const int qubits[] = {0};
                const int bit = static_cast<int>(ctx.measure(*reg_, qubits));
                if (guardians_ == 3) {
                    reg_.reset();
                    lease_.reset();
                }
                return bit;
            }
            return 0;
        }
        if (request == 1 && guardians_ >= 1 && guardians_ < 3 && reg_) {
            *reg_ = qcore::apply_gate(*reg_, qcore::GateSpec::rot(0, angle_));
        }
        return 0;
    }

private:
    double angle_;
    game::QubitLease lease_;
    std::optional<qcore::QuantumRegister> reg_;
    int first_answer_ = 0;
    int guardians_ = 0;
};

class Alg1Quantum final : public game::OnlineAlgorithm {
public:
    explicit Alg1Quantum(const PnhParams& params) {
        validate_params(params);
        angle_ = std::acos(-1.0) / static_cast<double>(1 << (params.k + 1));
        info_.id = "pnh-alg1";
        info_.resources.kind = game::AlgorithmKind::Quantum;
        info_.resources.qubits = 1;
    }

    const game::AlgorithmInfo& info() const override { return info_; }

    std::unique_ptr<game::AlgorithmRun> start(game::RunContext& ctx,
                                              const BitString&) const override {
        return std::make_unique<RotationRun>(ctx, angle_, std::nullopt);
    }

private:
    double angle_;
    game::AlgorithmInfo info_;
};

class AdviceOneQubit final : public game::OnlineAlgorithm {
public:
    explicit AdviceOneQubit(const PnhParams& params) {
        validate_params(params);
        angle_ = std::acos(-1.0) / static_cast<double>(1 << (params.k + 1));
        info_.id = "pnh-advice-1qubit";
        info_.resources.kind = game::AlgorithmKind::Quantum;
        info_.resources.qubits = 1;
        info_.resources.advice_bits = 1;
        info_.resources.advice_channels = {game::ChannelKind::PrivateQubits};
    }

    const game::AlgorithmInfo& info() const override { return info_; }

    std::unique_ptr<game::AlgorithmRun> start(game::RunContext& ctx,
                                              const BitString& advice) const override {
        return std::make_unique<RotationRun>(ctx, angle_, advice.at(0));
    }

private:
    double angle_;
    game::AlgorithmInfo info_;
};

// Keeps a running guess p and a ones counter; each completed group of 2^k
// ones flips p. Answers p at every guardian.
class CountingRun final : public game::AlgorithmRun {
public:
    CountingRun(int k, int initial) : unit_(1 << k), p_(initial) {}

    int answer(game::RunContext&, int request) override {
        if (request == 2) return p_;
        if (request == 1) {
            if (++counter_ == unit_) {
                p_ ^= 1;
                counter_ = 0;
            }
        }
        return 0;
    }

private:
    int unit_;
    int p_;
    int counter_ = 0;
};

class GuessCount final : public game::OnlineAlgorithm {
public:
    explicit GuessCount(const PnhParams& params) : k_(params.k) {
        validate_params(params);
        info_.id = "pnh-guess-count";
        info_.resources.kind = game::AlgorithmKind::Randomized;
        info_.resources.classical_bits = params.k + 1;
    }

    const game::AlgorithmInfo& info() const override { return info_; }

    std::unique_ptr<game::AlgorithmRun> start(game::RunContext& ctx,
                                              const BitString&) const override {
        return std::make_unique<CountingRun>(k_, ctx.random_bit());
    }

private:
    int k_;
    game::AlgorithmInfo info_;
};

class AdviceOneBit final : public game::OnlineAlgorithm {
public:
    explicit AdviceOneBit(const PnhParams& params) : k_(params.k) {
        validate_params(params);
        info_.id = "pnh-advice-1bit";
        info_.resources.kind = game::AlgorithmKind::Deterministic;
        info_.resources.classical_bits = params.k + 1;
        info_.resources.advice_bits = 1;
        info_.resources.advice_channels = {game::ChannelKind::ClassicalBits,
                                           game::ChannelKind::PrivateQubits};
    }

    const game::AlgorithmInfo& info() const override { return info_; }

    std::unique_ptr<game::AlgorithmRun> start(game::RunContext&,
                                              const BitString& advice) const override {
        return std::make_unique<CountingRun>(k_, advice.at(0));
    }

private:
    int k_;
    game::AlgorithmInfo info_;
};

class BlindGuessRun final : public game::AlgorithmRun {
public:
    int answer(game::RunContext& ctx, int request) override {
        return request == 2 ? ctx.random_bit() : 0;
    }
};

class BlindGuess final : public game::OnlineAlgorithm {
public:
    BlindGuess() {
        info_.id = "pnh-blind-guess";
        info_.resources.kind = game::AlgorithmKind::Randomized;
    }

    const game::AlgorithmInfo& info() const override { return info_; }

    std::unique_ptr<game::AlgorithmRun> start(game::RunContext&,
                                              const BitString&) const override {
        return std::make_unique<BlindGuessRun>();
    }

private:
    game::AlgorithmInfo info_;
};

}  // namespace detail

// Pure quantum single-qubit algorithm: guesses z1 by measuring a superposed
// qubit, then tracks parity by rotation. Expected cost (r+w)/2.
inline std::unique_ptr<game::OnlineAlgorithm> alg1_quantum(const PnhParams& params) {
    return std::make_unique<detail::Alg1Quantum>(params);
}

// Randomized baseline: guess z1 with a fair coin, count ones, flip on each
// completed 2^k group. Expected cost (r+w)/2.
inline std::unique_ptr<game::OnlineAlgorithm> alg_guess_count(const PnhParams& params) {
    return std::make_unique<detail::GuessCount>(params);
}

// Memoryless baseline answering an independent fair coin at each guardian.
// Expected cost (r + 7w)/8.
inline std::unique_ptr<game::OnlineAlgorithm> alg_blind_guess() {
    return std::make_unique<detail::BlindGuess>();
}

// One classical advice bit (z1) makes the counting algorithm optimal.
inline std::unique_ptr<game::OnlineAlgorithm> alg_advice_1bit(const PnhParams& params) {
    return std::make_unique<detail::AdviceOneBit>(params);
}

// One advice qubit |z1> seeds the working qubit of the rotation algorithm.
inline std::unique_ptr<game::OnlineAlgorithm> alg_advice_1qubit(const PnhParams& params) {
    return std::make_unique<detail::AdviceOneQubit>(params);
}

// The adviser sends z1.
inline BitString pnh_adviser(const PnhProblem& problem,
                             const PnhProblem::Instance& instance) {
    return {problem.z_values(instance)[0]};
}

template <class Problem = PnhProblem>
game::AdviceSetup<Problem> pnh_advice_setup(const Problem& problem,
                                            game::ChannelKind channel) {
    game::AdviceSetup<Problem> setup;
    setup.channel = channel;
    setup.adviser = [problem](const typename Problem::Instance& inst) {
        return pnh_adviser(problem, inst);
    };
    return setup;
}

// --- Deterministic strategy corpus (adversary targets) --------------------------

namespace detail {

class StatelessStrategy final : public game::OnlineAlgorithm {
public:
    StatelessStrategy(std::string id, std::function<int(int, int&)> step)
        : step_(std::move(step)) {
        info_.id = std::move(id);
        info_.resources.kind = game::AlgorithmKind::Deterministic;
        info_.resources.classical_bits = 32;
    }

    const game::AlgorithmInfo& info() const override { return info_; }

    std::unique_ptr<game::AlgorithmRun> start(game::RunContext&,
                                              const BitString&) const override {
        class Run final : public game::AlgorithmRun {
        public:
            explicit Run(const std::function<int(int, int&)>& step) : step_(step) {}
            int answer(game::RunContext&, int request) override {
                return step_(request, state_);
            }

        private:
            const std::function<int(int, int&)>& step_;
            int state_ = 0;
        };
        return std::make_unique<Run>(step_);
    }

private:
    game::AlgorithmInfo info_;
    std::function<int(int, int&)> step_;
};

}  // namespace detail

// Built-in deterministic strategies the adversary is exercised against.
inline std::vector<std::unique_ptr<game::OnlineAlgorithm>> deterministic_strategies() {
    using detail::StatelessStrategy;
    std::vector<std::unique_ptr<game::OnlineAlgorithm>> out;
    out.push_back(std::make_unique<StatelessStrategy>(
        "det-const-0", [](int, int&) { return 0; }));
    out.push_back(std::make_unique<StatelessStrategy>(
        "det-const-1", [](int, int&) { return 1; }));
    out.push_back(std::make_unique<StatelessStrategy>(
        "det-copy-last-answer", [](int, int& state) { return state; }));
    out.push_back(std::make_unique<StatelessStrategy>(
        "det-majority-so-far", [](int request, int& state) {
            // state = (#1s seen) - (#0s seen), over the 0/1 symbols
            if (request == 1) ++state;
            if (request == 0) --state;
            return state > 0 ? 1 : 0;
        }));
    out.push_back(std::make_unique<StatelessStrategy>(
        "det-parity-of-ones", [](int request, int& state) {
            if (request == 1) state ^= 1;
            return state;
        }));
    out.push_back(std::make_unique<StatelessStrategy>(
        "det-alternating", [](int request, int& state) {
            if (request == 2) return (state++) % 2;
            return 0;
        }));
    return out;
}

// Plays the request prefix 2,X1,2,X2,2 with both leading blocks of parity 0,
// reads the guardians' answers, and completes X3 so its parity differs from
// their majority. At least two guardians are then wrong: cost w.
inline PnhProblem::Instance adversary_unrestricted(const game::OnlineAlgorithm& algorithm,
                                                   const PnhParams& params) {
    validate_params(params);
    const int m = 3 << params.k;
    const BitString zero_block = make_block(2, params.k, m);  // parity 0

    PnhProblem::Instance prefix;
    prefix.push_back(2);
    prefix.insert(prefix.end(), zero_block.begin(), zero_block.end());
    prefix.push_back(2);
    prefix.insert(prefix.end(), zero_block.begin(), zero_block.end());
    prefix.push_back(2);

    const std::vector<int> answers = game::run_deterministic_prefix(algorithm, prefix);
    const int y1 = answers[0];
    const int y2 = answers[1 + m];
    const int y3 = answers[2 + 2 * m];
    const int b = (y1 + y2 + y3 >= 2) ? 1 : 0;

    // Parity 1 needs v = 3 (all ones at m = 3 * 2^k); parity 0 uses v = 2.
    const BitString last_block =
        (1 - b) == 1 ? make_block(3, params.k, m) : make_block(2, params.k, m);
    PnhProblem::Instance instance = prefix;
    instance.insert(instance.end(), last_block.begin(), last_block.end());
    return instance;
}

// --- Fooling-pair search ---------------------------------------------------------

// Explicit deterministic reader over {0,1}: next[state][bit].
struct TransitionTable {
    int num_states = 1;
    int start_state = 0;
    std::vector<std::array<int, 2>> next;
};

inline TransitionTable stateless_machine() { return {1, 0, {{0, 0}}}; }

inline TransitionTable ones_parity_machine() {
    return {2, 0, {{{0, 1}}, {{1, 0}}}};
}

inline TransitionTable ones_counter_machine(int modulus) {
    if (modulus < 1) throw ConfigError("modulus must be positive");
    TransitionTable t;
    t.num_states = modulus;
    t.start_state = 0;
    t.next.resize(static_cast<std::size_t>(modulus));
    for (int s = 0; s < modulus; ++s) {
        t.next[s] = {s, (s + 1) % modulus};
    }
    return t;
}

// Searches for two length-m blocks, both with a well-defined multiplicity
// v >= 2 over 2^k, that drive the machine from its start state to a common
// state while their parities differ. Returns the pair (parity 0 first) or
// nothing if no such pair exists at this length.
inline std::optional<std::pair<BitString, BitString>> fooling_pair_search(
    const TransitionTable& machine, int k, int m) {
    if (machine.num_states < 1 ||
        machine.next.size() != static_cast<std::size_t>(machine.num_states)) {
        throw ConfigError("malformed transition table");
    }
    if (machine.num_states > (1 << 20)) {
        throw ResourceError("transition table exceeds 2^20 states");
    }
    if (k < 0 || m < 1) throw ConfigError("k >= 0 and m >= 1 required");
    for (const auto& row : machine.next) {
        for (int s : row) {
            if (s < 0 || s >= machine.num_states) {
                throw ConfigError("transition target out of range");
            }
        }
    }
    const std::size_t states = static_cast<std::size_t>(machine.num_states);
    const std::size_t counts = static_cast<std::size_t>(m) + 1;
    const std::size_t layer = states * counts;
    if (layer * (static_cast<std::size_t>(m) + 1) > (std::size_t{1} << 26)) {
        throw ResourceError("search table too large for this machine and length");
    }

    // reached[pos][state][ones]: -1 unreachable, else the bit taken to get here.
    std::vector<std::int8_t> step_bit((m + 1) * layer, -1);
    std::vector<std::int32_t> step_from((m + 1) * layer, -1);
    auto at = [&](int pos, int state, int ones) {
        return static_cast<std::size_t>(pos) * layer +
               static_cast<std::size_t>(state) * counts + static_cast<std::size_t>(ones);
    };
    step_bit[at(0, machine.start_state, 0)] = 2;  // root marker
    for (int pos = 0; pos < m; ++pos) {
        for (int state = 0; state < machine.num_states; ++state) {
            for (int ones = 0; ones <= pos; ++ones) {
                if (step_bit[at(pos, state, ones)] < 0) continue;
                for (int bit = 0; bit < 2; ++bit) {
                    const int ns = machine.next[state][bit];
                    const int no = ones + bit;
                    auto& cell = step_bit[at(pos + 1, ns, no)];
                    if (cell < 0) {
                        cell = static_cast<std::int8_t>(bit);
                        step_from[at(pos + 1, ns, no)] = state;
                    }
                }
            }
        }
    }

    auto reconstruct = [&](int end_state, int ones) {
        BitString block(static_cast<std::size_t>(m), 0);
        int state = end_state;
        int o = ones;
        for (int pos = m; pos > 0; --pos) {
            const int bit = step_bit[at(pos, state, o)];
            block[pos - 1] = bit;
            state = step_from[at(pos, state, o)];
            o -= bit;
        }
        return block;
    };

    const int unit = 1 << k;
    for (int state = 0; state < machine.num_states; ++state) {
        int even_ones = -1;
        int odd_ones = -1;
        for (int v = 2; v * unit <= m; ++v) {
            const int ones = v * unit;
            if (step_bit[at(m, state, ones)] < 0) continue;
            if (v % 2 == 0 && even_ones < 0) even_ones = ones;
            if (v % 2 == 1 && odd_ones < 0) odd_ones = ones;
        }
        if (even_ones >= 0 && odd_ones >= 0) {
            return std::make_pair(reconstruct(state, even_ones),
                                  reconstruct(state, odd_ones));
        }
    }
    return std::nullopt;
}

}  // namespace qonline::pnh
