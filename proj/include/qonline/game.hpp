#pragma once

// Request-answer game engine. Algorithms see requests one at a time and route
// every source of chance (random-tape bits, measurements) through a
// RunContext, which lets the engine either enumerate all branches exactly or
// sample a single trace from a seed.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qonline/bits.hpp"
#include "qonline/errors.hpp"
#include "qonline/qcore.hpp"

namespace qonline::game {

enum class AlgorithmKind { Deterministic, Randomized, Quantum, Hybrid };
enum class ChannelKind { ClassicalBits, PrivateQubits, SharedEpr };

inline std::string to_string(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::ClassicalBits: return "classical-bits";
        case ChannelKind::PrivateQubits: return "private-qubits";
        case ChannelKind::SharedEpr: return "shared-epr";
    }
    return "?";
}

inline std::string to_string(AlgorithmKind kind) {
    switch (kind) {
        case AlgorithmKind::Deterministic: return "deterministic";
        case AlgorithmKind::Randomized: return "randomized";
        case AlgorithmKind::Quantum: return "quantum";
        case AlgorithmKind::Hybrid: return "hybrid";
    }
    return "?";
}

// Declared resources; the engine audits the qubit budget at run time.
struct ResourceDecl {
    AlgorithmKind kind = AlgorithmKind::Deterministic;
    int classical_bits = 0;
    int qubits = 0;
    int advice_bits = 0;              // fixed advice length, 0 = none
    bool advice_per_request = false;  // one advice bit per request
    std::vector<ChannelKind> advice_channels;

    bool wants_advice() const { return advice_bits > 0 || advice_per_request; }
    bool accepts_channel(ChannelKind c) const {
        return std::find(advice_channels.begin(), advice_channels.end(), c) !=
               advice_channels.end();
    }
};

struct AlgorithmInfo {
    std::string id;
    ResourceDecl resources;
};

// Tracks live qubits against the declared budget.
class QubitLedger {
public:
    explicit QubitLedger(int limit) : limit_(limit) {}

    void acquire(int n) {
        in_use_ += n;
        peak_ = std::max(peak_, in_use_);
        if (in_use_ > limit_) {
            throw ResourceError("qubit budget exceeded: " + std::to_string(in_use_) +
                                " in use, " + std::to_string(limit_) + " declared");
        }
    }
    void release(int n) { in_use_ -= n; }
    int peak() const { return peak_; }
    int in_use() const { return in_use_; }

private:
    int limit_;
    int in_use_ = 0;
    int peak_ = 0;
};

class QubitLease {
public:
    QubitLease() = default;
    QubitLease(QubitLedger* ledger, int qubits) : ledger_(ledger), qubits_(qubits) {
        if (ledger_) ledger_->acquire(qubits_);
    }
    QubitLease(QubitLease&& other) noexcept
        : ledger_(std::exchange(other.ledger_, nullptr)),
          qubits_(std::exchange(other.qubits_, 0)) {}
    QubitLease& operator=(QubitLease&& other) noexcept {
        if (this != &other) {
            reset();
            ledger_ = std::exchange(other.ledger_, nullptr);
            qubits_ = std::exchange(other.qubits_, 0);
        }
        return *this;
    }
    QubitLease(const QubitLease&) = delete;
    QubitLease& operator=(const QubitLease&) = delete;
    ~QubitLease() { reset(); }

    void reset() {
        if (ledger_) ledger_->release(qubits_);
        ledger_ = nullptr;
        qubits_ = 0;
    }

private:
    QubitLedger* ledger_ = nullptr;
    int qubits_ = 0;
};

// Mediates all chance during one game run. Valid only for the duration of the
// call it is passed to; algorithms must not store references to it.
class RunContext {
public:
    virtual ~RunContext() = default;

    // Picks one index from a finite distribution. Exact mode forks here.
    virtual std::size_t choose(std::span<const double> probabilities) = 0;

    // One uniform bit from the classical random tape.
    virtual int random_bit() {
        const double fair[] = {0.5, 0.5};
        return static_cast<int>(choose(fair));
    }

    QubitLease lease_qubits(int qubits) { return QubitLease(ledger_, qubits); }

    // Measures the given qubits, collapses `reg` in place, returns the bits
    // (first listed qubit is the high bit).
    std::uint64_t measure(qcore::QuantumRegister& reg, std::span<const int> qubits) {
        auto branches = qcore::measure_branches(reg, qubits);
        std::vector<double> probs;
        probs.reserve(branches.size());
        for (const auto& b : branches) probs.push_back(b.probability);
        const std::size_t pick = choose(probs);
        reg = std::move(branches[pick].post_state);
        return branches[pick].bits;
    }

    QubitLedger* ledger() const { return ledger_; }

protected:
    explicit RunContext(QubitLedger* ledger) : ledger_(ledger) {}
    QubitLedger* ledger_ = nullptr;
};

// Per-run algorithm state. The engine feeds requests strictly one at a time;
// the answer to request i is committed before request i+1 is revealed.
class AlgorithmRun {
public:
    virtual ~AlgorithmRun() = default;
    virtual int answer(RunContext& ctx, int request) = 0;
};

class OnlineAlgorithm {
public:
    virtual ~OnlineAlgorithm() = default;
    virtual const AlgorithmInfo& info() const = 0;
    virtual std::unique_ptr<AlgorithmRun> start(RunContext& ctx,
                                                const BitString& advice) const = 0;
};

namespace detail {

struct ChoiceRecord {
    std::vector<double> probs;
    std::size_t chosen;
};

inline std::size_t first_viable(std::span<const double> probs) {
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] >= qcore::kBranchPrune) return i;
    }
    throw ConfigError("choose() called with an all-zero distribution");
}

class ExactContext final : public RunContext {
public:
    ExactContext(QubitLedger* ledger, std::span<const std::size_t> script)
        : RunContext(ledger), script_(script.begin(), script.end()) {}

    std::size_t choose(std::span<const double> probs) override {
        std::size_t pick;
        if (trace_.size() < script_.size()) {
            pick = script_[trace_.size()];
            if (pick >= probs.size()) {
                // The replayed run diverged from the recorded one; the
                // algorithm is drawing on chance outside this context.
                throw ConfigError("algorithm is not replay-deterministic");
            }
        } else {
            pick = first_viable(probs);
        }
        trace_.push_back(ChoiceRecord{{probs.begin(), probs.end()}, pick});
        return pick;
    }

    const std::vector<ChoiceRecord>& trace() const { return trace_; }
    std::size_t script_length() const { return script_.size(); }

private:
    std::vector<std::size_t> script_;
    std::vector<ChoiceRecord> trace_;
};

class SampleContext final : public RunContext {
public:
    SampleContext(QubitLedger* ledger, std::uint64_t seed)
        : RunContext(ledger), rng_(seed) {}

    std::size_t choose(std::span<const double> probs) override {
        const double r = qcore::uniform01(rng_);
        double acc = 0.0;
        std::size_t last_viable = first_viable(probs);
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i] < qcore::kBranchPrune) continue;
            acc += probs[i];
            last_viable = i;
            if (r < acc) return i;
        }
        return last_viable;
    }

private:
    std::mt19937_64 rng_;
};

// Refuses genuine branching; used to drive algorithms that must behave
// deterministically (adversary targets).
class DeterministicContext final : public RunContext {
public:
    explicit DeterministicContext(QubitLedger* ledger) : RunContext(ledger) {}

    std::size_t choose(std::span<const double> probs) override {
        const std::size_t pick = first_viable(probs);
        if (probs[pick] < 1.0 - 1e-9) {
            throw PreconditionError("algorithm branched while a deterministic run was required");
        }
        return pick;
    }
};

}  // namespace detail

// Forwards everything to the wrapped context except the random tape, which is
// replaced by a one-qubit prepare-H-measure coin.
class QuantumCoinContext final : public RunContext {
public:
    explicit QuantumCoinContext(RunContext& base)
        : RunContext(base.ledger()), base_(base) {}

    std::size_t choose(std::span<const double> probs) override {
        return base_.choose(probs);
    }

    int random_bit() override {
        auto lease = lease_qubits(1);
        qcore::QuantumRegister coin =
            qcore::apply_gate(qcore::QuantumRegister(1), qcore::GateSpec::h(0));
        const int qubits[] = {0};
        return static_cast<int>(measure(coin, qubits));
    }

private:
    RunContext& base_;
};

// --- Advice channels ---------------------------------------------------------

struct AdviceTranscript {
    ChannelKind kind = ChannelKind::ClassicalBits;
    int adviser_bits = 0;      // classical bits adviser -> algorithm
    int adviser_qubits = 0;    // qubits adviser -> algorithm
    int algorithm_qubits = 0;  // qubits algorithm -> adviser (EPR setup)
};

struct TransmitResult {
    BitString received;
    AdviceTranscript transcript;
};

// Moves an advice bit string across the chosen channel. Classical bits pass
// through; private qubits carry one basis-state qubit per bit and are measured
// on receipt; the shared-EPR channel packs two bits per adviser qubit via
// dense coding (odd lengths padded with a trailing 0, stripped on receipt).
inline TransmitResult advice_transmit(ChannelKind kind, const BitString& bits) {
    TransmitResult result;
    result.transcript.kind = kind;
    switch (kind) {
        case ChannelKind::ClassicalBits: {
            result.received = bits;
            result.transcript.adviser_bits = static_cast<int>(bits.size());
            return result;
        }
        case ChannelKind::PrivateQubits: {
            result.received.reserve(bits.size());
            for (int b : bits) {
                auto reg = qcore::QuantumRegister::basis(1, static_cast<std::uint64_t>(b));
                const int qubits[] = {0};
                auto branches = qcore::measure_branches(reg, qubits);
                result.received.push_back(static_cast<int>(branches.front().bits));
            }
            result.transcript.adviser_qubits = static_cast<int>(bits.size());
            return result;
        }
        case ChannelKind::SharedEpr: {
            BitString padded = bits;
            if (padded.size() % 2 != 0) padded.push_back(0);
            for (std::size_t i = 0; i < padded.size(); i += 2) {
                auto pair = qcore::make_epr_pair();
                auto gates = qcore::superdense_encode(padded[i], padded[i + 1]);
                pair = qcore::apply_gates(std::move(pair), gates);
                auto [b0, b1] = qcore::superdense_decode(pair);
                result.received.push_back(b0);
                result.received.push_back(b1);
            }
            result.received.resize(bits.size());
            const int pairs = static_cast<int>(padded.size() / 2);
            result.transcript.adviser_qubits = pairs;
            result.transcript.algorithm_qubits = pairs;
            return result;
        }
    }
    throw ConfigError("unknown advice channel");
}

// --- Outcome distributions ---------------------------------------------------

struct Branch {
    std::vector<int> output;
    double cost = 0.0;
    double probability = 0.0;
};

struct OutcomeDistribution {
    std::vector<Branch> branches;  // sorted lexicographically by output

    double total_probability() const {
        double p = 0.0;
        for (const auto& b : branches) p += b.probability;
        return p;
    }
};

inline double expected_cost(const OutcomeDistribution& dist) {
    double e = 0.0;
    for (const auto& b : dist.branches) e += b.probability * b.cost;
    return e;
}

// Branch-for-branch equality: same output sets, probabilities within tol.
inline bool distributions_match(const OutcomeDistribution& a,
                                const OutcomeDistribution& b, double tol) {
    if (a.branches.size() != b.branches.size()) return false;
    for (std::size_t i = 0; i < a.branches.size(); ++i) {
        if (a.branches[i].output != b.branches[i].output) return false;
        if (std::abs(a.branches[i].probability - b.branches[i].probability) > tol)
            return false;
        if (a.branches[i].cost != b.branches[i].cost) return false;
    }
    return true;
}

// --- Game execution ----------------------------------------------------------

inline constexpr std::size_t kBranchCap = std::size_t{1} << 20;

template <class Problem>
concept OnlineProblemType =
    requires(const Problem& p, const typename Problem::Instance& inst,
             std::span<const int> out) {
        { p.validate(inst) };
        { p.requests(inst) } -> std::convertible_to<std::vector<int>>;
        { p.cost(inst, out) } -> std::convertible_to<double>;
        { p.opt_cost(inst) } -> std::convertible_to<double>;
    };

template <OnlineProblemType Problem>
struct AdviceSetup {
    std::function<BitString(const typename Problem::Instance&)> adviser;
    ChannelKind channel = ChannelKind::ClassicalBits;
};

struct GameResult {
    OutcomeDistribution distribution;
    std::optional<AdviceTranscript> advice;
    std::size_t leaf_count = 0;  // raw branch-tree leaves before merging by output
    int peak_qubits = 0;
};

struct SampledRun {
    std::vector<int> output;
    double cost = 0.0;
    std::optional<AdviceTranscript> advice;
};

namespace detail {

template <OnlineProblemType Problem>
std::optional<TransmitResult> prepare_advice(
    const Problem& problem, const typename Problem::Instance& instance,
    const OnlineAlgorithm& algorithm, const std::optional<AdviceSetup<Problem>>& advice,
    std::size_t request_count) {
    (void)problem;
    const ResourceDecl& res = algorithm.info().resources;
    if (!res.wants_advice()) {
        if (advice.has_value()) {
            throw ConfigError("algorithm '" + algorithm.info().id +
                              "' declares no advice but an adviser was supplied");
        }
        return std::nullopt;
    }
    if (!advice.has_value() || !advice->adviser) {
        throw ConfigError("algorithm '" + algorithm.info().id +
                          "' declares advice but no adviser was supplied");
    }
    if (!res.accepts_channel(advice->channel)) {
        throw ConfigError("algorithm '" + algorithm.info().id +
                          "' does not accept channel " + to_string(advice->channel));
    }
    BitString bits = advice->adviser(instance);
    const std::size_t expected =
        res.advice_per_request ? request_count : static_cast<std::size_t>(res.advice_bits);
    if (bits.size() != expected) {
        throw ProtocolError("adviser produced " + std::to_string(bits.size()) +
                            " bits, expected " + std::to_string(expected));
    }
    return advice_transmit(advice->channel, bits);
}

inline std::vector<int> drive_run(RunContext& ctx, const OnlineAlgorithm& algorithm,
                                  const BitString& advice,
                                  const std::vector<int>& requests) {
    auto run = algorithm.start(ctx, advice);
    std::vector<int> output;
    output.reserve(requests.size());
    for (int request : requests) {
        output.push_back(run->answer(ctx, request));
    }
    return output;
}

}  // namespace detail

// Enumerates the complete branch tree over all measurement and random-tape
// outcomes and returns the exact distribution over output sequences.
template <OnlineProblemType Problem>
GameResult run_game_exact(const Problem& problem,
                          const typename Problem::Instance& instance,
                          const OnlineAlgorithm& algorithm,
                          const std::optional<AdviceSetup<Problem>>& advice = {}) {
    problem.validate(instance);
    const std::vector<int> requests = problem.requests(instance);
    auto transmitted =
        detail::prepare_advice(problem, instance, algorithm, advice, requests.size());
    const BitString received = transmitted ? transmitted->received : BitString{};

    GameResult result;
    if (transmitted) result.advice = transmitted->transcript;

    std::map<std::vector<int>, double> mass_by_output;
    std::vector<std::vector<std::size_t>> pending;
    pending.push_back({});
    while (!pending.empty()) {
        std::vector<std::size_t> script = std::move(pending.back());
        pending.pop_back();

        QubitLedger ledger(algorithm.info().resources.qubits);
        detail::ExactContext ctx(&ledger, script);
        std::vector<int> output = detail::drive_run(ctx, algorithm, received, requests);
        result.peak_qubits = std::max(result.peak_qubits, ledger.peak());

        double probability = 1.0;
        for (const auto& record : ctx.trace()) {
            probability *= record.probs[record.chosen];
        }
        mass_by_output[std::move(output)] += probability;

        if (++result.leaf_count > kBranchCap) {
            throw ResourceError("branch tree exceeds the cap of " +
                                std::to_string(kBranchCap) + " leaves");
        }

        // Queue the alternatives of every choice point this run decided anew.
        const auto& trace = ctx.trace();
        for (std::size_t i = ctx.script_length(); i < trace.size(); ++i) {
            for (std::size_t alt = trace[i].chosen + 1; alt < trace[i].probs.size();
                 ++alt) {
                if (trace[i].probs[alt] < qcore::kBranchPrune) continue;
                std::vector<std::size_t> next;
                next.reserve(i + 1);
                for (std::size_t j = 0; j < i; ++j) next.push_back(trace[j].chosen);
                next.push_back(alt);
                pending.push_back(std::move(next));
            }
        }
    }

    result.distribution.branches.reserve(mass_by_output.size());
    for (auto& [output, probability] : mass_by_output) {
        Branch branch;
        branch.cost = problem.cost(instance, output);
        branch.output = output;
        branch.probability = probability;
        result.distribution.branches.push_back(std::move(branch));
    }
    return result;
}

// One seeded trace through the same machinery.
template <OnlineProblemType Problem>
SampledRun run_game_sampled(const Problem& problem,
                            const typename Problem::Instance& instance,
                            const OnlineAlgorithm& algorithm, std::uint64_t seed,
                            const std::optional<AdviceSetup<Problem>>& advice = {}) {
    problem.validate(instance);
    const std::vector<int> requests = problem.requests(instance);
    auto transmitted =
        detail::prepare_advice(problem, instance, algorithm, advice, requests.size());
    const BitString received = transmitted ? transmitted->received : BitString{};

    QubitLedger ledger(algorithm.info().resources.qubits);
    detail::SampleContext ctx(&ledger, seed);
    SampledRun run;
    run.output = detail::drive_run(ctx, algorithm, received, requests);
    run.cost = problem.cost(instance, run.output);
    if (transmitted) run.advice = transmitted->transcript;
    return run;
}

// Drives an algorithm that must not branch over an arbitrary request prefix;
// used by adversary constructions that complete the input afterwards.
inline std::vector<int> run_deterministic_prefix(const OnlineAlgorithm& algorithm,
                                                 const std::vector<int>& prefix) {
    const ResourceDecl& res = algorithm.info().resources;
    if (res.kind != AlgorithmKind::Deterministic || res.wants_advice()) {
        throw PreconditionError("a deterministic, advice-free algorithm is required");
    }
    QubitLedger ledger(res.qubits);
    detail::DeterministicContext ctx(&ledger);
    return detail::drive_run(ctx, algorithm, {}, prefix);
}

// --- Competitive-ratio reporting --------------------------------------------

struct InstanceRecord {
    std::string digest;
    double expected_cost = 0.0;
    double opt_cost = 0.0;
    double ratio = 0.0;
    std::size_t branch_count = 0;
};

struct CompetitiveReport {
    std::vector<InstanceRecord> records;
    double strict_ratio = 0.0;
    std::size_t witness_index = 0;
    std::optional<double> alpha;       // additive slack, when requested
    std::optional<double> additive_c;  // max_i (E_i - alpha) / opt_i
};

inline std::string digest_of(const std::vector<int>& requests) {
    std::ostringstream os;
    os << std::hex << fnv1a(requests);
    return os.str();
}

template <OnlineProblemType Problem>
CompetitiveReport strict_competitive_ratio(
    const Problem& problem, std::span<const typename Problem::Instance> family,
    const OnlineAlgorithm& algorithm,
    const std::optional<AdviceSetup<Problem>>& advice = {},
    std::optional<double> alpha = {}) {
    if (family.empty()) throw ConfigError("instance family is empty");
    CompetitiveReport report;
    report.records.reserve(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) {
        GameResult game = run_game_exact(problem, family[i], algorithm, advice);
        InstanceRecord rec;
        rec.digest = digest_of(problem.requests(family[i]));
        rec.expected_cost = expected_cost(game.distribution);
        rec.opt_cost = problem.opt_cost(family[i]);
        rec.ratio = rec.expected_cost / rec.opt_cost;
        rec.branch_count = game.distribution.branches.size();
        if (report.records.empty() || rec.ratio > report.strict_ratio) {
            report.strict_ratio = rec.ratio;
            report.witness_index = i;
        }
        report.records.push_back(std::move(rec));
    }
    if (alpha) {
        report.alpha = alpha;
        double c = 0.0;
        for (const auto& rec : report.records) {
            c = std::max(c, (rec.expected_cost - *alpha) / rec.opt_cost);
        }
        report.additive_c = c;
    }
    return report;
}

// --- Randomized -> quantum emulation ------------------------------------------

namespace detail {

class QuantumCoinRun final : public AlgorithmRun {
public:
    QuantumCoinRun(const OnlineAlgorithm& inner, RunContext& ctx, const BitString& advice) {
        QuantumCoinContext shim(ctx);
        inner_ = inner.start(shim, advice);
    }

    int answer(RunContext& ctx, int request) override {
        QuantumCoinContext shim(ctx);
        return inner_->answer(shim, request);
    }

private:
    std::unique_ptr<AlgorithmRun> inner_;
};

class QuantumCoinAlgorithm final : public OnlineAlgorithm {
public:
    explicit QuantumCoinAlgorithm(std::unique_ptr<OnlineAlgorithm> inner)
        : inner_(std::move(inner)), info_(inner_->info()) {
        info_.id += "-qcoin";
        info_.resources.kind = AlgorithmKind::Quantum;
        info_.resources.qubits = inner_->info().resources.qubits + 1;
    }

    const AlgorithmInfo& info() const override { return info_; }

    std::unique_ptr<AlgorithmRun> start(RunContext& ctx,
                                        const BitString& advice) const override {
        return std::make_unique<QuantumCoinRun>(*inner_, ctx, advice);
    }

private:
    std::unique_ptr<OnlineAlgorithm> inner_;
    AlgorithmInfo info_;
};

}  // namespace detail

// Replaces every random-tape read of the given algorithm by a fresh quantum
// coin (prepare |0>, H, measure). The returned algorithm uses one extra qubit
// and reproduces the original outcome distribution branch for branch.
inline std::unique_ptr<OnlineAlgorithm> wrap_randomized_as_quantum(
    std::unique_ptr<OnlineAlgorithm> inner) {
    if (!inner) throw ConfigError("wrap_randomized_as_quantum: null algorithm");
    return std::make_unique<detail::QuantumCoinAlgorithm>(std::move(inner));
}

}  // namespace qonline::game
