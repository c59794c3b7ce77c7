#include <catch_amalgamated.hpp>

#include <memory>
#include <random>

#include "qonline/game.hpp"

using namespace qonline;
using game::AlgorithmKind;
using game::ChannelKind;

namespace {

// Minimal problem: any request sequence is valid, cost is 1 plus the number
// of 1-answers, the offline optimum always answers zeros.
struct ToyProblem {
    using Instance = std::vector<int>;
    void validate(const Instance&) const {}
    std::vector<int> requests(const Instance& inst) const { return inst; }
    double cost(const Instance&, std::span<const int> output) const {
        double c = 1.0;
        for (int y : output) c += (y == 1);
        return c;
    }
    double opt_cost(const Instance&) const { return 1.0; }
};

class ConstantAlgorithm final : public game::OnlineAlgorithm {
public:
    explicit ConstantAlgorithm(int value) : value_(value) {
        info_.id = "toy-const";
        info_.resources.kind = AlgorithmKind::Deterministic;
    }
    const game::AlgorithmInfo& info() const override { return info_; }
    std::unique_ptr<game::AlgorithmRun> start(game::RunContext&,
                                              const BitString&) const override {
        class Run final : public game::AlgorithmRun {
        public:
            explicit Run(int v) : v_(v) {}
            int answer(game::RunContext&, int) override { return v_; }
            int v_;
        };
        return std::make_unique<Run>(value_);
    }

private:
    int value_;
    game::AlgorithmInfo info_;
};

// Answers one fresh random-tape bit per request.
class CoinPerRequest final : public game::OnlineAlgorithm {
public:
    CoinPerRequest() {
        info_.id = "toy-coins";
        info_.resources.kind = AlgorithmKind::Randomized;
    }
    const game::AlgorithmInfo& info() const override { return info_; }
    std::unique_ptr<game::AlgorithmRun> start(game::RunContext&,
                                              const BitString&) const override {
        class Run final : public game::AlgorithmRun {
        public:
            int answer(game::RunContext& ctx, int) override { return ctx.random_bit(); }
        };
        return std::make_unique<Run>();
    }

private:
    game::AlgorithmInfo info_;
};

// Consumes `bits` random bits up front, answers 0 everywhere.
class TapeBurner final : public game::OnlineAlgorithm {
public:
    explicit TapeBurner(int bits) : bits_(bits) {
        info_.id = "toy-burner";
        info_.resources.kind = AlgorithmKind::Randomized;
    }
    const game::AlgorithmInfo& info() const override { return info_; }
    std::unique_ptr<game::AlgorithmRun> start(game::RunContext& ctx,
                                              const BitString&) const override {
        for (int i = 0; i < bits_; ++i) ctx.random_bit();
        class Run final : public game::AlgorithmRun {
        public:
            int answer(game::RunContext&, int) override { return 0; }
        };
        return std::make_unique<Run>();
    }

private:
    int bits_;
    game::AlgorithmInfo info_;
};

class QubitHog final : public game::OnlineAlgorithm {
public:
    QubitHog() {
        info_.id = "toy-hog";
        info_.resources.kind = AlgorithmKind::Quantum;
        info_.resources.qubits = 1;
    }
    const game::AlgorithmInfo& info() const override { return info_; }
    std::unique_ptr<game::AlgorithmRun> start(game::RunContext& ctx,
                                              const BitString&) const override {
        auto lease = ctx.lease_qubits(2);  // exceeds the declared single qubit
        return nullptr;
    }

private:
    game::AlgorithmInfo info_;
};

// Records the requests it was shown; the engine must reveal them one at a
// time, each answer committed before the next request arrives.
class SpyAlgorithm final : public game::OnlineAlgorithm {
public:
    SpyAlgorithm() {
        info_.id = "toy-spy";
        info_.resources.kind = AlgorithmKind::Deterministic;
    }
    const game::AlgorithmInfo& info() const override { return info_; }
    std::unique_ptr<game::AlgorithmRun> start(game::RunContext&,
                                              const BitString&) const override {
        class Run final : public game::AlgorithmRun {
        public:
            explicit Run(std::vector<int>& seen) : seen_(seen) {}
            int answer(game::RunContext&, int request) override {
                seen_.push_back(request);
                return static_cast<int>(seen_.size());  // commits position info
            }
            std::vector<int>& seen_;
        };
        return std::make_unique<Run>(seen);
    }
    mutable std::vector<int> seen;

private:
    game::AlgorithmInfo info_;
};

class AdviceEcho final : public game::OnlineAlgorithm {
public:
    explicit AdviceEcho(int bits, std::vector<ChannelKind> channels) {
        info_.id = "toy-echo";
        info_.resources.kind = AlgorithmKind::Deterministic;
        info_.resources.advice_bits = bits;
        info_.resources.advice_channels = std::move(channels);
    }
    const game::AlgorithmInfo& info() const override { return info_; }
    std::unique_ptr<game::AlgorithmRun> start(game::RunContext&,
                                              const BitString& advice) const override {
        class Run final : public game::AlgorithmRun {
        public:
            explicit Run(BitString advice) : advice_(std::move(advice)) {}
            int answer(game::RunContext&, int) override {
                if (next_ >= advice_.size()) return 0;
                return advice_[next_++];
            }
            BitString advice_;
            std::size_t next_ = 0;
        };
        return std::make_unique<Run>(advice);
    }

private:
    game::AlgorithmInfo info_;
};

BitString random_bits(std::size_t length, std::mt19937_64& rng) {
    BitString bits(length);
    for (auto& b : bits) b = static_cast<int>(rng() & 1);
    return bits;
}

}  // namespace

TEST_CASE("deterministic run has a single branch of probability one") {
    ToyProblem problem;
    ConstantAlgorithm alg(1);
    const auto result = game::run_game_exact(problem, {5, 5, 5}, alg);
    REQUIRE(result.distribution.branches.size() == 1);
    CHECK(result.distribution.branches[0].probability == 1.0);
    CHECK(result.distribution.branches[0].output == std::vector<int>{1, 1, 1});
    CHECK(result.distribution.branches[0].cost == 4.0);
    CHECK(result.leaf_count == 1);
}

TEST_CASE("random bits branch exhaustively") {
    ToyProblem problem;
    CoinPerRequest alg;
    const auto result = game::run_game_exact(problem, {0, 0, 0}, alg);
    REQUIRE(result.distribution.branches.size() == 8);
    double total = 0.0;
    for (const auto& b : result.distribution.branches) {
        CHECK(b.probability == Catch::Approx(0.125).margin(1e-12));
        total += b.probability;
    }
    CHECK(total == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("expected cost") {
    game::OutcomeDistribution even;
    even.branches.push_back({{0}, 1.0, 0.5});
    even.branches.push_back({{1}, 3.0, 0.5});
    CHECK(game::expected_cost(even) == Catch::Approx(2.0).margin(1e-12));

    game::OutcomeDistribution single;
    single.branches.push_back({{0}, 7.0, 1.0});
    CHECK(game::expected_cost(single) == 7.0);

    game::OutcomeDistribution blind;
    blind.branches.push_back({{0}, 1.0, 1.0 / 8.0});
    blind.branches.push_back({{1}, 3.0, 7.0 / 8.0});
    CHECK(game::expected_cost(blind) == Catch::Approx(2.75).margin(1e-12));
}

TEST_CASE("sampled runs are seed-reproducible") {
    ToyProblem problem;
    CoinPerRequest alg;
    const std::vector<int> inst = {0, 0, 0, 0};
    for (std::uint64_t seed = 1; seed <= 16; ++seed) {
        const auto a = game::run_game_sampled(problem, inst, alg, seed);
        const auto b = game::run_game_sampled(problem, inst, alg, seed);
        CHECK(a.output == b.output);
        CHECK(a.cost == b.cost);
    }
}

TEST_CASE("the engine reveals requests strictly in order") {
    ToyProblem problem;
    SpyAlgorithm spy;
    const std::vector<int> inst = {4, 9, 2, 7};
    (void)game::run_game_exact(problem, inst, spy);
    CHECK(spy.seen == inst);
}

TEST_CASE("qubit budget is audited") {
    ToyProblem problem;
    QubitHog hog;
    CHECK_THROWS_AS(game::run_game_exact(problem, {0}, hog), ResourceError);
}

TEST_CASE("branch cap is an explicit error") {
    ToyProblem problem;
    TapeBurner burner(21);  // 2^21 leaves exceeds the 2^20 cap
    CHECK_THROWS_AS(game::run_game_exact(problem, {0}, burner), ResourceError);
}

TEST_CASE("advice wiring is validated") {
    ToyProblem problem;
    const std::vector<int> inst = {0, 0};

    AdviceEcho echo(2, {ChannelKind::ClassicalBits});
    SECTION("missing adviser") {
        CHECK_THROWS_AS(game::run_game_exact(problem, inst, echo), ConfigError);
    }
    SECTION("unexpected adviser") {
        ConstantAlgorithm plain(0);
        game::AdviceSetup<ToyProblem> setup;
        setup.adviser = [](const std::vector<int>&) { return BitString{}; };
        CHECK_THROWS_AS(game::run_game_exact(problem, inst, plain, std::optional{setup}),
                        ConfigError);
    }
    SECTION("channel mismatch") {
        game::AdviceSetup<ToyProblem> setup;
        setup.channel = ChannelKind::SharedEpr;
        setup.adviser = [](const std::vector<int>&) { return BitString{1, 0}; };
        CHECK_THROWS_AS(game::run_game_exact(problem, inst, echo, std::optional{setup}),
                        ConfigError);
    }
    SECTION("length mismatch") {
        game::AdviceSetup<ToyProblem> setup;
        setup.adviser = [](const std::vector<int>&) { return BitString{1}; };
        CHECK_THROWS_AS(game::run_game_exact(problem, inst, echo, std::optional{setup}),
                        ProtocolError);
    }
    SECTION("advice flows through to the answers") {
        game::AdviceSetup<ToyProblem> setup;
        setup.adviser = [](const std::vector<int>&) { return BitString{1, 0}; };
        const auto result =
            game::run_game_exact(problem, inst, echo, std::optional{setup});
        REQUIRE(result.distribution.branches.size() == 1);
        CHECK(result.distribution.branches[0].output == std::vector<int>{1, 0});
        REQUIRE(result.advice.has_value());
        CHECK(result.advice->adviser_bits == 2);
    }
}

TEST_CASE("advice channels are lossless") {
    SECTION("exhaustive over all strings up to length 16") {
        for (int length = 0; length <= 16; ++length) {
            const std::uint64_t strings = std::uint64_t{1} << length;
            for (std::uint64_t value = 0; value < strings; ++value) {
                BitString bits(static_cast<std::size_t>(length));
                for (int i = 0; i < length; ++i) {
                    bits[static_cast<std::size_t>(i)] =
                        static_cast<int>((value >> i) & 1);
                }
                for (auto kind : {ChannelKind::ClassicalBits, ChannelKind::PrivateQubits,
                                  ChannelKind::SharedEpr}) {
                    const auto result = game::advice_transmit(kind, bits);
                    if (result.received != bits) {
                        REQUIRE(bits_to_string(result.received) == bits_to_string(bits));
                    }
                }
            }
        }
        SUCCEED("all strings up to length 16 transported losslessly");
    }

    SECTION("random longer strings") {
        std::mt19937_64 rng(99);
        for (int trial = 0; trial < 1000; ++trial) {
            const auto bits = random_bits(17 + rng() % 48, rng);
            for (auto kind : {ChannelKind::ClassicalBits, ChannelKind::PrivateQubits,
                              ChannelKind::SharedEpr}) {
                REQUIRE(game::advice_transmit(kind, bits).received == bits);
            }
        }
    }
}

TEST_CASE("advice transcripts account qubits") {
    const auto shared = game::advice_transmit(ChannelKind::SharedEpr,
                                              bits_from_string("1011"));
    CHECK(shared.received == bits_from_string("1011"));
    CHECK(shared.transcript.adviser_qubits == 2);
    CHECK(shared.transcript.algorithm_qubits == 2);
    CHECK(shared.transcript.adviser_bits == 0);

    const auto odd = game::advice_transmit(ChannelKind::SharedEpr, bits_from_string("101"));
    CHECK(odd.received == bits_from_string("101"));
    CHECK(odd.transcript.adviser_qubits == 2);

    const auto empty = game::advice_transmit(ChannelKind::PrivateQubits, {});
    CHECK(empty.received.empty());
    CHECK(empty.transcript.adviser_qubits == 0);

    std::mt19937_64 rng(3);
    for (int b = 0; b <= 64; ++b) {
        const auto bits = random_bits(static_cast<std::size_t>(b), rng);
        CHECK(game::advice_transmit(ChannelKind::SharedEpr, bits).transcript.adviser_qubits ==
              (b + 1) / 2);
        CHECK(game::advice_transmit(ChannelKind::PrivateQubits, bits).transcript.adviser_qubits ==
              b);
        CHECK(game::advice_transmit(ChannelKind::ClassicalBits, bits).transcript.adviser_bits ==
              b);
    }
}

TEST_CASE("quantum-coin wrapping preserves the distribution") {
    ToyProblem problem;
    const std::vector<int> inst = {0, 0, 0};

    SECTION("randomized algorithm") {
        CoinPerRequest original;
        auto wrapped = game::wrap_randomized_as_quantum(std::make_unique<CoinPerRequest>());
        const auto base = game::run_game_exact(problem, inst, original);
        const auto emulated = game::run_game_exact(problem, inst, *wrapped);
        CHECK(game::distributions_match(base.distribution, emulated.distribution, 1e-12));
        CHECK(wrapped->info().resources.qubits == 1);
        CHECK(wrapped->info().resources.kind == AlgorithmKind::Quantum);
        CHECK(emulated.peak_qubits == 1);
    }

    SECTION("deterministic algorithm stays a single branch") {
        auto wrapped = game::wrap_randomized_as_quantum(std::make_unique<ConstantAlgorithm>(0));
        const auto emulated = game::run_game_exact(problem, inst, *wrapped);
        REQUIRE(emulated.distribution.branches.size() == 1);
        CHECK(emulated.distribution.branches[0].probability == 1.0);
        CHECK(wrapped->info().resources.qubits == 1);  // declared but unused
        CHECK(emulated.peak_qubits == 0);
    }
}

TEST_CASE("strict competitive ratio reporting") {
    ToyProblem problem;
    ConstantAlgorithm ones(1);
    const std::vector<std::vector<int>> family = {{0}, {0, 0}, {0, 0, 0}};

    const auto report = game::strict_competitive_ratio(
        problem, std::span<const std::vector<int>>(family), ones, {},
        std::optional<double>{1.0});
    REQUIRE(report.records.size() == 3);
    CHECK(report.records[0].expected_cost == 2.0);
    CHECK(report.records[2].expected_cost == 4.0);
    CHECK(report.strict_ratio == 4.0);
    CHECK(report.witness_index == 2);
    CHECK(report.strict_ratio >= 1.0);
    REQUIRE(report.additive_c.has_value());
    CHECK(*report.additive_c == Catch::Approx(3.0).margin(1e-12));

    CHECK_THROWS_AS(
        game::strict_competitive_ratio(problem, std::span<const std::vector<int>>(), ones),
        ConfigError);
}

TEST_CASE("deterministic prefix driver rejects branching algorithms") {
    CoinPerRequest coins;
    CHECK_THROWS_AS(game::run_deterministic_prefix(coins, {0, 0}), PreconditionError);
    ConstantAlgorithm det(1);
    CHECK(game::run_deterministic_prefix(det, {0, 0}) == std::vector<int>{1, 1});
}
