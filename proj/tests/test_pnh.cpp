#include <catch_amalgamated.hpp>

#include <array>
#include <set>

#include "qonline/pnh.hpp"

using namespace qonline;
using pnh::PnhParams;
using pnh::PnhProblem;

namespace {

const PnhParams kParams{1, 1.0, 3.0};

// 2,1111,2,111111,2,1111 at k=1: block multiplicities (2,3,2), parities (0,1,0).
PnhProblem::Instance spec_example_instance() {
    return pnh::parse_pnh_symbols("2111121111112" "1111");
}

std::array<int, 3> guardian_answers(const PnhProblem::Instance& inst,
                                    const std::vector<int>& output) {
    const auto pos = PnhProblem::guardian_positions(inst);
    return {output[pos[0]], output[pos[1]], output[pos[2]]};
}

int run_machine(const pnh::TransitionTable& machine, const BitString& block) {
    int state = machine.start_state;
    for (int bit : block) state = machine.next[state][bit];
    return state;
}

}  // namespace

TEST_CASE("partial_mod") {
    CHECK(pnh::partial_mod(bits_from_string("1111"), 1) == 0);    // v = 2
    CHECK(pnh::partial_mod(bits_from_string("111111"), 1) == 1);  // v = 3
    CHECK_THROWS_AS(pnh::partial_mod(bits_from_string("10101"), 1), DomainError);
    CHECK_THROWS_AS(pnh::partial_mod(bits_from_string("1100"), 1), DomainError);  // v = 1
    CHECK(pnh::partial_mod(bits_from_string("110100"), 0) == 1);  // v = 3 at k = 0
}

TEST_CASE("instance validation and derived values") {
    const PnhProblem problem(kParams);
    const auto inst = spec_example_instance();
    problem.validate(inst);
    CHECK(problem.block_mods(inst) == std::array<int, 3>{0, 1, 0});
    CHECK(problem.z_values(inst) == std::array<int, 3>{1, 1, 0});

    CHECK_THROWS_AS(problem.validate(pnh::parse_pnh_symbols("121111211112")),
                    ValidationError);  // does not start with 2
    CHECK_THROWS_AS(problem.validate(pnh::parse_pnh_symbols("2111121111")),
                    ValidationError);  // only two markers
    CHECK_THROWS_AS(problem.validate(pnh::parse_pnh_symbols("211112111121111221111")),
                    ValidationError);  // four markers
    CHECK_THROWS_AS(problem.validate(pnh::parse_pnh_symbols("21121111121111")),
                    ValidationError);  // first block shorter than 2^{k+1}
    CHECK_THROWS_AS(problem.validate(pnh::parse_pnh_symbols("2111021111211111")),
                    ValidationError);  // ones not a multiple of 2^k
    CHECK_THROWS_AS(PnhProblem(PnhParams{1, 3.0, 1.0}), ConfigError);  // r >= w
}

TEST_CASE("cost and opt cost") {
    const PnhProblem problem(kParams);
    const auto inst = spec_example_instance();
    const auto pos = PnhProblem::guardian_positions(inst);

    std::vector<int> output(inst.size(), 0);
    output[pos[0]] = 1;
    output[pos[1]] = 1;
    output[pos[2]] = 0;
    CHECK(problem.cost(inst, output) == 1.0);  // matches z = (1,1,0)

    output[pos[0]] = 0;
    output[pos[1]] = 0;
    output[pos[2]] = 1;
    CHECK(problem.cost(inst, output) == 3.0);  // complement of z

    output[pos[2]] = 0;
    CHECK(problem.cost(inst, output) == 3.0);  // any mismatch costs w

    CHECK(problem.opt_cost(inst) == 1.0);
}

TEST_CASE("the rotation algorithm splits into two conditional-deterministic branches") {
    const PnhProblem problem(kParams);
    const auto inst = spec_example_instance();
    auto algorithm = pnh::alg1_quantum(kParams);
    const auto result = game::run_game_exact(problem, inst, *algorithm);

    REQUIRE(result.distribution.branches.size() == 2);
    std::set<double> costs;
    for (const auto& branch : result.distribution.branches) {
        CHECK(branch.probability == Catch::Approx(0.5).margin(1e-12));
        costs.insert(branch.cost);
        const auto y = guardian_answers(inst, branch.output);
        if (branch.cost == 1.0) {
            CHECK(y == std::array<int, 3>{1, 1, 0});
        } else {
            CHECK(y == std::array<int, 3>{0, 0, 1});
        }
    }
    CHECK(costs == std::set<double>{1.0, 3.0});
    CHECK(game::expected_cost(result.distribution) == Catch::Approx(2.0).margin(1e-9));
    CHECK(result.peak_qubits == 1);
}

TEST_CASE("rotation algorithm across the enumerated families") {
    for (int k : {0, 1, 2}) {
        const PnhParams params{k, 1.0, 3.0};
        const PnhProblem problem(params);
        auto algorithm = pnh::alg1_quantum(params);
        const auto family = pnh::enumerate_pnh_family(params);
        REQUIRE(family.size() >= 8);
        for (const auto& inst : family) {
            const auto result = game::run_game_exact(problem, inst, *algorithm);
            REQUIRE(result.distribution.branches.size() == 2);
            const auto pmods = problem.block_mods(inst);
            double mass_r = 0.0;
            double mass_w = 0.0;
            for (const auto& branch : result.distribution.branches) {
                // Within every branch, each answer extends the previous one by
                // the parity of the block just consumed.
                const auto y = guardian_answers(inst, branch.output);
                CHECK(y[1] == (y[0] ^ pmods[0]));
                CHECK(y[2] == (y[1] ^ pmods[1]));
                (branch.cost == params.r ? mass_r : mass_w) += branch.probability;
            }
            CHECK(mass_r == Catch::Approx(0.5).margin(1e-12));
            CHECK(mass_w == Catch::Approx(0.5).margin(1e-12));
            CHECK(game::expected_cost(result.distribution) ==
                  Catch::Approx((params.r + params.w) / 2.0).margin(1e-9));
        }
    }
}

TEST_CASE("guess-and-count baseline") {
    const PnhProblem problem(kParams);
    const auto inst = spec_example_instance();
    auto algorithm = pnh::alg_guess_count(kParams);
    const auto result = game::run_game_exact(problem, inst, *algorithm);

    REQUIRE(result.distribution.branches.size() == 2);
    const auto z = problem.z_values(inst);
    for (const auto& branch : result.distribution.branches) {
        CHECK(branch.probability == Catch::Approx(0.5).margin(1e-12));
        const auto y = guardian_answers(inst, branch.output);
        if (branch.cost == kParams.r) {
            CHECK(y == std::array<int, 3>{z[0], z[1], z[2]});  // right guess: all correct
        }
    }
    CHECK(game::expected_cost(result.distribution) == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("blind guessing") {
    const PnhProblem problem(kParams);
    const auto inst = spec_example_instance();
    auto algorithm = pnh::alg_blind_guess();
    const auto result = game::run_game_exact(problem, inst, *algorithm);

    REQUIRE(result.distribution.branches.size() == 8);
    int r_branches = 0;
    for (const auto& branch : result.distribution.branches) {
        CHECK(branch.probability == Catch::Approx(0.125).margin(1e-12));
        if (branch.cost == kParams.r) ++r_branches;
    }
    CHECK(r_branches == 1);
    CHECK(game::expected_cost(result.distribution) == Catch::Approx(2.75).margin(1e-9));
}

TEST_CASE("quantum emulation reproduces both baselines branch for branch") {
    const PnhProblem problem(kParams);
    const auto family = pnh::enumerate_pnh_family(kParams);
    for (int which = 0; which < 2; ++which) {
        auto original = which == 0 ? pnh::alg_guess_count(kParams) : pnh::alg_blind_guess();
        auto wrapped = game::wrap_randomized_as_quantum(
            which == 0 ? pnh::alg_guess_count(kParams) : pnh::alg_blind_guess());
        for (const auto& inst : family) {
            const auto base = game::run_game_exact(problem, inst, *original);
            const auto emulated = game::run_game_exact(problem, inst, *wrapped);
            REQUIRE(game::distributions_match(base.distribution, emulated.distribution,
                                              1e-12));
        }
    }
}

TEST_CASE("one advice bit or qubit is optimal") {
    const auto inst = spec_example_instance();
    const PnhProblem problem(kParams);
    CHECK(pnh::pnh_adviser(problem, inst) == BitString{1});  // z1 = 1 here

    for (int k : {0, 1, 2}) {
        const PnhParams params{k, 1.0, 3.0};
        const PnhProblem prob(params);
        const auto family = pnh::enumerate_pnh_family(params);

        auto bit_alg = pnh::alg_advice_1bit(params);
        auto qubit_alg = pnh::alg_advice_1qubit(params);
        const auto classical =
            pnh::pnh_advice_setup(prob, game::ChannelKind::ClassicalBits);
        const auto private_q =
            pnh::pnh_advice_setup(prob, game::ChannelKind::PrivateQubits);

        for (const auto& instance : family) {
            const auto with_bit =
                game::run_game_exact(prob, instance, *bit_alg, std::optional{classical});
            REQUIRE(with_bit.distribution.branches.size() == 1);
            CHECK(with_bit.distribution.branches[0].cost == params.r);
            REQUIRE(with_bit.advice.has_value());
            CHECK(with_bit.advice->adviser_bits == 1);

            const auto with_qubit =
                game::run_game_exact(prob, instance, *qubit_alg, std::optional{private_q});
            REQUIRE(with_qubit.distribution.branches.size() == 1);
            CHECK(with_qubit.distribution.branches[0].cost == params.r);
            REQUIRE(with_qubit.advice.has_value());
            CHECK(with_qubit.advice->adviser_qubits == 1);
        }
    }
}

TEST_CASE("the quantum advice algorithm insists on its qubit channel") {
    const PnhProblem problem(kParams);
    auto algorithm = pnh::alg_advice_1qubit(kParams);
    const auto classical = pnh::pnh_advice_setup(problem, game::ChannelKind::ClassicalBits);
    CHECK_THROWS_AS(game::run_game_exact(problem, spec_example_instance(), *algorithm,
                                         std::optional{classical}),
                    ConfigError);
}

TEST_CASE("adversary forces the worst cost on every deterministic strategy") {
    const PnhProblem problem(kParams);
    for (const auto& strategy : pnh::deterministic_strategies()) {
        INFO(strategy->info().id);
        const auto inst = pnh::adversary_unrestricted(*strategy, kParams);
        problem.validate(inst);
        const auto result = game::run_game_exact(problem, inst, *strategy);
        REQUIRE(result.distribution.branches.size() == 1);
        CHECK(result.distribution.branches[0].cost == kParams.w);
    }
}

TEST_CASE("adversary construction details for the constant strategies") {
    const PnhProblem problem(kParams);
    const auto strategies = pnh::deterministic_strategies();

    // const-0: majority b = 0, so the last block gets parity 1 and z = (1,1,1).
    const auto vs_zero = pnh::adversary_unrestricted(*strategies[0], kParams);
    CHECK(problem.z_values(vs_zero) == std::array<int, 3>{1, 1, 1});

    // const-1: majority b = 1, so the last block gets parity 0 and z = (0,0,0).
    const auto vs_one = pnh::adversary_unrestricted(*strategies[1], kParams);
    CHECK(problem.z_values(vs_one) == std::array<int, 3>{0, 0, 0});
}

TEST_CASE("adversary rejects non-deterministic or advised algorithms") {
    CHECK_THROWS_AS(pnh::adversary_unrestricted(*pnh::alg_blind_guess(), kParams),
                    PreconditionError);
    CHECK_THROWS_AS(pnh::adversary_unrestricted(*pnh::alg_advice_1bit(kParams), kParams),
                    PreconditionError);
}

TEST_CASE("fooling pair search") {
    SECTION("a stateless reader is fooled at m = 6, k = 1") {
        const auto pair = pnh::fooling_pair_search(pnh::stateless_machine(), 1, 6);
        REQUIRE(pair.has_value());
        CHECK(pnh::partial_mod(pair->first, 1) == 0);
        CHECK(pnh::partial_mod(pair->second, 1) == 1);
        CHECK(pair->first.size() == 6);
        CHECK(pair->second.size() == 6);
    }

    SECTION("the ones-parity reader is fooled for k >= 1") {
        const auto machine = pnh::ones_parity_machine();
        const auto pair = pnh::fooling_pair_search(machine, 1, 6);
        REQUIRE(pair.has_value());
        CHECK(pnh::partial_mod(pair->first, 1) == 0);
        CHECK(pnh::partial_mod(pair->second, 1) == 1);
        CHECK(run_machine(machine, pair->first) == run_machine(machine, pair->second));
    }

    SECTION("a counter mod 2^{k+1} separates the parities at any length") {
        for (int m : {6, 8, 12, 16}) {
            CHECK_FALSE(pnh::fooling_pair_search(pnh::ones_counter_machine(4), 1, m)
                            .has_value());
        }
    }

    SECTION("capacity limit") {
        pnh::TransitionTable huge;
        huge.num_states = (1 << 20) + 1;
        huge.next.assign(static_cast<std::size_t>(huge.num_states), {0, 0});
        CHECK_THROWS_AS(pnh::fooling_pair_search(huge, 1, 6), ResourceError);
    }
}

TEST_CASE("an always-wrong output costs w on every instance") {
    // A hypothetical algorithm whose guardians all answer against z would be
    // exactly (w/r)-competitive: flipping any guardian answer already costs w.
    const PnhProblem problem(kParams);
    for (const auto& inst : pnh::enumerate_pnh_family(kParams)) {
        const auto z = problem.z_values(inst);
        const auto pos = PnhProblem::guardian_positions(inst);
        std::vector<int> output(inst.size(), 0);
        for (int j = 0; j < 3; ++j) output[pos[j]] = 1 - z[j];
        CHECK(problem.cost(inst, output) == kParams.w);
        CHECK(problem.cost(inst, output) / problem.opt_cost(inst) == 3.0);
    }
}

TEST_CASE("family generator covers every parity pattern") {
    for (int k : {0, 1, 2}) {
        const PnhParams params{k, 1.0, 3.0};
        const PnhProblem problem(params);
        const auto family = pnh::enumerate_pnh_family(params);
        std::set<std::array<int, 3>> patterns;
        for (const auto& inst : family) {
            problem.validate(inst);
            patterns.insert(problem.block_mods(inst));
        }
        CHECK(patterns.size() == 8);
    }
}
