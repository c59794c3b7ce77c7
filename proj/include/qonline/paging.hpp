#pragma once

// Paging with an n-bit advice scheme: the adviser marks each request whose
// page the offline optimum keeps in cache until its next use; the online
// algorithm evicts only unmarked pages and matches the optimum fault count.

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qonline/bits.hpp"
#include "qonline/errors.hpp"
#include "qonline/game.hpp"

namespace qonline::paging {

struct PagingInstance {
    int num_pages = 0;   // slow memory size N
    int cache_size = 0;  // fast memory size, < N
    std::vector<int> requests;  // page ids in [1, N]
};

struct PagingRun {
    int fault_count = 0;
    int eviction_count = 0;
    std::vector<int> evictions;  // per request, evicted page id or 0
    std::vector<int> final_cache;
};

struct PagingProblem {
    using Instance = PagingInstance;

    void validate(const Instance& inst) const {
        if (inst.num_pages < 2) throw ValidationError("need at least two pages");
        if (inst.cache_size < 1 || inst.cache_size >= inst.num_pages) {
            throw ValidationError("cache size must be in [1, N-1]");
        }
        if (inst.requests.empty()) throw ValidationError("request sequence is empty");
        for (int p : inst.requests) {
            if (p < 1 || p > inst.num_pages) {
                throw ValidationError("page id " + std::to_string(p) + " out of range");
            }
        }
    }

    std::vector<int> requests(const Instance& inst) const { return inst.requests; }

    // Replays an eviction schedule; the cost is the number of faults.
    double cost(const Instance& inst, std::span<const int> output) const {
        if (output.size() != inst.requests.size()) {
            throw ValidationError("output length must match request count");
        }
        std::set<int> cache;
        int faults = 0;
        for (std::size_t i = 0; i < inst.requests.size(); ++i) {
            const int page = inst.requests[i];
            const int evicted = output[i];
            if (cache.count(page)) {
                if (evicted != 0) throw ValidationError("eviction answered on a hit");
                continue;
            }
            ++faults;
            if (evicted != 0) {
                if (!cache.count(evicted)) {
                    throw ValidationError("evicting a page that is not cached");
                }
                cache.erase(evicted);
            }
            cache.insert(page);
            if (static_cast<int>(cache.size()) > inst.cache_size) {
                throw ValidationError("cache overflow: an eviction was required");
            }
        }
        return faults;
    }

    double opt_cost(const Instance& inst) const;
};

namespace detail {

// next_use[i] = first j > i requesting the same page, or n if none.
inline std::vector<std::size_t> next_use_table(const std::vector<int>& requests) {
    const std::size_t n = requests.size();
    std::vector<std::size_t> next(n, n);
    std::map<int, std::size_t> upcoming;
    for (std::size_t i = n; i-- > 0;) {
        auto it = upcoming.find(requests[i]);
        next[i] = (it == upcoming.end()) ? n : it->second;
        upcoming[requests[i]] = i;
    }
    return next;
}

}  // namespace detail

// Offline optimum: on a fault with a full cache, evict the page whose next use
// lies farthest in the future (never used again counts as infinity), breaking
// ties toward the smallest page id.
inline PagingRun belady(const PagingInstance& inst) {
    PagingProblem{}.validate(inst);
    const std::size_t n = inst.requests.size();
    const auto next_use = detail::next_use_table(inst.requests);

    PagingRun run;
    run.evictions.assign(n, 0);
    std::map<int, std::size_t> cache_next;  // page -> its next use index
    for (std::size_t i = 0; i < n; ++i) {
        const int page = inst.requests[i];
        auto it = cache_next.find(page);
        if (it != cache_next.end()) {
            it->second = next_use[i];
            continue;
        }
        ++run.fault_count;
        if (static_cast<int>(cache_next.size()) == inst.cache_size) {
            int victim = 0;
            std::size_t farthest = 0;
            for (const auto& [cached, next] : cache_next) {
                if (victim == 0 || next > farthest) {
                    victim = cached;
                    farthest = next;
                }
            }
            cache_next.erase(victim);
            run.evictions[i] = victim;
            ++run.eviction_count;
        }
        cache_next[page] = next_use[i];
    }
    for (const auto& [page, _] : cache_next) run.final_cache.push_back(page);
    return run;
}

inline double PagingProblem::opt_cost(const Instance& inst) const {
    return belady(inst).fault_count;
}

// Advice bit i is 1 iff the page requested at step i stays cached in the
// belady run until its next request (0 if never requested again or evicted
// before then). Equivalently: the next request of that page is a hit.
inline BitString paging_advice_bits(const PagingInstance& inst) {
    PagingProblem{}.validate(inst);
    const std::size_t n = inst.requests.size();
    const auto next_use = detail::next_use_table(inst.requests);
    const PagingRun run = belady(inst);

    // Reconstruct per-step hit flags from the belady replay.
    std::vector<char> hit(n, 0);
    {
        std::set<int> cache;
        for (std::size_t i = 0; i < n; ++i) {
            const int page = inst.requests[i];
            if (cache.count(page)) {
                hit[i] = 1;
                continue;
            }
            if (run.evictions[i] != 0) cache.erase(run.evictions[i]);
            cache.insert(page);
        }
    }
    BitString bits(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (next_use[i] < n && hit[next_use[i]]) bits[i] = 1;
    }
    return bits;
}

namespace detail {

class PagingAdviceRun final : public game::AlgorithmRun {
public:
    PagingAdviceRun(int cache_size, BitString advice)
        : cache_size_(cache_size), advice_(std::move(advice)) {}

    int answer(game::RunContext&, int page) override {
        if (step_ >= advice_.size()) {
            throw ProtocolError("advice string shorter than the request sequence");
        }
        const int keep = advice_[step_++];
        auto it = cache_.find(page);
        if (it != cache_.end()) {
            it->second = keep;
            return 0;
        }
        int evicted = 0;
        if (static_cast<int>(cache_.size()) == cache_size_) {
            int victim = 0;
            for (const auto& [cached, flag] : cache_) {
                if (!flag) {
                    victim = cached;
                    break;
                }
            }
            // All flagged cannot happen under correct advice; fall back to the
            // smallest id so the behavior stays defined.
            if (victim == 0) victim = cache_.begin()->first;
            cache_.erase(victim);
            evicted = victim;
        }
        cache_[page] = keep;
        return evicted;
    }

private:
    int cache_size_;
    BitString advice_;
    std::size_t step_ = 0;
    std::map<int, int> cache_;  // page -> keep flag from its latest request
};

class PagingAdviceAlgorithm final : public game::OnlineAlgorithm {
public:
    explicit PagingAdviceAlgorithm(int cache_size) : cache_size_(cache_size) {
        if (cache_size < 1) throw ConfigError("cache size must be positive");
        info_.id = "paging-keep-bit";
        info_.resources.kind = game::AlgorithmKind::Deterministic;
        info_.resources.advice_per_request = true;
        info_.resources.advice_channels = {game::ChannelKind::ClassicalBits,
                                           game::ChannelKind::PrivateQubits,
                                           game::ChannelKind::SharedEpr};
    }

    const game::AlgorithmInfo& info() const override { return info_; }

    std::unique_ptr<game::AlgorithmRun> start(game::RunContext&,
                                              const BitString& advice) const override {
        return std::make_unique<PagingAdviceRun>(cache_size_, advice);
    }

private:
    int cache_size_;
    game::AlgorithmInfo info_;
};

}  // namespace detail

inline std::unique_ptr<game::OnlineAlgorithm> alg_paging_with_advice(int cache_size) {
    return std::make_unique<detail::PagingAdviceAlgorithm>(cache_size);
}

inline game::AdviceSetup<PagingProblem> paging_advice_setup(game::ChannelKind channel) {
    game::AdviceSetup<PagingProblem> setup;
    setup.channel = channel;
    setup.adviser = [](const PagingInstance& inst) { return paging_advice_bits(inst); };
    return setup;
}

// Seeded random corpus within the desk-scale bounds.
inline PagingInstance random_paging_instance(std::mt19937_64& rng, int max_pages = 8,
                                             int max_cache = 4, int max_requests = 24) {
    PagingInstance inst;
    inst.num_pages = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_pages - 1));
    const int cache_bound = std::min(max_cache, inst.num_pages - 1);
    inst.cache_size = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cache_bound));
    const int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_requests));
    inst.requests.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        inst.requests.push_back(
            1 + static_cast<int>(rng() % static_cast<std::uint64_t>(inst.num_pages)));
    }
    return inst;
}

inline std::vector<PagingInstance> paging_corpus(int count, std::uint64_t seed,
                                                 int max_pages = 8, int max_cache = 4,
                                                 int max_requests = 24) {
    std::vector<PagingInstance> corpus;
    corpus.reserve(static_cast<std::size_t>(count));
    std::mt19937_64 rng(seed);
    for (int i = 0; i < count; ++i) {
        corpus.push_back(random_paging_instance(rng, max_pages, max_cache, max_requests));
    }
    return corpus;
}

}  // namespace qonline::paging
