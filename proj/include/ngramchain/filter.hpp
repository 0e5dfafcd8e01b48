#pragma once

// Filtering criteria for chain construction. Given a partial chain, each
// criterion decides which successor n-grams stay in the next domain:
//
//   instant   per-candidate bound on the individual log-probability
//   final     bound on the complete-chain sum (checked at completion)
//   gliding   per-step bound k * b + slack on the running prefix sum
//   lookahead existence of a depth-p successor path whose window partial
//             sums stay within (q+1) * b
//
// Every comparison is written for KEEP_LEQ; KEEP_GEQ mirrors it. The mirror
// is exact: the kept sets under KEEP_GEQ on scores s equal those under
// KEEP_LEQ on -s with bounds, thresholds and slack negated.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ngramchain/stats.hpp"
#include "ngramchain/table.hpp"
#include "ngramchain/util.hpp"

namespace ngramchain {

enum class Criterion { kVanilla, kInstant, kFinal, kGliding, kGlidingLookahead };
enum class Direction { kKeepLeq, kKeepGeq };

inline std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::kVanilla: return "vanilla";
        case Criterion::kInstant: return "instant";
        case Criterion::kFinal: return "final";
        case Criterion::kGliding: return "gliding";
        case Criterion::kGlidingLookahead: return "gliding-lookahead";
    }
    return "?";
}

inline Criterion criterion_from_string(std::string_view s) {
    if (s == "vanilla") return Criterion::kVanilla;
    if (s == "instant") return Criterion::kInstant;
    if (s == "final") return Criterion::kFinal;
    if (s == "gliding") return Criterion::kGliding;
    if (s == "gliding-lookahead") return Criterion::kGlidingLookahead;
    throw Error("unknown criterion: " + std::string(s));
}

inline std::string_view to_string(Direction d) {
    return d == Direction::kKeepLeq ? "leq" : "geq";
}

inline Direction direction_from_string(std::string_view s) {
    if (s == "leq") return Direction::kKeepLeq;
    if (s == "geq") return Direction::kKeepGeq;
    throw Error("unknown direction: " + std::string(s));
}

/// Per-step bound derived from the score distribution: b = mean - lambda * std.
struct StepBound {
    double value = 0.0;
};

inline StepBound resolve_step_bound(const DistributionStats& stats, double lambda) {
    return {stats.mean - lambda * stats.std_dev};
}

struct FilterConfig {
    Criterion criterion = Criterion::kVanilla;
    Direction direction = Direction::kKeepLeq;
    double instant_threshold = 0.0;  // T for the instant criterion
    double final_threshold = 0.0;    // T for the final criterion
    StepBound step_bound;            // b for gliding / lookahead windows
    double slack = 0.0;              // signed additive slack on the gliding bound
    int horizon = 1;                 // lookahead depth p, within [1, order - 1]
    int chain_length = 1;            // m, number of n-gram variables
    bool require_initial = true;     // chain must start at a sentence-initial n-gram
    bool require_final = true;       // chain must end at a sentence-final n-gram
};

inline void validate(const FilterConfig& config, int order) {
    if (config.chain_length < 1) throw Error("chain length must be >= 1");
    switch (config.criterion) {
        case Criterion::kInstant:
            if (!std::isfinite(config.instant_threshold))
                throw Error("instant threshold must be finite");
            break;
        case Criterion::kFinal:
            if (!std::isfinite(config.final_threshold))
                throw Error("final threshold must be finite");
            break;
        case Criterion::kGlidingLookahead:
            if (config.horizon < 1 || config.horizon > order - 1)
                throw Error("lookahead horizon must be in [1, " + std::to_string(order - 1) + "]");
            [[fallthrough]];
        case Criterion::kGliding:
            if (!std::isfinite(config.step_bound.value) || !std::isfinite(config.slack))
                throw Error("step bound and slack must be finite");
            break;
        case Criterion::kVanilla:
            break;
    }
}

inline bool keeps(Direction d, double lhs, double rhs) {
    return d == Direction::kKeepLeq ? lhs <= rhs : lhs >= rhs;
}

inline bool check_instant(Direction d, double logprob, double threshold) {
    return keeps(d, logprob, threshold);
}

inline bool check_final(Direction d, double total, double threshold) {
    return keeps(d, total, threshold);
}

/// Prefix-sum bound at step k (1-based): prefix <= k * b + slack under
/// KEEP_LEQ. Boundary comparisons are inclusive.
inline bool check_gliding(Direction d, double prefix_sum, int k, StepBound bound, double slack) {
    return keeps(d, prefix_sum, static_cast<double>(k) * bound.value + slack);
}

namespace detail {

// One lookahead branch: window sums are anchored at the candidate, so the sum
// restarts at zero here rather than continuing the chain prefix. A violated
// window can never be repaired by extending the path, hence the early return.
inline bool lookahead_path_exists(const NgramTable& table, const FilterConfig& config,
                                  NgramId id, int depth, int max_depth, double window_sum) {
    window_sum += table.logprob(id);
    const double rhs = static_cast<double>(depth + 1) * config.step_bound.value;
    if (!keeps(config.direction, window_sum, rhs)) return false;
    if (depth == max_depth) return true;
    const auto range = table.successor_range(id);
    for (NgramId s = range.begin; s < range.end; ++s)
        if (lookahead_path_exists(table, config, s, depth + 1, max_depth, window_sum)) return true;
    return false;
}

}  // namespace detail

/// True when some successor path of depth min(p, m - step) starting at `id`
/// (placed at 1-based chain position `step`) keeps every window partial sum
/// within its per-step bound. The horizon truncates near the chain end.
inline bool check_lookahead(const NgramTable& table, const FilterConfig& config, NgramId id,
                            int step) {
    const int max_depth = std::min(config.horizon, config.chain_length - step);
    return detail::lookahead_path_exists(table, config, id, 0, max_depth, 0.0);
}

struct PruneCounters {
    std::uint64_t instant = 0;
    std::uint64_t gliding = 0;
    std::uint64_t lookahead = 0;
    std::uint64_t final_bound = 0;  // monotone shortcut during descent
    std::uint64_t boundary = 0;     // completed chains rejected by the end flag

    PruneCounters& operator+=(const PruneCounters& o) {
        instant += o.instant;
        gliding += o.gliding;
        lookahead += o.lookahead;
        final_bound += o.final_bound;
        boundary += o.boundary;
        return *this;
    }
};

/// Partial chain: ids plus the running sum of their log-probabilities.
struct SearchState {
    std::vector<NgramId> chain;
    double prefix_sum = 0.0;

    std::size_t length() const { return chain.size(); }
    bool empty() const { return chain.empty(); }
};

/// Per-candidate criterion test for placing `id` at 1-based step `k` on top
/// of a prefix with sum `prefix_sum`. The final and vanilla criteria filter
/// nothing here; the final bound is only decided on complete chains.
inline bool candidate_admissible(const NgramTable& table, const FilterConfig& config,
                                 double prefix_sum, int k, NgramId id,
                                 PruneCounters* counters = nullptr) {
    switch (config.criterion) {
        case Criterion::kVanilla:
        case Criterion::kFinal:
            return true;
        case Criterion::kInstant:
            if (!check_instant(config.direction, table.logprob(id), config.instant_threshold)) {
                if (counters) ++counters->instant;
                return false;
            }
            return true;
        case Criterion::kGliding:
            if (!check_gliding(config.direction, prefix_sum + table.logprob(id), k,
                               config.step_bound, config.slack)) {
                if (counters) ++counters->gliding;
                return false;
            }
            return true;
        case Criterion::kGlidingLookahead:
            // Lookahead runs before any other criterion.
            if (!check_lookahead(table, config, id, k)) {
                if (counters) ++counters->lookahead;
                return false;
            }
            if (!check_gliding(config.direction, prefix_sum + table.logprob(id), k,
                               config.step_bound, config.slack)) {
                if (counters) ++counters->gliding;
                return false;
            }
            return true;
    }
    return true;
}

/// Domain of the next chain position under the configured criterion. For an
/// empty state the candidates are the sentence-initial ids (or every id when
/// the start flag requirement is disabled).
inline std::vector<NgramId> admissible_successors(const NgramTable& table,
                                                  const SearchState& state,
                                                  const FilterConfig& config,
                                                  PruneCounters* counters = nullptr) {
    const int k = static_cast<int>(state.length()) + 1;
    std::vector<NgramId> kept;

    if (state.empty()) {
        if (config.require_initial) {
            for (NgramId id : table.initial_ids())
                if (candidate_admissible(table, config, 0.0, k, id, counters)) kept.push_back(id);
        } else {
            for (NgramId id = 0; id < table.size(); ++id)
                if (candidate_admissible(table, config, 0.0, k, id, counters)) kept.push_back(id);
        }
        return kept;
    }

    const auto range = table.successor_range(state.chain.back());
    for (NgramId id = range.begin; id < range.end; ++id)
        if (candidate_admissible(table, config, state.prefix_sum, k, id, counters))
            kept.push_back(id);
    return kept;
}

/// Sign regime of the table's scores; decides when a prefix sum already
/// bounds every completion, enabling the final-criterion shortcut.
enum class SumMonotonicity { kNone, kNonIncreasing, kNonDecreasing };

inline SumMonotonicity sum_monotonicity(const NgramTable& table) {
    if (table.max_logprob() <= 0.0) return SumMonotonicity::kNonIncreasing;
    if (table.min_logprob() >= 0.0) return SumMonotonicity::kNonDecreasing;
    return SumMonotonicity::kNone;
}

/// Sound pruning for the final criterion: with all scores <= 0 the prefix sum
/// only decreases, so under KEEP_GEQ a prefix already below T cannot recover;
/// mirrored for all scores >= 0 under KEEP_LEQ.
inline bool final_prefix_prunable(const FilterConfig& config, SumMonotonicity monotonicity,
                                  double prefix_sum) {
    if (config.criterion != Criterion::kFinal) return false;
    if (monotonicity == SumMonotonicity::kNonIncreasing && config.direction == Direction::kKeepGeq)
        return prefix_sum < config.final_threshold;
    if (monotonicity == SumMonotonicity::kNonDecreasing && config.direction == Direction::kKeepLeq)
        return prefix_sum > config.final_threshold;
    return false;
}

}  // namespace ngramchain
