#pragma once

// Exhaustive depth-first enumeration of fixed-length n-gram chains. Chains
// run from a sentence-initial to a sentence-final n-gram, respect the
// successor relation at every link, and pass the configured criterion. The
// output order is lexicographic by id tuple regardless of exploration or
// worker order; worker parallelism statically partitions the root domain.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ngramchain/filter.hpp"
#include "ngramchain/table.hpp"
#include "ngramchain/util.hpp"

namespace ngramchain {

struct Solution {
    std::vector<NgramId> chain;
    std::vector<std::string> words;  // n + (m-1) tokens, markers included
    double total_logprob = 0.0;
    double pseudo_ppl = 0.0;

    /// Rendered sentence with the boundary markers stripped.
    std::string sentence() const {
        std::string out;
        for (const auto& w : words) {
            if (w == Lexicon::kStartToken || w == Lexicon::kEndToken) continue;
            if (!out.empty()) out += ' ';
            out += w;
        }
        return out;
    }
};

/// Token sequence of a chain: the first n-gram contributes all n words, each
/// following n-gram its last word. Verifies the successor overlap.
inline std::vector<std::string> render(const NgramTable& table, std::span<const NgramId> chain) {
    if (chain.empty()) throw BrokenChain("empty chain");
    std::vector<std::string> words;
    const auto& first = table.record(chain.front()).ngram.words;
    for (WordId w : first) words.push_back(table.lexicon().word(w));
    for (std::size_t i = 1; i < chain.size(); ++i) {
        const auto& prev = table.record(chain[i - 1]).ngram.words;
        const auto& cur = table.record(chain[i]).ngram.words;
        if (!std::equal(prev.begin() + 1, prev.end(), cur.begin(), cur.end() - 1))
            throw BrokenChain("adjacent n-grams do not overlap");
        words.push_back(table.lexicon().word(cur.back()));
    }
    return words;
}

struct SearchLimits {
    std::uint64_t max_solutions = 0;  // 0 = unlimited
    std::uint64_t max_nodes = 0;      // per worker partition
    double max_seconds = 0.0;
};

enum class StopReason { kCompleted, kSolutionLimit, kNodeLimit, kTimeLimit };

inline std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::kCompleted: return "completed";
        case StopReason::kSolutionLimit: return "solution-limit";
        case StopReason::kNodeLimit: return "node-limit";
        case StopReason::kTimeLimit: return "time-limit";
    }
    return "?";
}

struct SearchMetrics {
    std::uint64_t nodes = 0;  // assignments made (states entered)
    PruneCounters pruned;
    double seconds = 0.0;
};

struct EnumerateResult {
    std::vector<Solution> solutions;
    SearchMetrics metrics;
    StopReason stop = StopReason::kCompleted;

    bool partial() const { return stop != StopReason::kCompleted; }
};

namespace detail {

struct WorkerOutcome {
    std::vector<Solution> solutions;
    std::uint64_t nodes = 0;
    PruneCounters pruned;
    StopReason stop = StopReason::kCompleted;
};

class ChainSearch {
public:
    ChainSearch(const NgramTable& table, const FilterConfig& config, const SearchLimits& limits,
                std::chrono::steady_clock::time_point deadline_base)
        : table_(table),
          config_(config),
          limits_(limits),
          monotonicity_(sum_monotonicity(table)),
          start_(deadline_base) {}

    WorkerOutcome run(std::span<const NgramId> roots) {
        outcome_ = WorkerOutcome{};
        SearchState state;
        state.chain.reserve(static_cast<std::size_t>(config_.chain_length));
        for (NgramId root : roots) {
            if (outcome_.stop != StopReason::kCompleted) break;
            extend(state, root);
        }
        return std::move(outcome_);
    }

    /// Root candidates for the whole search (criterion-filtered).
    std::vector<NgramId> root_domain(PruneCounters* counters) const {
        SearchState empty;
        return admissible_successors(table_, empty, config_, counters);
    }

private:
    bool limits_hit() {
        if (limits_.max_solutions && outcome_.solutions.size() >= limits_.max_solutions) {
            outcome_.stop = StopReason::kSolutionLimit;
            return true;
        }
        if (limits_.max_nodes && outcome_.nodes >= limits_.max_nodes) {
            outcome_.stop = StopReason::kNodeLimit;
            return true;
        }
        if (limits_.max_seconds > 0.0 && (outcome_.nodes & 1023) == 0) {
            const auto elapsed = std::chrono::duration<double>(
                std::chrono::steady_clock::now() - start_).count();
            if (elapsed > limits_.max_seconds) {
                outcome_.stop = StopReason::kTimeLimit;
                return true;
            }
        }
        return false;
    }

    // Appends `id` and explores the subtree below it.
    void extend(SearchState& state, NgramId id) {
        if (limits_hit()) return;

        const double lp = table_.logprob(id);
        const double new_sum = state.prefix_sum + lp;
        const int k = static_cast<int>(state.length()) + 1;

        if (k < config_.chain_length &&
            final_prefix_prunable(config_, monotonicity_, new_sum)) {
            ++outcome_.pruned.final_bound;
            return;
        }

        state.chain.push_back(id);
        const double saved_sum = state.prefix_sum;
        state.prefix_sum = new_sum;
        ++outcome_.nodes;

        if (k == config_.chain_length) {
            complete(state);
        } else {
            const bool next_is_last = k + 1 == config_.chain_length;
            const auto range = table_.successor_range(id);
            for (NgramId next = range.begin; next < range.end; ++next) {
                if (outcome_.stop != StopReason::kCompleted) break;
                if (next_is_last && config_.require_final &&
                    !table_.record(next).ngram.sentence_final) {
                    ++outcome_.pruned.boundary;
                    continue;
                }
                if (candidate_admissible(table_, config_, state.prefix_sum, k + 1, next,
                                         &outcome_.pruned))
                    extend(state, next);
            }
        }

        state.chain.pop_back();
        state.prefix_sum = saved_sum;
    }

    void complete(const SearchState& state) {
        if (config_.require_final && !table_.record(state.chain.back()).ngram.sentence_final) {
            ++outcome_.pruned.boundary;
            return;
        }
        if (config_.criterion == Criterion::kFinal &&
            !check_final(config_.direction, state.prefix_sum, config_.final_threshold)) {
            ++outcome_.pruned.final_bound;
            return;
        }
        Solution sol;
        sol.chain = state.chain;
        sol.words = render(table_, state.chain);
        sol.total_logprob = state.prefix_sum;
        sol.pseudo_ppl = std::exp(-state.prefix_sum / static_cast<double>(config_.chain_length));
        outcome_.solutions.push_back(std::move(sol));
    }

    const NgramTable& table_;
    const FilterConfig& config_;
    const SearchLimits& limits_;
    const SumMonotonicity monotonicity_;
    const std::chrono::steady_clock::time_point start_;
    WorkerOutcome outcome_;
};

}  // namespace detail

/// Enumerates every chain of config.chain_length n-grams satisfying the
/// successor relation, boundary flags, and criterion. With workers > 1 the
/// root domain is split round-robin; each partition is explored
/// independently, so full (non-limited) runs are byte-identical for any
/// worker count. Solution and node limits apply per partition; the merged
/// solution list is re-capped deterministically after sorting.
inline EnumerateResult enumerate(const NgramTable& table, const FilterConfig& config,
                                 const SearchLimits& limits = {}, int workers = 1) {
    validate(config, table.order());
    const auto start = std::chrono::steady_clock::now();

    EnumerateResult result;
    detail::ChainSearch search(table, config, limits, start);
    const std::vector<NgramId> roots = search.root_domain(&result.metrics.pruned);

    std::vector<detail::WorkerOutcome> outcomes;
    if (workers <= 1 || roots.size() <= 1) {
        outcomes.push_back(search.run(roots));
    } else {
        const int n_workers = std::min<int>(workers, static_cast<int>(roots.size()));
        std::vector<std::vector<NgramId>> partitions(static_cast<std::size_t>(n_workers));
        for (std::size_t i = 0; i < roots.size(); ++i)
            partitions[i % static_cast<std::size_t>(n_workers)].push_back(roots[i]);

        outcomes.resize(static_cast<std::size_t>(n_workers));
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) {
            threads.emplace_back([&, w] {
                detail::ChainSearch worker(table, config, limits, start);
                outcomes[static_cast<std::size_t>(w)] =
                    worker.run(partitions[static_cast<std::size_t>(w)]);
            });
        }
        for (auto& t : threads) t.join();
    }

    for (auto& o : outcomes) {
        result.metrics.nodes += o.nodes;
        result.metrics.pruned += o.pruned;
        if (o.stop != StopReason::kCompleted && result.stop == StopReason::kCompleted)
            result.stop = o.stop;
        for (auto& s : o.solutions) result.solutions.push_back(std::move(s));
    }
    std::sort(result.solutions.begin(), result.solutions.end(),
              [](const Solution& a, const Solution& b) { return a.chain < b.chain; });
    if (limits.max_solutions && result.solutions.size() > limits.max_solutions) {
        result.solutions.resize(limits.max_solutions);
        result.stop = StopReason::kSolutionLimit;
    }

    result.metrics.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

// --- solutions TSV ----------------------------------------------------------
//
// Columns: sentence, total_logprob, pseudo_ppl, chain (space-separated ids).

struct SolutionRow {
    std::string sentence;
    double total_logprob = 0.0;
    double pseudo_ppl = 0.0;
    std::vector<NgramId> chain;
};

inline SolutionRow to_row(const Solution& s) {
    return {s.sentence(), s.total_logprob, s.pseudo_ppl, s.chain};
}

inline void save_solutions(std::ostream& out, std::span<const SolutionRow> rows,
                           const std::vector<std::string>& extra_comments = {}) {
    for (const auto& c : extra_comments) out << "# " << c << "\n";
    out << "sentence\ttotal_logprob\tpseudo_ppl\tchain\n";
    for (const auto& row : rows) {
        out << row.sentence << "\t" << format_double(row.total_logprob) << "\t"
            << format_double(row.pseudo_ppl) << "\t";
        for (std::size_t i = 0; i < row.chain.size(); ++i) {
            if (i) out << ' ';
            out << row.chain[i];
        }
        out << "\n";
    }
}

inline void save_solutions(std::ostream& out, std::span<const Solution> solutions,
                           const std::vector<std::string>& extra_comments = {}) {
    std::vector<SolutionRow> rows;
    rows.reserve(solutions.size());
    for (const auto& s : solutions) rows.push_back(to_row(s));
    save_solutions(out, std::span<const SolutionRow>(rows), extra_comments);
}

inline std::vector<SolutionRow> load_solutions(const std::vector<std::string>& lines) {
    std::vector<SolutionRow> rows;
    bool header_seen = false;
    for (const auto& line : lines) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (split(line, '\t').size() != 4)
                throw MalformedRow("solutions file: header must have 4 columns");
            header_seen = true;
            continue;
        }
        auto cols = split(line, '\t');
        if (cols.size() != 4) throw MalformedRow("solutions file: row must have 4 columns");
        SolutionRow row;
        row.sentence = std::string(cols[0]);
        row.total_logprob = parse_double(cols[1]);
        row.pseudo_ppl = parse_double(cols[2]);
        for (auto part : split(cols[3], ' '))
            if (!part.empty()) row.chain.push_back(static_cast<NgramId>(parse_u64(part)));
        if (row.chain.empty()) throw MalformedRow("solutions file: empty chain");
        rows.push_back(std::move(row));
    }
    if (!header_seen) throw MalformedRow("solutions file: missing header row");
    return rows;
}

/// Run metadata written next to a solutions file.
inline nlohmann::json run_metadata(const FilterConfig& config, double lambda_used,
                                   const EnumerateResult& result) {
    return nlohmann::json{
        {"criterion", std::string(to_string(config.criterion))},
        {"direction", std::string(to_string(config.direction))},
        {"lambda", lambda_used},
        {"slack", config.slack},
        {"horizon", config.horizon},
        {"m", config.chain_length},
        {"solutions", result.solutions.size()},
        {"nodes", result.metrics.nodes},
        {"pruned_by_criterion",
         {{"instant", result.metrics.pruned.instant},
          {"gliding", result.metrics.pruned.gliding},
          {"lookahead", result.metrics.pruned.lookahead},
          {"final", result.metrics.pruned.final_bound},
          {"boundary", result.metrics.pruned.boundary}}},
        {"seconds", result.metrics.seconds},
        {"stop", std::string(to_string(result.stop))},
        {"partial", result.partial()}};
}

}  // namespace ngramchain
