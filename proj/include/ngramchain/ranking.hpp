#pragma once

// Sentence selection: pseudo-perplexity from chain log-probabilities,
// optional import of externally computed sentence scores, cutoff filtering,
// and score-distribution summaries.

#include <cmath>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "ngramchain/search.hpp"
#include "ngramchain/stats.hpp"
#include "ngramchain/util.hpp"

namespace ngramchain {

enum class PplSource { kPseudo, kExternal };

inline std::string_view to_string(PplSource s) {
    return s == PplSource::kPseudo ? "pseudo" : "external";
}

/// exp(-total_logprob / m): strictly decreasing in total_logprob at fixed m.
inline double pseudo_ppl(double total_logprob, std::size_t chain_length) {
    if (chain_length == 0) throw EmptyInput("chain length must be >= 1");
    return std::exp(-total_logprob / static_cast<double>(chain_length));
}

struct RankedSolution {
    SolutionRow solution;
    double ppl = 0.0;
    PplSource source = PplSource::kPseudo;
};

inline std::vector<RankedSolution> rank_solutions(std::span<const SolutionRow> rows) {
    std::vector<RankedSolution> ranked;
    ranked.reserve(rows.size());
    for (const auto& row : rows)
        ranked.push_back({row, pseudo_ppl(row.total_logprob, row.chain.size()),
                          PplSource::kPseudo});
    return ranked;
}

struct SentenceScoreReport {
    std::uint64_t matched = 0;
    std::uint64_t unmatched = 0;   // solutions left on their pseudo score
    std::uint64_t duplicates = 0;  // repeated sentence rows (last one wins)
};

/// Sentence score file: TSV rows "sentence<TAB>ppl". Matched solutions switch
/// to the external score; unmatched ones keep pseudo-perplexity.
inline void load_sentence_scores(const std::vector<std::string>& lines,
                                 std::vector<RankedSolution>& ranked,
                                 SentenceScoreReport* report = nullptr) {
    std::map<std::string, double> scores;
    SentenceScoreReport local;
    for (const auto& line : lines) {
        if (line.empty() || line[0] == '#') continue;
        auto cols = split(line, '\t');
        if (cols.size() != 2) throw MalformedRow("sentence scores: expected 2 columns");
        double ppl = parse_double(cols[1]);
        if (!std::isfinite(ppl) || ppl <= 0.0)
            throw NonPositivePpl("sentence scores: ppl must be positive and finite");
        auto [it, inserted] = scores.insert_or_assign(std::string(cols[0]), ppl);
        if (!inserted) ++local.duplicates;
    }
    for (auto& r : ranked) {
        auto it = scores.find(r.solution.sentence);
        if (it != scores.end()) {
            r.ppl = it->second;
            r.source = PplSource::kExternal;
            ++local.matched;
        } else {
            ++local.unmatched;
        }
    }
    if (report) *report = local;
}

struct CutoffReport {
    std::size_t kept = 0;
    std::size_t total = 0;
};

/// Keeps exactly the entries with ppl <= cutoff, in stable order.
inline std::vector<RankedSolution> select_by_cutoff(const std::vector<RankedSolution>& ranked,
                                                    double cutoff,
                                                    CutoffReport* report = nullptr) {
    std::vector<RankedSolution> kept;
    for (const auto& r : ranked)
        if (r.ppl <= cutoff) kept.push_back(r);
    if (report) *report = {kept.size(), ranked.size()};
    return kept;
}

inline DistributionStats ppl_summary(std::span<const RankedSolution> ranked) {
    if (ranked.empty()) throw EmptyInput("no ranked solutions to summarize");
    std::vector<double> ppls;
    ppls.reserve(ranked.size());
    for (const auto& r : ranked) ppls.push_back(r.ppl);
    return compute_stats(ppls);
}

inline void save_ranked(std::ostream& out, std::span<const RankedSolution> ranked,
                        const std::vector<std::string>& extra_comments = {}) {
    for (const auto& c : extra_comments) out << "# " << c << "\n";
    out << "sentence\tppl\tsource\ttotal_logprob\n";
    for (const auto& r : ranked)
        out << r.solution.sentence << "\t" << format_double(r.ppl) << "\t" << to_string(r.source)
            << "\t" << format_double(r.solution.total_logprob) << "\n";
}

}  // namespace ngramchain
