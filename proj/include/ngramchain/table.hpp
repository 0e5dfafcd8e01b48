#pragma once

// Immutable indexed n-gram collection. Ids are assigned lexicographically by
// word-id tuple, which makes every successor set a contiguous id range: the
// successors of N are exactly the records whose (n-1)-prefix equals N's
// (n-1)-suffix, and records sharing a prefix are adjacent in sorted order.

#include <algorithm>
#include <span>
#include <utility>
#include <vector>

#include "ngramchain/lexicon.hpp"
#include "ngramchain/scoring.hpp"
#include "ngramchain/stats.hpp"
#include "ngramchain/util.hpp"

namespace ngramchain {

class NgramTable {
public:
    struct IdRange {
        NgramId begin = 0;
        NgramId end = 0;  // half-open
        std::size_t size() const { return end - begin; }
        bool empty() const { return begin == end; }
    };

    static NgramTable build(std::vector<ScoredNgram> scored, Lexicon lexicon) {
        if (scored.empty()) throw EmptyInput("cannot build a table from zero n-grams");
        const int order = scored.front().ngram.order();
        if (order < 2) throw OrderTooSmall("table order must be >= 2");
        for (const auto& s : scored)
            if (s.ngram.order() != order)
                throw MixedOrder("table mixes n-gram orders " + std::to_string(order) + " and " +
                                 std::to_string(s.ngram.order()));

        std::sort(scored.begin(), scored.end(), [](const ScoredNgram& a, const ScoredNgram& b) {
            return a.ngram.words < b.ngram.words;
        });
        for (std::size_t i = 1; i < scored.size(); ++i)
            if (scored[i].ngram.words == scored[i - 1].ngram.words)
                throw DuplicateNgram("duplicate n-gram tuple in table input");

        NgramTable table;
        table.order_ = order;
        table.lexicon_ = std::move(lexicon);
        table.records_ = std::move(scored);
        table.build_indexes();
        return table;
    }

    static NgramTable build(ScoredTable scored) {
        return build(std::move(scored.ngrams), std::move(scored.lexicon));
    }

    int order() const { return order_; }
    std::size_t size() const { return records_.size(); }
    const Lexicon& lexicon() const { return lexicon_; }
    const std::vector<ScoredNgram>& records() const { return records_; }

    const ScoredNgram& record(NgramId id) const {
        check_id(id);
        return records_[id];
    }

    double logprob(NgramId id) const { return record(id).logprob; }

    /// Successors as a contiguous id range; O(1).
    IdRange successor_range(NgramId id) const {
        check_id(id);
        return succ_[id];
    }

    std::vector<NgramId> successors(NgramId id) const {
        const IdRange r = successor_range(id);
        std::vector<NgramId> out;
        out.reserve(r.size());
        for (NgramId s = r.begin; s < r.end; ++s) out.push_back(s);
        return out;
    }

    const std::vector<NgramId>& initial_ids() const { return initial_; }
    const std::vector<NgramId>& final_ids() const { return final_; }

    double min_logprob() const { return min_logprob_; }
    double max_logprob() const { return max_logprob_; }

private:
    void check_id(NgramId id) const {
        if (id >= records_.size()) throw InvalidId("n-gram id out of range");
    }

    // Ids whose (n-1)-word prefix equals `key`, as a half-open range.
    IdRange prefix_range(std::span<const WordId> key) const {
        auto lo = std::lower_bound(records_.begin(), records_.end(), key,
                                   [](const ScoredNgram& rec, std::span<const WordId> k) {
                                       return std::lexicographical_compare(
                                           rec.ngram.words.begin(),
                                           rec.ngram.words.begin() + static_cast<std::ptrdiff_t>(k.size()),
                                           k.begin(), k.end());
                                   });
        auto hi = std::upper_bound(lo, records_.end(), key,
                                   [](std::span<const WordId> k, const ScoredNgram& rec) {
                                       return std::lexicographical_compare(
                                           k.begin(), k.end(), rec.ngram.words.begin(),
                                           rec.ngram.words.begin() + static_cast<std::ptrdiff_t>(k.size()));
                                   });
        return {static_cast<NgramId>(lo - records_.begin()),
                static_cast<NgramId>(hi - records_.begin())};
    }

    void build_indexes() {
        succ_.resize(records_.size());
        min_logprob_ = records_.front().logprob;
        max_logprob_ = records_.front().logprob;
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const auto& g = records_[i].ngram;
            std::span<const WordId> suffix(g.words.data() + 1, g.words.size() - 1);
            succ_[i] = prefix_range(suffix);
            if (g.sentence_initial) initial_.push_back(static_cast<NgramId>(i));
            if (g.sentence_final) final_.push_back(static_cast<NgramId>(i));
            min_logprob_ = std::min(min_logprob_, records_[i].logprob);
            max_logprob_ = std::max(max_logprob_, records_[i].logprob);
        }
    }

    int order_ = 0;
    Lexicon lexicon_;
    std::vector<ScoredNgram> records_;
    std::vector<IdRange> succ_;
    std::vector<NgramId> initial_;
    std::vector<NgramId> final_;
    double min_logprob_ = 0.0;
    double max_logprob_ = 0.0;
};

/// Distribution of record log-probabilities; boundary-marker n-grams can be
/// excluded for sensitivity runs.
inline DistributionStats table_stats(const NgramTable& table, bool include_boundary = true) {
    std::vector<double> scores;
    scores.reserve(table.size());
    for (const auto& rec : table.records()) {
        if (!include_boundary && (rec.ngram.sentence_initial || rec.ngram.sentence_final)) continue;
        scores.push_back(rec.logprob);
    }
    if (scores.empty()) throw EmptyAfterFilter("no n-grams left after boundary exclusion");
    return compute_stats(scores);
}

inline std::vector<std::pair<double, double>> qq_data(const NgramTable& table) {
    std::vector<double> scores;
    scores.reserve(table.size());
    for (const auto& rec : table.records()) scores.push_back(rec.logprob);
    return qq_points(scores);
}

}  // namespace ngramchain
