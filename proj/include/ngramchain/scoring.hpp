#pragma once

// Attaches log-probabilities to n-grams. Two sources: corpus maximum
// likelihood (count ratios over the shared history prefix) or an externally
// computed score file. Natural log throughout.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ngramchain/corpus.hpp"
#include "ngramchain/lexicon.hpp"
#include "ngramchain/util.hpp"

namespace ngramchain {

struct ScoredNgram {
    RawNgram ngram;
    double logprob = 0.0;  // finite by construction

    friend bool operator==(const ScoredNgram&, const ScoredNgram&) = default;
};

enum class ScoreKind { kMle, kExternal };

struct ScoreSource {
    ScoreKind kind = ScoreKind::kMle;
    std::optional<double> default_logprob;  // fill for uncovered n-grams in external mode
};

/// ln(C(Y)/C(H)) where the history count is the summed count of all order-n
/// n-grams sharing the (n-1)-word prefix. The ratio is formed before the log.
inline double mle_logprob(const RawNgram& ngram, std::uint64_t history_count) {
    if (history_count == 0) throw ZeroHistory("history count is zero");
    return std::log(static_cast<double>(ngram.count) / static_cast<double>(history_count));
}

/// Scores every n-gram by MLE. Input must be sorted by word tuple so that
/// n-grams sharing a prefix are contiguous.
inline std::vector<ScoredNgram> mle_score(const std::vector<RawNgram>& sorted_ngrams) {
    std::vector<ScoredNgram> scored;
    scored.reserve(sorted_ngrams.size());
    std::size_t i = 0;
    while (i < sorted_ngrams.size()) {
        const std::size_t prefix_len = sorted_ngrams[i].words.size() - 1;
        std::size_t j = i;
        std::uint64_t history = 0;
        while (j < sorted_ngrams.size() &&
               std::equal(sorted_ngrams[i].words.begin(),
                          sorted_ngrams[i].words.begin() + static_cast<std::ptrdiff_t>(prefix_len),
                          sorted_ngrams[j].words.begin(),
                          sorted_ngrams[j].words.begin() + static_cast<std::ptrdiff_t>(prefix_len))) {
            history += sorted_ngrams[j].count;
            ++j;
        }
        for (std::size_t k = i; k < j; ++k)
            scored.push_back({sorted_ngrams[k], mle_logprob(sorted_ngrams[k], history)});
        i = j;
    }
    return scored;
}

struct ExternalScoreReport {
    std::uint64_t unknown_rows = 0;  // rows naming n-grams absent from the table
    std::uint64_t defaulted = 0;     // table n-grams filled from default_logprob
};

/// Score file: TSV with columns w1..wn then logprob (natural log); '#' starts
/// a comment. Rows for unknown n-grams are counted and ignored. Every table
/// n-gram must end up scored, either from the file or the default.
inline std::vector<ScoredNgram> load_external_scores(const std::vector<std::string>& lines,
                                                     const std::vector<RawNgram>& table,
                                                     const Lexicon& lexicon,
                                                     const ScoreSource& source,
                                                     ExternalScoreReport* report = nullptr) {
    if (table.empty()) throw EmptyInput("no n-grams to score");
    const std::size_t n = table.front().words.size();

    std::map<std::vector<WordId>, double> file_scores;
    ExternalScoreReport local;
    for (const auto& raw_line : lines) {
        if (raw_line.empty() || raw_line[0] == '#') continue;
        auto cols = split(raw_line, '\t');
        if (cols.size() != n + 1)
            throw MalformedRow("score file: expected " + std::to_string(n + 1) +
                               " columns, got " + std::to_string(cols.size()));
        double lp = parse_double(cols.back());
        if (!std::isfinite(lp)) throw NonFiniteScore("score file: non-finite score");

        std::vector<WordId> words;
        bool known = true;
        for (std::size_t i = 0; i < n; ++i) {
            auto id = lexicon.find(cols[i]);
            if (!id) { known = false; break; }
            words.push_back(*id);
        }
        if (known) file_scores[std::move(words)] = lp;  // last row wins
        else ++local.unknown_rows;
    }

    std::vector<ScoredNgram> scored;
    scored.reserve(table.size());
    std::vector<std::vector<WordId>> covered;
    for (const auto& g : table) {
        auto it = file_scores.find(g.words);
        if (it != file_scores.end()) {
            scored.push_back({g, it->second});
            covered.push_back(g.words);
        } else if (source.default_logprob) {
            if (!std::isfinite(*source.default_logprob))
                throw NonFiniteScore("default logprob is not finite");
            scored.push_back({g, *source.default_logprob});
            ++local.defaulted;
        } else {
            std::string text;
            for (WordId w : g.words) text += lexicon.word(w) + " ";
            throw MissingScore("no score for n-gram: " + text);
        }
    }
    // File rows matching no table n-gram also count as unknown.
    std::sort(covered.begin(), covered.end());
    for (const auto& [words, lp] : file_scores)
        if (!std::binary_search(covered.begin(), covered.end(), words)) ++local.unknown_rows;

    if (report) *report = local;
    return scored;
}

// --- scored table TSV -------------------------------------------------------
//
// Dump columns plus a logprob column. Rows are ordered by the word strings
// (bytewise), which keeps save -> load -> save byte-identical no matter how
// word ids get reassigned on load.

inline void save_scored(std::ostream& out, const std::vector<ScoredNgram>& scored,
                        const Lexicon& lexicon, int order,
                        const std::vector<std::string>& extra_comments = {}) {
    for (const auto& c : extra_comments) out << "# " << c << "\n";
    for (int i = 0; i < order; ++i) out << "w" << (i + 1) << "\t";
    out << "count\tinitial\tfinal\tlogprob\n";

    std::vector<std::pair<std::vector<std::string>, const ScoredNgram*>> rows;
    rows.reserve(scored.size());
    for (const auto& s : scored) {
        std::vector<std::string> words;
        for (WordId w : s.ngram.words) words.push_back(lexicon.word(w));
        rows.emplace_back(std::move(words), &s);
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    for (const auto& [words, s] : rows) {
        for (const auto& w : words) out << w << "\t";
        out << s->ngram.count << "\t" << (s->ngram.sentence_initial ? 1 : 0) << "\t"
            << (s->ngram.sentence_final ? 1 : 0) << "\t" << format_double(s->logprob) << "\n";
    }
}

struct ScoredTable {
    Lexicon lexicon;
    std::vector<ScoredNgram> ngrams;
    int order = 0;
};

inline ScoredTable load_scored(const std::vector<std::string>& lines) {
    auto parsed = detail::parse_tsv(lines, 4, "scored table");
    if (parsed.order < 2) throw OrderTooSmall("scored table order must be >= 2");

    ScoredTable table;
    table.order = parsed.order;
    table.lexicon = detail::canonical_lexicon(parsed.rows, parsed.order);
    for (const auto& row : parsed.rows) {
        ScoredNgram s;
        for (int i = 0; i < parsed.order; ++i)
            s.ngram.words.push_back(table.lexicon.intern(row[static_cast<std::size_t>(i)]));
        const std::size_t base = static_cast<std::size_t>(parsed.order);
        s.ngram.count = parse_u64(row[base]);
        if (s.ngram.count == 0) throw MalformedRow("scored table: count must be >= 1");
        s.ngram.sentence_initial = detail::parse_flag(row[base + 1], "scored table");
        s.ngram.sentence_final = detail::parse_flag(row[base + 2], "scored table");
        s.logprob = parse_double(row[base + 3]);
        if (!std::isfinite(s.logprob)) throw NonFiniteScore("scored table: non-finite logprob");
        table.ngrams.push_back(std::move(s));
    }
    std::sort(table.ngrams.begin(), table.ngrams.end(),
              [](const ScoredNgram& a, const ScoredNgram& b) { return a.ngram.words < b.ngram.words; });
    for (std::size_t i = 1; i < table.ngrams.size(); ++i)
        if (table.ngrams[i].ngram.words == table.ngrams[i - 1].ngram.words)
            throw DuplicateNgram("scored table: duplicate n-gram row");
    return table;
}

}  // namespace ngramchain
