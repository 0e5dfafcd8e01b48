#pragma once

// Corpus ingestion: whitespace tokenization, sentence padding, and sliding
// window n-gram extraction with occurrence counts and boundary flags.

#include <algorithm>
#include <cctype>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ngramchain/lexicon.hpp"
#include "ngramchain/util.hpp"

namespace ngramchain {

struct RawNgram {
    std::vector<WordId> words;
    std::uint64_t count = 0;
    bool sentence_initial = false;  // first word is <s>
    bool sentence_final = false;    // last word is </s>

    int order() const { return static_cast<int>(words.size()); }

    friend bool operator==(const RawNgram&, const RawNgram&) = default;
};

/// Maximal runs of non-whitespace characters. The corpus is expected
/// pre-tokenized, one sentence per line; no case folding here.
inline std::vector<std::string> tokenize(std::string_view line) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.emplace_back(line.substr(start, i - start));
    }
    return tokens;
}

struct ExtractionResult {
    Lexicon lexicon;
    std::vector<RawNgram> ngrams;  // sorted by word-id tuple, counts aggregated
    std::uint64_t window_count = 0;
    std::uint64_t skipped_sentences = 0;
};

/// Pads each sentence with one <s> and one </s>, then emits every contiguous
/// window of length `order`. Sentences whose padded form is still shorter
/// than `order` produce no window and are counted as skipped.
inline ExtractionResult extract_ngrams(const std::vector<std::vector<std::string>>& corpus,
                                       int order) {
    if (order < 2) throw OrderTooSmall("n-gram order must be >= 2, got " + std::to_string(order));

    ExtractionResult result;
    const std::size_t n = static_cast<std::size_t>(order);

    // std::map keys give the deterministic lexicographic record order for free.
    std::map<std::vector<WordId>, std::uint64_t> counts;

    std::vector<WordId> padded;
    for (const auto& sentence : corpus) {
        if (sentence.size() + 2 < n || sentence.empty()) {
            ++result.skipped_sentences;
            continue;
        }
        padded.clear();
        padded.push_back(Lexicon::kStartId);
        for (const auto& token : sentence) padded.push_back(result.lexicon.intern(token));
        padded.push_back(Lexicon::kEndId);

        for (std::size_t i = 0; i + n <= padded.size(); ++i) {
            std::vector<WordId> window(padded.begin() + static_cast<std::ptrdiff_t>(i),
                                       padded.begin() + static_cast<std::ptrdiff_t>(i + n));
            ++counts[std::move(window)];
            ++result.window_count;
        }
    }

    result.ngrams.reserve(counts.size());
    for (auto& [words, count] : counts) {
        RawNgram g;
        g.words = words;
        g.count = count;
        g.sentence_initial = words.front() == Lexicon::kStartId;
        g.sentence_final = words.back() == Lexicon::kEndId;
        result.ngrams.push_back(std::move(g));
    }
    return result;
}

// --- n-gram dump TSV ------------------------------------------------------
//
// One row per n-gram: n word columns, count, then initial/final flags as 0/1.
// Comment lines start with '#'; one header row names the columns.

inline void write_dump_header(std::ostream& out, int order,
                              const std::vector<std::string>& extra_comments) {
    for (const auto& c : extra_comments) out << "# " << c << "\n";
    for (int i = 0; i < order; ++i) out << "w" << (i + 1) << "\t";
    out << "count\tinitial\tfinal";
}

inline void save_ngram_dump(std::ostream& out, const std::vector<RawNgram>& ngrams,
                            const Lexicon& lexicon,
                            const std::vector<std::string>& extra_comments = {}) {
    if (ngrams.empty()) throw EmptyInput("no n-grams to save");
    write_dump_header(out, ngrams.front().order(), extra_comments);
    out << "\n";
    for (const auto& g : ngrams) {
        for (WordId w : g.words) out << lexicon.word(w) << "\t";
        out << g.count << "\t" << (g.sentence_initial ? 1 : 0) << "\t"
            << (g.sentence_final ? 1 : 0) << "\n";
    }
}

namespace detail {

struct ParsedRows {
    int order = 0;
    std::vector<std::vector<std::string_view>> rows;
};

// Shared TSV scaffolding: skips comments, validates the header row arity,
// and hands back the data rows still as string views into `lines`.
inline ParsedRows parse_tsv(const std::vector<std::string>& lines, int trailing_columns,
                            const char* what) {
    ParsedRows parsed;
    bool header_seen = false;
    for (const auto& line : lines) {
        if (line.empty() || line[0] == '#') continue;
        auto cols = split(line, '\t');
        if (!header_seen) {
            if (static_cast<int>(cols.size()) < trailing_columns + 2)
                throw MalformedRow(std::string(what) + ": header row has too few columns");
            parsed.order = static_cast<int>(cols.size()) - trailing_columns;
            header_seen = true;
            continue;
        }
        if (static_cast<int>(cols.size()) != parsed.order + trailing_columns)
            throw MalformedRow(std::string(what) + ": row has " + std::to_string(cols.size()) +
                               " columns, expected " +
                               std::to_string(parsed.order + trailing_columns));
        parsed.rows.push_back(std::move(cols));
    }
    if (!header_seen) throw MalformedRow(std::string(what) + ": missing header row");
    return parsed;
}

// Canonical lexicon for loaded tables: distinct words interned in string
// order, so ids depend only on the word set, not on row order.
inline Lexicon canonical_lexicon(const std::vector<std::vector<std::string_view>>& rows,
                                 int order) {
    std::vector<std::string_view> words;
    for (const auto& row : rows)
        for (int i = 0; i < order; ++i) words.push_back(row[static_cast<std::size_t>(i)]);
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    Lexicon lex;
    for (auto w : words) lex.intern(w);
    return lex;
}

inline bool parse_flag(std::string_view s, const char* what) {
    if (s == "0") return false;
    if (s == "1") return true;
    throw MalformedRow(std::string(what) + ": flag must be 0 or 1, got '" + std::string(s) + "'");
}

}  // namespace detail

struct DumpData {
    Lexicon lexicon;
    std::vector<RawNgram> ngrams;
    int order = 0;
};

inline DumpData load_ngram_dump(const std::vector<std::string>& lines) {
    auto parsed = detail::parse_tsv(lines, 3, "ngram dump");
    if (parsed.order < 2) throw OrderTooSmall("dump order must be >= 2");

    DumpData data;
    data.order = parsed.order;
    data.lexicon = detail::canonical_lexicon(parsed.rows, parsed.order);
    for (const auto& row : parsed.rows) {
        RawNgram g;
        for (int i = 0; i < parsed.order; ++i)
            g.words.push_back(data.lexicon.intern(row[static_cast<std::size_t>(i)]));
        const std::size_t base = static_cast<std::size_t>(parsed.order);
        g.count = parse_u64(row[base]);
        if (g.count == 0) throw MalformedRow("ngram dump: count must be >= 1");
        g.sentence_initial = detail::parse_flag(row[base + 1], "ngram dump");
        g.sentence_final = detail::parse_flag(row[base + 2], "ngram dump");
        data.ngrams.push_back(std::move(g));
    }
    std::sort(data.ngrams.begin(), data.ngrams.end(),
              [](const RawNgram& a, const RawNgram& b) { return a.words < b.words; });
    for (std::size_t i = 1; i < data.ngrams.size(); ++i)
        if (data.ngrams[i].words == data.ngrams[i - 1].words)
            throw DuplicateNgram("ngram dump: duplicate n-gram row");
    return data;
}

}  // namespace ngramchain
