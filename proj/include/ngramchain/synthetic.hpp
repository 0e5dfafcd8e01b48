#pragma once

// Seeded synthetic bigram instances for benchmarks and stress tests. The
// generator is self-contained (own PRNG and transforms) so identical seeds
// give identical tables across standard library versions.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "ngramchain/scoring.hpp"
#include "ngramchain/table.hpp"

namespace ngramchain {

namespace detail {

// splitmix64; passes through every 64-bit state exactly once.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Box-Muller; one variate per call keeps the stream layout obvious.
    double gaussian() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace detail

struct SyntheticSpec {
    std::uint32_t vocab = 100;      // regular words w000..w(V-1)
    double density = 1.0;           // probability that a word pair is a record
    double initial_fraction = 0.4;  // leading share of words with a <s> edge
    double final_fraction = 0.4;    // leading share of words with a </s> edge
    std::uint64_t seed = 1;
    double score_location = 1.6;    // log-probs are -exp(N(location, scale)):
    double score_scale = 0.3;       // all negative, left-skewed
};

/// Deterministic synthetic bigram table. Word names are zero-padded so string
/// order and numeric order coincide.
inline ScoredTable make_synthetic(const SyntheticSpec& spec) {
    detail::SplitMix64 rng(spec.seed);
    ScoredTable table;
    table.order = 2;

    std::vector<WordId> word_ids;
    word_ids.reserve(spec.vocab);
    char name[16];
    for (std::uint32_t i = 0; i < spec.vocab; ++i) {
        std::snprintf(name, sizeof(name), "w%04u", i);
        word_ids.push_back(table.lexicon.intern(name));
    }

    auto score = [&rng, &spec]() {
        return -std::exp(spec.score_location + spec.score_scale * rng.gaussian());
    };
    auto add = [&table](WordId a, WordId b, double lp) {
        ScoredNgram s;
        s.ngram.words = {a, b};
        s.ngram.count = 1;
        s.ngram.sentence_initial = a == Lexicon::kStartId;
        s.ngram.sentence_final = b == Lexicon::kEndId;
        s.logprob = lp;
        table.ngrams.push_back(std::move(s));
    };

    const auto n_initial =
        static_cast<std::uint32_t>(spec.initial_fraction * static_cast<double>(spec.vocab));
    const auto n_final =
        static_cast<std::uint32_t>(spec.final_fraction * static_cast<double>(spec.vocab));

    for (std::uint32_t i = 0; i < n_initial; ++i) add(Lexicon::kStartId, word_ids[i], score());
    for (std::uint32_t i = 0; i < n_final; ++i) add(word_ids[i], Lexicon::kEndId, score());
    for (std::uint32_t a = 0; a < spec.vocab; ++a)
        for (std::uint32_t b = 0; b < spec.vocab; ++b) {
            const double lp = score();  // draw first: record set and scores stay coupled to seed
            if (spec.density >= 1.0 || rng.uniform01() < spec.density)
                add(word_ids[a], word_ids[b], lp);
        }

    return table;
}

}  // namespace ngramchain
