#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ngramchain/filter.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/random_instance.hpp"

using namespace ngramchain;

namespace {

// Handmade table from (words, logprob) rows; flags derived from the markers.
NgramTable make_table(const std::vector<std::pair<std::vector<std::string>, double>>& rows) {
    Lexicon lex;
    std::vector<ScoredNgram> scored;
    for (const auto& [words, lp] : rows) {
        ScoredNgram s;
        for (const auto& w : words) s.ngram.words.push_back(lex.intern(w));
        s.ngram.count = 1;
        s.ngram.sentence_initial = words.front() == Lexicon::kStartToken;
        s.ngram.sentence_final = words.back() == Lexicon::kEndToken;
        s.logprob = lp;
        scored.push_back(std::move(s));
    }
    return NgramTable::build(std::move(scored), std::move(lex));
}

NgramId find_id(const NgramTable& table, const std::vector<std::string>& words) {
    for (NgramId i = 0; i < table.size(); ++i) {
        std::vector<std::string> w;
        for (WordId x : table.record(i).ngram.words) w.push_back(table.lexicon().word(x));
        if (w == words) return i;
    }
    throw std::runtime_error("not found");
}

}  // namespace

TEST_CASE("instant threshold keeps inclusively in both directions") {
    CHECK(check_instant(Direction::kKeepLeq, -5.5, -5.26));
    CHECK_FALSE(check_instant(Direction::kKeepLeq, -5.0, -5.26));
    CHECK(check_instant(Direction::kKeepLeq, -5.26, -5.26));  // boundary inclusive
    CHECK(check_instant(Direction::kKeepGeq, -5.0, -5.26));
    CHECK_FALSE(check_instant(Direction::kKeepGeq, -5.5, -5.26));
}

TEST_CASE("final threshold bounds the complete sum") {
    CHECK(check_final(Direction::kKeepLeq, -1.0 + -2.0 + -3.0, -5.0));
    CHECK(check_final(Direction::kKeepLeq, -5.0, -5.0));
    CHECK_FALSE(check_final(Direction::kKeepLeq, -4.0, -5.0));
    CHECK(check_final(Direction::kKeepGeq, -4.0, -5.0));
}

TEST_CASE("gliding threshold reproduces the worked bigram arithmetic") {
    // distribution mean -5.26, std 1.43; lambda 1.5 gives b = -7.405
    const StepBound b{-5.26 - 1.5 * 1.43};
    CHECK_FALSE(check_gliding(Direction::kKeepLeq, -13.0, 2, b, 0.0));  // -13 > -14.81
    CHECK(check_gliding(Direction::kKeepLeq, b.value, 1, b, 0.0));      // boundary
    CHECK_FALSE(check_gliding(Direction::kKeepLeq, -13.0, 2, b, 1.43)); // -13 > -13.38
    CHECK(check_gliding(Direction::kKeepLeq, -13.4, 2, b, 1.43));
}

TEST_CASE("zero-horizon lookahead degenerates to a single gliding check") {
    auto table = make_table({
        {{"<s>", "a"}, -2.0},
        {{"a", "b"}, -3.0},
        {{"b", "</s>"}, -9.0},
    });
    FilterConfig config;
    config.criterion = Criterion::kGlidingLookahead;
    config.step_bound = {-4.0};
    config.horizon = 1;
    config.chain_length = 3;

    // last position: horizon truncates to zero, only the candidate itself counts
    CHECK(check_lookahead(table, config, find_id(table, {"a", "b"}), 3) ==
          check_gliding(Direction::kKeepLeq, -3.0, 1, config.step_bound, 0.0));
    CHECK_FALSE(check_lookahead(table, config, find_id(table, {"a", "b"}), 3));
    CHECK(check_lookahead(table, config, find_id(table, {"b", "</s>"}), 3));
}

TEST_CASE("lookahead prunes candidates whose only futures are bad") {
    // 3-grams: x = (<s> a b) is fine on its own, but its only successor has a
    // score far above the bound, so x cannot reach any acceptable window.
    auto table = make_table({
        {{"<s>", "a", "b"}, -5.0},
        {{"a", "b", "c"}, -0.1},
        {{"b", "c", "</s>"}, -5.0},
    });
    FilterConfig config;
    config.criterion = Criterion::kGlidingLookahead;
    config.step_bound = {-4.0};
    config.horizon = 2;
    config.chain_length = 3;

    const auto x = find_id(table, {"<s>", "a", "b"});
    CHECK(check_gliding(Direction::kKeepLeq, table.logprob(x), 1, config.step_bound, 0.0));
    CHECK_FALSE(check_lookahead(table, config, x, 1));  // window at depth 1 breaks every path
}

TEST_CASE("lookahead keeps candidates with at least one admissible path") {
    auto table = make_table({
        {{"<s>", "a", "b"}, -5.0},
        {{"a", "b", "c"}, -0.1},
        {{"a", "b", "d"}, -4.5},
        {{"b", "d", "e"}, -4.0},
        {{"b", "c", "</s>"}, -5.0},
    });
    FilterConfig config;
    config.criterion = Criterion::kGlidingLookahead;
    config.step_bound = {-4.0};
    config.horizon = 2;
    config.chain_length = 4;

    // witness path (<s> a b) -> (a b d) -> (b d e): window sums -5, -9.5,
    // -13.5 against bounds -4.4, -8.8, -13.2; the (a b c) branch dies at -5.1
    config.step_bound = {-4.4};
    CHECK(check_lookahead(table, config, find_id(table, {"<s>", "a", "b"}), 1));
}

TEST_CASE("lookahead kept set equals exhaustive path enumeration") {
    std::mt19937_64 rng(31337);
    for (int round = 0; round < 60; ++round) {
        auto table = testsupport::random_table(rng);
        auto config = testsupport::random_config(rng, table, Criterion::kGlidingLookahead,
                                                 round % 2 ? Direction::kKeepGeq
                                                           : Direction::kKeepLeq);
        std::uniform_int_distribution<int> step_dist(1, config.chain_length);
        const int step = step_dist(rng);
        for (NgramId id = 0; id < table.size(); ++id)
            CHECK(check_lookahead(table, config, id, step) ==
                  testsupport::oracle_lookahead(table, config, id, step));
    }
}

TEST_CASE("admissible_successors applies the configured criterion") {
    auto table = testsupport::toy_table();
    const auto start = table.initial_ids().front();

    SearchState after_start;
    after_start.chain = {start};
    after_start.prefix_sum = table.logprob(start);

    FilterConfig vanilla;
    vanilla.criterion = Criterion::kVanilla;
    vanilla.chain_length = 3;
    CHECK(admissible_successors(table, after_start, vanilla) == table.successors(start));

    FilterConfig instant = vanilla;
    instant.criterion = Criterion::kInstant;
    instant.instant_threshold = table.min_logprob() - 1.0;  // below every score
    CHECK(admissible_successors(table, after_start, instant).empty());
    SearchState empty;
    CHECK(admissible_successors(table, empty, instant).empty());

    // gliding at lambda = 1 against a hand-filtered domain
    const auto stats = table_stats(table, true);
    FilterConfig gliding = vanilla;
    gliding.criterion = Criterion::kGliding;
    gliding.step_bound = resolve_step_bound(stats, 1.0);
    gliding.slack = 0.0;
    std::vector<NgramId> expected;
    for (NgramId id : table.successors(start))
        if (after_start.prefix_sum + table.logprob(id) <= 2.0 * gliding.step_bound.value)
            expected.push_back(id);
    CHECK(admissible_successors(table, after_start, gliding) == expected);
}

TEST_CASE("empty state uses the initial domain or the whole table") {
    auto table = testsupport::toy_table();
    FilterConfig config;
    config.criterion = Criterion::kVanilla;
    config.chain_length = 3;
    SearchState empty;
    CHECK(admissible_successors(table, empty, config) == table.initial_ids());
    config.require_initial = false;
    CHECK(admissible_successors(table, empty, config).size() == table.size());
}

TEST_CASE("instant and final kept sets are monotone in the threshold") {
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 20; ++round) {
        auto table = testsupport::random_table(rng);
        auto loose = testsupport::random_config(rng, table, Criterion::kInstant,
                                                Direction::kKeepLeq);
        auto tight = loose;
        tight.instant_threshold = loose.instant_threshold - 1.0;
        SearchState empty;
        auto kept_tight = admissible_successors(table, empty, tight);
        auto kept_loose = admissible_successors(table, empty, loose);
        CHECK(std::includes(kept_loose.begin(), kept_loose.end(), kept_tight.begin(),
                            kept_tight.end()));
    }
}

TEST_CASE("direction mirror on the candidate predicate") {
    std::mt19937_64 rng(555);
    for (int round = 0; round < 40; ++round) {
        auto table = testsupport::random_table(rng);
        for (Criterion crit : testsupport::all_criteria()) {
            auto config = testsupport::random_config(rng, table, crit, Direction::kKeepGeq);

            // mirrored instance: negated scores, bounds, thresholds and slack
            std::vector<ScoredNgram> mirrored;
            for (const auto& rec : table.records()) {
                auto copy = rec;
                copy.logprob = -copy.logprob;
                mirrored.push_back(std::move(copy));
            }
            auto mirror_table = NgramTable::build(std::move(mirrored), Lexicon(table.lexicon()));
            auto mirror_config = config;
            mirror_config.direction = Direction::kKeepLeq;
            mirror_config.instant_threshold = -config.instant_threshold;
            mirror_config.final_threshold = -config.final_threshold;
            mirror_config.step_bound.value = -config.step_bound.value;
            mirror_config.slack = -config.slack;

            SearchState empty;
            CHECK(admissible_successors(table, empty, config) ==
                  admissible_successors(mirror_table, empty, mirror_config));
        }
    }
}

TEST_CASE("final-prefix shortcut only fires when the sign regime allows it") {
    auto table = testsupport::toy_table();  // all MLE scores <= 0
    CHECK(sum_monotonicity(table) == SumMonotonicity::kNonIncreasing);

    FilterConfig config;
    config.criterion = Criterion::kFinal;
    config.final_threshold = -1.0;

    config.direction = Direction::kKeepGeq;
    CHECK(final_prefix_prunable(config, SumMonotonicity::kNonIncreasing, -1.5));
    CHECK_FALSE(final_prefix_prunable(config, SumMonotonicity::kNonIncreasing, -0.5));
    CHECK_FALSE(final_prefix_prunable(config, SumMonotonicity::kNone, -1.5));

    config.direction = Direction::kKeepLeq;
    CHECK_FALSE(final_prefix_prunable(config, SumMonotonicity::kNonIncreasing, -0.5));
    CHECK(final_prefix_prunable(config, SumMonotonicity::kNonDecreasing, 2.0));
}
