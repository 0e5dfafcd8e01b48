#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "ngramchain/search.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/random_instance.hpp"

using namespace ngramchain;

namespace {

FilterConfig vanilla_config(int m) {
    FilterConfig config;
    config.criterion = Criterion::kVanilla;
    config.chain_length = m;
    return config;
}

std::vector<std::string> sentences_of(const EnumerateResult& result) {
    std::vector<std::string> out;
    for (const auto& s : result.solutions) out.push_back(s.sentence());
    return out;
}

}  // namespace

TEST_CASE("toy vanilla enumeration finds exactly the two chains") {
    auto table = testsupport::toy_table();
    auto result = enumerate(table, vanilla_config(3));
    REQUIRE(result.solutions.size() == 2);
    CHECK(sentences_of(result) == std::vector<std::string>{"a b", "a c"});
    CHECK(result.stop == StopReason::kCompleted);

    for (const auto& s : result.solutions) {
        CHECK(s.words.size() == 2 + (3 - 1));  // n + (m-1) tokens
        CHECK(s.words.front() == Lexicon::kStartToken);
        CHECK(s.words.back() == Lexicon::kEndToken);
        CHECK(table.record(s.chain.front()).ngram.sentence_initial);
        CHECK(table.record(s.chain.back()).ngram.sentence_final);
    }
}

TEST_CASE("unsatisfiable instant threshold yields nothing") {
    auto table = testsupport::toy_table();
    FilterConfig config = vanilla_config(3);
    config.criterion = Criterion::kInstant;
    config.instant_threshold = table.min_logprob() - 1.0;
    auto result = enumerate(table, config);
    CHECK(result.solutions.empty());
    CHECK(result.metrics.pruned.instant > 0);
}

TEST_CASE("render reconstructs overlapping words") {
    auto table = testsupport::toy_table();
    auto result = enumerate(table, vanilla_config(3));
    REQUIRE(result.solutions.size() == 2);
    auto words = render(table, result.solutions[0].chain);
    CHECK(words == std::vector<std::string>{"<s>", "a", "b", "</s>"});

    // single n-gram chain renders its own words
    const NgramId start = table.initial_ids().front();
    CHECK(render(table, std::vector<NgramId>{start}) == std::vector<std::string>{"<s>", "a"});

    // non-overlapping ids are rejected
    std::vector<NgramId> broken = {start, start};
    CHECK_THROWS_AS(render(table, broken), BrokenChain);
}

TEST_CASE("trigram rendering contributes one word per extra n-gram") {
    Lexicon lex;
    auto w1 = lex.intern("w1"), w2 = lex.intern("w2"), w3 = lex.intern("w3"), w4 = lex.intern("w4");
    std::vector<ScoredNgram> scored;
    scored.push_back({{{w1, w2, w3}, 1, false, false}, -1.0});
    scored.push_back({{{w2, w3, w4}, 1, false, false}, -1.0});
    auto table = NgramTable::build(std::move(scored), std::move(lex));
    auto words = render(table, std::vector<NgramId>{0, 1});
    CHECK(words == std::vector<std::string>{"w1", "w2", "w3", "w4"});
}

TEST_CASE("search equals the brute-force oracle on random instances") {
    std::mt19937_64 rng(90210);
    int tested = 0;
    while (tested < 40) {
        auto table = testsupport::random_table(rng);
        for (Criterion crit : testsupport::all_criteria()) {
            const auto direction = tested % 2 ? Direction::kKeepGeq : Direction::kKeepLeq;
            auto config = testsupport::random_config(rng, table, crit, direction);
            std::vector<testsupport::OracleSolution> expected;
            try {
                expected = testsupport::brute_force_enumerate(table, config);
            } catch (const testsupport::OracleTooLarge&) {
                continue;
            }
            auto result = enumerate(table, config);
            REQUIRE(result.solutions.size() == expected.size());
            for (std::size_t i = 0; i < expected.size(); ++i) {
                CHECK(result.solutions[i].chain == expected[i].chain);
                CHECK(result.solutions[i].total_logprob == expected[i].total_logprob);
            }
            ++tested;
        }
    }
}

TEST_CASE("incremental prefix sums match recomputation") {
    std::mt19937_64 rng(777);
    for (int round = 0; round < 10; ++round) {
        auto table = testsupport::random_table(rng);
        auto config = testsupport::random_config(rng, table, Criterion::kGliding,
                                                 Direction::kKeepLeq);
        for (const auto& s : enumerate(table, config).solutions) {
            double total = 0.0;
            for (NgramId id : s.chain) total += table.logprob(id);
            CHECK(std::abs(total - s.total_logprob) < 1e-9);
        }
    }
}

TEST_CASE("worker counts do not change the result") {
    std::mt19937_64 rng(4242);
    auto table = testsupport::random_table(rng);
    auto config = vanilla_config(4);
    auto reference = enumerate(table, config, {}, 1);
    for (int workers : {2, 8}) {
        auto parallel = enumerate(table, config, {}, workers);
        REQUIRE(parallel.solutions.size() == reference.solutions.size());
        for (std::size_t i = 0; i < reference.solutions.size(); ++i) {
            CHECK(parallel.solutions[i].chain == reference.solutions[i].chain);
            CHECK(parallel.solutions[i].total_logprob == reference.solutions[i].total_logprob);
        }
        CHECK(parallel.metrics.nodes == reference.metrics.nodes);
    }
}

TEST_CASE("tightening the final threshold nests the solution sets") {
    std::mt19937_64 rng(6174);
    for (int round = 0; round < 15; ++round) {
        auto table = testsupport::random_table(rng);
        auto loose = testsupport::random_config(rng, table, Criterion::kFinal,
                                                Direction::kKeepLeq);
        auto tight = loose;
        tight.final_threshold = loose.final_threshold - 1.5;
        auto loose_chains = enumerate(table, loose).solutions;
        auto tight_chains = enumerate(table, tight).solutions;
        CHECK(tight_chains.size() <= loose_chains.size());
        std::size_t j = 0;
        for (const auto& t : tight_chains) {
            while (j < loose_chains.size() && loose_chains[j].chain != t.chain) ++j;
            CHECK(j < loose_chains.size());
        }
    }
}

TEST_CASE("criteria never visit more nodes than vanilla") {
    std::mt19937_64 rng(1618);
    for (int round = 0; round < 10; ++round) {
        auto table = testsupport::random_table(rng);
        auto vanilla = testsupport::random_config(rng, table, Criterion::kVanilla,
                                                  Direction::kKeepLeq);
        auto base = enumerate(table, vanilla);
        for (Criterion crit : testsupport::all_criteria()) {
            auto config = vanilla;
            config.criterion = crit;
            CHECK(enumerate(table, config).metrics.nodes <= base.metrics.nodes);
        }
    }
}

TEST_CASE("solution limit stops the search and flags the result") {
    auto table = testsupport::toy_table();
    SearchLimits limits;
    limits.max_solutions = 1;
    auto result = enumerate(table, vanilla_config(3), limits);
    CHECK(result.solutions.size() == 1);
    CHECK(result.stop == StopReason::kSolutionLimit);
    CHECK(result.partial());

    limits = {};
    limits.max_nodes = 2;
    result = enumerate(table, vanilla_config(3), limits);
    CHECK(result.stop == StopReason::kNodeLimit);
}

TEST_CASE("open-ended generation drops the boundary requirements") {
    auto table = testsupport::toy_table();
    FilterConfig config = vanilla_config(2);
    config.require_initial = false;
    config.require_final = false;
    auto result = enumerate(table, config);
    // every successor-linked pair: (<s>,a)(a,b), (<s>,a)(a,c), (a,b)(b,</s>), (a,c)(c,</s>)
    CHECK(result.solutions.size() == 4);
}

TEST_CASE("solutions file round-trips byte-identically") {
    auto table = testsupport::toy_table();
    auto result = enumerate(table, vanilla_config(3));

    std::ostringstream first;
    save_solutions(first, std::span<const Solution>(result.solutions));
    auto rows = load_solutions(testsupport::to_lines(first.str()));
    std::ostringstream second;
    save_solutions(second, std::span<const SolutionRow>(rows));
    CHECK(first.str() == second.str());

    REQUIRE(rows.size() == 2);
    CHECK(rows[0].sentence == "a b");
    CHECK(rows[0].chain.size() == 3);
}

TEST_CASE("metadata sidecar carries the run shape") {
    auto table = testsupport::toy_table();
    auto config = vanilla_config(3);
    auto result = enumerate(table, config);
    auto meta = run_metadata(config, 0.0, result);
    CHECK(meta["criterion"] == "vanilla");
    CHECK(meta["m"] == 3);
    CHECK(meta["solutions"] == 2);
    CHECK(meta["partial"] == false);
    CHECK(meta["pruned_by_criterion"].contains("lookahead"));
}
