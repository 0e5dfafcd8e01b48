// Minimal library walkthrough: extract bigrams from a three-sentence corpus,
// score them by MLE, and enumerate every three-bigram chain, first unfiltered
// and then under the gliding threshold.

#include <iostream>

#include "ngramchain/corpus.hpp"
#include "ngramchain/filter.hpp"
#include "ngramchain/ranking.hpp"
#include "ngramchain/scoring.hpp"
#include "ngramchain/search.hpp"
#include "ngramchain/table.hpp"

int main() {
    using namespace ngramchain;

    const std::vector<std::vector<std::string>> corpus = {
        tokenize("the cat sat"), tokenize("the cat ran"), tokenize("a cat sat"),
        tokenize("the dog ran"), tokenize("a dog sat"),
    };

    auto extraction = extract_ngrams(corpus, 2);
    auto table = NgramTable::build(mle_score(extraction.ngrams), std::move(extraction.lexicon));
    std::cout << table.size() << " bigrams, " << table.initial_ids().size()
              << " sentence-initial\n\n";

    FilterConfig config;
    config.criterion = Criterion::kVanilla;
    config.chain_length = 4;  // four bigrams render a three-word sentence

    auto vanilla = enumerate(table, config);
    std::cout << "vanilla (" << vanilla.solutions.size() << " chains):\n";
    for (const auto& s : vanilla.solutions)
        std::cout << "  " << s.sentence() << "   logprob " << s.total_logprob << "  ppl "
                  << s.pseudo_ppl << "\n";

    // keep chains whose prefix sums stay ABOVE the per-step bound, i.e. drop
    // unlikely word sequences; slack is signed, negative relaxes under geq
    const auto stats = table_stats(table, true);
    config.criterion = Criterion::kGliding;
    config.direction = Direction::kKeepGeq;
    config.step_bound = resolve_step_bound(stats, 0.5);
    config.slack = -stats.std_dev;

    auto gliding = enumerate(table, config);
    std::cout << "\ngliding, lambda 0.5, direction geq (" << gliding.solutions.size()
              << " chains):\n";
    for (const auto& s : gliding.solutions) std::cout << "  " << s.sentence() << "\n";
    std::cout << "pruned " << gliding.metrics.pruned.gliding << " candidate(s)\n";
    return 0;
}
