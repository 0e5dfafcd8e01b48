#pragma once

// Shared fixtures: the three-sentence toy corpus, tiny handmade tables, and
// temp-file helpers for format tests.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "ngramchain/corpus.hpp"
#include "ngramchain/scoring.hpp"
#include "ngramchain/table.hpp"

namespace testsupport {

// Corpus {"a b", "a c", "a b"}; bigram counts are
//   (<s>,a):3  (a,b):2  (a,c):1  (b,</s>):2  (c,</s>):1
inline std::vector<std::vector<std::string>> toy_corpus() {
    return {{"a", "b"}, {"a", "c"}, {"a", "b"}};
}

inline ngramchain::ExtractionResult toy_extraction() {
    return ngramchain::extract_ngrams(toy_corpus(), 2);
}

inline ngramchain::NgramTable toy_table() {
    auto extraction = toy_extraction();
    auto scored = ngramchain::mle_score(extraction.ngrams);
    return ngramchain::NgramTable::build(std::move(scored), std::move(extraction.lexicon));
}

inline std::vector<std::string> to_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        for (int i = 0; i < 10000; ++i) {
            auto candidate = base / ("ngramchain_test_" + std::to_string(::getpid()) + "_" +
                                     std::to_string(counter_++));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    static inline int counter_ = 0;
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace testsupport
