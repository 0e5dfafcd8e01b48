#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ngramchain/util.hpp"

namespace ngramchain {

/// Interns token strings to dense word ids. The sentence markers always
/// occupy ids 0 and 1, so marker tests are plain integer comparisons.
class Lexicon {
public:
    static constexpr WordId kStartId = 0;
    static constexpr WordId kEndId = 1;
    static constexpr const char* kStartToken = "<s>";
    static constexpr const char* kEndToken = "</s>";

    Lexicon() {
        intern(kStartToken);
        intern(kEndToken);
    }

    WordId intern(std::string_view token) {
        auto it = index_.find(std::string(token));
        if (it != index_.end()) return it->second;
        WordId id = static_cast<WordId>(words_.size());
        words_.emplace_back(token);
        index_.emplace(words_.back(), id);
        return id;
    }

    std::optional<WordId> find(std::string_view token) const {
        auto it = index_.find(std::string(token));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& word(WordId id) const {
        if (id >= words_.size()) throw InvalidId("word id out of range");
        return words_[id];
    }

    std::size_t size() const { return words_.size(); }

    static bool is_marker(WordId id) { return id == kStartId || id == kEndId; }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, WordId> index_;
};

}  // namespace ngramchain
