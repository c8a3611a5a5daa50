// Closed toy vocabulary: 32 word tokens plus begin/end specials.
#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sidetalk {

constexpr int kBosId = 0;
constexpr int kEosId = 1;
constexpr int kNumWords = 32;
constexpr int kVocabSize = kNumWords + 2;

inline const std::vector<std::string>& word_list() {
    static const std::vector<std::string> words = {
        "alpha", "bravo",  "charlie", "delta",  "echo",   "foxtrot", "golf",   "hotel",
        "india", "juliett", "kilo",   "lima",   "mike",   "november", "oscar", "papa",
        "quebec", "romeo", "sierra",  "tango",  "uniform", "victor", "whiskey", "xray",
        "yankee", "zulu",  "zero",    "one",    "two",    "three",   "four",   "five"};
    return words;
}

inline int word_to_token(const std::string& w) {
    const auto& words = word_list();
    for (int i = 0; i < static_cast<int>(words.size()); ++i)
        if (words[i] == w) return i + 2;
    throw std::invalid_argument("unknown word: " + w);
}

inline const std::string& token_to_word(int tok) {
    if (tok < 2 || tok >= kVocabSize) throw std::invalid_argument("token is not a word token");
    return word_list()[tok - 2];
}

// Decoded form: begins with <bos>, ends with <eos>.
struct TokenSequence {
    std::vector<int> tokens;

    // word tokens only, specials stripped
    std::vector<std::string> words() const {
        std::vector<std::string> out;
        for (int t : tokens)
            if (t >= 2) out.push_back(token_to_word(t));
        return out;
    }
};

inline std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream iss(text);
    std::string w;
    while (iss >> w) out.push_back(w);
    return out;
}

inline std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

// reference word sequence -> target token sequence (words then <eos>)
inline std::vector<int> target_tokens(const std::vector<std::string>& words) {
    std::vector<int> toks;
    toks.reserve(words.size() + 1);
    for (const auto& w : words) toks.push_back(word_to_token(w));
    toks.push_back(kEosId);
    return toks;
}

}  // namespace sidetalk
