// Word error rate: Levenshtein edit distance over word sequences.
//
// WER = (substitutions + insertions + deletions) / |reference|, which can
// exceed 1. Convention for an empty reference: the distance is |hypothesis|
// insertions and the denominator is floored at 1, so wer("", hyp) = |hyp|
// and wer("", "") = 0.
#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace sidetalk {

inline std::size_t edit_distance(const std::vector<std::string>& ref,
                                 const std::vector<std::string>& hyp) {
    const std::size_t n = ref.size(), m = hyp.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

inline double wer(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
    const std::size_t edits = edit_distance(ref, hyp);
    const std::size_t denom = std::max<std::size_t>(ref.size(), 1);
    return static_cast<double>(edits) / static_cast<double>(denom);
}

// Corpus-level aggregation: total edits over total reference words (not the
// mean of per-scene WERs).
struct CorpusWer {
    std::size_t total_edits = 0;
    std::size_t total_ref_words = 0;

    void add(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
        total_edits += edit_distance(ref, hyp);
        total_ref_words += ref.size();
    }

    double value() const {
        if (total_ref_words == 0) return total_edits == 0 ? 0.0 : static_cast<double>(total_edits);
        return static_cast<double>(total_edits) / static_cast<double>(total_ref_words);
    }
};

}  // namespace sidetalk
