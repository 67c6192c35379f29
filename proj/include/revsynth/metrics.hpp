#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace revsynth {

using TokenSeq = std::vector<std::string>;

struct EvalReport {
    double bleu4 = 0.0;
    std::array<double, 4> precisions{};  // p1..p4, each in [0,100]
    double rouge_l = 0.0;
    std::size_t pair_count = 0;
};

// Longest common subsequence length, O(|a|*|b|) time, O(min) space.
std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

// Corpus-level clipped n-gram precision in [0,100]. Counts are pooled over
// pairs; each candidate n-gram count is clipped by the paired reference's
// count. Candidates shorter than n contribute nothing.
double modified_ngram_precision(const std::vector<TokenSeq>& candidates,
                                const std::vector<TokenSeq>& references, int n);

// BLEU-N in [0,100]: BP * exp(mean ln p_n), BP = min(1, e^{1-r/c}); 0 when
// any p_n is 0 or the corpus is empty. sentence_average switches to the mean
// of per-pair scores instead of pooled counts.
double bleu(const std::vector<TokenSeq>& candidates, const std::vector<TokenSeq>& references,
            int max_n = 4, bool sentence_average = false);

// Mean LCS F1 (beta = 1) in [0,100].
double rouge_l(const std::vector<TokenSeq>& candidates, const std::vector<TokenSeq>& references);

EvalReport evaluate_corpus(const std::vector<TokenSeq>& candidates,
                           const std::vector<TokenSeq>& references);

std::string eval_report_to_json(const EvalReport& report);

} // namespace revsynth
