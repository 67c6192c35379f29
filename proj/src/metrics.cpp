#include "revsynth/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"
#include "revsynth/errors.hpp"

namespace revsynth {

namespace {

void check_aligned(const std::vector<TokenSeq>& candidates,
                   const std::vector<TokenSeq>& references) {
    if (candidates.size() != references.size()) {
        throw data_error("candidate/reference lists differ in length");
    }
}

// n-gram multiset keyed by tokens joined with an unprintable separator
std::map<std::string, std::size_t> ngram_counts(const TokenSeq& tokens, int n) {
    std::map<std::string, std::size_t> counts;
    if (n <= 0 || tokens.size() < static_cast<std::size_t>(n)) return counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= tokens.size(); ++i) {
        std::string key = tokens[i];
        for (int j = 1; j < n; ++j) {
            key.push_back('\x1f');
            key += tokens[i + static_cast<std::size_t>(j)];
        }
        ++counts[key];
    }
    return counts;
}

// clipped matches and candidate n-gram total for one pair
std::pair<std::size_t, std::size_t> clipped_pair_counts(const TokenSeq& cand, const TokenSeq& ref,
                                                        int n) {
    auto cand_counts = ngram_counts(cand, n);
    auto ref_counts = ngram_counts(ref, n);
    std::size_t matched = 0, total = 0;
    for (const auto& [gram, count] : cand_counts) {
        total += count;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    return {matched, total};
}

double bleu_from_stats(const std::array<double, 4>& p, int max_n, std::size_t cand_len,
                       std::size_t ref_len) {
    if (cand_len == 0) return 0.0;
    double log_sum = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        double pn = p[static_cast<std::size_t>(n - 1)];
        if (pn <= 0.0) return 0.0;
        log_sum += std::log(pn);
    }
    double bp = 1.0;
    if (cand_len < ref_len) {
        bp = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
    }
    return bp * std::exp(log_sum / max_n) * 100.0;
}

} // namespace

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
    if (a.empty() || b.empty()) return 0;
    const TokenSeq& rows = a.size() >= b.size() ? a : b;
    const TokenSeq& cols = a.size() >= b.size() ? b : a;
    std::vector<std::size_t> prev(cols.size() + 1, 0), cur(cols.size() + 1, 0);
    for (std::size_t i = 1; i <= rows.size(); ++i) {
        for (std::size_t j = 1; j <= cols.size(); ++j) {
            if (rows[i - 1] == cols[j - 1]) {
                cur[j] = prev[j - 1] + 1;
            } else {
                cur[j] = std::max(prev[j], cur[j - 1]);
            }
        }
        std::swap(prev, cur);
    }
    return prev[cols.size()];
}

double modified_ngram_precision(const std::vector<TokenSeq>& candidates,
                                const std::vector<TokenSeq>& references, int n) {
    check_aligned(candidates, references);
    if (n <= 0) throw data_error("n-gram order must be positive");
    std::size_t matched = 0, total = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        auto [m, t] = clipped_pair_counts(candidates[i], references[i], n);
        matched += m;
        total += t;
    }
    if (total == 0) return 0.0;
    return 100.0 * static_cast<double>(matched) / static_cast<double>(total);
}

double bleu(const std::vector<TokenSeq>& candidates, const std::vector<TokenSeq>& references,
            int max_n, bool sentence_average) {
    check_aligned(candidates, references);
    if (max_n <= 0 || max_n > 4) throw data_error("BLEU order must be in 1..4");
    if (candidates.empty()) return 0.0;

    if (sentence_average) {
        double sum = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            std::array<double, 4> p{};
            for (int n = 1; n <= max_n; ++n) {
                auto [m, t] = clipped_pair_counts(candidates[i], references[i], n);
                p[static_cast<std::size_t>(n - 1)] =
                    t == 0 ? 0.0 : static_cast<double>(m) / static_cast<double>(t);
            }
            sum += bleu_from_stats(p, max_n, candidates[i].size(), references[i].size());
        }
        return sum / static_cast<double>(candidates.size());
    }

    std::array<double, 4> p{};
    std::size_t cand_len = 0, ref_len = 0;
    for (int n = 1; n <= max_n; ++n) {
        std::size_t matched = 0, total = 0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            auto [m, t] = clipped_pair_counts(candidates[i], references[i], n);
            matched += m;
            total += t;
        }
        p[static_cast<std::size_t>(n - 1)] =
            total == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(total);
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        cand_len += candidates[i].size();
        ref_len += references[i].size();
    }
    return bleu_from_stats(p, max_n, cand_len, ref_len);
}

double rouge_l(const std::vector<TokenSeq>& candidates, const std::vector<TokenSeq>& references) {
    check_aligned(candidates, references);
    if (candidates.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        std::size_t l = lcs_length(candidates[i], references[i]);
        if (l == 0) continue;
        double precision = static_cast<double>(l) / static_cast<double>(candidates[i].size());
        double recall = static_cast<double>(l) / static_cast<double>(references[i].size());
        sum += 2.0 * precision * recall / (precision + recall);
    }
    return 100.0 * sum / static_cast<double>(candidates.size());
}

EvalReport evaluate_corpus(const std::vector<TokenSeq>& candidates,
                           const std::vector<TokenSeq>& references) {
    check_aligned(candidates, references);
    EvalReport report;
    report.pair_count = candidates.size();
    for (int n = 1; n <= 4; ++n) {
        report.precisions[static_cast<std::size_t>(n - 1)] =
            modified_ngram_precision(candidates, references, n);
    }
    report.bleu4 = bleu(candidates, references, 4);
    report.rouge_l = rouge_l(candidates, references);
    return report;
}

std::string eval_report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["bleu4"] = report.bleu4;
    j["p1"] = report.precisions[0];
    j["p2"] = report.precisions[1];
    j["p3"] = report.precisions[2];
    j["p4"] = report.precisions[3];
    j["rouge_l"] = report.rouge_l;
    j["pairs"] = report.pair_count;
    return j.dump(2);
}

} // namespace revsynth
