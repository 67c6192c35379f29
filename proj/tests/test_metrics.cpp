#include "doctest.h"

#include <string>
#include <vector>

#include "revsynth/errors.hpp"
#include "revsynth/metrics.hpp"
#include "revsynth/rng.hpp"

using namespace revsynth;

namespace {

// independent full-table LCS for the oracle property
std::size_t lcs_reference(const TokenSeq& a, const TokenSeq& b) {
    std::vector<std::vector<std::size_t>> t(a.size() + 1,
                                            std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            t[i][j] = a[i - 1] == b[j - 1] ? t[i - 1][j - 1] + 1
                                           : std::max(t[i - 1][j], t[i][j - 1]);
        }
    }
    return t[a.size()][b.size()];
}

TokenSeq random_seq(Rng& rng, std::size_t max_len, int alphabet) {
    TokenSeq s;
    std::size_t len = rng.below(max_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
        s.push_back(std::string(1, static_cast<char>('a' + rng.below(static_cast<std::uint64_t>(
                                                            alphabet)))));
    }
    return s;
}

} // namespace

TEST_CASE("modified_ngram_precision: identity, clipping, disjoint") {
    std::vector<TokenSeq> cand = {{"the", "cat", "sat"}};
    std::vector<TokenSeq> ref = {{"the", "cat", "sat"}};
    for (int n = 1; n <= 3; ++n) {
        CHECK(modified_ngram_precision(cand, ref, n) == doctest::Approx(100.0));
    }

    // clipping: candidate repeats a token beyond its reference count
    std::vector<TokenSeq> four_the = {{"the", "the", "the", "the"}};
    std::vector<TokenSeq> the_cat = {{"the", "cat"}};
    CHECK(modified_ngram_precision(four_the, the_cat, 1) == doctest::Approx(25.0));

    std::vector<TokenSeq> disjoint = {{"dog", "ran"}};
    CHECK(modified_ngram_precision(disjoint, the_cat, 1) == doctest::Approx(0.0));

    // candidate shorter than n contributes nothing
    std::vector<TokenSeq> shorty = {{"a"}};
    CHECK(modified_ngram_precision(shorty, the_cat, 2) == doctest::Approx(0.0));

    CHECK_THROWS_AS(modified_ngram_precision(cand, {}, 1), data_error);
    CHECK_THROWS_AS(modified_ngram_precision(cand, ref, 0), data_error);
}

TEST_CASE("modified_ngram_precision: n=1 without repeats is plain overlap") {
    std::vector<TokenSeq> cand = {{"a", "b", "c", "d"}};
    std::vector<TokenSeq> ref = {{"b", "d", "e", "f"}};
    CHECK(modified_ngram_precision(cand, ref, 1) == doctest::Approx(50.0));
}

TEST_CASE("bleu: perfect match scores exactly 100") {
    std::vector<TokenSeq> corpus = {{"fix", "coming", "in", "the", "next", "update"},
                                    {"thanks", "for", "the", "report"}};
    CHECK(bleu(corpus, corpus) == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(bleu(corpus, corpus, 4, true) == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("bleu: brevity penalty for a short candidate") {
    // all precisions 1, candidate 4 tokens vs reference 6: score = 100 e^{-1/2}
    std::vector<TokenSeq> cand = {{"the", "cat", "sat", "on"}};
    std::vector<TokenSeq> ref = {{"the", "cat", "sat", "on", "the", "mat"}};
    CHECK(bleu(cand, ref) == doctest::Approx(60.65306597126334).epsilon(1e-12));
}

TEST_CASE("bleu: zero when any order has no matches") {
    // shared unigrams but no shared bigram
    std::vector<TokenSeq> cand = {{"b", "a", "d", "c"}};
    std::vector<TokenSeq> ref = {{"a", "b", "c", "d"}};
    CHECK(modified_ngram_precision(cand, ref, 1) == doctest::Approx(100.0));
    CHECK(bleu(cand, ref, 2) == doctest::Approx(0.0));
    CHECK(bleu({}, {}) == 0.0);
    CHECK_THROWS_AS(bleu(cand, ref, 5), data_error);
}

TEST_CASE("bleu: corpus pooling differs from sentence averaging") {
    // pair 1 matches perfectly, pair 2 not at all
    std::vector<TokenSeq> cand = {{"a", "b", "c", "d"}, {"x", "y", "z", "w"}};
    std::vector<TokenSeq> ref = {{"a", "b", "c", "d"}, {"q", "r", "s", "t"}};
    // pooled: p4 = 1/2 > 0, every order has matches from pair 1
    CHECK(bleu(cand, ref) > 0.0);
    // averaged: (100 + 0) / 2
    CHECK(bleu(cand, ref, 4, true) == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("bleu and rouge are invariant under corpus permutation") {
    std::vector<TokenSeq> cand = {{"a", "b", "c", "d"}, {"c", "d", "a"}, {"b", "b", "a", "c"}};
    std::vector<TokenSeq> ref = {{"a", "b", "d", "d"}, {"c", "d"}, {"a", "b", "c", "c"}};
    std::vector<TokenSeq> cand_p = {cand[2], cand[0], cand[1]};
    std::vector<TokenSeq> ref_p = {ref[2], ref[0], ref[1]};
    CHECK(bleu(cand, ref) == doctest::Approx(bleu(cand_p, ref_p)).epsilon(1e-12));
    CHECK(rouge_l(cand, ref) == doctest::Approx(rouge_l(cand_p, ref_p)).epsilon(1e-12));
    for (int n = 1; n <= 4; ++n) {
        CHECK(modified_ngram_precision(cand, ref, n) ==
              doctest::Approx(modified_ngram_precision(cand_p, ref_p, n)).epsilon(1e-12));
    }
}

TEST_CASE("rouge_l: fixtures") {
    std::vector<TokenSeq> same = {{"the", "cat", "sat"}};
    CHECK(rouge_l(same, same) == doctest::Approx(100.0));

    std::vector<TokenSeq> cand = {{"the", "cat", "sat"}};
    std::vector<TokenSeq> ref = {{"the", "cat", "ran"}};
    CHECK(rouge_l(cand, ref) == doctest::Approx(66.666666666666667).epsilon(1e-12));

    std::vector<TokenSeq> disjoint = {{"x", "y"}};
    CHECK(rouge_l(disjoint, ref) == doctest::Approx(0.0));

    std::vector<TokenSeq> empty_cand = {{}};
    CHECK(rouge_l(empty_cand, ref) == doctest::Approx(0.0));
}

TEST_CASE("lcs_length: matches a full-table reference on random pairs") {
    Rng rng(17);
    for (int round = 0; round < 300; ++round) {
        TokenSeq a = random_seq(rng, 50, 4);
        TokenSeq b = random_seq(rng, 50, 4);
        CHECK(lcs_length(a, b) == lcs_reference(a, b));
    }
    CHECK(lcs_length({}, {"a"}) == 0);
    CHECK(lcs_length({"a", "b"}, {}) == 0);
}

TEST_CASE("metric range: always within [0,100] on random corpora") {
    Rng rng(23);
    for (int round = 0; round < 50; ++round) {
        std::size_t pairs = 1 + rng.below(5);
        std::vector<TokenSeq> cand, ref;
        for (std::size_t i = 0; i < pairs; ++i) {
            cand.push_back(random_seq(rng, 12, 3));
            ref.push_back(random_seq(rng, 12, 3));
        }
        double b = bleu(cand, ref);
        double r = rouge_l(cand, ref);
        CHECK(b >= 0.0);
        CHECK(b <= 100.0 + 1e-9);
        CHECK(r >= 0.0);
        CHECK(r <= 100.0 + 1e-9);
        for (int n = 1; n <= 4; ++n) {
            double p = modified_ngram_precision(cand, ref, n);
            CHECK(p >= 0.0);
            CHECK(p <= 100.0 + 1e-9);
        }
    }
}

TEST_CASE("evaluate_corpus: report fields and JSON emission") {
    std::vector<TokenSeq> cand = {{"the", "cat", "sat", "on"}};
    std::vector<TokenSeq> ref = {{"the", "cat", "sat", "on", "the", "mat"}};
    EvalReport report = evaluate_corpus(cand, ref);
    CHECK(report.pair_count == 1);
    CHECK(report.bleu4 == doctest::Approx(60.65306597126334).epsilon(1e-12));
    CHECK(report.precisions[0] == doctest::Approx(100.0));
    CHECK(report.precisions[3] == doctest::Approx(100.0));
    CHECK(report.rouge_l == doctest::Approx(2.0 * (4.0 / 4.0) * (4.0 / 6.0) /
                                            (4.0 / 4.0 + 4.0 / 6.0) * 100.0));

    std::string json_text = eval_report_to_json(report);
    CHECK(json_text.find("\"bleu4\"") != std::string::npos);
    CHECK(json_text.find("\"p1\"") != std::string::npos);
    CHECK(json_text.find("\"p4\"") != std::string::npos);
    CHECK(json_text.find("\"rouge_l\"") != std::string::npos);
    CHECK(json_text.find("\"pairs\"") != std::string::npos);

    // identical emissions for identical reports
    CHECK(json_text == eval_report_to_json(report));

    EvalReport self = evaluate_corpus(ref, ref);
    CHECK(self.bleu4 == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(self.rouge_l == doctest::Approx(100.0).epsilon(1e-12));
}
