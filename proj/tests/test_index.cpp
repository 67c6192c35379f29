#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "revsynth/errors.hpp"
#include "revsynth/index.hpp"
#include "revsynth/rng.hpp"

using namespace revsynth;

namespace {

std::vector<std::string> toks(std::initializer_list<const char*> xs) {
    return {xs.begin(), xs.end()};
}

// Brute-force reference: scores every matching doc directly from the
// definition, no postings involved.
std::vector<SearchHit> linear_scan(const InvertedIndex& index, const Bm25Params& params,
                                   const std::vector<std::string>& query,
                                   const std::optional<std::string>& app_filter, std::size_t k) {
    std::vector<SearchHit> hits;
    for (const auto& [doc_id, meta] : index.docs()) {
        if (app_filter && meta.app_id != *app_filter) continue;
        double score = index.bm25_score(params, query, doc_id);
        if (score > 0.0) hits.push_back({doc_id, score});
    }
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

} // namespace

TEST_CASE("postings: counting and ordering") {
    InvertedIndex idx;
    idx.add_document(0, "a", DocKind::review, toks({"a", "b", "a"}));
    idx.add_document(1, "a", DocKind::review, toks({"b"}));
    idx.freeze();
    const auto& pa = idx.terms().at("a").postings();
    REQUIRE(pa.size() == 1);
    CHECK(pa[0].doc_id == 0);
    CHECK(pa[0].term_freq == 2);
    const auto& pb = idx.terms().at("b").postings();
    REQUIRE(pb.size() == 2);
    CHECK(pb[0].term_freq == 1);
    CHECK(pb[1].doc_id == 1);
    CHECK(idx.doc_count() == 2);
    CHECK(idx.avgdl() == doctest::Approx(2.0));
}

TEST_CASE("empty document contributes length zero and no postings") {
    InvertedIndex idx;
    idx.add_document(0, "a", DocKind::review, {});
    idx.add_document(1, "a", DocKind::review, toks({"x", "y"}));
    idx.freeze();
    CHECK(idx.doc_count() == 2);
    CHECK(idx.avgdl() == doctest::Approx(1.0));
    CHECK(idx.doc_freq("x") == 1);
}

TEST_CASE("skip links: stride ceil(sqrt(len))") {
    PostingsList list;
    for (std::uint32_t i = 0; i < 9; ++i) list.add(i * 2, 1);
    list.build_skips();
    CHECK(list.skip_stride() == 3);
    CHECK(list.skips() == std::vector<std::uint32_t>{0, 3, 6});

    PostingsList ten;
    for (std::uint32_t i = 0; i < 10; ++i) ten.add(i, 1);
    ten.build_skips();
    CHECK(ten.skip_stride() == 4);  // ceil(sqrt(10))

    CHECK(list.find(6) == 1);
    CHECK(list.find(7) == 0);
    CHECK(list.advance_to(7) == 4);   // first doc_id >= 7 is 8 at position 4
    CHECK(list.advance_to(100) == 9); // past the end
}

TEST_CASE("skip intersection equals plain merge") {
    Rng rng(99);
    for (int round = 0; round < 20; ++round) {
        PostingsList a, b;
        std::vector<std::uint32_t> da, db;
        std::uint32_t id = 0;
        for (int i = 0; i < 200; ++i) {
            id += 1 + static_cast<std::uint32_t>(rng.below(5));
            if (rng.bernoulli(0.5)) { a.add(id, 1); da.push_back(id); }
            if (rng.bernoulli(0.5)) { b.add(id, 1); db.push_back(id); }
        }
        a.build_skips();
        b.build_skips();
        std::vector<std::uint32_t> expect;
        std::set_intersection(da.begin(), da.end(), db.begin(), db.end(),
                              std::back_inserter(expect));
        CHECK(intersect(a, b) == expect);
    }
}

TEST_CASE("freeze contract") {
    InvertedIndex idx;
    CHECK_THROWS(idx.freeze());
    idx.add_document(0, "a", DocKind::review, toks({"x"}));
    CHECK_THROWS_AS(idx.add_document(0, "a", DocKind::review, toks({"y"})), data_error);
    idx.freeze();
    idx.freeze();  // idempotent
    CHECK_THROWS(idx.add_document(1, "a", DocKind::review, toks({"y"})));
    CHECK_THROWS_AS(idx.doc(42), data_error);
}

TEST_CASE("bm25: two-doc fixture") {
    InvertedIndex idx;
    idx.add_document(1, "a", DocKind::review, toks({"app", "crash"}));
    idx.add_document(2, "a", DocKind::review, toks({"app", "good"}));
    idx.freeze();
    Bm25Params params;  // k1=1.2 b=0.75

    // |D| = avgdl makes the length normalization cancel, so the score is
    // exactly idf(crash) = ln(1 + (2-1+0.5)/(1+0.5)) = ln 2.
    CHECK(idx.bm25_score(params, toks({"crash"}), 1) ==
          doctest::Approx(0.69314718055994531).epsilon(1e-12));
    CHECK(idx.bm25_score(params, toks({"crash"}), 2) == 0.0);
    CHECK(idx.bm25_score(params, toks({"nowhere"}), 1) == 0.0);
    CHECK_THROWS_AS(idx.bm25_score(params, toks({"crash"}), 9), data_error);
}

TEST_CASE("bm25: three-doc fixture with repeats in query") {
    InvertedIndex idx;
    idx.add_document(0, "a", DocKind::review, toks({"app", "crash", "crash", "loud"}));
    idx.add_document(1, "a", DocKind::review, toks({"app", "good"}));
    idx.add_document(2, "a", DocKind::review, toks({"crash"}));
    idx.freeze();
    Bm25Params params;

    auto q = toks({"crash", "crash", "quiet"});
    CHECK(idx.bm25_score(params, q, 0) == doctest::Approx(1.0762908387188591).epsilon(1e-12));
    CHECK(idx.bm25_score(params, q, 1) == 0.0);
    CHECK(idx.bm25_score(params, q, 2) == doctest::Approx(1.2267891339634453).epsilon(1e-12));
}

TEST_CASE("bm25: non-decreasing in term frequency") {
    InvertedIndex idx;
    idx.add_document(0, "a", DocKind::review, toks({"crash", "ok", "ok", "ok"}));
    idx.add_document(1, "a", DocKind::review, toks({"crash", "crash", "ok", "ok"}));
    idx.add_document(2, "a", DocKind::review, toks({"crash", "crash", "crash", "ok"}));
    idx.freeze();
    Bm25Params params;
    double s0 = idx.bm25_score(params, toks({"crash"}), 0);
    double s1 = idx.bm25_score(params, toks({"crash"}), 1);
    double s2 = idx.bm25_score(params, toks({"crash"}), 2);
    CHECK(s0 < s1);
    CHECK(s1 < s2);
}

TEST_CASE("search: filtering, ranking, ties") {
    InvertedIndex idx;
    idx.add_document(0, "a", DocKind::review, toks({"crash", "x"}));
    idx.add_document(1, "b", DocKind::review, toks({"crash", "y"}));
    idx.add_document(2, "a", DocKind::review, toks({"crash", "z"}));
    idx.add_document(3, "a", DocKind::review, toks({"fine", "w"}));
    idx.freeze();
    Bm25Params params;

    auto hits = idx.search(params, toks({"crash"}), std::string("a"), 10);
    REQUIRE(hits.size() == 2);
    // identical scores; ascending doc_id breaks the tie
    CHECK(hits[0].doc_id == 0);
    CHECK(hits[1].doc_id == 2);
    CHECK(hits[0].score == doctest::Approx(hits[1].score));

    CHECK(idx.search(params, toks({"crash"}), std::string("a"), 0).empty());
    CHECK(idx.search(params, toks({"missing"}), std::nullopt, 10).empty());
    CHECK(idx.search(params, toks({"crash"}), std::nullopt, 10).size() == 3);
}

TEST_CASE("search equals linear scan on random corpora") {
    Rng rng(2024);
    std::vector<std::string> pool;
    for (int i = 0; i < 40; ++i) pool.push_back("t" + std::to_string(i));
    std::vector<std::string> apps = {"a", "b", "c"};

    InvertedIndex idx;
    for (std::uint32_t doc = 0; doc < 150; ++doc) {
        std::size_t len = 1 + rng.below(12);
        std::vector<std::string> tokens;
        for (std::size_t j = 0; j < len; ++j) tokens.push_back(pool[rng.below(pool.size())]);
        idx.add_document(doc, apps[rng.below(apps.size())], DocKind::review, tokens);
    }
    idx.freeze();
    Bm25Params params;

    for (int q = 0; q < 40; ++q) {
        std::size_t qlen = 1 + rng.below(4);
        std::vector<std::string> query;
        for (std::size_t j = 0; j < qlen; ++j) query.push_back(pool[rng.below(pool.size())]);
        std::optional<std::string> filter;
        if (rng.bernoulli(0.5)) filter = apps[rng.below(apps.size())];
        std::size_t k = rng.below(20);

        auto got = idx.search(params, query, filter, k);
        auto want = linear_scan(idx, params, query, filter, k);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(got[i].doc_id == want[i].doc_id);
            CHECK(got[i].score == doctest::Approx(want[i].score).epsilon(1e-9));
        }
    }
}
