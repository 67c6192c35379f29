#include "doctest.h"

#include <algorithm>

#include "revsynth/errors.hpp"
#include "revsynth/snippets.hpp"

using namespace revsynth;

namespace {

std::vector<std::string> toks(std::initializer_list<const char*> xs) {
    return {xs.begin(), xs.end()};
}

InvertedIndex small_index() {
    InvertedIndex idx;
    idx.add_document(0, "app1", DocKind::review,
                     toks({"app", "is", "fine", ".", "download", "fails", "on", "resume", "."}));
    idx.add_document(1, "app1", DocKind::review,
                     toks({"great", "app", "love", "it"}));
    idx.add_document(2, "app1", DocKind::review,
                     toks({"download", "speed", "is", "slow", "here"}));
    idx.add_document(3, "app1", DocKind::description,
                     toks({"manage", "your", "downloads", ".", "resume", "support", "included", "."}));
    idx.add_document(4, "app2", DocKind::review, toks({"unrelated", "review", "words", "only"}));
    idx.freeze();
    return idx;
}

// Every candidate window scored from the definition; used as the reference
// for extract_snippet.
struct WindowScore {
    double score = -1.0;
    std::vector<std::string> tokens;
};

} // namespace

TEST_CASE("split_sentences: terminators kept, trailing run kept") {
    auto s = split_sentences(toks({"a", ".", "b", "!", "c"}));
    REQUIRE(s.size() == 3);
    CHECK(s[0] == toks({"a", "."}));
    CHECK(s[1] == toks({"b", "!"}));
    CHECK(s[2] == toks({"c"}));
    CHECK(split_sentences({}).empty());
    CHECK(split_sentences(toks({"x", "y"})).size() == 1);
}

TEST_CASE("extract_snippet: single sentence doc returns whole doc") {
    InvertedIndex idx = small_index();
    std::vector<std::string> doc20;
    for (int i = 0; i < 20; ++i) doc20.push_back("w" + std::to_string(i));
    Snippet s = extract_snippet(idx, doc20, toks({"w3"}), 50);
    CHECK(s.tokens == doc20);
}

TEST_CASE("extract_snippet: no query term gives first sentence") {
    InvertedIndex idx = small_index();
    Snippet s = extract_snippet(
        idx, toks({"first", "words", ".", "second", "words", "."}), toks({"absent"}), 50);
    CHECK(s.tokens == toks({"first", "words", "."}));
    CHECK(s.score == 0.0);
    CHECK(s.start_sentence == 0);
}

TEST_CASE("extract_snippet: most relevant sentence window wins") {
    InvertedIndex idx = small_index();
    Snippet s = extract_snippet(
        idx, toks({"app", "is", "fine", ".", "download", "fails", "on", "resume", "."}),
        toks({"download", "resume"}), 50);
    CHECK(s.tokens == toks({"download", "fails", "on", "resume", "."}));
    CHECK(s.start_sentence == 1);
    CHECK(s.score > 0.0);
}

TEST_CASE("extract_snippet: budget forces the densest window") {
    InvertedIndex idx = small_index();
    // the 9-token doc does not fit in 6 tokens, so only single sentences are
    // candidates
    Snippet s = extract_snippet(
        idx, toks({"app", "is", "fine", ".", "download", "fails", "on", "resume", "."}),
        toks({"download"}), 6);
    CHECK(s.tokens == toks({"download", "fails", "on", "resume", "."}));
    CHECK(s.tokens.size() <= 6);
}

TEST_CASE("extract_snippet: distinct query terms counted once per window") {
    InvertedIndex idx = small_index();
    // duplicated query terms must not double the window score
    Snippet once = extract_snippet(idx, toks({"download", "now", "."}), toks({"download"}), 50);
    Snippet twice = extract_snippet(idx, toks({"download", "now", "."}),
                                    toks({"download", "download"}), 50);
    CHECK(once.score == twice.score);
}

TEST_CASE("extract_snippet: oversized sentences fall back to a prefix") {
    InvertedIndex idx = small_index();
    std::vector<std::string> longdoc;
    for (int i = 0; i < 30; ++i) longdoc.push_back("x" + std::to_string(i));
    Snippet s = extract_snippet(idx, longdoc, toks({"x9"}), 10);
    REQUIRE(s.tokens.size() == 10);
    CHECK(s.tokens[0] == "x0");
}

TEST_CASE("extract_snippet: tokens are a contiguous slice of the source") {
    InvertedIndex idx = small_index();
    std::vector<std::vector<std::string>> docs = {
        toks({"a", "b", ".", "c", "d", "e", "!", "f", "?", "g", "h"}),
        toks({"download", ".", "resume", ".", "download", "resume", "."}),
    };
    for (const auto& doc : docs) {
        Snippet s = extract_snippet(idx, doc, toks({"download", "resume", "g"}), 5);
        REQUIRE(!s.tokens.empty());
        bool contiguous = false;
        for (std::size_t start = 0; start + s.tokens.size() <= doc.size(); ++start) {
            if (std::equal(s.tokens.begin(), s.tokens.end(), doc.begin() + start)) {
                contiguous = true;
                break;
            }
        }
        CHECK(contiguous);
    }
}

TEST_CASE("retrieve_context: snippets from distinct reviews plus description") {
    InvertedIndex idx = small_index();
    Bm25Params params;
    RetrievedContext ctx =
        retrieve_context(idx, params, "app1", toks({"download", "resume"}), 4, 50);

    // two app1 reviews mention a query term
    CHECK(ctx.review_snippets.size() == 2);
    CHECK(ctx.has_description);
    REQUIRE(ctx.review_doc_ids.size() == 2);
    // doc 0 outranks doc 2 (two query terms vs one)
    CHECK(ctx.review_doc_ids[0] == 0);
    CHECK(ctx.review_doc_ids[1] == 2);
    CHECK(ctx.review_snippets[0].tokens ==
          toks({"download", "fails", "on", "resume", "."}));
    CHECK(!ctx.description_snippet.tokens.empty());

    for (const auto& s : ctx.review_snippets) CHECK(s.tokens.size() <= 50);
}

TEST_CASE("retrieve_context: query review itself is excluded") {
    InvertedIndex idx = small_index();
    Bm25Params params;
    auto query = toks({"great", "app", "love", "it"});  // identical to doc 1
    RetrievedContext ctx = retrieve_context(idx, params, "app1", query, 4, 50);
    for (std::uint32_t id : ctx.review_doc_ids) CHECK(id != 1);
}

TEST_CASE("retrieve_context: unknown app is an error") {
    InvertedIndex idx = small_index();
    Bm25Params params;
    CHECK_THROWS_AS(retrieve_context(idx, params, "ghost", toks({"x"}), 4, 50), data_error);
}
