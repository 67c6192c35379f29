#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "revsynth/corpus.hpp"
#include "revsynth/errors.hpp"
#include "revsynth/synthgen.hpp"

using namespace revsynth;

namespace {

bool contains_word(const std::string& text, const std::string& word) {
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        if (tok == word) return true;
    }
    return false;
}

std::vector<std::string> corpus_as_json(const std::vector<RawRecord>& records) {
    std::vector<std::string> lines;
    lines.reserve(records.size());
    for (const RawRecord& r : records) lines.push_back(raw_record_to_json(r));
    return lines;
}

} // namespace

TEST_CASE("app helpers are deterministic and cycle as documented") {
    CHECK(synth_app_id(0) == "app_0");
    CHECK(synth_app_id(17) == "app_17");
    CHECK(synth_category(0) == "games");
    CHECK(synth_category(8) == synth_category(0));
    CHECK(synth_category(3) != synth_category(4));
}

TEST_CASE("fact tokens are pronounceable, four letters, and distinct") {
    CHECK(synth_fact_token(0) == "babo");
    CHECK(synth_fact_token(1) == "dabo");
    CHECK(synth_fact_token(11) == "debo");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < 500; ++i) {
        std::string tok = synth_fact_token(i);
        CHECK(tok.size() == 4);
        CHECK(seen.insert(tok).second);
    }
}

TEST_CASE("per-app facts derive from the app index modulo the pool") {
    SynthgenConfig cfg;
    cfg.fact_vocab = 10;
    auto [f1, f2] = synth_fact(cfg, 3);
    CHECK(f1 == synth_fact_token(6));
    CHECK(f2 == synth_fact_token(7));
    auto wrapped = synth_fact(cfg, 6);  // 12 % 10, 13 % 10
    CHECK(wrapped.first == synth_fact_token(2));
    CHECK(wrapped.second == synth_fact_token(3));
    SynthgenConfig tiny;
    tiny.fact_vocab = 1;
    CHECK_THROWS_AS(synth_fact(tiny, 0), data_error);
}

TEST_CASE("generated corpus has the documented shape") {
    SynthgenConfig cfg;
    cfg.apps = 3;
    cfg.reviews_per_app = 4;
    cfg.tips_per_app = 2;
    cfg.fact_vocab = 12;
    cfg.seed = 11;
    std::vector<RawRecord> records = generate_corpus(cfg);
    REQUIRE(records.size() == cfg.apps * (2 + cfg.tips_per_app + 2 * cfg.reviews_per_app));

    std::size_t per_app = 2 + cfg.tips_per_app + 2 * cfg.reviews_per_app;
    for (std::size_t a = 0; a < cfg.apps; ++a) {
        std::size_t base = a * per_app;
        const std::string app = synth_app_id(a);
        auto [f1, f2] = synth_fact(cfg, a);

        CHECK(records[base].kind == RecordKind::category);
        CHECK(records[base].app_id == app);
        CHECK(records[base].text == synth_category(a));

        CHECK(records[base + 1].kind == RecordKind::description);
        CHECK(contains_word(records[base + 1].text, f1));
        CHECK(contains_word(records[base + 1].text, f2));

        for (std::size_t t = 0; t < cfg.tips_per_app; ++t) {
            const RawRecord& tip = records[base + 2 + t];
            CHECK(tip.kind == RecordKind::review);
            CHECK(contains_word(tip.text, f1));
        }

        for (std::size_t r = 0; r < cfg.reviews_per_app; ++r) {
            std::size_t review_at = base + 2 + cfg.tips_per_app + 2 * r;
            const RawRecord& review = records[review_at];
            const RawRecord& response = records[review_at + 1];
            CHECK(review.kind == RecordKind::review);
            REQUIRE(review.rating.has_value());
            CHECK(*review.rating >= 1);
            CHECK(*review.rating <= 5);
            // the fact is never leaked through the paired review text
            CHECK_FALSE(contains_word(review.text, f1));
            CHECK_FALSE(contains_word(review.text, f2));

            CHECK(response.kind == RecordKind::response);
            CHECK(response.app_id == app);
            REQUIRE(response.link_id.has_value());
            CHECK(*response.link_id == std::to_string(review_at));
            CHECK(contains_word(response.text, f1));
            CHECK(contains_word(response.text, f2));
            CHECK(contains_word(response.text, synth_category(a)));
        }
    }
}

TEST_CASE("response tone follows the paired review rating") {
    SynthgenConfig cfg;
    cfg.apps = 2;
    cfg.reviews_per_app = 30;
    cfg.seed = 4;
    std::vector<RawRecord> records = generate_corpus(cfg);
    for (std::size_t i = 0; i + 1 < records.size(); ++i) {
        if (records[i + 1].kind != RecordKind::response) continue;
        const RawRecord& review = records[i];
        const RawRecord& response = records[i + 1];
        REQUIRE(review.rating.has_value());
        if (*review.rating <= 2) {
            CHECK(contains_word(response.text, "sorry"));
        } else if (*review.rating == 3) {
            CHECK(contains_word(response.text, "honest"));
        } else {
            CHECK(contains_word(response.text, "great"));
        }
    }
}

TEST_CASE("generation is reproducible per seed and varies across seeds") {
    SynthgenConfig cfg;
    cfg.apps = 3;
    cfg.reviews_per_app = 5;
    cfg.seed = 21;
    std::vector<std::string> a = corpus_as_json(generate_corpus(cfg));
    std::vector<std::string> b = corpus_as_json(generate_corpus(cfg));
    CHECK(a == b);
    cfg.seed = 22;
    CHECK(a != corpus_as_json(generate_corpus(cfg)));
}

TEST_CASE("every generated record survives a JSON round trip") {
    SynthgenConfig cfg;
    cfg.apps = 2;
    cfg.reviews_per_app = 6;
    cfg.seed = 8;
    for (const RawRecord& r : generate_corpus(cfg)) {
        std::string error;
        std::optional<RawRecord> back = parse_raw_record(raw_record_to_json(r), &error);
        REQUIRE(back.has_value());
        CHECK(back->app_id == r.app_id);
        CHECK(back->kind == r.kind);
        CHECK(back->text == r.text);
        CHECK(back->rating == r.rating);
        CHECK(back->link_id == r.link_id);
    }
}

TEST_CASE("degenerate generator configs are rejected") {
    SynthgenConfig cfg;
    cfg.apps = 0;
    CHECK_THROWS_AS(generate_corpus(cfg), data_error);
    cfg.apps = 1;
    cfg.reviews_per_app = 0;
    CHECK_THROWS_AS(generate_corpus(cfg), data_error);
    cfg.reviews_per_app = 1;
    cfg.fact_vocab = 1;
    CHECK_THROWS_AS(generate_corpus(cfg), data_error);
}

TEST_CASE("write_raw_records emits one parseable line per record") {
    SynthgenConfig cfg;
    cfg.apps = 2;
    cfg.reviews_per_app = 3;
    cfg.seed = 2;
    std::vector<RawRecord> records = generate_corpus(cfg);
    const std::string path = "/tmp/revsynth_test_synth.jsonl";
    write_raw_records(records, path);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    std::size_t lines = 0;
    while (std::getline(in, line)) {
        std::string error;
        CHECK(parse_raw_record(line, &error).has_value());
        ++lines;
    }
    CHECK(lines == records.size());
    std::remove(path.c_str());
}
