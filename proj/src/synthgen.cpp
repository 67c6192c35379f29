#include "revsynth/synthgen.hpp"

#include <array>
#include <fstream>

#include "revsynth/errors.hpp"
#include "revsynth/rng.hpp"

namespace revsynth {

namespace {

const std::array<const char*, 8> kCategories = {"games",  "music",   "finance", "travel",
                                                "health", "sports",  "weather", "shopping"};

const std::array<const char*, 8> kIssues = {"crashes", "freezes",  "restarts", "lags",
                                            "stalls",  "flickers", "stutters", "hangs"};

const std::array<const char*, 8> kFillers = {"today", "again",    "often",   "lately",
                                             "daily", "sometimes", "somehow", "still"};

std::string tone_sentence(int rating) {
    if (rating <= 2) return "sorry for the trouble .";
    if (rating == 3) return "we hear your honest words .";
    return "great to hear from you .";
}

std::string review_text(Rng& rng) {
    const char* issue = kIssues[rng.below(kIssues.size())];
    const char* filler = kFillers[rng.below(kFillers.size())];
    switch (rng.below(3)) {
        case 0:
            return std::string("the app ") + issue + " when i open it " + filler + " .";
        case 1:
            return std::string("my phone ") + filler + " and the app " + issue + " on start .";
        default:
            return std::string(filler) + " the app " + issue + " after the last update .";
    }
}

} // namespace

std::string synth_app_id(std::size_t app_index) {
    return "app_" + std::to_string(app_index);
}

std::string synth_category(std::size_t app_index) {
    return kCategories[app_index % kCategories.size()];
}

std::string synth_fact_token(std::size_t fact_index) {
    static const std::array<char, 10> consonants = {'b', 'd', 'f', 'g', 'k',
                                                    'l', 'm', 'n', 'r', 't'};
    static const std::array<char, 5> vowels = {'a', 'e', 'i', 'o', 'u'};
    std::string token;
    token += consonants[fact_index % consonants.size()];
    token += vowels[(fact_index / consonants.size()) % vowels.size()];
    token += consonants[(fact_index / (consonants.size() * vowels.size())) % consonants.size()];
    token += 'o';
    return token;
}

std::pair<std::string, std::string> synth_fact(const SynthgenConfig& cfg, std::size_t app_index) {
    if (cfg.fact_vocab < 2) throw data_error("fact vocabulary needs at least 2 tokens");
    std::size_t first = (2 * app_index) % cfg.fact_vocab;
    std::size_t second = (2 * app_index + 1) % cfg.fact_vocab;
    return {synth_fact_token(first), synth_fact_token(second)};
}

std::vector<RawRecord> generate_corpus(const SynthgenConfig& cfg) {
    if (cfg.apps == 0 || cfg.reviews_per_app == 0) {
        throw data_error("synthetic corpus needs at least one app and one review per app");
    }
    if (cfg.fact_vocab < 2) throw data_error("fact vocabulary needs at least 2 tokens");

    Rng rng(cfg.seed);
    std::vector<RawRecord> records;
    records.reserve(cfg.apps * (2 * cfg.reviews_per_app + cfg.tips_per_app + 2));

    for (std::size_t a = 0; a < cfg.apps; ++a) {
        std::string app = synth_app_id(a);
        std::string category = synth_category(a);
        auto [f1, f2] = synth_fact(cfg, a);

        RawRecord cat;
        cat.app_id = app;
        cat.kind = RecordKind::category;
        cat.text = category;
        records.push_back(cat);

        RawRecord desc;
        desc.app_id = app;
        desc.kind = RecordKind::description;
        desc.text = "this " + category + " app offers the " + f1 + " " + f2 +
                    " option for everyone .";
        records.push_back(desc);

        for (std::size_t t = 0; t < cfg.tips_per_app; ++t) {
            RawRecord tip;
            tip.app_id = app;
            tip.kind = RecordKind::review;
            tip.rating = static_cast<int>(1 + rng.below(5));
            tip.text = "try the " + f1 + " " + f2 + " option for the " +
                       kIssues[t % kIssues.size()] + " trouble .";
            records.push_back(tip);
        }

        for (std::size_t r = 0; r < cfg.reviews_per_app; ++r) {
            int rating = static_cast<int>(1 + rng.below(5));

            RawRecord review;
            review.app_id = app;
            review.kind = RecordKind::review;
            review.rating = rating;
            review.text = review_text(rng);
            std::size_t review_line = records.size();
            records.push_back(review);

            RawRecord response;
            response.app_id = app;
            response.kind = RecordKind::response;
            response.link_id = std::to_string(review_line);
            response.text = "hello , thanks for reaching out . " + tone_sentence(rating) +
                            " our " + category + " app keeps improving . please try the " + f1 +
                            " " + f2 + " option . regards , the app team";
            records.push_back(response);
        }
    }
    return records;
}

void write_raw_records(const std::vector<RawRecord>& records, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw data_error("cannot open output file " + path);
    for (const RawRecord& r : records) out << raw_record_to_json(r) << "\n";
}

} // namespace revsynth
