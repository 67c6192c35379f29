#include "revsynth/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <json.hpp>

#include "revsynth/errors.hpp"
#include "revsynth/rng.hpp"

namespace revsynth {

using nlohmann::json;

Vocab::Vocab() {
    for (const auto& t : reserved_tokens()) add(t);
}

void Vocab::add(const std::string& token) {
    if (ids_.count(token)) throw data_error("duplicate vocab token: " + token);
    ids_[token] = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
}

int Vocab::id_of(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnkId : it->second;
}

bool Vocab::contains(const std::string& token) const { return ids_.count(token) > 0; }

const std::string& Vocab::token_of(int id) const {
    if (id < 0 || id >= size()) throw data_error("vocab id out of range: " + std::to_string(id));
    return tokens_[static_cast<std::size_t>(id)];
}

Vocab build_vocab(const std::vector<CleanRecord>& corpus, int cap) {
    const int reserved = static_cast<int>(reserved_tokens().size());
    if (cap <= reserved) throw data_error("vocab cap must exceed reserved token count");

    std::map<std::string, std::int64_t> freq;
    for (const auto& rec : corpus) {
        for (const auto& tok : rec.tokens) {
            if (!is_reserved_token(tok)) ++freq[tok];
        }
    }
    std::vector<std::pair<std::string, std::int64_t>> items(freq.begin(), freq.end());
    std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocab v;
    for (const auto& [tok, count] : items) {
        (void)count;
        if (v.size() >= cap) break;
        v.add(tok);
    }
    return v;
}

std::vector<int> encode_tokens(const std::vector<std::string>& tokens, const Vocab& vocab,
                               int limit, bool append_eos) {
    std::vector<int> ids;
    ids.reserve(static_cast<std::size_t>(limit));
    int budget = append_eos ? limit - 1 : limit;
    for (const auto& tok : tokens) {
        if (static_cast<int>(ids.size()) >= budget) break;
        ids.push_back(vocab.id_of(tok));
    }
    if (append_eos) ids.push_back(Vocab::kEosId);
    while (static_cast<int>(ids.size()) < limit) ids.push_back(Vocab::kPadId);
    return ids;
}

ReviewResponsePair encode_pair(const CleanRecord& review, const CleanRecord& response,
                               const std::vector<std::string>& category_tokens,
                               const Vocab& vocab, const SequenceLimits& limits) {
    if (!review.rating.has_value()) {
        throw data_error("review without rating cannot be encoded (app " + review.app_id + ")");
    }
    ReviewResponsePair p;
    p.app_id = review.app_id;
    p.rating = *review.rating;
    p.review_tokens = review.tokens;
    if (static_cast<int>(p.review_tokens.size()) > limits.review) {
        p.review_tokens.resize(static_cast<std::size_t>(limits.review));
    }
    p.review_ids = encode_tokens(review.tokens, vocab, limits.review, false);
    p.response_ids = encode_tokens(response.tokens, vocab, limits.response, true);
    p.category_ids = encode_tokens(category_tokens, vocab, limits.category, false);
    return p;
}

std::array<double, 3> default_split_ratios() {
    // Train/valid/test proportions 530872 : 19511 : 19480 (~0.93/0.034/0.034),
    // normalized over their own sum.
    const double total = 530872.0 + 19511.0 + 19480.0;
    return {530872.0 / total, 19511.0 / total, 19480.0 / total};
}

DatasetSplit split_dataset(std::vector<ReviewResponsePair> pairs,
                           const std::array<double, 3>& ratios, std::uint64_t seed) {
    const double sum = ratios[0] + ratios[1] + ratios[2];
    if (std::fabs(sum - 1.0) > 1e-9) throw data_error("split ratios must sum to 1");
    if (pairs.size() < 3) throw data_error("need at least 3 pairs to split");

    const std::size_t n = pairs.size();
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> remainders{};
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        double exact = ratios[static_cast<std::size_t>(i)] * static_cast<double>(n);
        counts[static_cast<std::size_t>(i)] = static_cast<std::size_t>(std::floor(exact));
        remainders[static_cast<std::size_t>(i)] = exact - std::floor(exact);
        assigned += counts[static_cast<std::size_t>(i)];
    }
    // Hand out the leftover items by largest remainder, earlier bucket on ties.
    while (assigned < n) {
        int best = 0;
        for (int i = 1; i < 3; ++i) {
            if (remainders[static_cast<std::size_t>(i)] > remainders[static_cast<std::size_t>(best)]) best = i;
        }
        counts[static_cast<std::size_t>(best)] += 1;
        remainders[static_cast<std::size_t>(best)] = -1.0;
        ++assigned;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    DatasetSplit split;
    split.seed = seed;
    split.train.reserve(counts[0]);
    split.valid.reserve(counts[1]);
    split.test.reserve(counts[2]);
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = pairs[order[i]];
        if (i < counts[0]) {
            split.train.push_back(std::move(p));
        } else if (i < counts[0] + counts[1]) {
            split.valid.push_back(std::move(p));
        } else {
            split.test.push_back(std::move(p));
        }
    }
    return split;
}

std::optional<RawRecord> parse_raw_record(const std::string& json_line, std::string* error) {
    json j = json::parse(json_line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        if (error) *error = "not a JSON object";
        return std::nullopt;
    }
    RawRecord r;
    try {
        r.app_id = j.at("app_id").get<std::string>();
        std::string kind = j.at("kind").get<std::string>();
        if (kind == "review") {
            r.kind = RecordKind::review;
        } else if (kind == "response") {
            r.kind = RecordKind::response;
        } else if (kind == "description") {
            r.kind = RecordKind::description;
        } else if (kind == "category") {
            r.kind = RecordKind::category;
        } else {
            if (error) *error = "unknown kind: " + kind;
            return std::nullopt;
        }
        r.text = j.at("text").get<std::string>();
        if (j.contains("rating")) r.rating = j.at("rating").get<int>();
        if (j.contains("link_id")) r.link_id = j.at("link_id").get<std::string>();
    } catch (const json::exception& e) {
        if (error) *error = e.what();
        return std::nullopt;
    }
    if (r.text.empty()) {
        if (error) *error = "empty text";
        return std::nullopt;
    }
    if ((r.kind == RecordKind::review) != r.rating.has_value()) {
        if (error) *error = "rating must be present exactly for reviews";
        return std::nullopt;
    }
    if ((r.kind == RecordKind::response) != r.link_id.has_value()) {
        if (error) *error = "link_id must be present exactly for responses";
        return std::nullopt;
    }
    if (r.rating && (*r.rating < 1 || *r.rating > 5)) {
        if (error) *error = "rating out of range";
        return std::nullopt;
    }
    return r;
}

std::string raw_record_to_json(const RawRecord& record) {
    json j;
    j["app_id"] = record.app_id;
    switch (record.kind) {
        case RecordKind::review: j["kind"] = "review"; break;
        case RecordKind::response: j["kind"] = "response"; break;
        case RecordKind::description: j["kind"] = "description"; break;
        case RecordKind::category: j["kind"] = "category"; break;
    }
    j["text"] = record.text;
    if (record.rating) j["rating"] = *record.rating;
    if (record.link_id) j["link_id"] = *record.link_id;
    return j.dump();
}

std::vector<std::string> vocab_to_lines(const Vocab& v) {
    std::vector<std::string> lines;
    lines.reserve(static_cast<std::size_t>(v.size()));
    for (int i = 0; i < v.size(); ++i) lines.push_back(v.token_of(i));
    return lines;
}

Vocab vocab_from_lines(const std::vector<std::string>& lines) {
    const auto& reserved = reserved_tokens();
    if (lines.size() < reserved.size()) throw data_error("vocab file shorter than reserved set");
    for (std::size_t i = 0; i < reserved.size(); ++i) {
        if (lines[i] != reserved[i]) throw data_error("vocab file reserved tokens out of order");
    }
    Vocab v;
    for (std::size_t i = reserved.size(); i < lines.size(); ++i) v.add(lines[i]);
    return v;
}

std::string pair_to_json(const ReviewResponsePair& p) {
    json j{{"app_id", p.app_id},
           {"rating", p.rating},
           {"category_ids", p.category_ids},
           {"review_ids", p.review_ids},
           {"response_ids", p.response_ids},
           {"review_tokens", p.review_tokens}};
    return j.dump();
}

ReviewResponsePair pair_from_json(const std::string& line) {
    json j = json::parse(line);
    ReviewResponsePair p;
    p.app_id = j.at("app_id").get<std::string>();
    p.rating = j.at("rating").get<int>();
    p.category_ids = j.at("category_ids").get<std::vector<int>>();
    p.review_ids = j.at("review_ids").get<std::vector<int>>();
    p.response_ids = j.at("response_ids").get<std::vector<int>>();
    p.review_tokens = j.at("review_tokens").get<std::vector<std::string>>();
    return p;
}

} // namespace revsynth
