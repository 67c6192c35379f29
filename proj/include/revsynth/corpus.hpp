#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "revsynth/text.hpp"

namespace revsynth {

struct RawRecord {
    std::string app_id;
    RecordKind kind = RecordKind::review;
    std::string text;
    std::optional<int> rating;        // reviews only, 1..5
    std::optional<std::string> link_id;  // responses only: line index of the paired review
};

// Token ids. Reserved tokens occupy ids 0..8 in declaration order.
class Vocab {
public:
    Vocab();

    int id_of(const std::string& token) const;  // <unk> id when absent
    const std::string& token_of(int id) const;
    bool contains(const std::string& token) const;
    int size() const { return static_cast<int>(tokens_.size()); }

    // Appends a token; internal use and file loading.
    void add(const std::string& token);

    static constexpr int kPadId = 0;
    static constexpr int kUnkId = 1;
    static constexpr int kSosId = 2;
    static constexpr int kEosId = 3;
    static constexpr int kSalutationId = 7;

private:
    std::vector<std::string> tokens_;
    std::map<std::string, int> ids_;
};

struct SequenceLimits {
    int review = 75;
    int snippet = 50;
    int category = 4;
    int response = 120;  // includes the terminating <eos>
};

struct ReviewResponsePair {
    std::string app_id;
    int rating = 0;
    std::vector<int> review_ids;    // padded to limits.review
    std::vector<int> response_ids;  // <eos>-terminated, padded to limits.response
    std::vector<int> category_ids;  // padded to limits.category
    std::vector<std::string> review_tokens;  // unpadded, for retrieval queries
};

struct DatasetSplit {
    std::vector<ReviewResponsePair> train;
    std::vector<ReviewResponsePair> valid;
    std::vector<ReviewResponsePair> test;
    std::uint64_t seed = 0;
};

// Frequency-sorted vocabulary build: reserved tokens first, then corpus
// tokens by descending frequency with lexicographic tie-break, truncated to
// cap.
Vocab build_vocab(const std::vector<CleanRecord>& corpus, int cap = 10000);

// Encodes a cleaned review/response pair. OOV tokens map to <unk>, sequences
// are truncated then tail-padded, and the response always ends with <eos>
// before padding. Throws data_error when the review has no rating.
ReviewResponsePair encode_pair(const CleanRecord& review, const CleanRecord& response,
                               const std::vector<std::string>& category_tokens,
                               const Vocab& vocab, const SequenceLimits& limits = {});

std::vector<int> encode_tokens(const std::vector<std::string>& tokens, const Vocab& vocab,
                               int limit, bool append_eos);

// Deterministic seeded split. Ratios must sum to 1 within 1e-9; sizes are
// assigned by largest remainder so each bucket is within one item of its
// exact share. Throws data_error for fewer than 3 pairs.
DatasetSplit split_dataset(std::vector<ReviewResponsePair> pairs,
                           const std::array<double, 3>& ratios, std::uint64_t seed);

// Proportions of the default train/valid/test split.
std::array<double, 3> default_split_ratios();

// --- file formats ---

// One raw record per JSON line: {"app_id","kind","text","rating"?,"link_id"?}.
std::optional<RawRecord> parse_raw_record(const std::string& json_line, std::string* error);
std::string raw_record_to_json(const RawRecord& record);

std::vector<std::string> vocab_to_lines(const Vocab& v);
Vocab vocab_from_lines(const std::vector<std::string>& lines);

std::string pair_to_json(const ReviewResponsePair& p);
ReviewResponsePair pair_from_json(const std::string& line);

} // namespace revsynth
