#pragma once

#include <optional>
#include <string>
#include <vector>

namespace revsynth {

// Reserved vocabulary tokens. Ids are fixed: <pad>=0 .. <signature>=8.
inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kSosToken = "<sos>";
inline constexpr const char* kEosToken = "<eos>";
inline constexpr const char* kNumberToken = "<number>";
inline constexpr const char* kUrlToken = "<url>";
inline constexpr const char* kEmailToken = "<email>";
inline constexpr const char* kSalutationToken = "<salutation>";
inline constexpr const char* kSignatureToken = "<signature>";

const std::vector<std::string>& reserved_tokens();

bool is_reserved_token(const std::string& tok);

// True for single-character ASCII punctuation tokens.
bool is_punct_token(const std::string& tok);

// Lowercases, maps digit runs to <number>, emails to <email>, http(s)/www
// URLs to <url>, and splits punctuation into standalone tokens. Idempotent:
// normalizing its own output reproduces it. Empty input gives an empty
// sequence.
std::vector<std::string> normalize_text(const std::string& raw);

enum class RecordKind { review, response, description, category };

struct CleanRecord {
    std::vector<std::string> tokens;
    std::string app_id;
    RecordKind kind = RecordKind::review;
    std::optional<int> rating;  // reviews only
};

struct MaskFilterOptions {
    // Minimum word tokens (placeholders and punctuation excluded) a review
    // or response must keep.
    int min_content_tokens = 4;
    // A review/response is kept only if at least this fraction of its word
    // tokens appear in the built-in common-English list.
    double english_threshold = 0.2;
};

// Replaces a leading greeting with <salutation> and a trailing sign-off with
// <signature>, then applies the length and English filters. Only reviews and
// responses are masked and filtered; descriptions and categories pass
// through untouched. Returns nullopt when the record is rejected.
std::optional<std::vector<std::string>> mask_and_filter(
    const std::vector<std::string>& tokens, RecordKind kind,
    const MaskFilterOptions& opts = {});

// The built-in 1,000-word common-English list used by the language filter.
const std::vector<std::string>& english_word_list();

bool is_english_word(const std::string& tok);

} // namespace revsynth
