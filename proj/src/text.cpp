#include "revsynth/text.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace revsynth {

namespace {

bool is_ascii_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_ascii_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Word characters: letters, and any non-ASCII byte (kept opaque; non-English
// text is rejected later by the language filter, not mangled here).
bool is_word_char(unsigned char c) { return is_ascii_alpha(c) || c >= 0x80; }

bool is_email_char(unsigned char c) {
    return is_ascii_alpha(c) || is_ascii_digit(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}

std::string to_lower(std::string s) {
    for (auto& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

bool starts_with_ci(const std::string& s, std::size_t pos, const char* prefix) {
    for (std::size_t i = 0; prefix[i] != '\0'; ++i) {
        if (pos + i >= s.size()) return false;
        char c = s[pos + i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c != prefix[i]) return false;
    }
    return true;
}

// chunk looks like local@domain.tld with a letters-only tld of length >= 2
bool is_email_chunk(const std::string& chunk) {
    auto at = chunk.find('@');
    if (at == std::string::npos || at == 0 || at + 1 >= chunk.size()) return false;
    if (chunk.find('@', at + 1) != std::string::npos) return false;
    for (std::size_t i = 0; i < at; ++i) {
        if (!is_email_char(static_cast<unsigned char>(chunk[i]))) return false;
    }
    auto dot = chunk.rfind('.');
    if (dot == std::string::npos || dot < at + 2 || dot + 2 > chunk.size() - 1) return false;
    for (std::size_t i = at + 1; i < dot; ++i) {
        unsigned char c = static_cast<unsigned char>(chunk[i]);
        if (!(is_ascii_alpha(c) || is_ascii_digit(c) || c == '.' || c == '-')) return false;
    }
    for (std::size_t i = dot + 1; i < chunk.size(); ++i) {
        if (!is_ascii_alpha(static_cast<unsigned char>(chunk[i]))) return false;
    }
    return true;
}

// Splits one whitespace-delimited chunk into tokens.
void tokenize_chunk(const std::string& chunk, std::vector<std::string>& out) {
    // Placeholder tokens pass through atomically; this is what makes
    // normalization idempotent.
    {
        std::string lowered = to_lower(chunk);
        if (is_reserved_token(lowered)) {
            out.push_back(lowered);
            return;
        }
    }

    // URLs and emails are matched against the chunk with any trailing
    // punctuation run stripped off, so "visit https://x.co." still yields
    // <url> followed by ".".
    std::size_t body_end = chunk.size();
    while (body_end > 0) {
        unsigned char c = static_cast<unsigned char>(chunk[body_end - 1]);
        if (c < 0x80 && !is_ascii_alpha(c) && !is_ascii_digit(c) && c != '/') {
            --body_end;
        } else {
            break;
        }
    }
    std::string body = chunk.substr(0, body_end);
    std::string tail = chunk.substr(body_end);

    bool is_url = starts_with_ci(body, 0, "http://") || starts_with_ci(body, 0, "https://") ||
                  starts_with_ci(body, 0, "www.");
    if (is_url && body.size() > 4) {
        out.push_back(kUrlToken);
        tokenize_chunk(tail, out);
        return;
    }
    if (is_email_chunk(body)) {
        out.push_back(kEmailToken);
        tokenize_chunk(tail, out);
        return;
    }

    std::string word;
    auto flush_word = [&]() {
        if (!word.empty()) {
            out.push_back(word);
            word.clear();
        }
    };
    for (std::size_t i = 0; i < chunk.size();) {
        unsigned char c = static_cast<unsigned char>(chunk[i]);
        if (is_word_char(c)) {
            word.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
            ++i;
        } else if (is_ascii_digit(c)) {
            flush_word();
            while (i < chunk.size() && is_ascii_digit(static_cast<unsigned char>(chunk[i]))) ++i;
            out.push_back(kNumberToken);
        } else {
            flush_word();
            out.push_back(std::string(1, static_cast<char>(c)));
            ++i;
        }
    }
    flush_word();
}

const std::unordered_set<std::string>& greeting_heads() {
    static const std::unordered_set<std::string> s = {"hi", "hello", "hey", "dear", "greetings"};
    return s;
}

const std::unordered_set<std::string>& greeting_follow() {
    static const std::unordered_set<std::string> s = {"there", "all", "everyone", "team", "guys", "friend"};
    return s;
}

const std::unordered_set<std::string>& signature_keywords() {
    static const std::unordered_set<std::string> s = {"thanks", "thank", "regards", "sincerely", "cheers", "team"};
    return s;
}

bool is_word_token(const std::string& tok) {
    return !is_reserved_token(tok) && !is_punct_token(tok);
}

} // namespace

const std::vector<std::string>& reserved_tokens() {
    static const std::vector<std::string> toks = {
        kPadToken, kUnkToken, kSosToken, kEosToken, kNumberToken,
        kUrlToken, kEmailToken, kSalutationToken, kSignatureToken,
    };
    return toks;
}

bool is_reserved_token(const std::string& tok) {
    const auto& toks = reserved_tokens();
    return std::find(toks.begin(), toks.end(), tok) != toks.end();
}

bool is_punct_token(const std::string& tok) {
    if (tok.size() != 1) return false;
    unsigned char c = static_cast<unsigned char>(tok[0]);
    return c < 0x80 && !is_ascii_alpha(c) && !is_ascii_digit(c) && !is_ascii_space(c);
}

std::vector<std::string> normalize_text(const std::string& raw) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < raw.size()) {
        while (i < raw.size() && is_ascii_space(static_cast<unsigned char>(raw[i]))) ++i;
        std::size_t start = i;
        while (i < raw.size() && !is_ascii_space(static_cast<unsigned char>(raw[i]))) ++i;
        if (i > start) tokenize_chunk(raw.substr(start, i - start), out);
    }
    return out;
}

std::optional<std::vector<std::string>> mask_and_filter(
    const std::vector<std::string>& tokens, RecordKind kind, const MaskFilterOptions& opts) {
    if (kind == RecordKind::description || kind == RecordKind::category) {
        return tokens;
    }

    std::vector<std::string> toks = tokens;

    // Leading greeting -> <salutation>. Pattern: a greeting head, optionally
    // followed by a stock follow-up word (or up to two name tokens after
    // "dear"), optionally closed by one punctuation mark.
    if (!toks.empty() && greeting_heads().count(toks[0]) > 0) {
        std::size_t end = 1;
        if (toks[0] == "dear") {
            while (end < toks.size() && end < 3 && is_word_token(toks[end])) ++end;
        } else if (end < toks.size() && greeting_follow().count(toks[end]) > 0) {
            ++end;
        }
        if (end < toks.size() && (toks[end] == "," || toks[end] == "!" || toks[end] == ".")) ++end;
        std::vector<std::string> replaced;
        replaced.push_back(kSalutationToken);
        replaced.insert(replaced.end(), toks.begin() + static_cast<std::ptrdiff_t>(end), toks.end());
        toks = std::move(replaced);
    }

    // Trailing sign-off -> <signature>. A signature keyword within the last
    // six tokens swallows everything from it to the end.
    {
        std::size_t n = toks.size();
        std::size_t window = n < 6 ? 0 : n - 6;
        for (std::size_t j = window; j < n; ++j) {
            if (signature_keywords().count(toks[j]) > 0) {
                toks.resize(j);
                toks.push_back(kSignatureToken);
                break;
            }
        }
    }

    int content = 0;
    int words = 0;
    int english = 0;
    for (const auto& t : toks) {
        if (is_word_token(t)) {
            ++content;
            ++words;
            if (is_english_word(t)) ++english;
        }
    }
    if (content < opts.min_content_tokens) return std::nullopt;
    if (words > 0 && static_cast<double>(english) / words < opts.english_threshold) return std::nullopt;
    return toks;
}

} // namespace revsynth
