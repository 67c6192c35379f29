#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "revsynth/index.hpp"

namespace revsynth {

struct Snippet {
    std::vector<std::string> tokens;
    double score = 0.0;
    std::size_t start_sentence = 0;
    std::size_t sentence_count = 0;
};

// Splits a token stream into sentences at '.', '!', '?' (terminator kept with
// its sentence). A trailing run without a terminator forms a final sentence.
std::vector<std::vector<std::string>> split_sentences(const std::vector<std::string>& tokens);

// Best window of consecutive sentences with <= max_tokens tokens. A window's
// score is the sum of idf over the distinct query terms it contains. Order:
// score desc, then score/length desc, then earlier start, then fewer
// sentences. Sentences longer than max_tokens on their own are skipped; if
// nothing fits the first max_tokens tokens of the document are returned.
Snippet extract_snippet(const InvertedIndex& index, const std::vector<std::string>& doc_tokens,
                        const std::vector<std::string>& query_terms, std::size_t max_tokens);

struct RetrievedContext {
    // Up to review_count snippets from distinct reviews, best-ranked first.
    std::vector<Snippet> review_snippets;
    std::vector<std::uint32_t> review_doc_ids;
    // Snippet from the app description; empty tokens when the app has none.
    Snippet description_snippet;
    bool has_description = false;
};

// Retrieves snippets for a query review: BM25 search over the app's review
// docs (skipping any doc whose tokens equal the query exactly), one snippet
// per distinct hit, plus one snippet from the app's description doc.
RetrievedContext retrieve_context(const InvertedIndex& index, const Bm25Params& params,
                                  const std::string& app_id,
                                  const std::vector<std::string>& query_tokens,
                                  std::size_t review_count, std::size_t max_snippet_tokens);

} // namespace revsynth
