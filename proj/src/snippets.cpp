#include "revsynth/snippets.hpp"

#include <algorithm>
#include <set>

#include "revsynth/errors.hpp"

namespace revsynth {

std::vector<std::vector<std::string>> split_sentences(const std::vector<std::string>& tokens) {
    std::vector<std::vector<std::string>> sentences;
    std::vector<std::string> current;
    for (const auto& tok : tokens) {
        current.push_back(tok);
        if (tok == "." || tok == "!" || tok == "?") {
            sentences.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) sentences.push_back(std::move(current));
    return sentences;
}

Snippet extract_snippet(const InvertedIndex& index, const std::vector<std::string>& doc_tokens,
                        const std::vector<std::string>& query_terms, std::size_t max_tokens) {
    auto sentences = split_sentences(doc_tokens);
    std::vector<std::size_t> lengths(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) lengths[i] = sentences[i].size();

    std::set<std::string> distinct_query(query_terms.begin(), query_terms.end());

    Snippet best;
    bool found = false;
    for (std::size_t start = 0; start < sentences.size(); ++start) {
        std::size_t len = 0;
        for (std::size_t end = start; end < sentences.size(); ++end) {
            len += lengths[end];
            if (len > max_tokens) break;
            std::set<std::string> present;
            for (std::size_t s = start; s <= end; ++s) {
                for (const auto& tok : sentences[s]) {
                    if (distinct_query.count(tok)) present.insert(tok);
                }
            }
            double score = 0.0;
            for (const auto& term : present) score += index.idf(term);
            std::size_t count = end - start + 1;
            double density = score / static_cast<double>(len);
            bool better = false;
            if (!found) {
                better = true;
            } else if (score != best.score) {
                better = score > best.score;
            } else {
                double best_density = best.score / static_cast<double>(best.tokens.size());
                if (density != best_density) {
                    better = density > best_density;
                } else if (start != best.start_sentence) {
                    better = start < best.start_sentence;
                } else {
                    better = count < best.sentence_count;
                }
            }
            if (better) {
                best.tokens.clear();
                for (std::size_t s = start; s <= end; ++s) {
                    best.tokens.insert(best.tokens.end(), sentences[s].begin(),
                                       sentences[s].end());
                }
                best.score = score;
                best.start_sentence = start;
                best.sentence_count = count;
                found = true;
            }
        }
    }
    if (!found) {
        // Every sentence is longer than the budget; fall back to a prefix.
        best.tokens.assign(doc_tokens.begin(),
                           doc_tokens.begin() +
                               std::min(max_tokens, doc_tokens.size()));
        best.score = 0.0;
        best.start_sentence = 0;
        best.sentence_count = best.tokens.empty() ? 0 : 1;
    }
    return best;
}

RetrievedContext retrieve_context(const InvertedIndex& index, const Bm25Params& params,
                                  const std::string& app_id,
                                  const std::vector<std::string>& query_tokens,
                                  std::size_t review_count, std::size_t max_snippet_tokens) {
    RetrievedContext ctx;
    bool app_known = false;
    for (const auto& [doc_id, meta] : index.docs()) {
        if (meta.app_id != app_id) continue;
        app_known = true;
        if (meta.kind == DocKind::description && !ctx.has_description) {
            ctx.description_snippet =
                extract_snippet(index, meta.tokens, query_tokens, max_snippet_tokens);
            ctx.has_description = true;
        }
    }
    if (!app_known) throw data_error("app " + app_id + " is not in the index");

    auto hits = index.search(params, query_tokens, app_id, index.doc_count());
    for (const auto& hit : hits) {
        if (ctx.review_snippets.size() >= review_count) break;
        const DocMeta& meta = index.doc(hit.doc_id);
        if (meta.kind != DocKind::review) continue;
        if (meta.tokens == query_tokens) continue;  // do not retrieve the query itself
        ctx.review_snippets.push_back(
            extract_snippet(index, meta.tokens, query_tokens, max_snippet_tokens));
        ctx.review_doc_ids.push_back(hit.doc_id);
    }
    return ctx;
}

} // namespace revsynth
