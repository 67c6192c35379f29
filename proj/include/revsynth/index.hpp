#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "revsynth/text.hpp"

namespace revsynth {

struct Posting {
    std::uint32_t doc_id = 0;
    std::uint32_t term_freq = 0;
};

// Sorted postings with skip links every ceil(sqrt(len)) entries.
class PostingsList {
public:
    void add(std::uint32_t doc_id, std::uint32_t term_freq);
    void build_skips();

    // Term frequency for doc_id, 0 when absent. Walks the skip links, then
    // scans within the located block.
    std::uint32_t find(std::uint32_t doc_id) const;

    // Index of the first posting with doc_id >= target (postings.size() when
    // none), via skip links.
    std::size_t advance_to(std::uint32_t target) const;

    const std::vector<Posting>& postings() const { return postings_; }
    const std::vector<std::uint32_t>& skips() const { return skips_; }
    std::size_t skip_stride() const { return stride_; }
    std::size_t size() const { return postings_.size(); }

private:
    std::vector<Posting> postings_;
    std::vector<std::uint32_t> skips_;  // positions into postings_
    std::size_t stride_ = 0;
};

// Doc ids shared by both lists, using skip-accelerated advancement.
std::vector<std::uint32_t> intersect(const PostingsList& a, const PostingsList& b);

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

enum class DocKind { review, description };

struct DocMeta {
    std::string app_id;
    DocKind kind = DocKind::review;
    std::vector<std::string> tokens;
};

struct SearchHit {
    std::uint32_t doc_id = 0;
    double score = 0.0;
};

class InvertedIndex {
public:
    // Build phase. Throws on duplicate doc ids or after freeze.
    void add_document(std::uint32_t doc_id, const std::string& app_id, DocKind kind,
                      const std::vector<std::string>& tokens);

    // Builds skip links and the average document length; the index becomes
    // immutable. Idempotent. Throws on an empty index.
    void freeze();

    bool frozen() const { return frozen_; }
    std::uint32_t doc_count() const { return static_cast<std::uint32_t>(docs_.size()); }
    double avgdl() const;
    const DocMeta& doc(std::uint32_t doc_id) const;
    bool has_doc(std::uint32_t doc_id) const { return docs_.count(doc_id) > 0; }
    const std::map<std::uint32_t, DocMeta>& docs() const { return docs_; }
    const std::map<std::string, PostingsList>& terms() const { return terms_; }

    // Number of documents containing the term.
    std::uint32_t doc_freq(const std::string& term) const;

    // ln(1 + (N - n + 0.5) / (n + 0.5)); non-negative for every term.
    double idf(const std::string& term) const;

    double bm25_score(const Bm25Params& params, const std::vector<std::string>& query_terms,
                      std::uint32_t doc_id) const;

    // Top-k docs by BM25, optionally restricted to one app. Zero-score docs
    // are excluded; ties break by ascending doc id.
    std::vector<SearchHit> search(const Bm25Params& params,
                                  const std::vector<std::string>& query_terms,
                                  const std::optional<std::string>& app_id_filter,
                                  std::size_t k) const;

private:
    void require_frozen() const;

    std::map<std::string, PostingsList> terms_;
    std::map<std::uint32_t, DocMeta> docs_;
    double avgdl_ = 0.0;
    bool frozen_ = false;
};

} // namespace revsynth
