#include "revsynth/index.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "revsynth/errors.hpp"

namespace revsynth {

void PostingsList::add(std::uint32_t doc_id, std::uint32_t term_freq) {
    if (!postings_.empty() && postings_.back().doc_id >= doc_id) {
        throw std::logic_error("postings must be added in increasing doc_id order");
    }
    postings_.push_back({doc_id, term_freq});
}

void PostingsList::build_skips() {
    skips_.clear();
    stride_ = 0;
    if (postings_.empty()) return;
    stride_ = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(postings_.size()))));
    for (std::size_t pos = 0; pos < postings_.size(); pos += stride_) {
        skips_.push_back(static_cast<std::uint32_t>(pos));
    }
}

std::size_t PostingsList::advance_to(std::uint32_t target) const {
    if (postings_.empty()) return 0;
    // Last skip whose posting doc_id <= target marks the block to scan.
    std::size_t lo = 0;
    if (!skips_.empty()) {
        std::size_t left = 0, right = skips_.size();
        while (left < right) {
            std::size_t mid = left + (right - left) / 2;
            if (postings_[skips_[mid]].doc_id <= target) {
                left = mid + 1;
            } else {
                right = mid;
            }
        }
        if (left > 0) lo = skips_[left - 1];
    }
    while (lo < postings_.size() && postings_[lo].doc_id < target) ++lo;
    return lo;
}

std::uint32_t PostingsList::find(std::uint32_t doc_id) const {
    std::size_t pos = advance_to(doc_id);
    if (pos < postings_.size() && postings_[pos].doc_id == doc_id) {
        return postings_[pos].term_freq;
    }
    return 0;
}

std::vector<std::uint32_t> intersect(const PostingsList& a, const PostingsList& b) {
    std::vector<std::uint32_t> out;
    const auto& pa = a.postings();
    const auto& pb = b.postings();
    std::size_t i = 0, j = 0;
    while (i < pa.size() && j < pb.size()) {
        if (pa[i].doc_id == pb[j].doc_id) {
            out.push_back(pa[i].doc_id);
            ++i;
            ++j;
        } else if (pa[i].doc_id < pb[j].doc_id) {
            i = a.advance_to(pb[j].doc_id);
        } else {
            j = b.advance_to(pa[i].doc_id);
        }
    }
    return out;
}

void InvertedIndex::add_document(std::uint32_t doc_id, const std::string& app_id,
                                 DocKind kind, const std::vector<std::string>& tokens) {
    if (frozen_) throw std::logic_error("index is frozen");
    if (docs_.count(doc_id)) throw data_error("duplicate doc_id " + std::to_string(doc_id));
    docs_[doc_id] = DocMeta{app_id, kind, tokens};
}

void InvertedIndex::freeze() {
    if (frozen_) return;
    if (docs_.empty()) throw data_error("cannot freeze an empty index");
    // docs_ is ordered by doc_id, so postings come out sorted.
    std::uint64_t total_len = 0;
    for (const auto& [doc_id, meta] : docs_) {
        total_len += meta.tokens.size();
        std::map<std::string, std::uint32_t> counts;
        for (const auto& tok : meta.tokens) ++counts[tok];
        for (const auto& [term, tf] : counts) {
            terms_[term].add(doc_id, tf);
        }
    }
    for (auto& [term, list] : terms_) list.build_skips();
    avgdl_ = static_cast<double>(total_len) / static_cast<double>(docs_.size());
    frozen_ = true;
}

void InvertedIndex::require_frozen() const {
    if (!frozen_) throw std::logic_error("index must be frozen first");
}

double InvertedIndex::avgdl() const {
    require_frozen();
    return avgdl_;
}

const DocMeta& InvertedIndex::doc(std::uint32_t doc_id) const {
    auto it = docs_.find(doc_id);
    if (it == docs_.end()) throw data_error("unknown doc_id " + std::to_string(doc_id));
    return it->second;
}

std::uint32_t InvertedIndex::doc_freq(const std::string& term) const {
    auto it = terms_.find(term);
    return it == terms_.end() ? 0 : static_cast<std::uint32_t>(it->second.size());
}

double InvertedIndex::idf(const std::string& term) const {
    require_frozen();
    double n = static_cast<double>(doc_freq(term));
    double big_n = static_cast<double>(docs_.size());
    return std::log(1.0 + (big_n - n + 0.5) / (n + 0.5));
}

double InvertedIndex::bm25_score(const Bm25Params& params,
                                 const std::vector<std::string>& query_terms,
                                 std::uint32_t doc_id) const {
    require_frozen();
    const DocMeta& meta = doc(doc_id);
    double dl = static_cast<double>(meta.tokens.size());
    double norm = params.k1 * (1.0 - params.b + params.b * dl / avgdl_);
    double score = 0.0;
    for (const auto& term : query_terms) {
        auto it = terms_.find(term);
        if (it == terms_.end()) continue;
        double tf = static_cast<double>(it->second.find(doc_id));
        if (tf == 0.0) continue;
        score += idf(term) * tf * (params.k1 + 1.0) / (tf + norm);
    }
    return score;
}

std::vector<SearchHit> InvertedIndex::search(const Bm25Params& params,
                                             const std::vector<std::string>& query_terms,
                                             const std::optional<std::string>& app_id_filter,
                                             std::size_t k) const {
    require_frozen();
    // Accumulate per-doc scores over candidate docs only (those containing at
    // least one query term). Duplicate query terms contribute once per
    // occurrence, so walk terms with multiplicity.
    std::unordered_map<std::uint32_t, double> scores;
    for (const auto& term : query_terms) {
        auto it = terms_.find(term);
        if (it == terms_.end()) continue;
        double term_idf = idf(term);
        for (const auto& p : it->second.postings()) {
            const DocMeta& meta = docs_.at(p.doc_id);
            if (app_id_filter && meta.app_id != *app_id_filter) continue;
            double dl = static_cast<double>(meta.tokens.size());
            double norm = params.k1 * (1.0 - params.b + params.b * dl / avgdl_);
            double tf = static_cast<double>(p.term_freq);
            scores[p.doc_id] += term_idf * tf * (params.k1 + 1.0) / (tf + norm);
        }
    }
    std::vector<SearchHit> hits;
    hits.reserve(scores.size());
    for (const auto& [doc_id, score] : scores) {
        if (score > 0.0) hits.push_back({doc_id, score});
    }
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

} // namespace revsynth
