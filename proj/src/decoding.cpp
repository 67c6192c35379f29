#include "revsynth/decoding.hpp"

#include <algorithm>
#include <cmath>

#include "revsynth/corpus.hpp"
#include "revsynth/errors.hpp"
#include "revsynth/text.hpp"

namespace revsynth {

namespace {

struct Hypothesis {
    std::vector<int> ids;
    double log_prob = 0.0;
    DecoderState state;
};

// candidate ids ranked by probability desc, ties toward the lower id; <pad>
// is excluded so it can never be emitted
std::vector<std::pair<double, int>> ranked_candidates(const Var& dist) {
    std::vector<std::pair<double, int>> out;
    out.reserve(dist->value.size());
    for (std::size_t id = 0; id < dist->value.size(); ++id) {
        if (static_cast<int>(id) == Vocab::kPadId) continue;
        out.emplace_back(dist->value.data[id], static_cast<int>(id));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    return out;
}

double floored_log(double p) { return std::log(std::max(p, 1e-12)); }

} // namespace

std::vector<int> greedy_decode(const Model& model, const std::vector<int>& review_ids,
                               const std::vector<int>& category_ids, int rating,
                               const std::vector<std::vector<int>>& snippet_ids,
                               const AblationFlags& flags, std::size_t max_len) {
    NoGradGuard guard;
    DecodeContext ctx = model.prepare(review_ids, category_ids, rating, snippet_ids, flags);
    DecoderState state = ctx.init_state;
    std::vector<int> out;
    int y_prev = Vocab::kSosId;
    while (out.size() < max_len) {
        auto [dist, next] = model.decode_step(ctx, state, y_prev);
        int best = ranked_candidates(dist)[0].second;
        if (best == Vocab::kEosId) break;
        out.push_back(best);
        y_prev = best;
        state = std::move(next);
    }
    return out;
}

std::vector<int> beam_search(const Model& model, const std::vector<int>& review_ids,
                             const std::vector<int>& category_ids, int rating,
                             const std::vector<std::vector<int>>& snippet_ids,
                             const AblationFlags& flags, const BeamConfig& cfg) {
    if (cfg.beam_width == 0) throw data_error("beam width must be at least 1");
    NoGradGuard guard;
    DecodeContext ctx = model.prepare(review_ids, category_ids, rating, snippet_ids, flags);

    std::vector<Hypothesis> live(1);
    live[0].state = ctx.init_state;
    std::vector<Hypothesis> pool;

    while (!live.empty()) {
        struct Candidate {
            std::size_t parent;
            int token;
            double log_prob;
        };
        std::vector<Candidate> candidates;
        std::vector<DecoderState> next_states(live.size());
        for (std::size_t i = 0; i < live.size(); ++i) {
            int y_prev = live[i].ids.empty() ? Vocab::kSosId : live[i].ids.back();
            auto [dist, next] = model.decode_step(ctx, live[i].state, y_prev);
            next_states[i] = std::move(next);
            auto ranked = ranked_candidates(dist);
            std::size_t take = std::min(cfg.beam_width, ranked.size());
            for (std::size_t r = 0; r < take; ++r) {
                candidates.push_back(
                    {i, ranked[r].second, live[i].log_prob + floored_log(ranked[r].first)});
            }
        }
        // global top-B; ties resolved toward the candidate a width-1 beam
        // would have produced (parent order, then lower token id)
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const Candidate& a, const Candidate& b) {
                             if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
                             if (a.parent != b.parent) return a.parent < b.parent;
                             return a.token < b.token;
                         });
        std::size_t keep = std::min(cfg.beam_width, candidates.size());
        std::vector<Hypothesis> next_live;
        for (std::size_t r = 0; r < keep; ++r) {
            const Candidate& c = candidates[r];
            Hypothesis h;
            h.ids = live[c.parent].ids;
            h.log_prob = c.log_prob;
            if (c.token == Vocab::kEosId) {
                pool.push_back(std::move(h));  // body excludes <eos>
                continue;
            }
            h.ids.push_back(c.token);
            h.state = next_states[c.parent];
            if (h.ids.size() >= cfg.max_len) {
                pool.push_back(std::move(h));
            } else {
                next_live.push_back(std::move(h));
            }
        }
        live = std::move(next_live);
    }

    if (pool.empty()) return {};
    const Hypothesis* best = &pool[0];
    for (const Hypothesis& h : pool) {
        if (h.log_prob > best->log_prob) {
            best = &h;
        } else if (h.log_prob == best->log_prob) {
            if (h.ids.size() < best->ids.size() ||
                (h.ids.size() == best->ids.size() && h.ids < best->ids)) {
                best = &h;
            }
        }
    }
    return best->ids;
}

std::string detokenize(const std::vector<std::string>& tokens) {
    std::string out;
    bool glue_next = false;
    for (const std::string& tok : tokens) {
        bool punct = tok.size() == 1 && is_punct_token(tok);
        bool apostrophe = tok == "'";
        if (out.empty()) {
            out = tok;
        } else if (punct || glue_next) {
            out += tok;
        } else {
            out += ' ';
            out += tok;
        }
        glue_next = apostrophe;
    }
    return out;
}

} // namespace revsynth
