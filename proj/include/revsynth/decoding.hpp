#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "revsynth/model.hpp"

namespace revsynth {

struct BeamConfig {
    std::size_t beam_width = 5;
    std::size_t max_len = 120;
};

// Greedy decoding: emit the argmax token each step (probability ties take the
// lowest id), stop at <eos> or max_len. Returns the emitted body without
// <sos>/<eos>; <pad> is never a candidate. Runs without recording gradients.
std::vector<int> greedy_decode(const Model& model, const std::vector<int>& review_ids,
                               const std::vector<int>& category_ids, int rating,
                               const std::vector<std::vector<int>>& snippet_ids,
                               const AblationFlags& flags, std::size_t max_len = 120);

// Beam search over cumulative log-probability, no length normalization.
// Each live hypothesis expands by its top-B tokens; the global top-B
// candidates survive, finished ones (ending in <eos> or at max_len) retire
// into a pool; the answer is the pool maximum (ties: shorter body, then
// lexicographically smaller ids). beam_width 1 equals greedy_decode exactly.
std::vector<int> beam_search(const Model& model, const std::vector<int>& review_ids,
                             const std::vector<int>& category_ids, int rating,
                             const std::vector<std::vector<int>>& snippet_ids,
                             const AblationFlags& flags, const BeamConfig& cfg = {});

// Joins tokens with spaces, re-attaching punctuation to the preceding word
// and gluing apostrophes on both sides. Placeholders render literally.
std::string detokenize(const std::vector<std::string>& tokens);

} // namespace revsynth
