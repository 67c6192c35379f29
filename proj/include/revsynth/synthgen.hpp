#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "revsynth/corpus.hpp"

namespace revsynth {

// Synthetic review/response corpus generator. Each app gets a category, a
// two-token "fact" phrase, a description and tip reviews that carry the fact,
// and review/response pairs whose correct response mentions the rating tone,
// the category word, and the fact. The fact appears nowhere in the paired
// review text, so reproducing it requires the retrieved snippets; the tone
// requires the rating; the category word requires the category input.
struct SynthgenConfig {
    std::size_t apps = 20;
    std::size_t reviews_per_app = 200;
    std::size_t fact_vocab = 40;   // size of the invented fact-token pool
    std::size_t tips_per_app = 5;  // unpaired fact-bearing reviews per app
    std::uint64_t seed = 0;
};

std::vector<RawRecord> generate_corpus(const SynthgenConfig& cfg);

// Deterministic app attributes, exposed so tests can verify planted facts.
std::string synth_app_id(std::size_t app_index);
std::string synth_category(std::size_t app_index);
std::pair<std::string, std::string> synth_fact(const SynthgenConfig& cfg, std::size_t app_index);
std::string synth_fact_token(std::size_t fact_index);

void write_raw_records(const std::vector<RawRecord>& records, const std::string& path);

} // namespace revsynth
