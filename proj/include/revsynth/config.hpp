#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "revsynth/corpus.hpp"
#include "revsynth/index.hpp"
#include "revsynth/model.hpp"
#include "revsynth/training.hpp"

namespace revsynth {

// Every knob of the pipeline in one flat structure. Serialized as key=value
// lines; the command line applies the config file first and explicit flags
// afterward, so flags always win.
struct PipelineConfig {
    ModelConfig model;        // vocab_size is filled from the vocab file, not the config
    TrainConfig trainer;
    int vocab_cap = 10000;
    SequenceLimits limits;
    std::array<double, 3> split_ratios = default_split_ratios();
    Bm25Params bm25;
    std::size_t review_snippets = 4;  // retrieved review snippets per example
    std::size_t beam_width = 5;
    std::size_t eval_workers = 0;     // 0 = one worker per hardware thread
    bool sentence_bleu = false;
    std::uint64_t seed = 0;           // split + parameter init + training
};

// Parses key=value lines ('#' comments and blank lines skipped) on top of the
// defaults. Unknown keys and malformed values raise data_error.
PipelineConfig config_from_text(const std::string& text);
std::string config_to_text(const PipelineConfig& cfg);

PipelineConfig load_config(const std::string& path);

} // namespace revsynth
