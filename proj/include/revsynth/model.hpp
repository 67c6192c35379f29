#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "revsynth/autodiff.hpp"
#include "revsynth/nn_ops.hpp"
#include "revsynth/params.hpp"
#include "revsynth/rng.hpp"

namespace revsynth {

enum class FusionMode { literal, weighted_columns };

FusionMode fusion_mode_from_string(const std::string& name);
std::string fusion_mode_to_string(FusionMode mode);

struct ModelConfig {
    std::size_t d = 128;          // hidden size
    std::size_t embed_dim = 128;  // token embedding width
    std::size_t layers = 2;
    double dropout = 0.2;
    std::size_t vocab_size = 0;
    FusionMode fusion_mode = FusionMode::literal;
};

std::string model_config_to_text(const ModelConfig& cfg);
ModelConfig model_config_from_text(const std::string& text);

// Which conditioning inputs the model actually uses; disabled ones are
// replaced by zero vectors (rating/category) or dropped snippets.
struct AblationFlags {
    bool use_rating = true;
    bool use_category = true;
    bool use_description = true;
    bool use_reviews = true;
};

std::string ablation_to_text(const AblationFlags& flags);
// Reads the use_* keys from key=value text, defaulting to enabled; other
// lines are ignored so model config and ablation text can share a file.
AblationFlags ablation_from_text(const std::string& text);

// Dropout switch for one pass; rng must be set when training with dropout > 0.
struct RunMode {
    bool training = false;
    Rng* rng = nullptr;
};

struct EncodedSequence {
    Var h_seq;                               // d x n, one column per non-pad token
    std::vector<std::pair<Var, Var>> finals; // (h, c) per layer
    std::size_t length = 0;
};

struct EncodedSnippets {
    Var h_seq;  // d x u; empty Var when total == 0
    std::vector<std::pair<std::size_t, std::size_t>> spans; // [begin, end) per snippet
    std::size_t total = 0;
};

struct SideEncodings {
    Var category; // length d; zero vector when ablated or no category
    Var rating;   // length d; zero vector when ablated
};

struct FusionState {
    Var similarity; // u x n
    Var z;          // length u, sums to 1
    Var h_hat;      // length d
    Var h_hat_cols; // d x u (tiled or column-scaled per fusion mode)
};

struct DecoderState {
    std::vector<std::pair<Var, Var>> layers; // (h, c) per layer
    bool initialized() const { return !layers.empty(); }
};

// Per-example quantities fixed across decoder steps.
struct DecodeContext {
    Var h_x;        // review states, d x n
    Var p_x;        // precomputed alignment projection of h_x
    Var h_hat_cols; // fused snippet columns, d x u (empty when u == 0)
    Var p_r;        // alignment projection of h_hat_cols
    Var category;
    Var rating;
    std::size_t u = 0;
    DecoderState init_state;
};

class Model {
public:
    Model(const ModelConfig& cfg, ParamStore& params);

    // Registers every parameter tensor in the store.
    static void create_parameters(const ModelConfig& cfg, ParamStore& store, Rng& rng);

    EncodedSequence encode_review(const std::vector<int>& ids, RunMode mode = {}) const;
    EncodedSnippets encode_snippets(const std::vector<std::vector<int>>& snippet_ids,
                                    RunMode mode = {}) const;
    SideEncodings encode_side(const std::vector<int>& category_ids, int rating,
                              const AblationFlags& flags, RunMode mode = {}) const;
    FusionState fuse_snippets(const Var& h_snip, const Var& h_review) const;

    DecodeContext prepare(const std::vector<int>& review_ids,
                          const std::vector<int>& category_ids, int rating,
                          const std::vector<std::vector<int>>& snippet_ids,
                          const AblationFlags& flags, RunMode mode = {}) const;

    // One decoder step: distribution over the vocabulary plus the next state.
    std::pair<Var, DecoderState> decode_step(const DecodeContext& ctx, const DecoderState& state,
                                             int y_prev_id, RunMode mode = {}) const;

    // Teacher-forced pass: one distribution per non-pad target position.
    std::vector<Var> forward(const std::vector<int>& review_ids,
                             const std::vector<int>& category_ids, int rating,
                             const std::vector<std::vector<int>>& snippet_ids,
                             const std::vector<int>& target_ids, const AblationFlags& flags,
                             RunMode mode = {}) const;

    const ModelConfig& config() const { return cfg_; }
    ParamStore& params() const { return *params_; }

private:
    EncodedSequence encode_with(const std::string& prefix, const std::vector<int>& ids,
                                RunMode mode) const;
    Var zero_vec() const;

    ModelConfig cfg_;
    ParamStore* params_;
};

// Strips trailing padding ids; returns the meaningful prefix.
std::vector<int> strip_padding(const std::vector<int>& ids);

} // namespace revsynth
