#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "revsynth/model.hpp"

namespace revsynth {

struct TrainConfig {
    std::size_t batch_size = 128;
    std::size_t epochs = 25;
    double lr = 0.01;
    double tf_probability = 0.5;
    double clip_norm = 5.0;
    std::uint64_t seed = 0;
};

// One id-encoded training example with its retrieved snippet ids.
struct TrainExample {
    std::vector<int> review_ids;
    std::vector<int> category_ids;
    int rating = 0;
    std::vector<std::vector<int>> snippet_ids;
    std::vector<int> target_ids;
};

struct EpochStats {
    double train_loss = 0.0;
    double val_bleu4 = 0.0;
};

struct TrainReport {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0;
    std::string checkpoint_path;
};

// Position-mean negative log-likelihood of one example. distributions must
// align one-to-one with the non-pad prefix of target_ids; probabilities are
// floored at 1e-12 so the loss stays finite.
Var nll_loss(const std::vector<Var>& distributions, const std::vector<int>& target_ids);

// One training pass with the mixed feeding rule: at each step the decoder is
// fed ground truth with probability p_tf, otherwise its own previous argmax
// (ties toward the lower id). The loss always scores ground truth.
Var scheduled_decode_train(const Model& model, const TrainExample& ex, const AblationFlags& flags,
                           Rng& rng, double p_tf, RunMode mode);

// Greedy-decodes every example and scores corpus BLEU-4 against the targets.
double validation_bleu4(const Model& model, const std::vector<TrainExample>& examples,
                        const AblationFlags& flags);

// Full training loop: seeded epoch shuffles, per-batch clipped Adam steps,
// per-epoch validation BLEU-4, best-epoch checkpointing. Throws numeric_error
// when the loss stops being finite. log_path, when set, receives one JSON
// line per epoch.
TrainReport train(Model& model, const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& valid_set, const TrainConfig& cfg,
                  const AblationFlags& flags, const std::string& checkpoint_path,
                  const std::string& log_path = "");

} // namespace revsynth
