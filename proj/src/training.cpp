#include "revsynth/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "revsynth/corpus.hpp"
#include "revsynth/decoding.hpp"
#include "revsynth/errors.hpp"
#include "revsynth/metrics.hpp"

namespace revsynth {

namespace {

int argmax_id(const Var& dist) {
    std::size_t best = 0;
    double best_p = dist->value.data[0];
    for (std::size_t i = 1; i < dist->value.size(); ++i) {
        if (dist->value.data[i] > best_p) {
            best_p = dist->value.data[i];
            best = i;
        }
    }
    return static_cast<int>(best);
}

TokenSeq ids_to_tokens(const std::vector<int>& ids) {
    TokenSeq out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(std::to_string(id));
    return out;
}

// reference body: padding stripped, trailing <eos> removed
std::vector<int> reference_body(const std::vector<int>& target_ids) {
    std::vector<int> body = strip_padding(target_ids);
    if (!body.empty() && body.back() == Vocab::kEosId) body.pop_back();
    return body;
}

void check_target_range(const std::vector<int>& targets, std::size_t vocab) {
    for (int id : targets) {
        if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
            throw data_error("target id " + std::to_string(id) + " outside the vocabulary");
        }
    }
}

} // namespace

Var nll_loss(const std::vector<Var>& distributions, const std::vector<int>& target_ids) {
    std::vector<int> targets = strip_padding(target_ids);
    if (targets.empty()) throw data_error("loss needs at least one target token");
    if (distributions.size() != targets.size()) {
        throw data_error("distribution count does not match target length");
    }
    for (std::size_t t = 0; t < targets.size(); ++t) {
        if (targets[t] < 0 || static_cast<std::size_t>(targets[t]) >= distributions[t]->value.size()) {
            throw data_error("target id " + std::to_string(targets[t]) +
                             " outside the distribution");
        }
    }
    std::vector<Var> terms;
    terms.reserve(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        terms.push_back(
            scale(pick_log(distributions[t], static_cast<std::size_t>(targets[t])), -1.0));
    }
    return scale(add_n(terms), 1.0 / static_cast<double>(targets.size()));
}

Var scheduled_decode_train(const Model& model, const TrainExample& ex, const AblationFlags& flags,
                           Rng& rng, double p_tf, RunMode mode) {
    if (p_tf < 0.0 || p_tf > 1.0) throw data_error("teacher-forcing probability must be in [0,1]");
    std::vector<int> targets = strip_padding(ex.target_ids);
    if (targets.empty()) throw data_error("cannot train on an empty target");
    check_target_range(targets, model.config().vocab_size);

    DecodeContext ctx =
        model.prepare(ex.review_ids, ex.category_ids, ex.rating, ex.snippet_ids, flags, mode);
    DecoderState state = ctx.init_state;
    std::vector<Var> terms;
    terms.reserve(targets.size());
    int y_prev = Vocab::kSosId;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        auto [dist, next] = model.decode_step(ctx, state, y_prev, mode);
        terms.push_back(
            scale(pick_log(dist, static_cast<std::size_t>(targets[t])), -1.0));
        y_prev = rng.bernoulli(p_tf) ? targets[t] : argmax_id(dist);
        state = std::move(next);
    }
    return scale(add_n(terms), 1.0 / static_cast<double>(targets.size()));
}

double validation_bleu4(const Model& model, const std::vector<TrainExample>& examples,
                        const AblationFlags& flags) {
    std::vector<TokenSeq> candidates, references;
    candidates.reserve(examples.size());
    references.reserve(examples.size());
    for (const TrainExample& ex : examples) {
        std::vector<int> decoded = greedy_decode(model, ex.review_ids, ex.category_ids, ex.rating,
                                                 ex.snippet_ids, flags);
        candidates.push_back(ids_to_tokens(decoded));
        references.push_back(ids_to_tokens(reference_body(ex.target_ids)));
    }
    return bleu(candidates, references, 4);
}

TrainReport train(Model& model, const std::vector<TrainExample>& train_set,
                  const std::vector<TrainExample>& valid_set, const TrainConfig& cfg,
                  const AblationFlags& flags, const std::string& checkpoint_path,
                  const std::string& log_path) {
    if (train_set.empty() || valid_set.empty()) {
        throw data_error("training needs non-empty train and validation splits");
    }
    if (cfg.batch_size == 0 || cfg.epochs == 0) throw data_error("batch size and epochs must be positive");
    if (cfg.lr <= 0.0 || cfg.clip_norm <= 0.0) throw data_error("lr and clip_norm must be positive");
    if (cfg.tf_probability < 0.0 || cfg.tf_probability > 1.0) {
        throw data_error("teacher-forcing probability must be in [0,1]");
    }

    ParamStore& store = model.params();
    AdamConfig adam;
    adam.lr = cfg.lr;
    Rng shuffle_rng(cfg.seed);
    Rng sched_rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);

    std::ofstream log;
    if (!log_path.empty()) {
        log.open(log_path, std::ios::trunc);
        if (!log) throw data_error("cannot open training log " + log_path);
    }

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainReport report;
    report.checkpoint_path = checkpoint_path;
    double best_bleu = -1.0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t batch = std::min(cfg.batch_size, order.size() - start);
            store.zero_grads();
            for (std::size_t i = 0; i < batch; ++i) {
                const TrainExample& ex = train_set[order[start + i]];
                Var loss = scheduled_decode_train(model, ex, flags, sched_rng,
                                                  cfg.tf_probability,
                                                  RunMode{true, &sched_rng});
                double value = loss->value.data[0];
                if (!std::isfinite(value)) {
                    throw numeric_error("training loss diverged at epoch " +
                                        std::to_string(epoch + 1));
                }
                loss_sum += value;
                ++seen;
                backward(loss, 1.0 / static_cast<double>(batch));
            }
            store.clip_gradients(cfg.clip_norm);
            store.adam_step(adam);
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(seen);
        stats.val_bleu4 = validation_bleu4(model, valid_set, flags);
        report.epochs.push_back(stats);
        if (stats.val_bleu4 > best_bleu) {
            best_bleu = stats.val_bleu4;
            report.best_epoch = epoch;
            store.save(checkpoint_path,
                       model_config_to_text(model.config()) + ablation_to_text(flags));
        }
        if (log.is_open()) {
            nlohmann::ordered_json line;
            line["epoch"] = epoch + 1;
            line["loss"] = stats.train_loss;
            line["val_bleu"] = stats.val_bleu4;
            log << line.dump() << "\n";
        }
    }
    return report;
}

} // namespace revsynth
