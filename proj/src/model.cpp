#include "revsynth/model.hpp"

#include <map>
#include <sstream>

#include "revsynth/corpus.hpp"
#include "revsynth/errors.hpp"

namespace revsynth {

namespace {

void validate(const ModelConfig& cfg) {
    if (cfg.d == 0 || cfg.embed_dim == 0) throw data_error("model sizes must be positive");
    if (cfg.layers == 0) throw data_error("model needs at least one layer");
    if (cfg.vocab_size == 0) throw data_error("model vocab size not set");
    if (cfg.dropout < 0.0 || cfg.dropout >= 1.0) throw data_error("dropout must be in [0,1)");
}

Var maybe_dropout(const Var& v, const ModelConfig& cfg, RunMode mode) {
    if (!mode.training || cfg.dropout == 0.0) return v;
    if (mode.rng == nullptr) throw data_error("training pass needs an rng for dropout");
    return dropout(v, cfg.dropout, *mode.rng);
}

std::string layer_name(const std::string& prefix, std::size_t layer, const char* leaf) {
    return prefix + ".l" + std::to_string(layer) + "." + leaf;
}

} // namespace

FusionMode fusion_mode_from_string(const std::string& name) {
    if (name == "literal") return FusionMode::literal;
    if (name == "weighted_columns") return FusionMode::weighted_columns;
    throw data_error("unknown fusion mode: " + name);
}

std::string fusion_mode_to_string(FusionMode mode) {
    return mode == FusionMode::literal ? "literal" : "weighted_columns";
}

std::string model_config_to_text(const ModelConfig& cfg) {
    std::ostringstream out;
    out << "d=" << cfg.d << "\n";
    out << "embed_dim=" << cfg.embed_dim << "\n";
    out << "layers=" << cfg.layers << "\n";
    out << "dropout=" << cfg.dropout << "\n";
    out << "vocab_size=" << cfg.vocab_size << "\n";
    out << "fusion_mode=" << fusion_mode_to_string(cfg.fusion_mode) << "\n";
    return out.str();
}

ModelConfig model_config_from_text(const std::string& text) {
    ModelConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw data_error("bad model config line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    try {
        cfg.d = std::stoul(kv.at("d"));
        cfg.embed_dim = std::stoul(kv.at("embed_dim"));
        cfg.layers = std::stoul(kv.at("layers"));
        cfg.dropout = std::stod(kv.at("dropout"));
        cfg.vocab_size = std::stoul(kv.at("vocab_size"));
        cfg.fusion_mode = fusion_mode_from_string(kv.at("fusion_mode"));
    } catch (const std::out_of_range&) {
        throw data_error("model config text is missing a field");
    } catch (const std::invalid_argument&) {
        throw data_error("model config text has a malformed number");
    }
    validate(cfg);
    return cfg;
}

std::string ablation_to_text(const AblationFlags& flags) {
    std::ostringstream out;
    out << "use_rating=" << (flags.use_rating ? 1 : 0) << "\n";
    out << "use_category=" << (flags.use_category ? 1 : 0) << "\n";
    out << "use_description=" << (flags.use_description ? 1 : 0) << "\n";
    out << "use_reviews=" << (flags.use_reviews ? 1 : 0) << "\n";
    return out.str();
}

AblationFlags ablation_from_text(const std::string& text) {
    AblationFlags flags;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        bool value = line.substr(eq + 1) != "0";
        if (key == "use_rating") flags.use_rating = value;
        else if (key == "use_category") flags.use_category = value;
        else if (key == "use_description") flags.use_description = value;
        else if (key == "use_reviews") flags.use_reviews = value;
    }
    return flags;
}

Model::Model(const ModelConfig& cfg, ParamStore& params) : cfg_(cfg), params_(&params) {
    validate(cfg);
}

void Model::create_parameters(const ModelConfig& cfg, ParamStore& store, Rng& rng) {
    validate(cfg);
    const std::size_t d = cfg.d, e = cfg.embed_dim;
    store.create("embed", {cfg.vocab_size, e}, rng);
    store.create("rating_table", {5, d}, rng);

    auto lstm_stack = [&](const std::string& prefix, std::size_t input_dim) {
        for (std::size_t l = 0; l < cfg.layers; ++l) {
            std::size_t in = l == 0 ? input_dim : d;
            store.create(layer_name(prefix, l, "w"), {4 * d, in + d}, rng);
            store.create(layer_name(prefix, l, "b"), {4 * d}, rng);
        }
    };
    lstm_stack("enc_rev", e);
    lstm_stack("enc_snip", e);
    lstm_stack("enc_cat", e);
    lstm_stack("dec", e + 4 * d);  // emb + c_x + c_r + category + rating

    store.create("fusion.w", {3 * d}, rng);
    for (const char* att : {"att_x", "att_r"}) {
        store.create(std::string(att) + ".w1", {d, d}, rng);
        store.create(std::string(att) + ".w2", {d, d}, rng);
        store.create(std::string(att) + ".v", {d}, rng);
    }
    store.create("out.w", {cfg.vocab_size, 3 * d}, rng);
    store.create("out.b", {cfg.vocab_size}, rng);
}

std::vector<int> strip_padding(const std::vector<int>& ids) {
    std::size_t end = ids.size();
    while (end > 0 && ids[end - 1] == Vocab::kPadId) --end;
    return std::vector<int>(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(end));
}

Var Model::zero_vec() const { return make_var(Tensor({cfg_.d})); }

EncodedSequence Model::encode_with(const std::string& prefix, const std::vector<int>& ids,
                                   RunMode mode) const {
    std::vector<int> tokens = strip_padding(ids);
    if (tokens.empty()) throw data_error("cannot encode an empty sequence");

    Var table = params_->get("embed");
    std::vector<Var> inputs;
    inputs.reserve(tokens.size());
    for (int id : tokens) {
        if (id < 0 || static_cast<std::size_t>(id) >= cfg_.vocab_size) {
            throw data_error("token id out of vocabulary range");
        }
        inputs.push_back(embed(table, static_cast<std::size_t>(id)));
    }

    EncodedSequence out;
    out.length = tokens.size();
    std::vector<Var> layer_out;
    for (std::size_t l = 0; l < cfg_.layers; ++l) {
        Var w = params_->get(layer_name(prefix, l, "w"));
        Var b = params_->get(layer_name(prefix, l, "b"));
        Var h = make_var(Tensor({cfg_.d}));
        Var c = make_var(Tensor({cfg_.d}));
        layer_out.clear();
        layer_out.reserve(inputs.size());
        for (const Var& x : inputs) {
            auto [h2, c2] = lstm_cell(x, h, c, w, b);
            h = h2;
            c = c2;
            layer_out.push_back(h2);
        }
        out.finals.emplace_back(h, c);
        if (l + 1 < cfg_.layers) {
            // inter-layer dropout on the sequence fed upward, not on the
            // recurrent path
            inputs.clear();
            for (const Var& h_t : layer_out) inputs.push_back(maybe_dropout(h_t, cfg_, mode));
        }
    }
    out.h_seq = stack_cols(layer_out);
    return out;
}

EncodedSequence Model::encode_review(const std::vector<int>& ids, RunMode mode) const {
    return encode_with("enc_rev", ids, mode);
}

EncodedSnippets Model::encode_snippets(const std::vector<std::vector<int>>& snippet_ids,
                                       RunMode mode) const {
    EncodedSnippets out;
    std::vector<Var> blocks;
    for (const auto& ids : snippet_ids) {
        std::vector<int> tokens = strip_padding(ids);
        if (tokens.empty()) continue;
        EncodedSequence enc = encode_with("enc_snip", tokens, mode);
        out.spans.emplace_back(out.total, out.total + enc.length);
        out.total += enc.length;
        blocks.push_back(enc.h_seq);
    }
    if (out.total == 0) return out;  // u = 0 sentinel, fusion bypassed
    out.h_seq = blocks.size() == 1 ? blocks[0] : concat_cols(blocks);
    return out;
}

SideEncodings Model::encode_side(const std::vector<int>& category_ids, int rating,
                                 const AblationFlags& flags, RunMode mode) const {
    SideEncodings out;
    std::vector<int> cat = strip_padding(category_ids);
    if (flags.use_category && !cat.empty()) {
        out.category = encode_with("enc_cat", cat, mode).finals.back().first;
    } else {
        out.category = zero_vec();
    }
    if (flags.use_rating) {
        if (rating < 1 || rating > 5) throw data_error("rating must be in 1..5");
        out.rating = embed(params_->get("rating_table"), static_cast<std::size_t>(rating - 1));
    } else {
        out.rating = zero_vec();
    }
    return out;
}

FusionState Model::fuse_snippets(const Var& h_snip, const Var& h_review) const {
    if (!h_snip || h_snip->value.cols() == 0) throw data_error("fusion needs snippet columns");
    if (!h_review || h_review->value.cols() == 0) throw data_error("fusion needs review columns");
    FusionState out;
    out.similarity = similarity_matrix(h_snip, h_review, params_->get("fusion.w"));
    out.z = softmax_op(rowmax(out.similarity));
    out.h_hat = matvec(h_snip, out.z);
    if (cfg_.fusion_mode == FusionMode::literal) {
        out.h_hat_cols = tile_cols(out.h_hat, h_snip->value.cols());
    } else {
        out.h_hat_cols = scale_cols(h_snip, out.z);
    }
    return out;
}

DecodeContext Model::prepare(const std::vector<int>& review_ids,
                             const std::vector<int>& category_ids, int rating,
                             const std::vector<std::vector<int>>& snippet_ids,
                             const AblationFlags& flags, RunMode mode) const {
    DecodeContext ctx;
    EncodedSequence review = encode_review(review_ids, mode);
    ctx.h_x = review.h_seq;
    ctx.p_x = matmul(params_->get("att_x.w2"), ctx.h_x);
    ctx.init_state.layers = review.finals;

    SideEncodings side = encode_side(category_ids, rating, flags, mode);
    ctx.category = side.category;
    ctx.rating = side.rating;

    EncodedSnippets snips = encode_snippets(snippet_ids, mode);
    ctx.u = snips.total;
    if (snips.total > 0) {
        FusionState fusion = fuse_snippets(snips.h_seq, ctx.h_x);
        ctx.h_hat_cols = fusion.h_hat_cols;
        ctx.p_r = matmul(params_->get("att_r.w2"), ctx.h_hat_cols);
    }
    return ctx;
}

std::pair<Var, DecoderState> Model::decode_step(const DecodeContext& ctx,
                                                const DecoderState& state, int y_prev_id,
                                                RunMode mode) const {
    if (!state.initialized()) throw data_error("decoder state not initialized");
    if (state.layers.size() != cfg_.layers) throw data_error("decoder state layer mismatch");
    if (y_prev_id < 0 || static_cast<std::size_t>(y_prev_id) >= cfg_.vocab_size) {
        throw data_error("previous token id out of vocabulary range");
    }

    Var h_query = state.layers.back().first;
    Attention att_x =
        attend(ctx.h_x, ctx.p_x, h_query, params_->get("att_x.w1"), params_->get("att_x.v"));
    Var c_x = att_x.context;
    Var c_r;
    if (ctx.u > 0) {
        Attention att_r = attend(ctx.h_hat_cols, ctx.p_r, h_query, params_->get("att_r.w1"),
                                 params_->get("att_r.v"));
        c_r = att_r.context;
    } else {
        c_r = make_var(Tensor({cfg_.d}));  // zero context without snippets
    }

    Var emb = embed(params_->get("embed"), static_cast<std::size_t>(y_prev_id));
    Var input = concat({emb, c_x, c_r, ctx.category, ctx.rating});

    DecoderState next;
    next.layers.reserve(cfg_.layers);
    Var x = input;
    for (std::size_t l = 0; l < cfg_.layers; ++l) {
        Var w = params_->get(layer_name("dec", l, "w"));
        Var b = params_->get(layer_name("dec", l, "b"));
        auto [h2, c2] = lstm_cell(x, state.layers[l].first, state.layers[l].second, w, b);
        next.layers.emplace_back(h2, c2);
        if (l + 1 < cfg_.layers) x = maybe_dropout(h2, cfg_, mode);
    }

    Var features = concat({next.layers.back().first, c_x, c_r});
    Var logits = add(matvec(params_->get("out.w"), features), params_->get("out.b"));
    return {softmax_op(logits), std::move(next)};
}

std::vector<Var> Model::forward(const std::vector<int>& review_ids,
                                const std::vector<int>& category_ids, int rating,
                                const std::vector<std::vector<int>>& snippet_ids,
                                const std::vector<int>& target_ids, const AblationFlags& flags,
                                RunMode mode) const {
    std::vector<int> targets = strip_padding(target_ids);
    if (targets.empty()) throw data_error("cannot train on an empty target");

    DecodeContext ctx = prepare(review_ids, category_ids, rating, snippet_ids, flags, mode);
    DecoderState state = ctx.init_state;
    std::vector<Var> distributions;
    distributions.reserve(targets.size());
    int y_prev = Vocab::kSosId;
    for (int target : targets) {
        auto [dist, next] = decode_step(ctx, state, y_prev, mode);
        distributions.push_back(dist);
        state = std::move(next);
        y_prev = target;  // teacher forcing
    }
    return distributions;
}

} // namespace revsynth
