#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "revsynth/config.hpp"
#include "revsynth/errors.hpp"
#include "revsynth/pipeline.hpp"
#include "revsynth/synthgen.hpp"

namespace {

using namespace revsynth;

// Flags shared by the pipeline subcommands. The config file is applied
// first; any flag given on the command line overrides it.
struct CommonOptions {
    std::string config_path;
    std::string index_path = "index.bin";
    std::string checkpoint = "checkpoint.bin";
    std::uint64_t seed = 0;
    std::size_t beam = 0;
    bool no_rating = false;
    bool no_category = false;
    bool no_description = false;
    bool no_reviews = false;
    std::string fusion_mode;

    CLI::Option* seed_opt = nullptr;
    CLI::Option* beam_opt = nullptr;
    CLI::Option* fusion_opt = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "key=value configuration file");
    cmd->add_option("--index-path", opts.index_path, "inverted index file");
    cmd->add_option("--checkpoint", opts.checkpoint, "model checkpoint file");
    opts.seed_opt = cmd->add_option("--seed", opts.seed, "seed for split, init, and training");
    opts.beam_opt = cmd->add_option("--beam", opts.beam, "beam width for decoding");
    cmd->add_flag("--no-rating", opts.no_rating, "ablate the rating input");
    cmd->add_flag("--no-category", opts.no_category, "ablate the category input");
    cmd->add_flag("--no-description", opts.no_description, "ablate description snippets");
    cmd->add_flag("--no-reviews", opts.no_reviews, "ablate review snippets");
    opts.fusion_opt =
        cmd->add_option("--fusion-mode", opts.fusion_mode, "snippet fusion: literal or weighted_columns");
}

PipelineConfig resolve_config(const CommonOptions& opts) {
    PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
    if (opts.seed_opt && opts.seed_opt->count() > 0) {
        cfg.seed = opts.seed;
        cfg.trainer.seed = opts.seed;
    }
    if (opts.beam_opt && opts.beam_opt->count() > 0) cfg.beam_width = opts.beam;
    if (opts.fusion_opt && opts.fusion_opt->count() > 0) {
        cfg.model.fusion_mode = fusion_mode_from_string(opts.fusion_mode);
    }
    return cfg;
}

AblationFlags resolve_flags(const CommonOptions& opts) {
    AblationFlags flags;
    flags.use_rating = !opts.no_rating;
    flags.use_category = !opts.no_category;
    flags.use_description = !opts.no_description;
    flags.use_reviews = !opts.no_reviews;
    return flags;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Review response synthesis pipeline"};
    app.require_subcommand(1);

    // preprocess
    auto* pre = app.add_subcommand("preprocess", "Clean raw records and write the corpus dir");
    std::string raw_path, out_dir = "corpus";
    pre->add_option("input", raw_path, "raw JSON-lines file")->required();
    pre->add_option("--out-dir", out_dir, "corpus output directory");
    CommonOptions pre_opts;
    add_common_flags(pre, pre_opts);

    // index
    auto* idx = app.add_subcommand("index", "Build the inverted index from the corpus dir");
    std::string idx_corpus = "corpus";
    idx->add_option("--corpus-dir", idx_corpus, "corpus directory");
    CommonOptions idx_opts;
    add_common_flags(idx, idx_opts);

    // train
    auto* trn = app.add_subcommand("train", "Train the generator and write the best checkpoint");
    std::string trn_corpus = "corpus";
    std::string trn_log;
    trn->add_option("--corpus-dir", trn_corpus, "corpus directory");
    trn->add_option("--log", trn_log, "JSON-lines epoch log");
    CommonOptions trn_opts;
    add_common_flags(trn, trn_opts);

    // generate
    auto* gen = app.add_subcommand("generate", "Synthesize a response for one review");
    std::string gen_corpus = "corpus", gen_review, gen_app;
    int gen_rating = 3;
    gen->add_option("review", gen_review, "review text")->required();
    gen->add_option("--app", gen_app, "app id")->required();
    gen->add_option("--corpus-dir", gen_corpus, "corpus directory");
    gen->add_option("--rating", gen_rating, "review star rating 1..5");
    CommonOptions gen_opts;
    add_common_flags(gen, gen_opts);

    // evaluate
    auto* evl = app.add_subcommand("evaluate", "Decode a split and score BLEU/ROUGE");
    std::string evl_corpus = "corpus", evl_split = "test", evl_out, evl_tsv;
    evl->add_option("--corpus-dir", evl_corpus, "corpus directory");
    evl->add_option("--split", evl_split, "train, valid, or test");
    evl->add_option("--out", evl_out, "JSON report path");
    evl->add_option("--tsv", evl_tsv, "per-pair TSV path");
    CommonOptions evl_opts;
    add_common_flags(evl, evl_opts);

    // synthgen
    auto* syn = app.add_subcommand("synthgen", "Write a synthetic raw corpus");
    std::string syn_out = "synthetic.jsonl";
    SynthgenConfig syn_cfg;
    syn->add_option("output", syn_out, "output JSON-lines file");
    syn->add_option("--apps", syn_cfg.apps, "number of apps");
    syn->add_option("--reviews", syn_cfg.reviews_per_app, "paired reviews per app");
    syn->add_option("--facts", syn_cfg.fact_vocab, "fact token pool size");
    syn->add_option("--tips", syn_cfg.tips_per_app, "unpaired tip reviews per app");
    syn->add_option("--seed", syn_cfg.seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (pre->parsed()) {
            PipelineConfig cfg = resolve_config(pre_opts);
            PreprocessStats stats = run_preprocess(raw_path, out_dir, cfg, &std::cerr);
            std::cout << "records " << stats.records_read << ", malformed " << stats.malformed
                      << "\n"
                      << "reviews kept " << stats.reviews_kept << "/" << stats.reviews_seen
                      << ", responses kept " << stats.responses_kept << "/"
                      << stats.responses_seen << "\n"
                      << "pairs kept " << stats.pairs_kept << ", dropped " << stats.pairs_dropped
                      << "\n"
                      << "vocab " << stats.vocab_size << ", split " << stats.split_sizes[0] << "/"
                      << stats.split_sizes[1] << "/" << stats.split_sizes[2] << "\n";
        } else if (idx->parsed()) {
            IndexStats stats = run_index(idx_corpus, idx_opts.index_path);
            for (const std::string& broken_app : stats.apps_missing_description) {
                std::cerr << "app without description: " << broken_app << "\n";
            }
            std::cout << "docs " << stats.docs << ", terms " << stats.terms << ", avgdl "
                      << stats.avgdl << "\n";
        } else if (trn->parsed()) {
            PipelineConfig cfg = resolve_config(trn_opts);
            AblationFlags flags = resolve_flags(trn_opts);
            TrainReport report =
                run_train(trn_corpus, trn_opts.index_path, trn_opts.checkpoint, cfg, flags,
                          trn_log);
            for (std::size_t e = 0; e < report.epochs.size(); ++e) {
                std::cout << "epoch " << e + 1 << ": loss " << report.epochs[e].train_loss
                          << ", val_bleu " << report.epochs[e].val_bleu4 << "\n";
            }
            std::cout << "best epoch " << report.best_epoch + 1 << ", checkpoint "
                      << report.checkpoint_path << "\n";
        } else if (gen->parsed()) {
            PipelineConfig cfg = resolve_config(gen_opts);
            GenerateRequest request;
            request.review_text = gen_review;
            request.app_id = gen_app;
            request.rating = gen_rating;
            request.beam = cfg.beam_width;
            std::cout << run_generate(gen_corpus, gen_opts.index_path, gen_opts.checkpoint, cfg,
                                      request)
                      << "\n";
        } else if (evl->parsed()) {
            PipelineConfig cfg = resolve_config(evl_opts);
            EvalReport report = run_evaluate(evl_corpus, evl_opts.index_path, evl_opts.checkpoint,
                                             cfg, evl_split, evl_out, evl_tsv);
            std::cout << eval_report_to_json(report) << "\n";
        } else if (syn->parsed()) {
            write_raw_records(generate_corpus(syn_cfg), syn_out);
            std::cout << "wrote " << syn_out << "\n";
        }
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
