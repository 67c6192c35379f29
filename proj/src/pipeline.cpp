#include "revsynth/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "revsynth/decoding.hpp"
#include "revsynth/errors.hpp"
#include "revsynth/index_io.hpp"
#include "revsynth/snippets.hpp"

namespace revsynth {

namespace {

using nlohmann::json;

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw data_error("cannot open " + path + " for writing");
    for (const std::string& line : lines) out << line << "\n";
}

void warn(std::ostream* warnings, const std::string& message) {
    if (warnings) *warnings << message << "\n";
}

struct IndexDoc {
    std::string app_id;
    DocKind kind = DocKind::review;
    std::vector<std::string> tokens;
};

std::string doc_to_json(const IndexDoc& doc) {
    json j{{"app_id", doc.app_id},
           {"kind", doc.kind == DocKind::review ? "review" : "description"},
           {"tokens", doc.tokens}};
    return j.dump();
}

IndexDoc doc_from_json(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw data_error("malformed document line");
    IndexDoc doc;
    doc.app_id = j.at("app_id").get<std::string>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "review") {
        doc.kind = DocKind::review;
    } else if (kind == "description") {
        doc.kind = DocKind::description;
    } else {
        throw data_error("unknown document kind: " + kind);
    }
    doc.tokens = j.at("tokens").get<std::vector<std::string>>();
    return doc;
}

std::map<std::string, std::vector<std::string>> load_categories(const std::string& path) {
    std::map<std::string, std::vector<std::string>> out;
    for (const std::string& line : read_lines(path)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw data_error("malformed category line in " + path);
        out[j.at("app_id").get<std::string>()] = j.at("tokens").get<std::vector<std::string>>();
    }
    return out;
}

// encoded ids of one snippet, skipping empty token lists
void append_snippet(std::vector<std::vector<int>>& out, const std::vector<std::string>& tokens,
                    const Vocab& vocab, int limit) {
    if (tokens.empty()) return;
    out.push_back(encode_tokens(tokens, vocab, limit, false));
}

std::vector<int> response_body(const std::vector<int>& response_ids) {
    std::vector<int> body = strip_padding(response_ids);
    if (!body.empty() && body.back() == Vocab::kEosId) body.pop_back();
    return body;
}

TokenSeq ids_to_strings(const std::vector<int>& ids, const Vocab& vocab) {
    TokenSeq out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(vocab.token_of(id));
    return out;
}

struct LoadedModel {
    ParamStore store;
    ModelConfig model_cfg;
    AblationFlags flags;
};

LoadedModel load_checkpoint(const std::string& path) {
    auto [store, config_text] = ParamStore::load(path);
    LoadedModel out;
    out.store = std::move(store);
    out.model_cfg = model_config_from_text(config_text);
    out.flags = ablation_from_text(config_text);
    return out;
}

} // namespace

std::vector<ReviewResponsePair> load_pairs(const std::string& path) {
    std::vector<ReviewResponsePair> pairs;
    for (const std::string& line : read_lines(path)) {
        if (line.empty()) continue;
        pairs.push_back(pair_from_json(line));
    }
    return pairs;
}

Vocab load_vocab(const std::string& path) { return vocab_from_lines(read_lines(path)); }

PreprocessStats run_preprocess(const std::string& raw_path, const std::string& out_dir,
                               const PipelineConfig& cfg, std::ostream* warnings) {
    std::vector<std::string> lines = read_lines(raw_path);
    std::filesystem::create_directories(out_dir);
    PreprocessStats stats;

    struct CleanedReview {
        std::string app_id;
        int rating = 0;
        std::vector<std::string> tokens;
    };
    std::map<std::size_t, CleanedReview> reviews;  // by raw line index
    struct PendingResponse {
        std::size_t line = 0;
        std::string app_id;
        std::string link_id;
        std::vector<std::string> tokens;
    };
    std::vector<PendingResponse> responses;
    std::map<std::string, std::vector<std::string>> descriptions;
    std::map<std::string, std::vector<std::string>> categories;

    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        ++stats.records_read;
        std::string error;
        std::optional<RawRecord> record = parse_raw_record(lines[i], &error);
        if (!record) {
            ++stats.malformed;
            warn(warnings, "line " + std::to_string(i) + ": " + error);
            continue;
        }
        std::vector<std::string> tokens = normalize_text(record->text);
        std::optional<std::vector<std::string>> kept = mask_and_filter(tokens, record->kind);
        switch (record->kind) {
            case RecordKind::review:
                ++stats.reviews_seen;
                if (kept) {
                    ++stats.reviews_kept;
                    reviews[i] = {record->app_id, *record->rating, *kept};
                }
                break;
            case RecordKind::response:
                ++stats.responses_seen;
                if (kept) {
                    ++stats.responses_kept;
                    responses.push_back({i, record->app_id, *record->link_id, *kept});
                }
                break;
            case RecordKind::description:
                if (descriptions.count(record->app_id) > 0) {
                    warn(warnings, "line " + std::to_string(i) + ": duplicate description for " +
                                       record->app_id + ", keeping the first");
                } else if (kept) {
                    descriptions[record->app_id] = *kept;
                }
                break;
            case RecordKind::category:
                if (categories.count(record->app_id) > 0) {
                    warn(warnings, "line " + std::to_string(i) + ": duplicate category for " +
                                       record->app_id + ", keeping the first");
                } else if (kept) {
                    categories[record->app_id] = *kept;
                }
                break;
        }
    }

    // pair responses to reviews by raw line index
    std::vector<ReviewResponsePair> pairs;
    std::vector<CleanRecord> vocab_corpus;
    for (const auto& [line, review] : reviews) {
        (void)line;
        CleanRecord r;
        r.tokens = review.tokens;
        vocab_corpus.push_back(std::move(r));
    }
    for (const auto& [app, tokens] : descriptions) {
        (void)app;
        CleanRecord r;
        r.tokens = tokens;
        vocab_corpus.push_back(std::move(r));
    }
    for (const auto& [app, tokens] : categories) {
        (void)app;
        CleanRecord r;
        r.tokens = tokens;
        vocab_corpus.push_back(std::move(r));
    }

    struct PairSource {
        const CleanedReview* review;
        const PendingResponse* response;
    };
    std::vector<PairSource> sources;
    for (const PendingResponse& response : responses) {
        std::size_t review_line = 0;
        bool valid_link =
            !response.link_id.empty() && response.link_id.size() <= 18 &&
            response.link_id.find_first_not_of("0123456789") == std::string::npos;
        if (valid_link) review_line = std::stoull(response.link_id);
        auto it = valid_link ? reviews.find(review_line) : reviews.end();
        if (it == reviews.end()) {
            ++stats.pairs_dropped;
            warn(warnings, "line " + std::to_string(response.line) +
                               ": response links to a missing or rejected review (link_id=" +
                               response.link_id + ")");
            continue;
        }
        if (it->second.app_id != response.app_id) {
            ++stats.pairs_dropped;
            warn(warnings, "line " + std::to_string(response.line) +
                               ": response app does not match its review");
            continue;
        }
        sources.push_back({&it->second, &response});
        CleanRecord r;
        r.tokens = response.tokens;
        vocab_corpus.push_back(std::move(r));
    }

    Vocab vocab = build_vocab(vocab_corpus, cfg.vocab_cap);
    stats.vocab_size = vocab.size();

    for (const PairSource& source : sources) {
        CleanRecord review;
        review.tokens = source.review->tokens;
        review.app_id = source.review->app_id;
        review.kind = RecordKind::review;
        review.rating = source.review->rating;
        CleanRecord response;
        response.tokens = source.response->tokens;
        response.app_id = source.response->app_id;
        response.kind = RecordKind::response;
        auto cat = categories.find(source.review->app_id);
        const std::vector<std::string> empty;
        pairs.push_back(encode_pair(review, response,
                                    cat == categories.end() ? empty : cat->second, vocab,
                                    cfg.limits));
    }
    stats.pairs_kept = pairs.size();

    DatasetSplit split;
    if (!pairs.empty()) split = split_dataset(std::move(pairs), cfg.split_ratios, cfg.seed);
    stats.split_sizes = {split.train.size(), split.valid.size(), split.test.size()};

    // corpus directory
    write_lines(out_dir + "/vocab.txt", vocab_to_lines(vocab));
    auto write_pairs = [&](const std::string& name, const std::vector<ReviewResponsePair>& ps) {
        std::vector<std::string> out;
        out.reserve(ps.size());
        for (const ReviewResponsePair& p : ps) out.push_back(pair_to_json(p));
        write_lines(out_dir + "/" + name, out);
    };
    write_pairs("train.jsonl", split.train);
    write_pairs("valid.jsonl", split.valid);
    write_pairs("test.jsonl", split.test);

    std::vector<std::string> doc_lines;
    for (const auto& [line, review] : reviews) {
        (void)line;
        doc_lines.push_back(doc_to_json({review.app_id, DocKind::review, review.tokens}));
    }
    for (const auto& [app, tokens] : descriptions) {
        doc_lines.push_back(doc_to_json({app, DocKind::description, tokens}));
    }
    write_lines(out_dir + "/docs.jsonl", doc_lines);

    std::vector<std::string> category_lines;
    for (const auto& [app, tokens] : categories) {
        category_lines.push_back(json{{"app_id", app}, {"tokens", tokens}}.dump());
    }
    write_lines(out_dir + "/categories.jsonl", category_lines);

    return stats;
}

IndexStats run_index(const std::string& corpus_dir, const std::string& index_path) {
    std::vector<std::string> lines = read_lines(corpus_dir + "/docs.jsonl");
    InvertedIndex index;
    std::map<std::string, bool> app_has_description;
    std::uint32_t doc_id = 0;
    for (const std::string& line : lines) {
        if (line.empty()) continue;
        IndexDoc doc = doc_from_json(line);
        index.add_document(doc_id, doc.app_id, doc.kind, doc.tokens);
        ++doc_id;
        bool& has = app_has_description[doc.app_id];
        has = has || doc.kind == DocKind::description;
    }
    if (doc_id == 0) throw data_error("no documents to index in " + corpus_dir);
    index.freeze();
    save_index(index, index_path);

    IndexStats stats;
    stats.docs = index.doc_count();
    stats.terms = index.terms().size();
    stats.avgdl = index.avgdl();
    for (const auto& [app, has] : app_has_description) {
        if (!has) stats.apps_missing_description.push_back(app);
    }
    return stats;
}

std::vector<TrainExample> assemble_examples(const std::vector<ReviewResponsePair>& pairs,
                                            const InvertedIndex& index, const Vocab& vocab,
                                            const PipelineConfig& cfg,
                                            const AblationFlags& flags) {
    std::vector<TrainExample> examples;
    examples.reserve(pairs.size());
    for (const ReviewResponsePair& pair : pairs) {
        TrainExample ex;
        ex.review_ids = pair.review_ids;
        ex.category_ids = pair.category_ids;
        ex.rating = pair.rating;
        ex.target_ids = pair.response_ids;
        if (flags.use_reviews || flags.use_description) {
            RetrievedContext ctx =
                retrieve_context(index, cfg.bm25, pair.app_id, pair.review_tokens,
                                 cfg.review_snippets, static_cast<std::size_t>(cfg.limits.snippet));
            if (flags.use_reviews) {
                for (const Snippet& snip : ctx.review_snippets) {
                    append_snippet(ex.snippet_ids, snip.tokens, vocab, cfg.limits.snippet);
                }
            }
            if (flags.use_description && ctx.has_description) {
                append_snippet(ex.snippet_ids, ctx.description_snippet.tokens, vocab,
                               cfg.limits.snippet);
            }
        }
        examples.push_back(std::move(ex));
    }
    return examples;
}

TrainReport run_train(const std::string& corpus_dir, const std::string& index_path,
                      const std::string& checkpoint_path, const PipelineConfig& cfg,
                      const AblationFlags& flags, const std::string& log_path) {
    Vocab vocab = load_vocab(corpus_dir + "/vocab.txt");
    InvertedIndex index = load_index(index_path);
    std::vector<ReviewResponsePair> train_pairs = load_pairs(corpus_dir + "/train.jsonl");
    std::vector<ReviewResponsePair> valid_pairs = load_pairs(corpus_dir + "/valid.jsonl");

    PipelineConfig local = cfg;
    local.model.vocab_size = static_cast<std::size_t>(vocab.size());

    std::vector<TrainExample> train_set = assemble_examples(train_pairs, index, vocab, local, flags);
    std::vector<TrainExample> valid_set = assemble_examples(valid_pairs, index, vocab, local, flags);

    ParamStore store;
    Rng init(local.seed);
    Model::create_parameters(local.model, store, init);
    Model model(local.model, store);
    return train(model, train_set, valid_set, local.trainer, flags, checkpoint_path, log_path);
}

std::string run_generate(const std::string& corpus_dir, const std::string& index_path,
                         const std::string& checkpoint_path, const PipelineConfig& cfg,
                         const GenerateRequest& request) {
    Vocab vocab = load_vocab(corpus_dir + "/vocab.txt");
    InvertedIndex index = load_index(index_path);
    auto categories = load_categories(corpus_dir + "/categories.jsonl");
    LoadedModel loaded = load_checkpoint(checkpoint_path);
    if (loaded.model_cfg.vocab_size != static_cast<std::size_t>(vocab.size())) {
        throw data_error("checkpoint vocabulary size does not match the corpus vocabulary");
    }
    Model model(loaded.model_cfg, loaded.store);

    bool app_known = categories.count(request.app_id) > 0;
    if (!app_known) {
        for (const auto& [id, meta] : index.docs()) {
            (void)id;
            if (meta.app_id == request.app_id) {
                app_known = true;
                break;
            }
        }
    }
    if (!app_known) throw data_error("unknown app: " + request.app_id);

    std::vector<std::string> tokens = normalize_text(request.review_text);
    std::optional<std::vector<std::string>> kept = mask_and_filter(tokens, RecordKind::review);
    if (!kept) throw data_error("review rejected by preprocessing (too short or non-English)");

    std::vector<int> review_ids =
        encode_tokens(*kept, vocab, cfg.limits.review, false);
    std::vector<int> category_ids;
    auto cat = categories.find(request.app_id);
    if (cat != categories.end()) {
        category_ids = encode_tokens(cat->second, vocab, cfg.limits.category, false);
    }

    std::vector<std::vector<int>> snippet_ids;
    if (loaded.flags.use_reviews || loaded.flags.use_description) {
        RetrievedContext ctx =
            retrieve_context(index, cfg.bm25, request.app_id, *kept, cfg.review_snippets,
                             static_cast<std::size_t>(cfg.limits.snippet));
        if (loaded.flags.use_reviews) {
            for (const Snippet& snip : ctx.review_snippets) {
                append_snippet(snippet_ids, snip.tokens, vocab, cfg.limits.snippet);
            }
        }
        if (loaded.flags.use_description && ctx.has_description) {
            append_snippet(snippet_ids, ctx.description_snippet.tokens, vocab,
                           cfg.limits.snippet);
        }
    }

    BeamConfig beam;
    beam.beam_width = request.beam;
    beam.max_len = static_cast<std::size_t>(cfg.limits.response);
    std::vector<int> body = beam_search(model, review_ids, category_ids, request.rating,
                                        snippet_ids, loaded.flags, beam);
    return detokenize(ids_to_strings(body, vocab));
}

EvalReport run_evaluate(const std::string& corpus_dir, const std::string& index_path,
                        const std::string& checkpoint_path, const PipelineConfig& cfg,
                        const std::string& split, const std::string& report_path,
                        const std::string& tsv_path) {
    if (split != "train" && split != "valid" && split != "test") {
        throw data_error("unknown split: " + split);
    }
    if (cfg.beam_width == 0) throw data_error("beam width must be at least 1");
    Vocab vocab = load_vocab(corpus_dir + "/vocab.txt");
    InvertedIndex index = load_index(index_path);
    std::vector<ReviewResponsePair> pairs = load_pairs(corpus_dir + "/" + split + ".jsonl");
    LoadedModel loaded = load_checkpoint(checkpoint_path);
    if (loaded.model_cfg.vocab_size != static_cast<std::size_t>(vocab.size())) {
        throw data_error("checkpoint vocabulary size does not match the corpus vocabulary");
    }
    Model model(loaded.model_cfg, loaded.store);

    PipelineConfig local = cfg;
    local.model = loaded.model_cfg;
    std::vector<TrainExample> examples =
        assemble_examples(pairs, index, vocab, local, loaded.flags);

    std::vector<std::vector<int>> bodies(examples.size());
    std::size_t workers = cfg.eval_workers != 0
                              ? cfg.eval_workers
                              : std::max<std::size_t>(1, std::thread::hardware_concurrency());
    workers = std::min(workers, std::max<std::size_t>(1, examples.size()));
    std::atomic<std::size_t> next{0};
    auto decode_some = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= examples.size()) break;
            const TrainExample& ex = examples[i];
            if (cfg.beam_width <= 1) {
                bodies[i] = greedy_decode(model, ex.review_ids, ex.category_ids, ex.rating,
                                          ex.snippet_ids, loaded.flags,
                                          static_cast<std::size_t>(cfg.limits.response));
            } else {
                BeamConfig beam;
                beam.beam_width = cfg.beam_width;
                beam.max_len = static_cast<std::size_t>(cfg.limits.response);
                bodies[i] = beam_search(model, ex.review_ids, ex.category_ids, ex.rating,
                                        ex.snippet_ids, loaded.flags, beam);
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(decode_some);
    decode_some();
    for (std::thread& t : pool) t.join();

    std::vector<TokenSeq> candidates, references;
    candidates.reserve(examples.size());
    references.reserve(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        candidates.push_back(ids_to_strings(bodies[i], vocab));
        references.push_back(ids_to_strings(response_body(examples[i].target_ids), vocab));
    }

    EvalReport report = evaluate_corpus(candidates, references);
    if (cfg.sentence_bleu) report.bleu4 = bleu(candidates, references, 4, true);

    if (!report_path.empty()) {
        std::ofstream out(report_path, std::ios::trunc);
        if (!out) throw data_error("cannot write report " + report_path);
        out << eval_report_to_json(report) << "\n";
    }
    if (!tsv_path.empty()) {
        std::ofstream out(tsv_path, std::ios::trunc);
        if (!out) throw data_error("cannot write TSV " + tsv_path);
        out << "pair\trouge_l\tcandidate\treference\n";
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            out << i << "\t" << rouge_l({candidates[i]}, {references[i]}) << "\t"
                << detokenize(candidates[i]) << "\t" << detokenize(references[i]) << "\n";
        }
    }
    return report;
}

} // namespace revsynth
