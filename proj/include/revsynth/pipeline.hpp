#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "revsynth/config.hpp"
#include "revsynth/corpus.hpp"
#include "revsynth/index.hpp"
#include "revsynth/metrics.hpp"
#include "revsynth/model.hpp"
#include "revsynth/training.hpp"

namespace revsynth {

// Corpus-directory layout produced by preprocessing and consumed everywhere
// downstream: vocab.txt, train/valid/test.jsonl, docs.jsonl, categories.jsonl.

struct PreprocessStats {
    std::size_t records_read = 0;
    std::size_t malformed = 0;
    std::size_t reviews_seen = 0;
    std::size_t reviews_kept = 0;
    std::size_t responses_seen = 0;
    std::size_t responses_kept = 0;
    std::size_t pairs_kept = 0;
    std::size_t pairs_dropped = 0;
    int vocab_size = 0;
    std::array<std::size_t, 3> split_sizes{};
};

// Reads raw JSON-lines records, cleans and filters them, pairs responses to
// reviews via link_id (the 0-based line index of the paired review), builds
// the vocabulary, splits pairs, and writes the corpus directory. Malformed
// or rejected records are skipped with a note to `warnings` when given.
PreprocessStats run_preprocess(const std::string& raw_path, const std::string& out_dir,
                               const PipelineConfig& cfg, std::ostream* warnings = nullptr);

struct IndexStats {
    std::uint32_t docs = 0;
    std::size_t terms = 0;
    double avgdl = 0.0;
    std::vector<std::string> apps_missing_description;
};

// Builds the frozen inverted index over docs.jsonl (doc id = line number)
// and persists it to index_path.
IndexStats run_index(const std::string& corpus_dir, const std::string& index_path);

// Turns encoded pairs into training examples: per pair, retrieves snippets
// for the review from the index (ranked review snippets, then the
// description snippet) and encodes them. Ablation flags drop the
// corresponding inputs at assembly time.
std::vector<TrainExample> assemble_examples(const std::vector<ReviewResponsePair>& pairs,
                                            const InvertedIndex& index, const Vocab& vocab,
                                            const PipelineConfig& cfg,
                                            const AblationFlags& flags);

// Loads the corpus and index, trains per cfg, and writes the best checkpoint.
TrainReport run_train(const std::string& corpus_dir, const std::string& index_path,
                      const std::string& checkpoint_path, const PipelineConfig& cfg,
                      const AblationFlags& flags, const std::string& log_path = "");

struct GenerateRequest {
    std::string review_text;
    std::string app_id;
    int rating = 3;
    std::size_t beam = 5;
};

// Full answer path for one review: preprocessing, retrieval, beam decoding,
// detokenization. Architecture and ablation flags come from the checkpoint.
std::string run_generate(const std::string& corpus_dir, const std::string& index_path,
                         const std::string& checkpoint_path, const PipelineConfig& cfg,
                         const GenerateRequest& request);

// Decodes every pair of the chosen split ("train"/"valid"/"test") in
// parallel workers with deterministic ordering and scores the corpus.
// Writes the JSON report to report_path and a per-pair TSV to tsv_path when
// the paths are non-empty.
EvalReport run_evaluate(const std::string& corpus_dir, const std::string& index_path,
                        const std::string& checkpoint_path, const PipelineConfig& cfg,
                        const std::string& split, const std::string& report_path = "",
                        const std::string& tsv_path = "");

// Shared helpers for commands and tests.
std::vector<ReviewResponsePair> load_pairs(const std::string& path);
Vocab load_vocab(const std::string& path);

} // namespace revsynth
