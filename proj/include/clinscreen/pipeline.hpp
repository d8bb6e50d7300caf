#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "clinscreen/corpus.hpp"
#include "clinscreen/eval.hpp"
#include "clinscreen/features.hpp"
#include "clinscreen/llm.hpp"
#include "clinscreen/multilabel.hpp"
#include "clinscreen/summarize.hpp"
#include "clinscreen/textprep.hpp"

namespace clinscreen {

inline constexpr int kArtifactFormatVersion = 1;

// User-facing rejection text; the service returns it with status 422.
inline constexpr const char* kGuardMessage =
    "Input does not look like clinical text; please pass the actual clinical note.";

// Feature blocks assembled per document, in the order listed.
enum class FeaturePart { count, tfidf, ner, embed_mean, embed_tfidf };

std::string to_string(FeaturePart part);
FeaturePart feature_part_from_string(const std::string& name);

struct TrainOptions {
  MultiLabelStrategy strategy = MultiLabelStrategy::classifier_chain;
  bool multi_output = false;  // report binary relevance under its alias name
  LearnerSpec learner;        // defaults to a forest
  std::vector<FeaturePart> parts = {FeaturePart::count, FeaturePart::ner};
  std::vector<std::size_t> chain_order;  // empty = canonical label order
  PreprocessConfig preprocess;
  int ngram_lo = 1;
  int ngram_hi = 2;
  std::size_t min_df = 1;
  double test_fraction = 0.25;  // of the input corpus, held out for the report
  std::optional<std::filesystem::path> embedding_file;  // needed by embed parts
  std::optional<std::filesystem::path> gazetteer_file;  // default: built-in
  std::uint64_t seed = 0;
};

// A fitted end-to-end pipeline: preprocessing flags, feature spec, and the
// multi-label model, plus the provenance needed to persist it.
struct TrainedPipeline {
  PreprocessConfig preprocess;
  std::vector<FeaturePart> parts;
  int ngram_lo = 1;
  int ngram_hi = 2;
  std::size_t min_df = 1;
  Vocabulary vocab;          // fitted when count/tfidf parts are present
  Gazetteer gazetteer;
  std::string gazetteer_source = "builtin";  // or a file path
  std::optional<std::string> embedding_source;
  EmbeddingTable embeddings;  // loaded when embed parts are present
  MultiLabelModel model;

  std::uint64_t seed = 0;
  std::uint64_t corpus_fp = 0;
  std::int64_t created_unix = 0;
};

struct TrainReport {
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  PRF train;
  PRF test;
};

// Dense feature row for one raw text under the pipeline's feature spec.
std::vector<double> transform_features(const TrainedPipeline& pipeline,
                                       const std::string& text);

// Fits preprocessing-invariant extractors and the multi-label model on a
// seeded internal split. Every record needs labels.
std::pair<TrainedPipeline, TrainReport> train_pipeline(const Corpus& corpus,
                                                       const TrainOptions& options);

struct ClassifyResult {
  CriterionLabels labels;
  std::array<double, kNumCriteria> scores = {0.0, 0.0, 0.0, 0.0};
  ExtractiveSummary summary;
};

ClassifyResult classify_text(const TrainedPipeline& pipeline, const std::string& text,
                             const SummaryConfig& summary_cfg = {});

// Versioned canonical-JSON persistence. Loading refuses any other
// format_version; gazetteer and embedding tables travel by reference plus
// fingerprint.
void save_artifact(const TrainedPipeline& pipeline, const std::filesystem::path& path);
std::string artifact_to_string(const TrainedPipeline& pipeline);
TrainedPipeline load_artifact(const std::filesystem::path& path);

struct GuardConfig {
  std::size_t min_gazetteer_hits = 2;
  std::size_t min_token_count = 30;
};

// Accept iff the text has at least min_token_count raw tokens and hits at
// least min_gazetteer_hits distinct gazetteer categories.
bool clinical_guard(const std::string& text, const Gazetteer& gazetteer,
                    const GuardConfig& cfg);

struct LabelStats {
  std::string name;
  std::size_t met_count = 0;
  std::size_t not_met_count = 0;
  std::vector<std::pair<std::string, std::size_t>> top_terms;  // at most 20
};

struct StatsReport {
  std::size_t n_records = 0;
  std::array<LabelStats, kNumCriteria> labels;
};

// Per-label met/not-met counts and the 20 most frequent normalized terms of
// each met-subcorpus.
StatsReport corpus_stats(const Corpus& corpus, const PreprocessConfig& preprocess = {});

}  // namespace clinscreen
