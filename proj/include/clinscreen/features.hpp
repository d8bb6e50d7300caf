#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clinscreen/textprep.hpp"

namespace clinscreen {

// Term -> dense index mapping over n-grams, lexicographic by term so fitting
// is order-insensitive.
struct Vocabulary {
  std::vector<std::string> terms;                       // sorted; index = position
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> df;                          // per retained term
  std::size_t n_docs = 0;
  int ngram_lo = 1;
  int ngram_hi = 2;
  std::size_t min_df = 1;

  std::size_t size() const { return terms.size(); }
};

// Sorted (index, weight) pairs; no stored zeros.
struct SparseVector {
  std::vector<std::pair<std::size_t, double>> entries;
  std::size_t dim = 0;

  double l2_norm() const;
};

SparseVector sparse_from_dense(const std::vector<double>& dense);
std::vector<double> sparse_to_dense(const SparseVector& v);

// N-grams are joined with single spaces and never cross sentence boundaries.
std::vector<std::string> extract_ngrams(const CleanDoc& doc, int lo, int hi);

Vocabulary fit_vocabulary(std::span<const CleanDoc> docs, int ngram_lo, int ngram_hi,
                          std::size_t min_df);

// Raw occurrence counts of in-vocabulary n-grams.
SparseVector transform_count(const CleanDoc& doc, const Vocabulary& vocab);

// Smoothed idf: ln((1 + n_docs) / (1 + df)) + 1.
double idf_weight(const Vocabulary& vocab, std::size_t term_index);

// tf * idf, L2-normalized; the zero vector stays zero.
SparseVector transform_tfidf(const CleanDoc& doc, const Vocabulary& vocab);

// Plain-text embedding file: one line per term, "term v1 v2 ... vD".
struct EmbeddingTable {
  std::unordered_map<std::string, std::vector<double>> vectors;
  std::size_t dim = 0;
};

EmbeddingTable load_embeddings(const std::filesystem::path& path);

// Mean of the vectors for in-table tokens; misses are skipped. All-miss or
// empty doc gives the zero vector.
std::vector<double> embed_mean(const CleanDoc& doc, const EmbeddingTable& table);

// tf-idf weighted average over unigram terms present in both vocabulary and
// table; a zero weight sum gives the zero vector.
std::vector<double> embed_tfidf_weighted(const CleanDoc& doc, const EmbeddingTable& table,
                                         const Vocabulary& vocab);

// Ordered (category, phrases) lexicon. Category order is fixed at load and
// defines the presence-vector layout.
struct Gazetteer {
  std::vector<std::pair<std::string, std::vector<std::string>>> categories;

  std::size_t size() const { return categories.size(); }
};

Gazetteer default_gazetteer();
// JSON array of {"category": name, "phrases": [...]} objects; array order is
// authoritative.
Gazetteer load_gazetteer(const std::filesystem::path& path);
std::uint64_t gazetteer_fingerprint(const Gazetteer& g);

// Bit per category: 1 iff any phrase occurs as a whole-token-sequence match
// in the lowercased tokenized text.
std::vector<double> ner_presence(const std::string& doc_text, const Gazetteer& gazetteer);
std::size_t gazetteer_category_hits(const std::string& doc_text, const Gazetteer& gazetteer);

// Block concatenation with stable offsets; dim is the sum of part dims.
SparseVector concat_features(std::span<const SparseVector> parts);

}  // namespace clinscreen
