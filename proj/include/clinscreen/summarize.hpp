#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "clinscreen/features.hpp"
#include "clinscreen/textprep.hpp"

namespace clinscreen {

struct SummaryConfig {
  std::size_t max_sentences = 5;
  std::size_t keyword_k = 15;
  double luhn_top_fraction = 0.10;  // fraction of distinct terms treated as significant
  std::size_t luhn_gap = 4;         // max insignificant tokens inside a cluster
  double position_boost = 0.5;
};

struct SelectedSentence {
  std::size_t index = 0;
  std::string text;  // raw sentence, verbatim
  double score = 0.0;
};

struct ExtractiveSummary {
  std::vector<SelectedSentence> selected;  // indices strictly increasing
  std::string summary_text;                // sentences joined in source order
};

// Luhn significant-word clustering with a linear position boost for early
// sentences.
ExtractiveSummary luhn_summarize(const CleanDoc& doc, const SummaryConfig& cfg);

// Keywords = top-k unigrams by tf-idf against a corpus-fitted vocabulary;
// sentence score = summed keyword weight over its tokens.
ExtractiveSummary tfidf_summarize(const CleanDoc& doc, const Vocabulary& background_vocab,
                                  const SummaryConfig& cfg);

// Count-vectorize the doc's sentences, tf-idf transform with idf over
// sentences, then keep sentences containing the top keywords.
ExtractiveSummary cv_tfidf_summarize(const CleanDoc& doc, const SummaryConfig& cfg);

}  // namespace clinscreen
