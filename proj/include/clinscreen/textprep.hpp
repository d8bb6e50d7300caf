#pragma once

#include <cstddef>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace clinscreen {

// One pattern -> replacement rule, applied with ECMAScript regex semantics.
struct ScrubRule {
  std::string pattern;
  std::string replacement;
  bool case_insensitive = true;
};

struct PreprocessConfig {
  bool lowercase = true;
  bool strip_punctuation = true;
  bool remove_stopwords = true;
  bool lemmatize = true;
  // Applied in order before tokenization. Empty means "use default_scrub_rules()".
  std::vector<ScrubRule> scrub_rules;
  // Lowercase-only term sets; empty means "use the bundled defaults".
  std::unordered_set<std::string> stopwords;
  std::unordered_set<std::string> abbreviations;
  std::unordered_map<std::string, std::string> lemma_overrides;
};

// A sentence's raw text plus the half-open range it owns inside CleanDoc::tokens.
struct SentenceSpan {
  std::string raw;
  std::size_t token_begin = 0;
  std::size_t token_end = 0;
};

// Normalized token stream with sentence structure. Concatenating the sentence
// token ranges reproduces `tokens` exactly, in source order.
struct CleanDoc {
  std::vector<std::string> tokens;
  std::vector<SentenceSpan> sentences;
};

// Default rule set: date-like, time-like, standalone numbers, the lab unit
// "mg", then whitespace collapse.
const std::vector<ScrubRule>& default_scrub_rules();

// Applies rules in order. Throws InvalidPattern on a malformed regex.
std::string scrub(const std::string& text, const std::vector<ScrubRule>& rules);

// Maximal runs of alphanumeric characters; apostrophes are dropped (they
// neither split nor appear in tokens), every other character separates.
std::vector<std::string> tokenize(const std::string& text);

// Sentence boundaries at '.', '?', '!' and newline runs. A period directly
// after an abbreviation-list entry does not end the sentence. Empty sentences
// are dropped.
std::vector<std::string> split_sentences(const std::string& text,
                                         const std::unordered_set<std::string>& abbreviations);
std::vector<std::string> split_sentences(const std::string& text);

// lowercase -> stopword removal -> lemmatization, per flags. Lemma outputs
// that land in the stopword list are dropped so the whole map is idempotent.
std::vector<std::string> normalize(const std::vector<std::string>& tokens,
                                   const PreprocessConfig& config);

// Rule-based lemmatizer: override dictionary, then plural / -ing / -ed
// suffix rules with doubled-consonant and silent-e handling, iterated to a
// fixpoint. Expects a lowercase token.
std::string lemmatize_token(const std::string& token,
                            const std::unordered_map<std::string, std::string>& overrides);

// Full pipeline: scrub -> sentence split -> per-sentence tokenize+normalize.
CleanDoc preprocess(const std::string& text, const PreprocessConfig& config);

}  // namespace clinscreen
