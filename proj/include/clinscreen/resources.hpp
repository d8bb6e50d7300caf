#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace clinscreen {

// Bundled resources. The files under resources/ are the canonical copies;
// these accessors return the same content compiled in, so the library works
// without an install prefix. A test pins file and built-in versions together.

const std::unordered_set<std::string>& default_stopwords();
const std::unordered_set<std::string>& default_abbreviations();
const std::unordered_map<std::string, std::string>& default_lemma_overrides();

// Ordered category -> phrase-list bundle used for entity presence features
// and the clinical-input guard. 18 categories.
const std::vector<std::pair<std::string, std::vector<std::string>>>& default_gazetteer_entries();

// Prompt templates for the two-step refine chain.
const std::string& default_question_template();
const std::string& default_refine_template();

// Eligibility criterion definitions keyed by label name, for the zero-shot
// classifier prompt.
const std::vector<std::pair<std::string, std::string>>& default_label_definitions();

// Loaders for the plain-text resource formats (one entry per line; lemma
// overrides are "form lemma" pairs). Used when a config overrides a bundle.
std::unordered_set<std::string> load_term_set(const std::string& path);
std::unordered_map<std::string, std::string> load_term_map(const std::string& path);

}  // namespace clinscreen
