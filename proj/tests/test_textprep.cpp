#include <doctest.h>

#include <string>
#include <vector>

#include "clinscreen/errors.hpp"
#include "clinscreen/resources.hpp"
#include "clinscreen/textprep.hpp"

using namespace clinscreen;

TEST_SUITE("textprep") {

TEST_CASE("tokenize keeps alphanumeric runs and drops apostrophes") {
  CHECK(tokenize("Patient's BP was 120/80 -- recheck!") ==
        std::vector<std::string>{"Patients", "BP", "was", "120", "80", "recheck"});
  CHECK(tokenize("") == std::vector<std::string>{});
  CHECK(tokenize("...") == std::vector<std::string>{});
  CHECK(tokenize("hba1c 7.9%") == std::vector<std::string>{"hba1c", "7", "9"});
}

TEST_CASE("scrub removes dates, times, bare numbers, and the mg unit") {
  const auto& rules = default_scrub_rules();
  CHECK(scrub("seen 12/03/2094 at 10:30 am", rules) == "seen at");
  CHECK(scrub("admit 2094-12-03, labs at 09:15:00pm", rules) == "admit , labs at");
  CHECK(scrub("creatinine 2.4 mg today", rules) == "creatinine today");
  CHECK(scrub("metformin 500 MG twice", rules) == "metformin twice");
  // embedded digits are not standalone numbers
  CHECK(scrub("hba1c checked", rules) == "hba1c checked");
  CHECK(scrub("   ", rules) == "");
}

TEST_CASE("scrub applies rules in order and flags bad patterns") {
  std::vector<ScrubRule> rules = {{"abc", "x"}, {"xd", "y"}};
  CHECK(scrub("abcd", rules) == "y");  // "abc"->"x" first, then "xd"->"y"
  CHECK_THROWS_AS(scrub("x", {{"([", ""}}), InvalidPattern);
}

TEST_CASE("split_sentences honors terminators, newlines, and abbreviations") {
  CHECK(split_sentences("First one. Second one? Third!") ==
        std::vector<std::string>{"First one", "Second one", "Third"});
  CHECK(split_sentences("line one\nline two") ==
        std::vector<std::string>{"line one", "line two"});
  // doubled terminators produce no empty sentences
  CHECK(split_sentences("A.. B.") == std::vector<std::string>{"A", "B"});
  // periods after bundled abbreviations stay inside the sentence
  CHECK(split_sentences("Dr. Smith saw the pt. He is well.") ==
        std::vector<std::string>{"Dr. Smith saw the pt. He is well"});
  CHECK(split_sentences("Compared vs. baseline. Stable.") ==
        std::vector<std::string>{"Compared vs. baseline", "Stable"});
}

TEST_CASE("lemmatize_token applies overrides then suffix rules to a fixpoint") {
  const auto& ov = default_lemma_overrides();
  // override dictionary
  CHECK(lemmatize_token("underwent", ov) == "undergo");
  CHECK(lemmatize_token("diagnoses", ov) == "diagnosis");
  CHECK(lemmatize_token("diabetes", ov) == "diabetes");  // identity guard
  CHECK(lemmatize_token("women", ov) == "woman");
  // plural rules
  CHECK(lemmatize_token("studies", ov) == "study");
  CHECK(lemmatize_token("lesions", ov) == "lesion");
  CHECK(lemmatize_token("masses", ov) == "mass");
  CHECK(lemmatize_token("boxes", ov) == "box");
  CHECK(lemmatize_token("status", ov) == "status");      // -us guard
  CHECK(lemmatize_token("diagnosis", ov) == "diagnosis");  // -is guard
  // verbal suffixes with doubling / silent-e handling
  CHECK(lemmatize_token("stopped", ov) == "stop");
  CHECK(lemmatize_token("hoping", ov) == "hope");
  CHECK(lemmatize_token("worsening", ov) == "worsen");
  CHECK(lemmatize_token("presented", ov) == "present");
  // iterated: plural of a gerund
  CHECK(lemmatize_token("findings", ov) == "find");
}

TEST_CASE("normalize lowercases, removes stopwords, and is idempotent") {
  PreprocessConfig cfg;
  CHECK(normalize({"The", "patients", "were", "Stable"}, cfg) ==
        std::vector<std::string>{"patient", "stable"});
  // a lemma that lands in the stopword list is dropped too
  CHECK(normalize({"doing"}, cfg) == std::vector<std::string>{});
  std::vector<std::string> once = normalize({"Reports", "Worsening", "Edema"}, cfg);
  CHECK(normalize(once, cfg) == once);

  PreprocessConfig keep;
  keep.remove_stopwords = false;
  keep.lemmatize = false;
  CHECK(normalize({"The", "Patients"}, keep) == std::vector<std::string>{"the", "patients"});
}

TEST_CASE("preprocess produces sentence spans that partition the token stream") {
  PreprocessConfig cfg;
  CleanDoc doc = preprocess("Pt. denies pain. Vitals stable.", cfg);
  REQUIRE(doc.sentences.size() == 2);
  CHECK(doc.sentences[0].raw == "Pt. denies pain");
  CHECK(doc.sentences[1].raw == "Vitals stable");
  CHECK(doc.tokens == std::vector<std::string>{"pt", "deny", "pain", "vital", "stable"});
  CHECK(doc.sentences[0].token_begin == 0);
  CHECK(doc.sentences[0].token_end == 3);
  CHECK(doc.sentences[1].token_begin == 3);
  CHECK(doc.sentences[1].token_end == 5);
  // raw sentences never keep the terminal delimiter
  for (const auto& s : doc.sentences) {
    CHECK(s.raw.back() != '.');
  }
}

TEST_CASE("preprocess without punctuation stripping keeps whitespace chunks") {
  PreprocessConfig cfg;
  cfg.strip_punctuation = false;
  cfg.remove_stopwords = false;
  cfg.lemmatize = false;
  CleanDoc doc = preprocess("x-ray clear", cfg);
  REQUIRE(doc.sentences.size() == 1);
  CHECK(doc.tokens == std::vector<std::string>{"x-ray", "clear"});
}

TEST_CASE("bundled term resources round-trip through their file form") {
  const std::string dir = CLINSCREEN_RESOURCE_DIR;
  CHECK(load_term_set(dir + "/stopwords.txt") == default_stopwords());
  CHECK(load_term_set(dir + "/abbreviations.txt") == default_abbreviations());
  const auto file_lemmas = load_term_map(dir + "/lemma_overrides.txt");
  CHECK(file_lemmas.size() == default_lemma_overrides().size());
  for (const auto& [from, to] : default_lemma_overrides()) {
    auto it = file_lemmas.find(from);
    REQUIRE(it != file_lemmas.end());
    CHECK(it->second == to);
  }
}

}  // TEST_SUITE
