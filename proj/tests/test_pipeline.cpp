#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clinscreen/errors.hpp"
#include "clinscreen/pipeline.hpp"

using namespace clinscreen;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("clinscreen_test_" + name);
}

Corpus small_synthetic(std::size_t n = 60, std::uint64_t seed = 5) {
  SyntheticSpec spec = default_synthetic_spec();
  spec.n_records = n;
  return generate_synthetic(spec, seed);
}

TrainOptions fast_options() {
  TrainOptions options;
  options.learner.n_trees = 20;
  options.seed = 11;
  return options;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("train_pipeline splits, fits, and reports both halves") {
  const Corpus corpus = small_synthetic();
  const auto [pipeline, report] = train_pipeline(corpus, fast_options());

  CHECK(report.n_train == 45);  // floor(60 * 0.25) = 15 held out
  CHECK(report.n_test == 15);
  CHECK(report.train.f1 > 0.9);  // separable by construction
  CHECK(pipeline.vocab.size() > 0);
  CHECK(pipeline.gazetteer_source == "builtin");
  CHECK(pipeline.model.label_names ==
        std::vector<std::string>{"ABDOMINAL", "ADVANCED-CAD", "MAJOR-DIABETES", "CREATININE"});
  CHECK(pipeline.model.strategy == MultiLabelStrategy::classifier_chain);
  CHECK(pipeline.corpus_fp == corpus_fingerprint(corpus));

  TrainOptions no_holdout = fast_options();
  no_holdout.test_fraction = 0.0;
  const auto [p2, r2] = train_pipeline(corpus, no_holdout);
  CHECK(r2.n_train == 60);
  CHECK(r2.n_test == 0);
}

TEST_CASE("training requires labels on every record and a nonempty corpus") {
  CHECK_THROWS_AS(train_pipeline(Corpus{}, fast_options()), EmptyCorpus);

  Corpus corpus = small_synthetic(10);
  corpus.records[3].labels.reset();
  CHECK_THROWS_WITH_AS(train_pipeline(corpus, fast_options()),
                       doctest::Contains(corpus.records[3].id.c_str()), Error);
}

TEST_CASE("classify_text yields calibrated scores, labels, and a summary") {
  const Corpus corpus = small_synthetic();
  const auto [pipeline, report] = train_pipeline(corpus, fast_options());
  const ClassifyResult result = classify_text(pipeline, corpus.records[0].text);
  for (std::size_t j = 0; j < kNumCriteria; ++j) {
    CHECK(result.scores[j] >= 0.0);
    CHECK(result.scores[j] <= 1.0);
    CHECK(result.labels.met[j] == (result.scores[j] >= 0.5));
  }
  CHECK_FALSE(result.summary.summary_text.empty());
}

TEST_CASE("artifacts round-trip byte-identically and preserve scores bitwise") {
  const Corpus corpus = small_synthetic();
  const TrainOptions options = fast_options();
  const auto [pipeline, report] = train_pipeline(corpus, options);
  const auto [again, report2] = train_pipeline(corpus, options);
  CHECK(artifact_to_string(pipeline) == artifact_to_string(again));  // same seed, same bytes

  const auto path = temp_path("artifact.json");
  save_artifact(pipeline, path);
  const TrainedPipeline loaded = load_artifact(path);
  CHECK(artifact_to_string(loaded) == artifact_to_string(pipeline));

  for (std::size_t i = 0; i < 10; ++i) {
    const ClassifyResult a = classify_text(pipeline, corpus.records[i].text);
    const ClassifyResult b = classify_text(loaded, corpus.records[i].text);
    for (std::size_t j = 0; j < kNumCriteria; ++j) {
      CHECK(a.scores[j] == b.scores[j]);  // bitwise, no tolerance
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("version-mismatched or tampered artifacts are refused") {
  const Corpus corpus = small_synthetic(20);
  const auto [pipeline, report] = train_pipeline(corpus, fast_options());
  const auto path = temp_path("artifact_bad.json");
  save_artifact(pipeline, path);

  nlohmann::json j = nlohmann::json::parse(slurp(path));
  j["format_version"] = kArtifactFormatVersion + 1;
  {
    std::ofstream out(path);
    out << j.dump(2);
  }
  CHECK_THROWS_WITH_AS(load_artifact(path), doctest::Contains("format_version"),
                       ArtifactError);

  j["format_version"] = kArtifactFormatVersion;
  j["features"]["gazetteer"]["fingerprint"] = "0000000000000000";
  {
    std::ofstream out(path);
    out << j.dump(2);
  }
  CHECK_THROWS_WITH_AS(load_artifact(path), doctest::Contains("gazetteer"), ArtifactError);

  {
    std::ofstream out(path);
    out << "this is not json";
  }
  CHECK_THROWS_AS(load_artifact(path), ArtifactError);

  j.erase("model");
  // restore the fingerprint so the missing field is what trips the loader
  j["features"]["gazetteer"]["fingerprint"] =
      nlohmann::json::parse(artifact_to_string(pipeline))["features"]["gazetteer"]
          ["fingerprint"];
  {
    std::ofstream out(path);
    out << j.dump(2);
  }
  CHECK_THROWS_AS(load_artifact(path), ArtifactError);
  std::filesystem::remove(path);
}

TEST_CASE("artifact timestamps honor SOURCE_DATE_EPOCH and default to zero") {
  const Corpus corpus = small_synthetic(12);
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const auto [stamped, r1] = train_pipeline(corpus, fast_options());
  CHECK(stamped.created_unix == 1700000000);
  unsetenv("SOURCE_DATE_EPOCH");
  const auto [unstamped, r2] = train_pipeline(corpus, fast_options());
  CHECK(unstamped.created_unix == 0);
}

TEST_CASE("the clinical guard wants enough tokens and gazetteer evidence") {
  const Gazetteer g = default_gazetteer();
  const GuardConfig cfg;  // 30 tokens, 2 distinct categories

  std::string clinical =
      "Patient admitted with chest pain radiating to the left arm. Started metformin and "
      "aspirin. Examination shows stable vitals. Creatinine trending down. Plan discharge "
      "to clinic followup tomorrow morning with repeat labs pending today.";
  CHECK(clinical_guard(clinical, g, cfg));

  // plenty of words, nothing clinical
  std::string essay;
  for (int i = 0; i < 200; ++i) essay += "word" + std::to_string(i) + " ";
  CHECK_FALSE(clinical_guard(essay, g, cfg));

  // clinical but far too short
  CHECK_FALSE(clinical_guard("chest pain, on metformin", g, cfg));

  // exact boundary: 30 tokens, 2 categories
  std::string boundary = "chest pain metformin";  // 3 tokens, 2 categories
  for (int i = 0; i < 27; ++i) boundary += " filler" + std::to_string(i);
  CHECK(clinical_guard(boundary, g, cfg));
  std::string under = "chest pain metformin";  // 29 tokens total
  for (int i = 0; i < 26; ++i) under += " filler" + std::to_string(i);
  CHECK_FALSE(clinical_guard(under, g, cfg));
}

TEST_CASE("corpus_stats counts labels and ranks met-subcorpus terms") {
  Corpus corpus;
  PatientRecord a;
  a.id = "a";
  a.text = "bowel bowel resection. resection noted.";
  a.labels = CriterionLabels{{true, false, false, false}};
  PatientRecord b;
  b.id = "b";
  b.text = "routine check.";
  b.labels = CriterionLabels{{false, false, false, false}};
  PatientRecord c;
  c.id = "c";
  c.text = "unlabeled text.";
  corpus.records = {a, b, c};

  const StatsReport report = corpus_stats(corpus);
  CHECK(report.n_records == 3);
  CHECK(report.labels[0].name == "ABDOMINAL");
  CHECK(report.labels[0].met_count == 1);
  CHECK(report.labels[0].not_met_count == 1);  // the unlabeled record is skipped
  REQUIRE(report.labels[0].top_terms.size() == 3);
  // "bowel" and "resection" both occur twice; lexicographic order breaks the tie
  CHECK(report.labels[0].top_terms[0].first == "bowel");
  CHECK(report.labels[0].top_terms[0].second == 2);
  CHECK(report.labels[0].top_terms[1].first == "resection");
  CHECK(report.labels[0].top_terms[2].first == "note");
  CHECK(report.labels[1].met_count == 0);
  CHECK(report.labels[1].top_terms.empty());
}

TEST_CASE("feature part names round-trip, including the embed aliases") {
  for (FeaturePart part : {FeaturePart::count, FeaturePart::tfidf, FeaturePart::ner,
                           FeaturePart::embed_mean, FeaturePart::embed_tfidf}) {
    CHECK(feature_part_from_string(to_string(part)) == part);
  }
  CHECK(feature_part_from_string("embed") == FeaturePart::embed_mean);
  CHECK_THROWS_AS(feature_part_from_string("bert"), InvalidSpec);
}

}  // TEST_SUITE
