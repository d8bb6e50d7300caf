// Python bindings for the clinscreen core. The surface mirrors the CLI verbs:
// synthesize, train, classify, evaluate, summarize, stats — with plain dicts
// in and out so callers never touch the C++ structs.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "clinscreen/corpus.hpp"
#include "clinscreen/errors.hpp"
#include "clinscreen/eval.hpp"
#include "clinscreen/pipeline.hpp"
#include "clinscreen/summarize.hpp"
#include "clinscreen/textprep.hpp"

namespace py = pybind11;
using namespace clinscreen;

namespace {

py::dict prf_dict(const PRF& p) {
  py::dict d;
  d["precision"] = p.precision;
  d["recall"] = p.recall;
  d["f1"] = p.f1;
  return d;
}

py::dict classify_dict(const TrainedPipeline& pipeline, const std::string& text) {
  const ClassifyResult result = classify_text(pipeline, text);
  py::dict labels, scores;
  for (std::size_t j = 0; j < kNumCriteria; ++j) {
    labels[kCriterionNames[j]] = result.labels.met[j] ? kMetString : kNotMetString;
    scores[kCriterionNames[j]] = result.scores[j];
  }
  py::dict d;
  d["labels"] = labels;
  d["scores"] = scores;
  d["summary"] = result.summary.summary_text;
  return d;
}

py::dict evaluate_on(const TrainedPipeline& pipeline, const std::string& corpus_path) {
  const Corpus corpus = load_corpus(corpus_path);
  std::vector<std::string> names(kCriterionNames.begin(), kCriterionNames.end());
  LabelMatrix truth = LabelMatrix::zeros(corpus.size(), names);
  LabelMatrix pred = LabelMatrix::zeros(corpus.size(), names);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const PatientRecord& rec = corpus.records[i];
    if (!rec.labels) throw Error("record " + rec.id + " has no labels to evaluate against");
    const ClassifyResult result = classify_text(pipeline, rec.text);
    for (std::size_t j = 0; j < kNumCriteria; ++j) {
      truth.set(i, j, rec.labels->met[j]);
      pred.set(i, j, result.labels.met[j]);
    }
  }
  py::dict per_label;
  for (const auto& [name, prf] : per_label_prf(truth, pred)) per_label[name.c_str()] = prf_dict(prf);
  py::dict d;
  d["n_records"] = corpus.size();
  d["micro"] = prf_dict(micro_prf(truth, pred));
  d["per_label"] = per_label;
  return d;
}

ExtractiveSummary run_summarizer(const std::string& text, const std::string& method,
                                 std::size_t max_sentences) {
  const CleanDoc doc = preprocess(text, {});
  SummaryConfig cfg;
  cfg.max_sentences = max_sentences;
  if (method == "luhn") return luhn_summarize(doc, cfg);
  if (method == "cv-tfidf" || method == "cvtfidf") return cv_tfidf_summarize(doc, cfg);
  if (method == "tfidf") {
    const std::vector<CleanDoc> background = {doc};
    return tfidf_summarize(doc, fit_vocabulary(background, 1, 1, 1), cfg);
  }
  throw InvalidSpec("unknown summarizer: " + method + " (try luhn, tfidf, cv-tfidf)");
}

LabelMatrix matrix_from(const std::vector<std::vector<int>>& rows, const char* arg) {
  std::vector<std::string> names(kCriterionNames.begin(), kCriterionNames.end());
  LabelMatrix m = LabelMatrix::zeros(rows.size(), names);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != kNumCriteria)
      throw ShapeMismatch(std::string(arg) + " rows need " + std::to_string(kNumCriteria) +
                          " entries");
    for (std::size_t j = 0; j < kNumCriteria; ++j) m.set(i, j, rows[i][j] != 0);
  }
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cohort screening toolkit: multi-label criterion classification and "
            "extractive summarization for patient notes.";
  m.attr("__version__") = "0.1.0";

  py::tuple criteria(kNumCriteria);
  for (std::size_t j = 0; j < kNumCriteria; ++j) criteria[j] = kCriterionNames[j];
  m.attr("CRITERIA") = criteria;

  py::register_exception<Error>(m, "ClinscreenError", PyExc_RuntimeError);

  m.def(
      "preprocess",
      [](const std::string& text) {
        const CleanDoc doc = preprocess(text, {});
        std::vector<std::string> sentences;
        for (const auto& s : doc.sentences) sentences.push_back(s.raw);
        py::dict d;
        d["tokens"] = doc.tokens;
        d["sentences"] = sentences;
        return d;
      },
      py::arg("text"), "Normalize a note into tokens and raw sentence spans.");

  m.def(
      "generate_synthetic",
      [](const std::string& path, std::size_t n, std::uint64_t seed) {
        SyntheticSpec spec = default_synthetic_spec();
        spec.n_records = n;
        const Corpus corpus = generate_synthetic(spec, seed);
        save_corpus(corpus, path);
        return corpus.size();
      },
      py::arg("path"), py::arg("n") = 288, py::arg("seed") = 0,
      "Write a seeded synthetic labeled corpus (JSONL) and return its size.");

  m.def(
      "train",
      [](const std::string& corpus_path, const std::string& artifact_path, std::uint64_t seed,
         const std::string& strategy, const std::string& learner, double test_fraction) {
        TrainOptions options;
        options.seed = seed;
        options.strategy = strategy_from_string(strategy);
        options.learner.kind = learner_kind_from_string(learner);
        options.learner.seed = seed;
        options.test_fraction = test_fraction;
        const auto [pipeline, report] = train_pipeline(load_corpus(corpus_path), options);
        save_artifact(pipeline, artifact_path);
        py::dict d;
        d["n_train"] = report.n_train;
        d["n_test"] = report.n_test;
        d["train"] = prf_dict(report.train);
        d["test"] = prf_dict(report.test);
        return d;
      },
      py::arg("corpus_path"), py::arg("artifact_path"), py::kw_only(), py::arg("seed") = 0,
      py::arg("strategy") = "classifier_chain", py::arg("learner") = "forest",
      py::arg("test_fraction") = 0.25,
      "Fit a pipeline on a labeled corpus, save the artifact, return the report.");

  m.def(
      "summarize",
      [](const std::string& text, const std::string& method, std::size_t max_sentences) {
        return run_summarizer(text, method, max_sentences).summary_text;
      },
      py::arg("text"), py::kw_only(), py::arg("method") = "luhn", py::arg("max_sentences") = 5,
      "Extractive summary of a note (methods: luhn, tfidf, cv-tfidf).");

  m.def(
      "rouge",
      [](const std::string& candidate, const std::string& reference) {
        py::dict d;
        const auto as_dict = [](const RougeScore& s) {
          py::dict r;
          r["precision"] = s.precision;
          r["recall"] = s.recall;
          r["f1"] = s.f1;
          return r;
        };
        d["rouge1"] = as_dict(rouge_n(candidate, reference, 1));
        d["rouge2"] = as_dict(rouge_n(candidate, reference, 2));
        d["rougeL"] = as_dict(rouge_l(candidate, reference));
        return d;
      },
      py::arg("candidate"), py::arg("reference"),
      "ROUGE-1/2/L precision, recall, and F1 of a candidate against a reference.");

  m.def(
      "micro_prf",
      [](const std::vector<std::vector<int>>& y_true, const std::vector<std::vector<int>>& y_pred) {
        return prf_dict(micro_prf(matrix_from(y_true, "y_true"), matrix_from(y_pred, "y_pred")));
      },
      py::arg("y_true"), py::arg("y_pred"),
      "Micro-averaged precision/recall/F1 over rows of 4 binary labels.");

  m.def(
      "corpus_stats",
      [](const std::string& path) {
        const StatsReport report = corpus_stats(load_corpus(path));
        py::dict labels;
        for (const auto& stat : report.labels) {
          py::dict entry;
          entry["met"] = stat.met_count;
          entry["not_met"] = stat.not_met_count;
          entry["top_terms"] = stat.top_terms;
          labels[stat.name.c_str()] = entry;
        }
        py::dict d;
        d["n_records"] = report.n_records;
        d["labels"] = labels;
        return d;
      },
      py::arg("path"), "Label balance and frequent terms of a labeled corpus.");

  py::class_<TrainedPipeline>(m, "Pipeline",
                              "A fitted classification pipeline loaded from an artifact.")
      .def_static(
          "load", [](const std::string& path) { return load_artifact(path); }, py::arg("path"))
      .def("save", [](const TrainedPipeline& p, const std::string& path) { save_artifact(p, path); },
           py::arg("path"))
      .def("classify", &classify_dict, py::arg("text"),
           "Criterion verdicts, scores, and an extractive summary for one note.")
      .def("evaluate", &evaluate_on, py::arg("corpus_path"),
           "Micro and per-label precision/recall/F1 against a labeled corpus.")
      .def(
          "guard",
          [](const TrainedPipeline& p, const std::string& text) {
            return clinical_guard(text, p.gazetteer, {});
          },
          py::arg("text"), "True when the text looks like clinical prose worth classifying.")
      .def_property_readonly("seed", [](const TrainedPipeline& p) { return p.seed; })
      .def_property_readonly("labels", [](const TrainedPipeline&) {
        return std::vector<std::string>(kCriterionNames.begin(), kCriterionNames.end());
      });
}
