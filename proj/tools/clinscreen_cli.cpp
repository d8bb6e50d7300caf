// clinscreen — command-line shell over the cohort-screening toolkit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clinscreen/config.hpp"
#include "clinscreen/errors.hpp"
#include "clinscreen/eval.hpp"
#include "clinscreen/pipeline.hpp"
#include "clinscreen/service.hpp"
#include "clinscreen/summarize.hpp"

namespace {

using namespace clinscreen;

// Positional inputs may be a file path or literal text. The non-throwing
// overloads matter: literal note text easily exceeds NAME_MAX.
std::string read_input(const std::string& arg) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  return arg;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

void print_prf(const std::string& name, const PRF& prf) {
  std::printf("%s P=%.6f R=%.6f F1=%.6f\n", name.c_str(), prf.precision, prf.recall, prf.f1);
}

Corpus load_labeled_corpus(const std::string& path) {
  Corpus corpus = load_corpus(path);
  if (corpus.records.empty()) throw EmptyCorpus();
  return corpus;
}

int run_train(AppConfig& config, const std::string& corpus_path, const std::string& out_path,
              const std::string& strategy_opt, const std::string& learner_opt,
              const std::string& features_opt) {
  if (!strategy_opt.empty()) {
    config.train.strategy = strategy_from_string(strategy_opt);
    config.train.multi_output = strategy_opt == "multi_output" || strategy_opt == "mo";
  }
  if (!learner_opt.empty()) {
    config.train.learner.kind = learner_kind_from_string(learner_opt);
  }
  if (!features_opt.empty()) {
    config.train.parts.clear();
    for (const auto& name : split_csv(features_opt)) {
      config.train.parts.push_back(feature_part_from_string(name));
    }
  }

  const Corpus corpus = load_labeled_corpus(corpus_path);
  auto [pipeline, report] = train_pipeline(corpus, config.train);

  std::string parts;
  for (FeaturePart part : pipeline.parts) {
    if (!parts.empty()) parts += '+';
    parts += to_string(part);
  }
  const std::string strategy_name =
      pipeline.model.multi_output_alias ? "multi_output" : to_string(pipeline.model.strategy);
  std::printf("trained %s/%s over %s (d=%zu, n_train=%zu, n_test=%zu)\n",
              strategy_name.c_str(), to_string(config.train.learner.kind).c_str(),
              parts.c_str(), pipeline.model.feature_dim, report.n_train, report.n_test);
  print_prf("train micro", report.train);
  if (report.n_test > 0) print_prf("test micro", report.test);
  save_artifact(pipeline, out_path);
  std::printf("artifact written to %s\n", out_path.c_str());
  return 0;
}

int run_classify(const AppConfig& config, const std::string& artifact_path,
                 const std::string& input, bool abstractive) {
  const TrainedPipeline pipeline = load_artifact(artifact_path);
  const std::string text = read_input(input);
  if (!clinical_guard(text, pipeline.gazetteer, config.guard)) {
    throw GuardRejection(kGuardMessage);
  }
  const ClassifyResult result = classify_text(pipeline, text, config.summary);

  std::vector<std::string> met;
  for (std::size_t j = 0; j < kNumCriteria; ++j) {
    std::printf("%s: %s (score=%.6f)\n", kCriterionNames[j],
                result.labels.met[j] ? kMetString : kNotMetString, result.scores[j]);
    if (result.labels.met[j]) met.emplace_back(kCriterionNames[j]);
  }
  std::string joined;
  for (const auto& name : met) {
    if (!joined.empty()) joined += ", ";
    joined += name;
  }
  std::printf("met criteria: %s\n", met.empty() ? "none" : joined.c_str());
  std::printf("summary: %s\n", result.summary.summary_text.c_str());

  if (abstractive) {
    if (!config.backend_configured) {
      throw Error("abstractive summaries need a backend section in --config");
    }
    const CompletionBackend backend = make_backend(config);
    const RefineResult refined =
        refine_chain_summarize(text, met, backend, default_refine_chain_config());
    std::printf("abstractive: %s\n", refined.summary.c_str());
  }
  return 0;
}

int run_evaluate(const std::string& artifact_path, const std::string& corpus_path) {
  const TrainedPipeline pipeline = load_artifact(artifact_path);
  const Corpus corpus = load_labeled_corpus(corpus_path);
  for (const auto& record : corpus.records) {
    if (!record.labels.has_value()) {
      throw Error("labels required for evaluation (record " + record.id + " has none)");
    }
  }

  FeatureMatrix X;
  X.n = corpus.size();
  std::vector<std::string> names(kCriterionNames.begin(), kCriterionNames.end());
  LabelMatrix Y = LabelMatrix::zeros(corpus.size(), names);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::vector<double> row = transform_features(pipeline, corpus.records[i].text);
    if (i == 0) X.d = row.size();
    X.x.insert(X.x.end(), row.begin(), row.end());
    for (std::size_t j = 0; j < kNumCriteria; ++j) {
      Y.set(i, j, corpus.records[i].labels->met[j]);
    }
  }
  const LabelMatrix pred = predict_multilabel(pipeline.model, X);
  print_prf("micro", micro_prf(Y, pred));
  for (const auto& [name, prf] : per_label_prf(Y, pred)) print_prf(name, prf);
  return 0;
}

int run_summarize(const AppConfig& config, const std::string& input,
                  const std::string& method_opt, const std::string& reference_arg) {
  const std::string method = method_opt.empty() ? config.summarize_method : method_opt;
  const std::string text = read_input(input);
  const CleanDoc doc = preprocess(text, config.train.preprocess);

  ExtractiveSummary summary;
  if (method == "luhn") {
    summary = luhn_summarize(doc, config.summary);
  } else if (method == "tfidf") {
    // Single-document call: the document provides its own background corpus.
    const std::vector<CleanDoc> docs = {doc};
    const Vocabulary vocab =
        fit_vocabulary(docs, config.train.ngram_lo, config.train.ngram_hi, 1);
    summary = tfidf_summarize(doc, vocab, config.summary);
  } else if (method == "cvtfidf") {
    summary = cv_tfidf_summarize(doc, config.summary);
  } else {
    throw InvalidSpec("summarize method must be luhn, tfidf, or cvtfidf");
  }
  std::printf("%s\n", summary.summary_text.c_str());

  if (!reference_arg.empty()) {
    const std::string reference = read_input(reference_arg);
    const RougeScore r1 = rouge_n(summary.summary_text, reference, 1);
    const RougeScore r2 = rouge_n(summary.summary_text, reference, 2);
    const RougeScore rl = rouge_l(summary.summary_text, reference);
    std::printf("rouge1 P=%.6f R=%.6f F1=%.6f\n", r1.precision, r1.recall, r1.f1);
    std::printf("rouge2 P=%.6f R=%.6f F1=%.6f\n", r2.precision, r2.recall, r2.f1);
    std::printf("rougeL P=%.6f R=%.6f F1=%.6f\n", rl.precision, rl.recall, rl.f1);
  }
  return 0;
}

int run_stats(const AppConfig& config, const std::string& corpus_path) {
  const Corpus corpus = load_labeled_corpus(corpus_path);
  const StatsReport report = corpus_stats(corpus, config.train.preprocess);
  std::printf("records: %zu\n", report.n_records);
  for (const auto& label : report.labels) {
    std::string terms;
    for (const auto& [term, count] : label.top_terms) {
      if (!terms.empty()) terms += ',';
      terms += term + '(' + std::to_string(count) + ')';
    }
    std::printf("%s met=%zu not_met=%zu top_terms=%s\n", label.name.c_str(), label.met_count,
                label.not_met_count, terms.c_str());
  }
  return 0;
}

int run_serve(const AppConfig& config, const std::string& artifact_path,
              const std::string& host, int port) {
  TrainedPipeline pipeline = load_artifact(artifact_path);
  std::optional<CompletionBackend> backend;
  if (config.backend_configured) backend = make_backend(config);
  ClassifyService service(std::move(pipeline), config.guard, config.summary,
                          std::move(backend));
  std::printf("serving POST /classify on http://%s:%d\n", host.c_str(), port);
  std::fflush(stdout);
  if (!service.serve(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  return 0;
}

int run_gen_synthetic(AppConfig& config, const std::string& out_path, long long n_override,
                      double rate_override) {
  if (n_override > 0) config.synthetic.n_records = static_cast<std::size_t>(n_override);
  if (rate_override >= 0.0) config.synthetic.positive_rate.fill(rate_override);
  const Corpus corpus = generate_synthetic(config.synthetic, config.train.seed);
  save_corpus(corpus, out_path);
  std::printf("wrote %zu records to %s\n", corpus.size(), out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clinscreen: trial-eligibility screening over clinical notes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string config_path;
  app.add_option("--seed", seed, "seed for every random choice (default 0)");
  app.add_option("--config", config_path, "JSON config file");

  auto* train = app.add_subcommand("train", "fit a pipeline on a labeled corpus");
  std::string train_corpus, train_out = "artifact.json";
  std::string strategy_opt, learner_opt, features_opt;
  train->add_option("corpus", train_corpus, "labeled JSONL corpus")->required();
  train->add_option("-o,--out", train_out, "artifact output path");
  train->add_option("--strategy", strategy_opt,
                    "binary_relevance | classifier_chain | multi_output");
  train->add_option("--learner", learner_opt, "tree | forest | linear_svm | mlp");
  train->add_option("--features", features_opt,
                    "comma-separated parts: count,tfidf,ner,embed_mean,embed_tfidf");

  auto* classify = app.add_subcommand("classify", "classify one note against an artifact");
  std::string cls_artifact, cls_input;
  bool cls_abstractive = false;
  classify->add_option("--artifact", cls_artifact, "trained artifact")->required();
  classify->add_option("input", cls_input, "note text or a file containing it")->required();
  classify->add_flag("--abstractive", cls_abstractive,
                     "append a refine-chain summary (needs a backend in --config)");

  auto* evaluate = app.add_subcommand("evaluate", "score an artifact on a labeled corpus");
  std::string eval_artifact, eval_corpus;
  evaluate->add_option("--artifact", eval_artifact, "trained artifact")->required();
  evaluate->add_option("corpus", eval_corpus, "labeled JSONL corpus")->required();

  auto* summarize = app.add_subcommand("summarize", "extractive summary of one note");
  std::string sum_input, sum_method, sum_reference;
  summarize->add_option("input", sum_input, "note text or a file containing it")->required();
  summarize->add_option("--method", sum_method, "luhn | tfidf | cvtfidf");
  summarize->add_option("--reference", sum_reference,
                        "reference text (or file); prints ROUGE-1/2/L when given");

  auto* stats = app.add_subcommand("stats", "label counts and frequent terms of a corpus");
  std::string stats_corpus;
  stats->add_option("corpus", stats_corpus, "labeled JSONL corpus")->required();

  auto* serve = app.add_subcommand("serve", "HTTP classify service");
  std::string serve_artifact, serve_host;
  int serve_port = 0;
  serve->add_option("--artifact", serve_artifact, "trained artifact")->required();
  serve->add_option("--host", serve_host, "bind address (default from config)");
  serve->add_option("--port", serve_port, "bind port (default from config)");

  auto* gen = app.add_subcommand("gen-synthetic", "write a seeded synthetic corpus");
  std::string gen_out = "synthetic.jsonl";
  long long gen_n = -1;
  double gen_rate = -1.0;
  gen->add_option("-o,--out", gen_out, "output JSONL path");
  gen->add_option("--n", gen_n, "number of records");
  gen->add_option("--rate", gen_rate, "positive rate applied to all four labels");

  CLI11_PARSE(app, argc, argv);

  try {
    AppConfig config =
        config_path.empty() ? default_app_config() : load_app_config(config_path);
    config.train.seed = seed;
    config.train.learner.seed = seed;

    if (*train) return run_train(config, train_corpus, train_out, strategy_opt, learner_opt,
                                 features_opt);
    if (*classify) return run_classify(config, cls_artifact, cls_input, cls_abstractive);
    if (*evaluate) return run_evaluate(eval_artifact, eval_corpus);
    if (*summarize) return run_summarize(config, sum_input, sum_method, sum_reference);
    if (*stats) return run_stats(config, stats_corpus);
    if (*serve) {
      const std::string host = serve_host.empty() ? config.serve_host : serve_host;
      const int port = serve_port > 0 ? serve_port : config.serve_port;
      return run_serve(config, serve_artifact, host, port);
    }
    if (*gen) return run_gen_synthetic(config, gen_out, gen_n, gen_rate);
  } catch (const GuardRejection& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 0;
}
