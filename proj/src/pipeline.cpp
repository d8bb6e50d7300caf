#include "clinscreen/pipeline.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clinscreen/errors.hpp"
#include "clinscreen/rng.hpp"

namespace clinscreen {

using nlohmann::json;

std::string to_string(FeaturePart part) {
  switch (part) {
    case FeaturePart::count: return "count";
    case FeaturePart::tfidf: return "tfidf";
    case FeaturePart::ner: return "ner";
    case FeaturePart::embed_mean: return "embed_mean";
    case FeaturePart::embed_tfidf: return "embed_tfidf";
  }
  return "unknown";
}

FeaturePart feature_part_from_string(const std::string& name) {
  if (name == "count") return FeaturePart::count;
  if (name == "tfidf") return FeaturePart::tfidf;
  if (name == "ner") return FeaturePart::ner;
  if (name == "embed_mean" || name == "embed") return FeaturePart::embed_mean;
  if (name == "embed_tfidf") return FeaturePart::embed_tfidf;
  throw InvalidSpec("unknown feature part: " + name);
}

namespace {

bool needs_vocab(const std::vector<FeaturePart>& parts) {
  return std::any_of(parts.begin(), parts.end(), [](FeaturePart p) {
    return p == FeaturePart::count || p == FeaturePart::tfidf || p == FeaturePart::embed_tfidf;
  });
}

bool needs_embeddings(const std::vector<FeaturePart>& parts) {
  return std::any_of(parts.begin(), parts.end(), [](FeaturePart p) {
    return p == FeaturePart::embed_mean || p == FeaturePart::embed_tfidf;
  });
}

std::int64_t artifact_timestamp() {
  // Honouring SOURCE_DATE_EPOCH (and defaulting to 0) keeps artifacts
  // byte-identical across runs.
  const char* sde = std::getenv("SOURCE_DATE_EPOCH");
  if (sde != nullptr && *sde != '\0') {
    char* end = nullptr;
    const long long v = std::strtoll(sde, &end, 10);
    if (end != nullptr && *end == '\0') return v;
  }
  return 0;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16) throw ArtifactError("bad fingerprint: " + s);
  std::uint64_t v = 0;
  for (char c : s) {
    const int digit = (c >= '0' && c <= '9')   ? c - '0'
                      : (c >= 'a' && c <= 'f') ? c - 'a' + 10
                      : (c >= 'A' && c <= 'F') ? c - 'A' + 10
                                               : -1;
    if (digit < 0) throw ArtifactError("bad fingerprint: " + s);
    v = v << 4 | static_cast<std::uint64_t>(digit);
  }
  return v;
}

std::uint64_t file_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64(buf.str());
}

// Feature assembly shared by training (which has the CleanDoc already) and
// transform_features.
std::vector<double> assemble_features(const TrainedPipeline& p, const std::string& text,
                                      const CleanDoc& doc) {
  std::vector<SparseVector> blocks;
  for (FeaturePart part : p.parts) {
    switch (part) {
      case FeaturePart::count:
        blocks.push_back(transform_count(doc, p.vocab));
        break;
      case FeaturePart::tfidf:
        blocks.push_back(transform_tfidf(doc, p.vocab));
        break;
      case FeaturePart::ner:
        blocks.push_back(sparse_from_dense(ner_presence(text, p.gazetteer)));
        break;
      case FeaturePart::embed_mean:
        blocks.push_back(sparse_from_dense(embed_mean(doc, p.embeddings)));
        break;
      case FeaturePart::embed_tfidf:
        blocks.push_back(sparse_from_dense(embed_tfidf_weighted(doc, p.embeddings, p.vocab)));
        break;
    }
  }
  return sparse_to_dense(concat_features(blocks));
}

}  // namespace

std::vector<double> transform_features(const TrainedPipeline& pipeline,
                                       const std::string& text) {
  const CleanDoc doc = preprocess(text, pipeline.preprocess);
  return assemble_features(pipeline, text, doc);
}

std::pair<TrainedPipeline, TrainReport> train_pipeline(const Corpus& corpus,
                                                       const TrainOptions& options) {
  if (corpus.records.empty()) throw EmptyCorpus();
  for (const auto& record : corpus.records) {
    if (!record.labels.has_value()) {
      throw Error("labels required for training (record " + record.id + " has none)");
    }
  }
  if (options.parts.empty()) throw InvalidSpec("at least one feature part is required");
  if (options.test_fraction < 0.0 || options.test_fraction >= 1.0) {
    throw InvalidSpec("test_fraction must be in [0, 1)");
  }
  if (needs_embeddings(options.parts) && !options.embedding_file.has_value()) {
    throw InvalidSpec("embedding feature parts need an embedding file");
  }

  TrainedPipeline p;
  p.preprocess = options.preprocess;
  p.parts = options.parts;
  p.ngram_lo = options.ngram_lo;
  p.ngram_hi = options.ngram_hi;
  p.min_df = options.min_df;
  p.seed = options.seed;
  p.corpus_fp = corpus_fingerprint(corpus);
  p.created_unix = artifact_timestamp();
  if (options.gazetteer_file.has_value()) {
    p.gazetteer = load_gazetteer(*options.gazetteer_file);
    p.gazetteer_source = options.gazetteer_file->string();
  } else {
    p.gazetteer = default_gazetteer();
  }
  if (needs_embeddings(options.parts)) {
    p.embeddings = load_embeddings(*options.embedding_file);
    p.embedding_source = options.embedding_file->string();
  }

  const auto holdout_n = static_cast<std::size_t>(
      static_cast<double>(corpus.size()) * options.test_fraction);
  const auto [train, holdout] = split_corpus(corpus, options.seed, holdout_n);

  std::vector<CleanDoc> docs;
  docs.reserve(train.size());
  for (const auto& record : train.records) docs.push_back(preprocess(record.text, p.preprocess));
  if (needs_vocab(options.parts)) {
    p.vocab = fit_vocabulary(docs, options.ngram_lo, options.ngram_hi, options.min_df);
  }

  FeatureMatrix X;
  X.n = train.size();
  for (std::size_t i = 0; i < train.size(); ++i) {
    const std::vector<double> row = assemble_features(p, train.records[i].text, docs[i]);
    if (i == 0) {
      X.d = row.size();
      X.x.reserve(X.n * X.d);
    }
    X.x.insert(X.x.end(), row.begin(), row.end());
  }

  std::vector<std::string> names(kCriterionNames.begin(), kCriterionNames.end());
  LabelMatrix Y = LabelMatrix::zeros(train.size(), names);
  for (std::size_t i = 0; i < train.size(); ++i) {
    for (std::size_t j = 0; j < kNumCriteria; ++j) {
      Y.set(i, j, train.records[i].labels->met[j]);
    }
  }

  LearnerSpec spec = options.learner;
  spec.seed = options.seed;
  if (options.strategy == MultiLabelStrategy::classifier_chain) {
    const std::vector<std::size_t> order =
        options.chain_order.empty() ? default_chain_order(kNumCriteria) : options.chain_order;
    p.model = fit_classifier_chain(X, Y, spec, order);
  } else if (options.multi_output) {
    p.model = fit_multi_output(X, Y, spec);
  } else {
    p.model = fit_binary_relevance(X, Y, spec);
  }

  TrainReport report;
  report.n_train = train.size();
  report.n_test = holdout.size();
  report.train = micro_prf(Y, predict_multilabel(p.model, X));
  if (!holdout.records.empty()) {
    FeatureMatrix Xh;
    Xh.n = holdout.size();
    Xh.d = X.d;
    Xh.x.reserve(Xh.n * Xh.d);
    for (const auto& record : holdout.records) {
      const std::vector<double> row = transform_features(p, record.text);
      Xh.x.insert(Xh.x.end(), row.begin(), row.end());
    }
    LabelMatrix Yh = LabelMatrix::zeros(holdout.size(), names);
    for (std::size_t i = 0; i < holdout.size(); ++i) {
      for (std::size_t j = 0; j < kNumCriteria; ++j) {
        Yh.set(i, j, holdout.records[i].labels->met[j]);
      }
    }
    report.test = micro_prf(Yh, predict_multilabel(p.model, Xh));
  }
  return {std::move(p), report};
}

ClassifyResult classify_text(const TrainedPipeline& pipeline, const std::string& text,
                             const SummaryConfig& summary_cfg) {
  const CleanDoc doc = preprocess(text, pipeline.preprocess);
  const std::vector<double> row = assemble_features(pipeline, text, doc);
  const std::vector<double> scores = predict_scores_row(pipeline.model, row.data(), row.size());

  ClassifyResult result;
  for (std::size_t j = 0; j < kNumCriteria && j < scores.size(); ++j) {
    result.scores[j] = scores[j];
    result.labels.met[j] = scores[j] >= 0.5;
  }
  result.summary = luhn_summarize(doc, summary_cfg);
  return result;
}

namespace {

json learner_to_json(const BinaryLearnerModel& m) {
  json trees = json::array();
  for (const auto& tree : m.trees) {
    json nodes = json::array();
    for (const auto& node : tree) {
      nodes.push_back(json::array(
          {node.feature, node.threshold, node.left, node.right, node.prob, node.n}));
    }
    trees.push_back(std::move(nodes));
  }
  return json{{"kind", to_string(m.kind)}, {"dim", m.dim},           {"trees", std::move(trees)},
              {"w", m.w},                  {"b", m.b},               {"layer_sizes", m.layer_sizes},
              {"weights", m.weights},      {"biases", m.biases}};
}

BinaryLearnerModel learner_from_json(const json& j) {
  BinaryLearnerModel m;
  m.kind = learner_kind_from_string(j.at("kind").get<std::string>());
  m.dim = j.at("dim").get<std::size_t>();
  for (const auto& tree : j.at("trees")) {
    std::vector<TreeNode> nodes;
    for (const auto& entry : tree) {
      TreeNode node;
      node.feature = entry.at(0).get<int>();
      node.threshold = entry.at(1).get<double>();
      node.left = entry.at(2).get<int>();
      node.right = entry.at(3).get<int>();
      node.prob = entry.at(4).get<double>();
      node.n = entry.at(5).get<std::size_t>();
      nodes.push_back(node);
    }
    m.trees.push_back(std::move(nodes));
  }
  m.w = j.at("w").get<std::vector<double>>();
  m.b = j.at("b").get<double>();
  m.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
  return m;
}

}  // namespace

std::string artifact_to_string(const TrainedPipeline& p) {
  json features;
  features["parts"] = json::array();
  for (FeaturePart part : p.parts) features["parts"].push_back(to_string(part));
  features["ngram_lo"] = p.ngram_lo;
  features["ngram_hi"] = p.ngram_hi;
  features["min_df"] = p.min_df;
  if (needs_vocab(p.parts)) {
    features["vocab"] =
        json{{"terms", p.vocab.terms}, {"df", p.vocab.df}, {"n_docs", p.vocab.n_docs}};
  } else {
    features["vocab"] = nullptr;
  }
  features["gazetteer"] = json{{"source", p.gazetteer_source},
                               {"fingerprint", hex64(gazetteer_fingerprint(p.gazetteer))}};
  if (p.embedding_source.has_value()) {
    features["embedding"] = json{{"source", *p.embedding_source},
                                 {"fingerprint", hex64(file_fingerprint(*p.embedding_source))}};
  } else {
    features["embedding"] = nullptr;
  }

  json learners = json::array();
  for (const auto& learner : p.model.learners) learners.push_back(learner_to_json(learner));
  const json model = {{"strategy", to_string(p.model.strategy)},
                      {"multi_output_alias", p.model.multi_output_alias},
                      {"chain_order", p.model.chain_order},
                      {"feature_dim", p.model.feature_dim},
                      {"learners", std::move(learners)}};

  const json artifact = {
      {"format_version", kArtifactFormatVersion},
      {"created_unix", p.created_unix},
      {"seed", p.seed},
      {"corpus_fingerprint", hex64(p.corpus_fp)},
      {"label_names", p.model.label_names},
      {"preprocess",
       {{"lowercase", p.preprocess.lowercase},
        {"strip_punctuation", p.preprocess.strip_punctuation},
        {"remove_stopwords", p.preprocess.remove_stopwords},
        {"lemmatize", p.preprocess.lemmatize}}},
      {"features", std::move(features)},
      {"model", std::move(model)},
  };
  return artifact.dump(2) + "\n";
}

void save_artifact(const TrainedPipeline& pipeline, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArtifactError("cannot write artifact: " + path.string());
  out << artifact_to_string(pipeline);
  if (!out) throw ArtifactError("failed writing artifact: " + path.string());
}

TrainedPipeline load_artifact(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("cannot open artifact: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ArtifactError("artifact is not valid JSON: " + std::string(e.what()));
  }

  try {
    const int version = doc.at("format_version").get<int>();
    if (version != kArtifactFormatVersion) {
      throw ArtifactError("unsupported artifact format_version " + std::to_string(version) +
                          " (expected " + std::to_string(kArtifactFormatVersion) + ")");
    }

    TrainedPipeline p;
    p.created_unix = doc.at("created_unix").get<std::int64_t>();
    p.seed = doc.at("seed").get<std::uint64_t>();
    p.corpus_fp = parse_hex64(doc.at("corpus_fingerprint").get<std::string>());

    const json& pp = doc.at("preprocess");
    p.preprocess.lowercase = pp.at("lowercase").get<bool>();
    p.preprocess.strip_punctuation = pp.at("strip_punctuation").get<bool>();
    p.preprocess.remove_stopwords = pp.at("remove_stopwords").get<bool>();
    p.preprocess.lemmatize = pp.at("lemmatize").get<bool>();

    const json& features = doc.at("features");
    for (const auto& part : features.at("parts")) {
      p.parts.push_back(feature_part_from_string(part.get<std::string>()));
    }
    p.ngram_lo = features.at("ngram_lo").get<int>();
    p.ngram_hi = features.at("ngram_hi").get<int>();
    p.min_df = features.at("min_df").get<std::size_t>();
    if (!features.at("vocab").is_null()) {
      const json& vocab = features.at("vocab");
      p.vocab.terms = vocab.at("terms").get<std::vector<std::string>>();
      p.vocab.df = vocab.at("df").get<std::vector<std::size_t>>();
      p.vocab.n_docs = vocab.at("n_docs").get<std::size_t>();
      p.vocab.ngram_lo = p.ngram_lo;
      p.vocab.ngram_hi = p.ngram_hi;
      p.vocab.min_df = p.min_df;
      for (std::size_t i = 0; i < p.vocab.terms.size(); ++i) {
        p.vocab.index.emplace(p.vocab.terms[i], i);
      }
    }

    const json& gaz = features.at("gazetteer");
    p.gazetteer_source = gaz.at("source").get<std::string>();
    p.gazetteer = p.gazetteer_source == "builtin" ? default_gazetteer()
                                                  : load_gazetteer(p.gazetteer_source);
    if (gazetteer_fingerprint(p.gazetteer) !=
        parse_hex64(gaz.at("fingerprint").get<std::string>())) {
      throw ArtifactError("gazetteer fingerprint mismatch; the referenced lexicon changed");
    }

    if (!features.at("embedding").is_null()) {
      const json& emb = features.at("embedding");
      p.embedding_source = emb.at("source").get<std::string>();
      if (file_fingerprint(*p.embedding_source) !=
          parse_hex64(emb.at("fingerprint").get<std::string>())) {
        throw ArtifactError("embedding fingerprint mismatch; the referenced table changed");
      }
      p.embeddings = load_embeddings(*p.embedding_source);
    }

    const json& model = doc.at("model");
    p.model.strategy = strategy_from_string(model.at("strategy").get<std::string>());
    p.model.multi_output_alias = model.at("multi_output_alias").get<bool>();
    p.model.chain_order = model.at("chain_order").get<std::vector<std::size_t>>();
    p.model.feature_dim = model.at("feature_dim").get<std::size_t>();
    p.model.label_names = doc.at("label_names").get<std::vector<std::string>>();
    for (const auto& learner : model.at("learners")) {
      p.model.learners.push_back(learner_from_json(learner));
    }
    return p;
  } catch (const json::exception& e) {
    throw ArtifactError("artifact is missing required fields: " + std::string(e.what()));
  }
}

bool clinical_guard(const std::string& text, const Gazetteer& gazetteer,
                    const GuardConfig& cfg) {
  const std::size_t tokens = tokenize(text).size();
  if (tokens < cfg.min_token_count) return false;
  return gazetteer_category_hits(text, gazetteer) >= cfg.min_gazetteer_hits;
}

StatsReport corpus_stats(const Corpus& corpus, const PreprocessConfig& preprocess_cfg) {
  StatsReport report;
  report.n_records = corpus.size();
  std::array<std::map<std::string, std::size_t>, kNumCriteria> term_counts;
  for (std::size_t j = 0; j < kNumCriteria; ++j) report.labels[j].name = kCriterionNames[j];

  for (const auto& record : corpus.records) {
    if (!record.labels.has_value()) continue;  // inference-only rows carry no stats
    std::vector<std::size_t> met_here;
    for (std::size_t j = 0; j < kNumCriteria; ++j) {
      if (record.labels->met[j]) {
        ++report.labels[j].met_count;
        met_here.push_back(j);
      } else {
        ++report.labels[j].not_met_count;
      }
    }
    if (met_here.empty()) continue;
    const CleanDoc doc = preprocess(record.text, preprocess_cfg);
    for (std::size_t j : met_here) {
      for (const auto& token : doc.tokens) ++term_counts[j][token];
    }
  }

  for (std::size_t j = 0; j < kNumCriteria; ++j) {
    std::vector<std::pair<std::string, std::size_t>> ranked(term_counts[j].begin(),
                                                            term_counts[j].end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (ranked.size() > 20) ranked.resize(20);
    report.labels[j].top_terms = std::move(ranked);
  }
  return report;
}

}  // namespace clinscreen
