#include "clinscreen/config.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "clinscreen/errors.hpp"

namespace clinscreen {

using nlohmann::json;

AppConfig default_app_config() {
  AppConfig config;
  config.synthetic = default_synthetic_spec();
  return config;
}

namespace {

template <typename T>
void read_into(const json& obj, const char* key, T& value) {
  if (obj.contains(key)) value = obj.at(key).get<T>();
}

std::size_t label_index(const std::string& name) {
  for (std::size_t j = 0; j < kNumCriteria; ++j) {
    if (name == kCriterionNames[j]) return j;
  }
  throw InvalidSpec("unknown label name in chain_order: " + name);
}

}  // namespace

AppConfig load_app_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error("config parse error: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw Error("config root must be a JSON object");

  AppConfig config = default_app_config();
  try {
    if (doc.contains("preprocess")) {
      const json& pp = doc.at("preprocess");
      read_into(pp, "lowercase", config.train.preprocess.lowercase);
      read_into(pp, "strip_punctuation", config.train.preprocess.strip_punctuation);
      read_into(pp, "remove_stopwords", config.train.preprocess.remove_stopwords);
      read_into(pp, "lemmatize", config.train.preprocess.lemmatize);
    }

    if (doc.contains("features")) {
      const json& f = doc.at("features");
      if (f.contains("parts")) {
        config.train.parts.clear();
        for (const auto& part : f.at("parts")) {
          config.train.parts.push_back(feature_part_from_string(part.get<std::string>()));
        }
      }
      read_into(f, "ngram_lo", config.train.ngram_lo);
      read_into(f, "ngram_hi", config.train.ngram_hi);
      read_into(f, "min_df", config.train.min_df);
      if (f.contains("embedding_file")) {
        config.train.embedding_file = f.at("embedding_file").get<std::string>();
      }
      if (f.contains("gazetteer_file")) {
        config.train.gazetteer_file = f.at("gazetteer_file").get<std::string>();
      }
    }

    if (doc.contains("learner")) {
      const json& l = doc.at("learner");
      if (l.contains("kind")) {
        config.train.learner.kind = learner_kind_from_string(l.at("kind").get<std::string>());
      }
      read_into(l, "max_depth", config.train.learner.max_depth);
      read_into(l, "min_samples_split", config.train.learner.min_samples_split);
      read_into(l, "n_trees", config.train.learner.n_trees);
      read_into(l, "max_features", config.train.learner.max_features);
      read_into(l, "bootstrap", config.train.learner.bootstrap);
      read_into(l, "n_threads", config.train.learner.n_threads);
      read_into(l, "lambda", config.train.learner.lambda);
      read_into(l, "svm_epochs", config.train.learner.svm_epochs);
      read_into(l, "hidden", config.train.learner.hidden);
      read_into(l, "learning_rate", config.train.learner.learning_rate);
      read_into(l, "momentum", config.train.learner.momentum);
      read_into(l, "mlp_epochs", config.train.learner.mlp_epochs);
      read_into(l, "batch_size", config.train.learner.batch_size);
    }

    if (doc.contains("strategy")) {
      const std::string name = doc.at("strategy").get<std::string>();
      config.train.strategy = strategy_from_string(name);
      config.train.multi_output = name == "multi_output" || name == "mo";
    }
    if (doc.contains("chain_order")) {
      config.train.chain_order.clear();
      for (const auto& name : doc.at("chain_order")) {
        config.train.chain_order.push_back(label_index(name.get<std::string>()));
      }
    }
    read_into(doc, "test_fraction", config.train.test_fraction);

    if (doc.contains("summary")) {
      const json& s = doc.at("summary");
      read_into(s, "max_sentences", config.summary.max_sentences);
      read_into(s, "keyword_k", config.summary.keyword_k);
      read_into(s, "luhn_top_fraction", config.summary.luhn_top_fraction);
      read_into(s, "luhn_gap", config.summary.luhn_gap);
      read_into(s, "position_boost", config.summary.position_boost);
    }
    read_into(doc, "summarize_method", config.summarize_method);

    if (doc.contains("guard")) {
      const json& g = doc.at("guard");
      read_into(g, "min_gazetteer_hits", config.guard.min_gazetteer_hits);
      read_into(g, "min_token_count", config.guard.min_token_count);
    }

    if (doc.contains("backend")) {
      const json& b = doc.at("backend");
      config.backend_configured = true;
      if (b.contains("kind")) {
        const std::string kind = b.at("kind").get<std::string>();
        if (kind == "mock") {
          config.backend.kind = BackendKind::mock;
        } else if (kind == "live") {
          config.backend.kind = BackendKind::live;
        } else {
          throw InvalidSpec("backend kind must be \"mock\" or \"live\"");
        }
      }
      read_into(b, "endpoint", config.backend.endpoint);
      read_into(b, "credential_env", config.backend.credential_env);
      read_into(b, "model", config.backend.model);
      read_into(b, "embed_model", config.backend.embed_model);
      read_into(b, "temperature", config.backend.temperature);
      read_into(b, "timeout_seconds", config.backend.timeout_seconds);
      read_into(b, "mock_seed", config.backend.mock_seed);
      read_into(b, "embed_dim", config.backend.embed_dim);
      if (b.contains("mock_script")) {
        config.mock_script = b.at("mock_script").get<std::string>();
      }
    }

    if (doc.contains("synthetic")) {
      const json& s = doc.at("synthetic");
      read_into(s, "n_records", config.synthetic.n_records);
      if (s.contains("positive_rate")) {
        const json& rate = s.at("positive_rate");
        if (rate.is_number()) {
          config.synthetic.positive_rate.fill(rate.get<double>());
        } else {
          const auto rates = rate.get<std::vector<double>>();
          if (rates.size() != kNumCriteria) {
            throw InvalidSpec("positive_rate needs one value or four");
          }
          std::copy(rates.begin(), rates.end(), config.synthetic.positive_rate.begin());
        }
      }
      read_into(s, "sentences_lo", config.synthetic.sentences_per_record.lo);
      read_into(s, "sentences_hi", config.synthetic.sentences_per_record.hi);
    }

    if (doc.contains("serve")) {
      const json& s = doc.at("serve");
      read_into(s, "host", config.serve_host);
      read_into(s, "port", config.serve_port);
    }
  } catch (const json::exception& e) {
    throw Error("config field has the wrong type: " + std::string(e.what()));
  }
  return config;
}

CompletionBackend make_backend(const AppConfig& config) {
  CompletionBackend backend(config.backend);
  if (config.backend.kind == BackendKind::mock && config.mock_script.has_value()) {
    backend.load_script_file(*config.mock_script);
  }
  return backend;
}

}  // namespace clinscreen
