#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "clinscreen/corpus.hpp"
#include "clinscreen/llm.hpp"
#include "clinscreen/pipeline.hpp"
#include "clinscreen/summarize.hpp"

namespace clinscreen {

// Everything the CLI can override through --config <json>. Every field has a
// working default, so an empty file (or none) is valid.
struct AppConfig {
  TrainOptions train;  // includes preprocess flags, feature parts, learner spec
  SummaryConfig summary;
  std::string summarize_method = "luhn";  // luhn | tfidf | cvtfidf
  GuardConfig guard;
  BackendConfig backend;
  bool backend_configured = false;  // a "backend" section was present
  std::optional<std::string> mock_script;
  SyntheticSpec synthetic;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
};

AppConfig default_app_config();
AppConfig load_app_config(const std::filesystem::path& path);

// Builds the backend described by the config (loading any mock script).
CompletionBackend make_backend(const AppConfig& config);

}  // namespace clinscreen
