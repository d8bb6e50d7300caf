#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clinscreen/corpus.hpp"

namespace clinscreen {

enum class BackendKind { mock, live };

struct BackendConfig {
  BackendKind kind = BackendKind::mock;

  // live endpoint
  std::string endpoint = "http://127.0.0.1:8080";
  std::string credential_env = "CLINSCREEN_LLM_KEY";  // name of the env var, never a value
  std::string model = "gpt-3.5-turbo";
  std::string embed_model = "text-embedding-ada-002";
  double temperature = 0.0;
  int timeout_seconds = 30;

  // mock determinism knobs
  std::uint64_t mock_seed = 0;
  std::size_t embed_dim = 16;
};

std::uint64_t prompt_fingerprint(std::string_view prompt);

// Completion + embedding handle. The mock kind answers from a scripted
// fingerprint table with a deterministic fallback; the live kind speaks a
// chat-completion / embedding JSON protocol over HTTP.
class CompletionBackend {
 public:
  CompletionBackend() = default;
  explicit CompletionBackend(BackendConfig cfg) : cfg_(std::move(cfg)) {}
  static CompletionBackend mock(std::uint64_t seed = 0);

  // Registers a canned answer for exactly this prompt (mock only).
  void script(const std::string& prompt, const std::string& response);
  // Script file: one "<16-hex-digit fingerprint><TAB><escaped response>" per
  // line; \n, \t and \\ escapes; '#' lines are comments.
  void load_script_file(const std::filesystem::path& path);

  std::string complete(const std::string& prompt) const;
  std::vector<double> embed(const std::string& text) const;

  const BackendConfig& config() const { return cfg_; }

 private:
  BackendConfig cfg_;
  std::unordered_map<std::uint64_t, std::string> script_;
};

// Number of HTTP calls issued by live backends since process start (or the
// last reset). The default test suite asserts this stays at zero.
std::uint64_t llm_live_call_count();
void reset_llm_live_call_count();

// {slot} substitution; single pass, so substituted text is never re-scanned.
std::string render_prompt(const std::string& tmpl,
                          const std::map<std::string, std::string>& bindings);

struct RefineChainConfig {
  std::string question_template;  // needs {text} exactly once
  std::string refine_template;    // needs {summary} and {criteria} exactly once
};

RefineChainConfig default_refine_chain_config();

enum class TranscriptRole { prompt, response };
enum class ChainStep { question, refine };

struct TranscriptEntry {
  TranscriptRole role = TranscriptRole::prompt;
  ChainStep step = ChainStep::question;
  std::string content;
};

struct RefineResult {
  std::string summary;  // the step-2 response
  std::vector<TranscriptEntry> transcript;  // exactly 4 entries
};

// Two-prompt refine chain: question prompt over the note, then a refine
// prompt embedding the first answer and the met-criteria list.
RefineResult refine_chain_summarize(const std::string& record_text,
                                    const std::vector<std::string>& predicted_criteria,
                                    const CompletionBackend& backend,
                                    const RefineChainConfig& cfg);

struct ZeroShotResult {
  CriterionLabels labels;
  bool parse_warning = false;  // set when the response named no label and no "none"
  std::string prompt;
  std::string raw_response;
};

// One prompt enumerating the four criteria with their definitions; the
// response is parsed by exact (case-insensitive) label-name matching.
ZeroShotResult zero_shot_classify(
    const std::string& record_text,
    const std::vector<std::pair<std::string, std::string>>& label_definitions,
    const CompletionBackend& backend);

std::vector<double> remote_embed(const std::string& text, const CompletionBackend& backend);

}  // namespace clinscreen
