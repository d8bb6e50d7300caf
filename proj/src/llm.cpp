#include "clinscreen/llm.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "clinscreen/errors.hpp"
#include "clinscreen/resources.hpp"
#include "clinscreen/rng.hpp"

namespace clinscreen {

namespace {

std::atomic<std::uint64_t> g_live_calls{0};

std::string to_lower_copy(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string escape_response(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_response(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out.push_back(s[i]);
      continue;
    }
    ++i;
    switch (s[i]) {
      case 'n': out.push_back('\n'); break;
      case 't': out.push_back('\t'); break;
      case '\\': out.push_back('\\'); break;
      default: out.push_back(s[i]);
    }
  }
  return out;
}

std::string live_credential(const BackendConfig& cfg) {
  // The credential is read from the environment variable named in the
  // config — never from a file or a flag.
  const char* value = std::getenv(cfg.credential_env.c_str());
  if (value == nullptr || *value == '\0') {
    throw BackendError("credential environment variable " + cfg.credential_env +
                       " is not set");
  }
  return value;
}

nlohmann::json live_post(const BackendConfig& cfg, const std::string& path,
                         const nlohmann::json& payload) {
  const std::string credential = live_credential(cfg);
  httplib::Client client(cfg.endpoint);
  client.set_connection_timeout(cfg.timeout_seconds, 0);
  client.set_read_timeout(cfg.timeout_seconds, 0);
  httplib::Headers headers = {{"Authorization", "Bearer " + credential}};

  g_live_calls.fetch_add(1);
  auto result = client.Post(path, headers, payload.dump(), "application/json");
  if (!result) throw BackendTimeout();
  if (result->status < 200 || result->status >= 300) {
    throw BackendError(result->status, result->body.substr(0, 200));
  }
  try {
    return nlohmann::json::parse(result->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw BackendError("unparseable response: " + std::string(e.what()));
  }
}

}  // namespace

std::uint64_t prompt_fingerprint(std::string_view prompt) { return fnv1a64(prompt); }

CompletionBackend CompletionBackend::mock(std::uint64_t seed) {
  BackendConfig cfg;
  cfg.kind = BackendKind::mock;
  cfg.mock_seed = seed;
  return CompletionBackend(cfg);
}

void CompletionBackend::script(const std::string& prompt, const std::string& response) {
  script_[prompt_fingerprint(prompt)] = response;
}

void CompletionBackend::load_script_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mock script file: " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab != 16) {
      throw Error("mock script line " + std::to_string(line_no) +
                  ": expected <16-hex-fingerprint><TAB><response>");
    }
    std::uint64_t fp = 0;
    for (char c : line.substr(0, 16)) {
      const int digit = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                        : (c >= 'a' && c <= 'f')                    ? c - 'a' + 10
                        : (c >= 'A' && c <= 'F')                    ? c - 'A' + 10
                                                                    : -1;
      if (digit < 0) {
        throw Error("mock script line " + std::to_string(line_no) + ": bad fingerprint");
      }
      fp = fp << 4 | static_cast<std::uint64_t>(digit);
    }
    script_[fp] = unescape_response(line.substr(tab + 1));
  }
}

std::string CompletionBackend::complete(const std::string& prompt) const {
  if (cfg_.kind == BackendKind::mock) {
    const std::uint64_t fp = prompt_fingerprint(prompt);
    auto it = script_.find(fp);
    if (it != script_.end()) return it->second;
    // Unscripted prompts still answer deterministically so chains always run.
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fp));
    return std::string("[mock completion ") + hex + "]";
  }

  nlohmann::json payload = {
      {"model", cfg_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", cfg_.temperature},
  };
  const nlohmann::json reply = live_post(cfg_, "/v1/chat/completions", payload);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw BackendError("chat response missing choices[0].message.content");
  }
}

std::vector<double> CompletionBackend::embed(const std::string& text) const {
  if (cfg_.kind == BackendKind::mock) {
    // Seeded by content so equal texts embed equally and the dimension is
    // fixed by config.
    Rng rng(stable_hash(cfg_.mock_seed, fnv1a64(text)));
    std::vector<double> vec(cfg_.embed_dim);
    for (auto& v : vec) v = 2.0 * rng.next_real() - 1.0;
    return vec;
  }

  nlohmann::json payload = {{"model", cfg_.embed_model}, {"input", text}};
  const nlohmann::json reply = live_post(cfg_, "/v1/embeddings", payload);
  try {
    return reply.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw BackendError("embedding response missing data[0].embedding");
  }
}

std::uint64_t llm_live_call_count() { return g_live_calls.load(); }

void reset_llm_live_call_count() { g_live_calls.store(0); }

namespace {

bool slot_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

}  // namespace

std::string render_prompt(const std::string& tmpl,
                          const std::map<std::string, std::string>& bindings) {
  std::string out;
  out.reserve(tmpl.size());
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl[i] != '{') {
      out.push_back(tmpl[i]);
      ++i;
      continue;
    }
    const std::size_t close = tmpl.find('}', i + 1);
    if (close == std::string::npos) {
      out.push_back(tmpl[i]);
      ++i;
      continue;
    }
    const std::string name = tmpl.substr(i + 1, close - i - 1);
    const bool well_formed =
        !name.empty() && std::all_of(name.begin(), name.end(), slot_name_char);
    if (!well_formed) {  // not a slot; keep the brace literal
      out.push_back(tmpl[i]);
      ++i;
      continue;
    }
    auto it = bindings.find(name);
    if (it == bindings.end()) throw MissingSlot(name);
    out += it->second;
    i = close + 1;
  }
  return out;
}

namespace {

std::size_t count_slot(const std::string& tmpl, const std::string& slot) {
  const std::string needle = "{" + slot + "}";
  std::size_t count = 0;
  for (std::size_t at = tmpl.find(needle); at != std::string::npos;
       at = tmpl.find(needle, at + 1)) {
    ++count;
  }
  return count;
}

void check_chain_config(const RefineChainConfig& cfg) {
  if (count_slot(cfg.question_template, "text") != 1) {
    throw BadTemplate("question template needs {text} exactly once");
  }
  if (count_slot(cfg.refine_template, "summary") != 1 ||
      count_slot(cfg.refine_template, "criteria") != 1) {
    throw BadTemplate("refine template needs {summary} and {criteria} exactly once");
  }
}

}  // namespace

RefineChainConfig default_refine_chain_config() {
  return {default_question_template(), default_refine_template()};
}

RefineResult refine_chain_summarize(const std::string& record_text,
                                    const std::vector<std::string>& predicted_criteria,
                                    const CompletionBackend& backend,
                                    const RefineChainConfig& cfg) {
  check_chain_config(cfg);
  for (const auto& name : predicted_criteria) {
    if (std::find(kCriterionNames.begin(), kCriterionNames.end(), name) ==
        kCriterionNames.end()) {
      throw InvalidSpec("unknown criterion in refine chain: " + name);
    }
  }

  const std::string question =
      render_prompt(cfg.question_template, {{"text", record_text}});
  RefineResult result;
  result.transcript.push_back({TranscriptRole::prompt, ChainStep::question, question});
  const std::string draft = backend.complete(question);
  result.transcript.push_back({TranscriptRole::response, ChainStep::question, draft});

  std::string joined;
  if (predicted_criteria.empty()) {
    joined = "none of the modeled criteria";
  } else {
    for (std::size_t i = 0; i < predicted_criteria.size(); ++i) {
      if (i > 0) joined += ", ";
      joined += predicted_criteria[i];
    }
  }
  const std::string refine =
      render_prompt(cfg.refine_template, {{"summary", draft}, {"criteria", joined}});
  result.transcript.push_back({TranscriptRole::prompt, ChainStep::refine, refine});
  result.summary = backend.complete(refine);
  result.transcript.push_back({TranscriptRole::response, ChainStep::refine, result.summary});
  return result;
}

namespace {

// Whole-name occurrence: neighbours (when present) must not be alphanumeric,
// so ABDOMINAL never matches inside "abdominally".
bool contains_label_name(const std::string& haystack_lower, const std::string& name_lower) {
  for (std::size_t at = haystack_lower.find(name_lower); at != std::string::npos;
       at = haystack_lower.find(name_lower, at + 1)) {
    const bool left_ok =
        at == 0 || !std::isalnum(static_cast<unsigned char>(haystack_lower[at - 1]));
    const std::size_t end = at + name_lower.size();
    const bool right_ok = end == haystack_lower.size() ||
                          !std::isalnum(static_cast<unsigned char>(haystack_lower[end]));
    if (left_ok && right_ok) return true;
  }
  return false;
}

}  // namespace

ZeroShotResult zero_shot_classify(
    const std::string& record_text,
    const std::vector<std::pair<std::string, std::string>>& label_definitions,
    const CompletionBackend& backend) {
  if (label_definitions.size() != kNumCriteria) {
    throw InvalidSpec("zero-shot needs definitions for exactly the four criteria");
  }
  for (std::size_t i = 0; i < kNumCriteria; ++i) {
    if (label_definitions[i].first != kCriterionNames[i]) {
      throw InvalidSpec("zero-shot definitions must follow the canonical label order");
    }
  }

  std::string prompt =
      "Decide which clinical trial eligibility criteria the patient meets.\n"
      "Criteria definitions:\n";
  for (const auto& [name, definition] : label_definitions) {
    prompt += name;
    prompt += ": ";
    prompt += definition;
    prompt += '\n';
  }
  prompt += "Patient note:\n";
  prompt += record_text;
  prompt +=
      "\nAnswer with the comma-separated names of the met criteria only, or "
      "\"none\" if no criterion is met.";

  ZeroShotResult result;
  result.prompt = prompt;
  result.raw_response = backend.complete(prompt);

  const std::string lowered = to_lower_copy(result.raw_response);
  bool any = false;
  for (std::size_t i = 0; i < kNumCriteria; ++i) {
    const bool hit = contains_label_name(lowered, to_lower_copy(kCriterionNames[i]));
    result.labels.met[i] = hit;
    any = any || hit;
  }
  if (!any) {
    // An explicit "none" is a valid answer; anything else is unparseable.
    const auto tokens = [&] {
      std::vector<std::string> out;
      std::string cur;
      for (unsigned char c : lowered) {
        if (std::isalnum(c)) {
          cur.push_back(static_cast<char>(c));
        } else if (!cur.empty()) {
          out.push_back(std::move(cur));
          cur.clear();
        }
      }
      if (!cur.empty()) out.push_back(std::move(cur));
      return out;
    }();
    const bool has_none = std::find(tokens.begin(), tokens.end(), "none") != tokens.end();
    result.parse_warning = !has_none;
  }
  return result;
}

std::vector<double> remote_embed(const std::string& text, const CompletionBackend& backend) {
  return backend.embed(text);
}

}  // namespace clinscreen
