#include "clinscreen/textprep.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include "clinscreen/errors.hpp"
#include "clinscreen/resources.hpp"

namespace clinscreen {

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string to_lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

// Stem ends consonant-vowel-consonant (final char not w/x/y): the classic
// silent-e restoration cue (tak -> take, not -> note).
bool cvc_ending(const std::string& s) {
  if (s.size() < 3) return false;
  char a = s[s.size() - 3], b = s[s.size() - 2], c = s[s.size() - 1];
  return !is_vowel(a) && is_vowel(b) && !is_vowel(c) && c != 'w' && c != 'x' && c != 'y';
}

// Porter's measure: the m of [C](VC)^m[V].
int measure(const std::string& s) {
  int m = 0;
  bool in_vowel_run = false;
  for (char c : s) {
    if (is_vowel(c)) {
      in_vowel_run = true;
    } else {
      if (in_vowel_run) ++m;
      in_vowel_run = false;
    }
  }
  return m;
}

// Undo consonant doubling after stripping -ing/-ed, except for letters that
// legitimately double at word end (ss, ll, ff, zz).
std::string undouble(std::string stem) {
  std::size_t n = stem.size();
  if (n >= 2 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1])) {
    char c = stem[n - 1];
    if (c != 's' && c != 'l' && c != 'f' && c != 'z') stem.pop_back();
  }
  return stem;
}

std::string strip_verbal_suffix(const std::string& t, std::size_t suffix_len) {
  std::string stem = t.substr(0, t.size() - suffix_len);
  if (stem.size() < 3) return t;
  std::string u = undouble(stem);
  if (u.size() != stem.size()) return u;
  // Restore a silent e only on short stems (hop -> hope); longer stems like
  // "worsen" keep their bare form.
  if (cvc_ending(stem) && measure(stem) == 1) return stem + 'e';
  return stem;
}

bool ends_with(const std::string& s, const char* suffix) {
  std::string_view sv(suffix);
  return s.size() >= sv.size() && s.compare(s.size() - sv.size(), sv.size(), sv) == 0;
}

std::string lemma_step(const std::string& t,
                       const std::unordered_map<std::string, std::string>& overrides) {
  auto it = overrides.find(t);
  if (it != overrides.end()) return it->second;
  const std::size_t n = t.size();
  if (n >= 5 && ends_with(t, "ies")) return t.substr(0, n - 3) + 'y';
  if (n >= 5 && ends_with(t, "es")) {
    std::string stem = t.substr(0, n - 2);
    if (ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") ||
        ends_with(stem, "ch") || ends_with(stem, "sh"))
      return stem;
  }
  if (n >= 4 && ends_with(t, "s") && !ends_with(t, "ss") && !ends_with(t, "us") &&
      !ends_with(t, "is"))
    return t.substr(0, n - 1);
  if (n >= 6 && ends_with(t, "ing")) return strip_verbal_suffix(t, 3);
  if (n >= 5 && ends_with(t, "ed")) return strip_verbal_suffix(t, 2);
  return t;
}

}  // namespace

const std::vector<ScrubRule>& default_scrub_rules() {
  static const std::vector<ScrubRule> rules = {
      // 12/03/2094, 2094-12-03 and friends
      {R"(\b\d{1,4}[/-]\d{1,2}[/-]\d{1,4}\b)", ""},
      // 10:30, 10:30:15, with optional am/pm tail
      {R"(\b\d{1,2}:\d{2}(:\d{2})?(\s*[ap]\.?m\.?)?)", ""},
      // standalone numeric lab tokens
      {R"(\b\d+(\.\d+)?\b)", ""},
      // the lab measuring unit
      {R"(\bmg\b)", ""},
      // collapse what the removals left behind
      {R"(\s+)", " "},
  };
  return rules;
}

std::string scrub(const std::string& text, const std::vector<ScrubRule>& rules) {
  std::string out = text;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    try {
      auto flags = std::regex::ECMAScript;
      if (rules[i].case_insensitive) flags |= std::regex::icase;
      std::regex re(rules[i].pattern, flags);
      out = std::regex_replace(out, re, rules[i].replacement);
    } catch (const std::regex_error& e) {
      throw InvalidPattern(i, e.what());
    }
  }
  // trim
  std::size_t b = out.find_first_not_of(' ');
  if (b == std::string::npos) return "";
  std::size_t e = out.find_last_not_of(' ');
  return out.substr(b, e - b + 1);
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : text) {
    if (c == '\'') continue;
    if (is_word_char(c)) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<std::string> split_sentences(const std::string& text,
                                         const std::unordered_set<std::string>& abbreviations) {
  std::vector<std::string> sentences;
  std::string cur;
  auto flush = [&]() {
    std::size_t b = cur.find_first_not_of(" \t\r");
    if (b != std::string::npos) {
      std::size_t e = cur.find_last_not_of(" \t\r");
      sentences.push_back(cur.substr(b, e - b + 1));
    }
    cur.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\n') {
      flush();
      continue;
    }
    if (c == '?' || c == '!') {
      flush();
      continue;
    }
    if (c == '.') {
      // look back at the word directly before the period
      std::size_t e = i;
      while (e > 0 && is_word_char(text[e - 1])) --e;
      std::string prev = to_lower(text.substr(e, i - e));
      if (!prev.empty() && abbreviations.count(prev)) {
        cur.push_back(c);  // guarded period stays inside the sentence
        continue;
      }
      flush();
      continue;
    }
    cur.push_back(c);
  }
  flush();
  return sentences;
}

std::vector<std::string> split_sentences(const std::string& text) {
  return split_sentences(text, default_abbreviations());
}

std::string lemmatize_token(const std::string& token,
                            const std::unordered_map<std::string, std::string>& overrides) {
  std::string cur = token;
  for (int iter = 0; iter < 4; ++iter) {
    std::string next = lemma_step(cur, overrides);
    if (next == cur) break;
    cur = std::move(next);
  }
  return cur;
}

std::vector<std::string> normalize(const std::vector<std::string>& tokens,
                                   const PreprocessConfig& config) {
  const auto& stopwords = config.stopwords.empty() ? default_stopwords() : config.stopwords;
  const auto& overrides =
      config.lemma_overrides.empty() ? default_lemma_overrides() : config.lemma_overrides;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& raw : tokens) {
    std::string t = config.lowercase ? to_lower(raw) : raw;
    if (config.remove_stopwords && stopwords.count(to_lower(t))) continue;
    if (config.lemmatize) t = lemmatize_token(t, overrides);
    // A lemma can land back in the stopword list; drop it so that applying
    // normalize twice changes nothing.
    if (config.remove_stopwords && stopwords.count(to_lower(t))) continue;
    out.push_back(std::move(t));
  }
  return out;
}

CleanDoc preprocess(const std::string& text, const PreprocessConfig& config) {
  const auto& rules = config.scrub_rules.empty() ? default_scrub_rules() : config.scrub_rules;
  const auto& abbrevs =
      config.abbreviations.empty() ? default_abbreviations() : config.abbreviations;
  std::string cleaned = scrub(text, rules);
  CleanDoc doc;
  for (const std::string& sentence : split_sentences(cleaned, abbrevs)) {
    std::vector<std::string> raw_tokens;
    if (config.strip_punctuation) {
      raw_tokens = tokenize(sentence);
    } else {
      // whitespace-delimited chunks, punctuation kept
      std::string cur;
      for (char c : sentence) {
        if (std::isspace(static_cast<unsigned char>(c))) {
          if (!cur.empty()) raw_tokens.push_back(std::move(cur)), cur.clear();
        } else {
          cur.push_back(c);
        }
      }
      if (!cur.empty()) raw_tokens.push_back(std::move(cur));
    }
    std::vector<std::string> norm = normalize(raw_tokens, config);
    SentenceSpan span;
    span.raw = sentence;
    span.token_begin = doc.tokens.size();
    for (auto& t : norm) doc.tokens.push_back(std::move(t));
    span.token_end = doc.tokens.size();
    doc.sentences.push_back(std::move(span));
  }
  return doc;
}

}  // namespace clinscreen
