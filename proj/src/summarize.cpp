#include "clinscreen/summarize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "clinscreen/errors.hpp"
#include "clinscreen/resources.hpp"

namespace clinscreen {

namespace {

void check_config(const SummaryConfig& cfg) {
  if (cfg.max_sentences < 1) throw InvalidSpec("max_sentences must be >= 1");
  if (cfg.keyword_k < 1) throw InvalidSpec("keyword_k must be >= 1");
  if (cfg.luhn_top_fraction <= 0.0 || cfg.luhn_top_fraction > 1.0) {
    throw InvalidSpec("luhn_top_fraction must be in (0, 1]");
  }
  if (cfg.position_boost < 0.0) throw InvalidSpec("position_boost must be >= 0");
}

// Sentences with positive score, ranked by (score desc, index asc), capped at
// max_sentences; a doc where nothing scores falls back to its first sentence.
// Output is always in source order.
ExtractiveSummary select_top(const CleanDoc& doc, const std::vector<double>& scores,
                             std::size_t max_sentences) {
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  std::vector<std::size_t> chosen;
  for (std::size_t i : order) {
    if (chosen.size() >= max_sentences) break;
    if (scores[i] <= 0.0) break;  // ranking puts all positive scores first
    chosen.push_back(i);
  }
  if (chosen.empty()) chosen.push_back(0);
  std::sort(chosen.begin(), chosen.end());

  ExtractiveSummary summary;
  for (std::size_t i : chosen) {
    if (!summary.summary_text.empty()) summary.summary_text += ' ';
    summary.summary_text += doc.sentences[i].raw;
    summary.selected.push_back({i, doc.sentences[i].raw, scores[i]});
  }
  return summary;
}

// Top ceil(fraction * V) candidate terms by frequency, ties lexicographic.
std::set<std::string> top_terms_by_frequency(const std::map<std::string, std::size_t>& freq,
                                             double fraction) {
  std::set<std::string> top;
  if (freq.empty()) return top;
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const auto k = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(ranked.size())));
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) top.insert(ranked[i].first);
  return top;
}

}  // namespace

ExtractiveSummary luhn_summarize(const CleanDoc& doc, const SummaryConfig& cfg) {
  check_config(cfg);
  if (doc.sentences.empty()) throw EmptyDocument();

  const auto& stopwords = default_stopwords();
  std::map<std::string, std::size_t> freq;
  for (const auto& t : doc.tokens) {
    if (!stopwords.count(t)) ++freq[t];
  }
  const std::set<std::string> significant = top_terms_by_frequency(freq, cfg.luhn_top_fraction);

  const std::size_t n_sentences = doc.sentences.size();
  std::vector<double> scores(n_sentences, 0.0);
  for (std::size_t s = 0; s < n_sentences; ++s) {
    const auto& span = doc.sentences[s];
    // Cluster: run of significant tokens allowing at most luhn_gap
    // insignificant tokens between neighbours; score = sig^2 / span length.
    double best = 0.0;
    std::size_t cluster_start = 0;
    std::size_t last_sig = 0;
    std::size_t sig_count = 0;
    bool open = false;
    auto close = [&]() {
      if (!open) return;
      const double len = static_cast<double>(last_sig - cluster_start + 1);
      best = std::max(best, static_cast<double>(sig_count * sig_count) / len);
      open = false;
    };
    for (std::size_t i = span.token_begin; i < span.token_end; ++i) {
      if (!significant.count(doc.tokens[i])) continue;
      if (open && i - last_sig - 1 > cfg.luhn_gap) close();
      if (!open) {
        open = true;
        cluster_start = i;
        sig_count = 0;
      }
      last_sig = i;
      ++sig_count;
    }
    close();
    const double position =
        1.0 + cfg.position_boost *
                  (1.0 - static_cast<double>(s) / static_cast<double>(n_sentences));
    scores[s] = best * position;
  }
  return select_top(doc, scores, cfg.max_sentences);
}

ExtractiveSummary tfidf_summarize(const CleanDoc& doc, const Vocabulary& background_vocab,
                                  const SummaryConfig& cfg) {
  check_config(cfg);
  if (doc.sentences.empty()) throw EmptyDocument();

  const SparseVector tfidf = transform_tfidf(doc, background_vocab);
  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& [i, w] : tfidf.entries) {
    const std::string& term = background_vocab.terms[i];
    if (term.find(' ') != std::string::npos) continue;  // keywords are unigrams
    ranked.emplace_back(term, w);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > cfg.keyword_k) ranked.resize(cfg.keyword_k);
  std::map<std::string, double> keyword_weight(ranked.begin(), ranked.end());

  std::vector<double> scores(doc.sentences.size(), 0.0);
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    const auto& span = doc.sentences[s];
    for (std::size_t i = span.token_begin; i < span.token_end; ++i) {
      auto it = keyword_weight.find(doc.tokens[i]);
      if (it != keyword_weight.end()) scores[s] += it->second;
    }
  }
  return select_top(doc, scores, cfg.max_sentences);
}

ExtractiveSummary cv_tfidf_summarize(const CleanDoc& doc, const SummaryConfig& cfg) {
  check_config(cfg);
  if (doc.sentences.empty()) throw EmptyDocument();

  // One mini-document per sentence; idf is computed across sentences.
  std::vector<CleanDoc> sentence_docs;
  for (const auto& span : doc.sentences) {
    CleanDoc sd;
    sd.tokens.assign(doc.tokens.begin() + static_cast<std::ptrdiff_t>(span.token_begin),
                     doc.tokens.begin() + static_cast<std::ptrdiff_t>(span.token_end));
    SentenceSpan local = span;
    local.token_begin = 0;
    local.token_end = sd.tokens.size();
    sd.sentences.push_back(std::move(local));
    sentence_docs.push_back(std::move(sd));
  }
  const Vocabulary vocab = fit_vocabulary(sentence_docs, 1, 1, 1);

  std::vector<SparseVector> rows;
  rows.reserve(sentence_docs.size());
  for (const auto& sd : sentence_docs) rows.push_back(transform_tfidf(sd, vocab));

  std::vector<double> max_weight(vocab.size(), 0.0);
  for (const auto& row : rows) {
    for (const auto& [i, w] : row.entries) max_weight[i] = std::max(max_weight[i], w);
  }
  std::vector<std::pair<std::string, double>> ranked;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (max_weight[i] > 0.0) ranked.emplace_back(vocab.terms[i], max_weight[i]);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (ranked.size() > cfg.keyword_k) ranked.resize(cfg.keyword_k);
  std::set<std::string> keywords;
  for (const auto& [term, w] : ranked) keywords.insert(term);

  // Relevance = distinct keywords present in the sentence.
  std::vector<double> scores(doc.sentences.size(), 0.0);
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    std::set<std::string> seen;
    const auto& sd = sentence_docs[s];
    for (const auto& t : sd.tokens) {
      if (keywords.count(t)) seen.insert(t);
    }
    scores[s] = static_cast<double>(seen.size());
  }
  return select_top(doc, scores, cfg.max_sentences);
}

}  // namespace clinscreen
