#include "clinscreen/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clinscreen/errors.hpp"
#include "clinscreen/resources.hpp"
#include "clinscreen/rng.hpp"

namespace clinscreen {

double SparseVector::l2_norm() const {
  double s = 0.0;
  for (const auto& [i, w] : entries) s += w * w;
  return std::sqrt(s);
}

SparseVector sparse_from_dense(const std::vector<double>& dense) {
  SparseVector out;
  out.dim = dense.size();
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) out.entries.emplace_back(i, dense[i]);
  }
  return out;
}

std::vector<double> sparse_to_dense(const SparseVector& v) {
  std::vector<double> out(v.dim, 0.0);
  for (const auto& [i, w] : v.entries) out[i] = w;
  return out;
}

std::vector<std::string> extract_ngrams(const CleanDoc& doc, int lo, int hi) {
  std::vector<std::string> grams;
  for (const auto& sent : doc.sentences) {
    const std::size_t len = sent.token_end - sent.token_begin;
    for (int n = lo; n <= hi; ++n) {
      if (n <= 0 || static_cast<std::size_t>(n) > len) continue;
      for (std::size_t start = sent.token_begin; start + n <= sent.token_end; ++start) {
        std::string gram = doc.tokens[start];
        for (std::size_t j = 1; j < static_cast<std::size_t>(n); ++j) {
          gram += ' ';
          gram += doc.tokens[start + j];
        }
        grams.push_back(std::move(gram));
      }
    }
  }
  return grams;
}

Vocabulary fit_vocabulary(std::span<const CleanDoc> docs, int ngram_lo, int ngram_hi,
                          std::size_t min_df) {
  if (docs.empty()) throw EmptyCorpus();
  // std::map keeps terms sorted, which fixes the index assignment.
  std::map<std::string, std::size_t> doc_freq;
  for (const auto& doc : docs) {
    auto grams = extract_ngrams(doc, ngram_lo, ngram_hi);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++doc_freq[std::move(g)];
  }

  Vocabulary vocab;
  vocab.n_docs = docs.size();
  vocab.ngram_lo = ngram_lo;
  vocab.ngram_hi = ngram_hi;
  vocab.min_df = min_df;
  for (auto& [term, df] : doc_freq) {
    if (df < min_df) continue;
    vocab.index.emplace(term, vocab.terms.size());
    vocab.terms.push_back(term);
    vocab.df.push_back(df);
  }
  return vocab;
}

SparseVector transform_count(const CleanDoc& doc, const Vocabulary& vocab) {
  std::map<std::size_t, double> counts;
  for (auto& gram : extract_ngrams(doc, vocab.ngram_lo, vocab.ngram_hi)) {
    auto it = vocab.index.find(gram);
    if (it != vocab.index.end()) counts[it->second] += 1.0;
  }
  SparseVector out;
  out.dim = vocab.size();
  out.entries.assign(counts.begin(), counts.end());
  return out;
}

double idf_weight(const Vocabulary& vocab, std::size_t term_index) {
  const double n = static_cast<double>(vocab.n_docs);
  const double df = static_cast<double>(vocab.df.at(term_index));
  return std::log((1.0 + n) / (1.0 + df)) + 1.0;
}

SparseVector transform_tfidf(const CleanDoc& doc, const Vocabulary& vocab) {
  SparseVector out = transform_count(doc, vocab);
  for (auto& [i, w] : out.entries) w *= idf_weight(vocab, i);
  const double norm = out.l2_norm();
  if (norm > 0.0) {
    for (auto& [i, w] : out.entries) w /= norm;
  }
  return out;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file: " + path.string());
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string term;
    row >> term;
    std::vector<double> vec;
    double v;
    while (row >> v) vec.push_back(v);
    if (term.empty() || vec.empty()) {
      throw Error("malformed embedding line " + std::to_string(line_no));
    }
    if (table.dim == 0) {
      table.dim = vec.size();
    } else if (vec.size() != table.dim) {
      throw DimMismatch(table.dim, vec.size());
    }
    table.vectors[term] = std::move(vec);
  }
  return table;
}

std::vector<double> embed_mean(const CleanDoc& doc, const EmbeddingTable& table) {
  std::vector<double> acc(table.dim, 0.0);
  std::size_t hits = 0;
  for (const auto& tok : doc.tokens) {
    auto it = table.vectors.find(tok);
    if (it == table.vectors.end()) continue;
    for (std::size_t j = 0; j < table.dim; ++j) acc[j] += it->second[j];
    ++hits;
  }
  if (hits > 0) {
    for (auto& v : acc) v /= static_cast<double>(hits);
  }
  return acc;
}

std::vector<double> embed_tfidf_weighted(const CleanDoc& doc, const EmbeddingTable& table,
                                         const Vocabulary& vocab) {
  const SparseVector tfidf = transform_tfidf(doc, vocab);
  std::vector<double> acc(table.dim, 0.0);
  double weight_sum = 0.0;
  for (const auto& [i, w] : tfidf.entries) {
    const std::string& term = vocab.terms[i];
    if (term.find(' ') != std::string::npos) continue;  // unigrams only
    auto it = table.vectors.find(term);
    if (it == table.vectors.end()) continue;
    for (std::size_t j = 0; j < table.dim; ++j) acc[j] += w * it->second[j];
    weight_sum += w;
  }
  if (weight_sum > 0.0) {
    for (auto& v : acc) v /= weight_sum;
  }
  return acc;
}

Gazetteer default_gazetteer() {
  Gazetteer g;
  for (const auto& [category, phrases] : default_gazetteer_entries()) {
    g.categories.emplace_back(category, phrases);
  }
  return g;
}

Gazetteer load_gazetteer(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open gazetteer file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("gazetteer parse error: " + std::string(e.what()));
  }
  if (!doc.is_array()) throw Error("gazetteer root must be an array");
  Gazetteer g;
  for (const auto& entry : doc) {
    if (!entry.is_object() || !entry.contains("category") || !entry.contains("phrases")) {
      throw Error("gazetteer entries need category and phrases");
    }
    std::vector<std::string> phrases;
    for (const auto& p : entry.at("phrases")) phrases.push_back(p.get<std::string>());
    g.categories.emplace_back(entry.at("category").get<std::string>(), std::move(phrases));
  }
  return g;
}

std::uint64_t gazetteer_fingerprint(const Gazetteer& g) {
  std::string blob;
  for (const auto& [category, phrases] : g.categories) {
    blob += category;
    blob += '\x1f';
    for (const auto& p : phrases) {
      blob += p;
      blob += '\x1e';
    }
    blob += '\n';
  }
  return fnv1a64(blob);
}

namespace {

// Raw lowercase alnum tokens; matching is insensitive to punctuation and case
// but does not stem, so gazetteer phrases are listed in surface form.
std::vector<std::string> match_tokens(const std::string& text) {
  std::string lowered = text;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return tokenize(lowered);
}

bool phrase_in_tokens(const std::vector<std::string>& tokens,
                      const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return false;
  for (std::size_t start = 0; start + phrase.size() <= tokens.size(); ++start) {
    bool ok = true;
    for (std::size_t j = 0; j < phrase.size(); ++j) {
      if (tokens[start + j] != phrase[j]) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return false;
}

bool category_hit(const std::vector<std::string>& tokens,
                  const std::vector<std::string>& phrases) {
  for (const auto& phrase : phrases) {
    if (phrase_in_tokens(tokens, tokenize(phrase))) return true;
  }
  return false;
}

}  // namespace

std::vector<double> ner_presence(const std::string& doc_text, const Gazetteer& gazetteer) {
  const auto tokens = match_tokens(doc_text);
  std::vector<double> bits(gazetteer.size(), 0.0);
  for (std::size_t c = 0; c < gazetteer.size(); ++c) {
    if (category_hit(tokens, gazetteer.categories[c].second)) bits[c] = 1.0;
  }
  return bits;
}

std::size_t gazetteer_category_hits(const std::string& doc_text, const Gazetteer& gazetteer) {
  const auto bits = ner_presence(doc_text, gazetteer);
  std::size_t hits = 0;
  for (double b : bits) {
    if (b != 0.0) ++hits;
  }
  return hits;
}

SparseVector concat_features(std::span<const SparseVector> parts) {
  SparseVector out;
  std::size_t offset = 0;
  for (const auto& part : parts) {
    for (const auto& [i, w] : part.entries) out.entries.emplace_back(offset + i, w);
    offset += part.dim;
  }
  out.dim = offset;
  return out;
}

}  // namespace clinscreen
