#include "clinscreen/eval.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "clinscreen/errors.hpp"

namespace clinscreen {

namespace {

void check_shapes(const LabelMatrix& y_true, const LabelMatrix& y_pred) {
  if (y_true.n != y_pred.n || y_true.n_labels != y_pred.n_labels) {
    throw ShapeMismatch("label matrices differ: " + std::to_string(y_true.n) + "x" +
                        std::to_string(y_true.n_labels) + " vs " + std::to_string(y_pred.n) +
                        "x" + std::to_string(y_pred.n_labels));
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

void tally(const LabelMatrix& y_true, const LabelMatrix& y_pred, std::size_t j,
           MicroCounts& c) {
  for (std::size_t i = 0; i < y_true.n; ++i) {
    const int t = y_true.at(i, j);
    const int p = y_pred.at(i, j);
    if (t == 1 && p == 1) ++c.tp;
    else if (t == 0 && p == 1) ++c.fp;
    else if (t == 1 && p == 0) ++c.fn;
    else ++c.tn;
  }
}

}  // namespace

MicroCounts micro_counts(const LabelMatrix& y_true, const LabelMatrix& y_pred) {
  check_shapes(y_true, y_pred);
  MicroCounts c;
  for (std::size_t j = 0; j < y_true.n_labels; ++j) tally(y_true, y_pred, j, c);
  return c;
}

PRF prf_from_counts(const MicroCounts& c) {
  PRF out;
  out.precision = ratio(c.tp, c.tp + c.fp);
  out.recall = ratio(c.tp, c.tp + c.fn);
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

PRF micro_prf(const LabelMatrix& y_true, const LabelMatrix& y_pred) {
  return prf_from_counts(micro_counts(y_true, y_pred));
}

std::vector<std::pair<std::string, PRF>> per_label_prf(const LabelMatrix& y_true,
                                                       const LabelMatrix& y_pred) {
  check_shapes(y_true, y_pred);
  std::vector<std::pair<std::string, PRF>> out;
  for (std::size_t j = 0; j < y_true.n_labels; ++j) {
    MicroCounts c;
    tally(y_true, y_pred, j, c);
    out.emplace_back(y_true.label_names[j], prf_from_counts(c));
  }
  return out;
}

std::vector<std::string> rouge_tokens(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char ch : text) {
    if (std::isalnum(ch)) {
      cur.push_back(static_cast<char>(std::tolower(ch)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

namespace {

std::map<std::string, std::size_t> gram_counts(const std::vector<std::string>& tokens, int n) {
  std::map<std::string, std::size_t> counts;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (int j = 1; j < n; ++j) {
      gram += ' ';
      gram += tokens[i + j];
    }
    ++counts[gram];
  }
  return counts;
}

RougeScore from_matches(RougeVariant variant, std::size_t matches, std::size_t cand_total,
                        std::size_t ref_total) {
  RougeScore s;
  s.variant = variant;
  s.precision = ratio(matches, cand_total);
  s.recall = ratio(matches, ref_total);
  s.f1 = harmonic(s.precision, s.recall);
  return s;
}

}  // namespace

RougeScore rouge_n(const std::string& candidate, const std::string& reference, int n) {
  if (n != 1 && n != 2) throw InvalidSpec("rouge_n supports n = 1 or 2");
  const auto cand = gram_counts(rouge_tokens(candidate), n);
  const auto ref = gram_counts(rouge_tokens(reference), n);
  std::size_t cand_total = 0;
  std::size_t ref_total = 0;
  for (const auto& [g, c] : cand) cand_total += c;
  for (const auto& [g, c] : ref) ref_total += c;
  std::size_t matches = 0;
  for (const auto& [gram, c] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) matches += std::min(c, it->second);
  }
  return from_matches(n == 1 ? RougeVariant::rouge1 : RougeVariant::rouge2, matches,
                      cand_total, ref_total);
}

RougeScore rouge_l(const std::string& candidate, const std::string& reference) {
  const auto cand = rouge_tokens(candidate);
  const auto ref = rouge_tokens(reference);
  const std::size_t m = cand.size();
  const std::size_t k = ref.size();
  // Rolling-row LCS table.
  std::vector<std::size_t> prev(k + 1, 0);
  std::vector<std::size_t> cur(k + 1, 0);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= k; ++j) {
      cur[j] = cand[i - 1] == ref[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return from_matches(RougeVariant::rougeL, prev[k], m, k);
}

}  // namespace clinscreen
