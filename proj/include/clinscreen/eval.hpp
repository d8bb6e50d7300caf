#pragma once

#include <string>
#include <utility>
#include <vector>

#include "clinscreen/multilabel.hpp"

namespace clinscreen {

// Confusion counts pooled over every (row, label) cell.
struct MicroCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

struct PRF {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class RougeVariant { rouge1, rouge2, rougeL };

struct RougeScore {
  RougeVariant variant = RougeVariant::rouge1;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

MicroCounts micro_counts(const LabelMatrix& y_true, const LabelMatrix& y_pred);
// Zero-denominator convention: precision, recall, and f1 fall back to 0.
PRF prf_from_counts(const MicroCounts& c);
PRF micro_prf(const LabelMatrix& y_true, const LabelMatrix& y_pred);
std::vector<std::pair<std::string, PRF>> per_label_prf(const LabelMatrix& y_true,
                                                       const LabelMatrix& y_pred);

// Shared ROUGE tokenization: lowercase alphanumeric runs.
std::vector<std::string> rouge_tokens(const std::string& text);

// Clipped multiset n-gram overlap, n in {1, 2}.
RougeScore rouge_n(const std::string& candidate, const std::string& reference, int n);
// Token-level longest common subsequence.
RougeScore rouge_l(const std::string& candidate, const std::string& reference);

}  // namespace clinscreen
