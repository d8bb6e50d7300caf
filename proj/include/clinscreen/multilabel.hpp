#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clinscreen/learners.hpp"

namespace clinscreen {

// Feature rows without targets, shared by every label.
struct FeatureMatrix {
  std::vector<double> x;  // n * d, row-major
  std::size_t n = 0;
  std::size_t d = 0;

  const double* row(std::size_t i) const { return x.data() + i * d; }
};

// n x L binary label matrix with named columns.
struct LabelMatrix {
  std::vector<std::uint8_t> bits;  // n * L, row-major
  std::size_t n = 0;
  std::size_t n_labels = 0;
  std::vector<std::string> label_names;

  static LabelMatrix zeros(std::size_t n, std::vector<std::string> names);
  int at(std::size_t i, std::size_t j) const { return bits[i * n_labels + j]; }
  void set(std::size_t i, std::size_t j, bool v) { bits[i * n_labels + j] = v ? 1 : 0; }
};

enum class MultiLabelStrategy { binary_relevance, classifier_chain };

std::string to_string(MultiLabelStrategy s);
MultiLabelStrategy strategy_from_string(const std::string& name);

struct MultiLabelModel {
  MultiLabelStrategy strategy = MultiLabelStrategy::binary_relevance;
  // fit_multi_output is the same algorithm as binary relevance; the flag
  // records which name the caller used.
  bool multi_output_alias = false;
  std::vector<std::string> label_names;
  // chain only: learners[k] predicts label chain_order[k] from d + k inputs
  std::vector<std::size_t> chain_order;
  std::size_t feature_dim = 0;
  std::vector<BinaryLearnerModel> learners;
};

std::vector<std::size_t> default_chain_order(std::size_t n_labels);

MultiLabelModel fit_binary_relevance(const FeatureMatrix& X, const LabelMatrix& Y,
                                     const LearnerSpec& spec);
MultiLabelModel fit_classifier_chain(const FeatureMatrix& X, const LabelMatrix& Y,
                                     const LearnerSpec& spec,
                                     const std::vector<std::size_t>& order);
MultiLabelModel fit_multi_output(const FeatureMatrix& X, const LabelMatrix& Y,
                                 const LearnerSpec& spec);

LabelMatrix predict_multilabel(const MultiLabelModel& model, const FeatureMatrix& X);

// Per-label scores for one row, in label_names order. For chains the
// thresholded bit of each position feeds the next, exactly as in
// predict_multilabel.
std::vector<double> predict_scores_row(const MultiLabelModel& model, const double* x,
                                       std::size_t dim);

}  // namespace clinscreen
