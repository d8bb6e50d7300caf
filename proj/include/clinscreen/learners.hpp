#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clinscreen/features.hpp"

namespace clinscreen {

// Dense row-major design matrix with binary targets.
struct Dataset {
  std::vector<double> x;  // n * d values
  std::vector<int> y;     // 0/1
  std::size_t n = 0;
  std::size_t d = 0;

  const double* row(std::size_t i) const { return x.data() + i * d; }
};

Dataset dataset_from_sparse(const std::vector<SparseVector>& rows, const std::vector<int>& y);

enum class LearnerKind { tree, forest, linear_svm, mlp };

std::string to_string(LearnerKind kind);
LearnerKind learner_kind_from_string(const std::string& name);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::forest;

  // tree / forest
  int max_depth = -1;  // -1 = unlimited
  std::size_t min_samples_split = 2;
  std::size_t n_trees = 100;
  std::string max_features = "sqrt";  // "sqrt" | "all"
  bool bootstrap = true;
  std::size_t n_threads = 1;

  // linear svm
  double lambda = 1e-3;
  std::size_t svm_epochs = 20;

  // mlp
  std::vector<std::size_t> hidden = {256, 64};
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t mlp_epochs = 200;
  std::size_t batch_size = 16;

  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double prob = 0.0;  // positive-class proportion of the training samples here
  std::size_t n = 0;  // training samples reaching this node
};

// One immutable fitted model; only the fields for its kind are populated.
struct BinaryLearnerModel {
  LearnerKind kind = LearnerKind::tree;
  std::size_t dim = 0;

  // tree / forest: each tree is a flat node array rooted at index 0
  std::vector<std::vector<TreeNode>> trees;

  // linear svm
  std::vector<double> w;
  double b = 0.0;

  // mlp: weights[l] is row-major (layer_sizes[l+1] x layer_sizes[l])
  std::vector<std::size_t> layer_sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

BinaryLearnerModel fit_tree(const Dataset& ds, const LearnerSpec& spec);
BinaryLearnerModel fit_forest(const Dataset& ds, const LearnerSpec& spec);
BinaryLearnerModel fit_linear_svm(const Dataset& ds, const LearnerSpec& spec);
BinaryLearnerModel fit_mlp(const Dataset& ds, const LearnerSpec& spec);
// Dispatches on spec.kind.
BinaryLearnerModel fit_learner(const Dataset& ds, const LearnerSpec& spec);

double predict_score(const BinaryLearnerModel& model, const double* x, std::size_t dim);
double predict_score(const BinaryLearnerModel& model, const std::vector<double>& x);
// label = 1 iff score >= threshold; a tie at the threshold is positive.
int predict_label(const BinaryLearnerModel& model, const std::vector<double>& x,
                  double threshold = 0.5);

// Mean decrease in Gini impurity per feature, averaged over trees and
// normalized to sum 1 (uniform when no split ever reduced impurity).
std::vector<double> forest_importances(const BinaryLearnerModel& model);

// Max over parameters of |g_analytic - g_numeric| / max(|g_a|, |g_n|, 1e-8)
// at a fresh random init, central differences with eps = 1e-5.
double mlp_gradient_check(const Dataset& ds_small, const LearnerSpec& spec);

}  // namespace clinscreen
