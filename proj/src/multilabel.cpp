#include "clinscreen/multilabel.hpp"

#include <algorithm>
#include <numeric>

#include "clinscreen/errors.hpp"
#include "clinscreen/rng.hpp"

namespace clinscreen {

LabelMatrix LabelMatrix::zeros(std::size_t n, std::vector<std::string> names) {
  LabelMatrix m;
  m.n = n;
  m.n_labels = names.size();
  m.label_names = std::move(names);
  m.bits.assign(m.n * m.n_labels, 0);
  return m;
}

std::string to_string(MultiLabelStrategy s) {
  return s == MultiLabelStrategy::binary_relevance ? "binary_relevance" : "classifier_chain";
}

MultiLabelStrategy strategy_from_string(const std::string& name) {
  if (name == "binary_relevance" || name == "br" || name == "multi_output" || name == "mo") {
    return MultiLabelStrategy::binary_relevance;
  }
  if (name == "classifier_chain" || name == "chain" || name == "cc") {
    return MultiLabelStrategy::classifier_chain;
  }
  throw InvalidSpec("unknown multi-label strategy: " + name);
}

std::vector<std::size_t> default_chain_order(std::size_t n_labels) {
  std::vector<std::size_t> order(n_labels);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

namespace {

void check_xy(const FeatureMatrix& X, const LabelMatrix& Y) {
  if (X.n == 0) throw EmptyDataset();
  if (X.n != Y.n) {
    throw ShapeMismatch("feature rows: " + std::to_string(X.n) +
                        ", label rows: " + std::to_string(Y.n));
  }
  if (Y.n_labels == 0 || Y.label_names.size() != Y.n_labels) {
    throw ShapeMismatch("label matrix needs one name per column");
  }
}

// Sub-seed by label name so removing one label never shifts the streams of
// the others.
LearnerSpec label_spec(const LearnerSpec& base, const std::string& label_name) {
  LearnerSpec spec = base;
  spec.seed = stable_hash(base.seed, fnv1a64(label_name));
  return spec;
}

BinaryLearnerModel fit_for_label(const Dataset& ds, const LearnerSpec& spec,
                                 const std::string& label_name) {
  try {
    return fit_learner(ds, spec);
  } catch (const SingleClassData&) {
    throw SingleClassData("label \"" + label_name + "\" has a single class in training data");
  }
}

}  // namespace

MultiLabelModel fit_binary_relevance(const FeatureMatrix& X, const LabelMatrix& Y,
                                     const LearnerSpec& spec) {
  check_xy(X, Y);
  MultiLabelModel model;
  model.strategy = MultiLabelStrategy::binary_relevance;
  model.label_names = Y.label_names;
  model.feature_dim = X.d;
  for (std::size_t j = 0; j < Y.n_labels; ++j) {
    Dataset ds;
    ds.n = X.n;
    ds.d = X.d;
    ds.x = X.x;
    ds.y.resize(X.n);
    for (std::size_t i = 0; i < X.n; ++i) ds.y[i] = Y.at(i, j);
    model.learners.push_back(
        fit_for_label(ds, label_spec(spec, Y.label_names[j]), Y.label_names[j]));
  }
  return model;
}

MultiLabelModel fit_classifier_chain(const FeatureMatrix& X, const LabelMatrix& Y,
                                     const LearnerSpec& spec,
                                     const std::vector<std::size_t>& order) {
  check_xy(X, Y);
  if (order.size() != Y.n_labels) {
    throw BadOrder("chain order has " + std::to_string(order.size()) + " entries for " +
                   std::to_string(Y.n_labels) + " labels");
  }
  std::vector<bool> seen(Y.n_labels, false);
  for (std::size_t j : order) {
    if (j >= Y.n_labels || seen[j]) throw BadOrder("chain order is not a permutation");
    seen[j] = true;
  }

  MultiLabelModel model;
  model.strategy = MultiLabelStrategy::classifier_chain;
  model.label_names = Y.label_names;
  model.chain_order = order;
  model.feature_dim = X.d;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t target = order[k];
    // Teacher forcing: augment with the gold labels of the k earlier chain
    // positions, in chain order.
    Dataset ds;
    ds.n = X.n;
    ds.d = X.d + k;
    ds.x.resize(ds.n * ds.d);
    ds.y.resize(ds.n);
    for (std::size_t i = 0; i < X.n; ++i) {
      double* row = ds.x.data() + i * ds.d;
      std::copy(X.row(i), X.row(i) + X.d, row);
      for (std::size_t e = 0; e < k; ++e) {
        row[X.d + e] = static_cast<double>(Y.at(i, order[e]));
      }
      ds.y[i] = Y.at(i, target);
    }
    model.learners.push_back(
        fit_for_label(ds, label_spec(spec, Y.label_names[target]), Y.label_names[target]));
  }
  return model;
}

MultiLabelModel fit_multi_output(const FeatureMatrix& X, const LabelMatrix& Y,
                                 const LearnerSpec& spec) {
  MultiLabelModel model = fit_binary_relevance(X, Y, spec);
  model.multi_output_alias = true;
  return model;
}

std::vector<double> predict_scores_row(const MultiLabelModel& model, const double* x,
                                       std::size_t dim) {
  if (dim != model.feature_dim) throw DimMismatch(model.feature_dim, dim);
  const std::size_t L = model.label_names.size();
  std::vector<double> scores(L, 0.0);
  if (model.strategy == MultiLabelStrategy::binary_relevance) {
    for (std::size_t j = 0; j < L; ++j) {
      scores[j] = predict_score(model.learners[j], x, dim);
    }
    return scores;
  }
  // Chain: thresholded predictions feed forward in chain order.
  std::vector<double> augmented(model.feature_dim + L);
  std::copy(x, x + dim, augmented.begin());
  for (std::size_t k = 0; k < L; ++k) {
    const double score =
        predict_score(model.learners[k], augmented.data(), model.feature_dim + k);
    augmented[model.feature_dim + k] = score >= 0.5 ? 1.0 : 0.0;
    scores[model.chain_order[k]] = score;
  }
  return scores;
}

LabelMatrix predict_multilabel(const MultiLabelModel& model, const FeatureMatrix& X) {
  if (X.d != model.feature_dim) throw DimMismatch(model.feature_dim, X.d);
  LabelMatrix out = LabelMatrix::zeros(X.n, model.label_names);
  for (std::size_t i = 0; i < X.n; ++i) {
    const std::vector<double> scores = predict_scores_row(model, X.row(i), X.d);
    for (std::size_t j = 0; j < scores.size(); ++j) out.set(i, j, scores[j] >= 0.5);
  }
  return out;
}

}  // namespace clinscreen
