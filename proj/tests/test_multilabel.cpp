#include <doctest.h>

#include <string>
#include <vector>

#include "clinscreen/errors.hpp"
#include "clinscreen/multilabel.hpp"
#include "clinscreen/rng.hpp"

using namespace clinscreen;

namespace {

struct Problem {
  FeatureMatrix X;
  LabelMatrix Y;
};

// Label j is decided by the sign of feature j, with a comfortable margin.
Problem per_feature_problem(std::size_t n, std::size_t n_labels, std::uint64_t seed) {
  Rng rng(seed);
  Problem p;
  p.X.n = n;
  p.X.d = n_labels;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < n_labels; ++j) names.push_back(std::string(1, char('A' + j)));
  p.Y = LabelMatrix::zeros(n, names);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n_labels; ++j) {
      const bool on = rng.bernoulli(0.5);
      p.X.x.push_back((on ? 2.0 : -2.0) + rng.next_real());
      p.Y.set(i, j, on);
    }
  }
  return p;
}

bool same_predictions(const LabelMatrix& a, const LabelMatrix& b) {
  return a.bits == b.bits && a.label_names == b.label_names;
}

}  // namespace

TEST_SUITE("multilabel") {

TEST_CASE("binary relevance fits one learner per label and predicts them all") {
  const Problem p = per_feature_problem(40, 3, 6);
  LearnerSpec spec;
  spec.n_trees = 15;
  const MultiLabelModel model = fit_binary_relevance(p.X, p.Y, spec);

  CHECK(model.strategy == MultiLabelStrategy::binary_relevance);
  CHECK_FALSE(model.multi_output_alias);
  CHECK(model.label_names == std::vector<std::string>{"A", "B", "C"});
  REQUIRE(model.learners.size() == 3);
  for (const auto& learner : model.learners) CHECK(learner.dim == p.X.d);

  const LabelMatrix pred = predict_multilabel(model, p.X);
  CHECK(same_predictions(pred, p.Y));
}

TEST_CASE("classifier chain widens each stage by one earlier label") {
  const Problem p = per_feature_problem(40, 4, 8);
  LearnerSpec spec;
  spec.n_trees = 15;
  const auto order = default_chain_order(4);
  CHECK(order == std::vector<std::size_t>{0, 1, 2, 3});
  const MultiLabelModel model = fit_classifier_chain(p.X, p.Y, spec, order);

  CHECK(model.strategy == MultiLabelStrategy::classifier_chain);
  REQUIRE(model.learners.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(model.learners[k].dim == p.X.d + k);  // position k sees k earlier bits
  }
  CHECK(same_predictions(predict_multilabel(model, p.X), p.Y));
}

TEST_CASE("a custom chain order is honored") {
  const Problem p = per_feature_problem(30, 2, 12);
  LearnerSpec spec;
  spec.n_trees = 10;
  const MultiLabelModel model = fit_classifier_chain(p.X, p.Y, spec, {1, 0});
  CHECK(model.chain_order == std::vector<std::size_t>{1, 0});
  CHECK(same_predictions(predict_multilabel(model, p.X), p.Y));
}

TEST_CASE("chain orders must be exact permutations") {
  const Problem p = per_feature_problem(20, 3, 1);
  LearnerSpec spec;
  spec.n_trees = 5;
  CHECK_THROWS_AS(fit_classifier_chain(p.X, p.Y, spec, {0, 1}), BadOrder);
  CHECK_THROWS_AS(fit_classifier_chain(p.X, p.Y, spec, {0, 1, 1}), BadOrder);
  CHECK_THROWS_AS(fit_classifier_chain(p.X, p.Y, spec, {0, 1, 3}), BadOrder);
}

TEST_CASE("multi_output is binary relevance under another name") {
  const Problem p = per_feature_problem(30, 3, 19);
  LearnerSpec spec;
  spec.n_trees = 10;
  const MultiLabelModel br = fit_binary_relevance(p.X, p.Y, spec);
  const MultiLabelModel mo = fit_multi_output(p.X, p.Y, spec);
  CHECK(mo.multi_output_alias);
  CHECK(mo.strategy == MultiLabelStrategy::binary_relevance);
  CHECK(same_predictions(predict_multilabel(mo, p.X), predict_multilabel(br, p.X)));
}

TEST_CASE("per-label seeding is keyed by name: dropping a label changes nothing else") {
  const Problem full = per_feature_problem(40, 3, 23);
  LearnerSpec spec;
  spec.n_trees = 20;
  const MultiLabelModel all = fit_binary_relevance(full.X, full.Y, spec);

  // same rows, but only labels A and C
  LabelMatrix reduced = LabelMatrix::zeros(full.X.n, {"A", "C"});
  for (std::size_t i = 0; i < full.X.n; ++i) {
    reduced.set(i, 0, full.Y.at(i, 0) != 0);
    reduced.set(i, 1, full.Y.at(i, 2) != 0);
  }
  const MultiLabelModel two = fit_binary_relevance(full.X, reduced, spec);

  const LabelMatrix pred_all = predict_multilabel(all, full.X);
  const LabelMatrix pred_two = predict_multilabel(two, full.X);
  for (std::size_t i = 0; i < full.X.n; ++i) {
    CHECK(pred_all.at(i, 0) == pred_two.at(i, 0));  // A unchanged
    CHECK(pred_all.at(i, 2) == pred_two.at(i, 1));  // C unchanged
  }
}

TEST_CASE("row scores agree with the matrix prediction path") {
  const Problem p = per_feature_problem(25, 3, 29);
  LearnerSpec spec;
  spec.n_trees = 10;
  for (const MultiLabelModel& model :
       {fit_binary_relevance(p.X, p.Y, spec),
        fit_classifier_chain(p.X, p.Y, spec, default_chain_order(3))}) {
    const LabelMatrix pred = predict_multilabel(model, p.X);
    for (std::size_t i = 0; i < p.X.n; ++i) {
      const auto scores = predict_scores_row(model, p.X.row(i), p.X.d);
      REQUIRE(scores.size() == 3);
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK((scores[j] >= 0.5 ? 1 : 0) == pred.at(i, j));
      }
    }
  }
}

TEST_CASE("a single-class label under an svm names itself in the error") {
  Problem p = per_feature_problem(20, 2, 31);
  for (std::size_t i = 0; i < p.X.n; ++i) p.Y.set(i, 1, false);  // label B never met
  LearnerSpec spec;
  spec.kind = LearnerKind::linear_svm;
  CHECK_THROWS_WITH_AS(fit_binary_relevance(p.X, p.Y, spec), doctest::Contains("B"),
                       SingleClassData);
}

TEST_CASE("strategy names round-trip and accept the documented aliases") {
  CHECK(strategy_from_string("binary_relevance") == MultiLabelStrategy::binary_relevance);
  CHECK(strategy_from_string("br") == MultiLabelStrategy::binary_relevance);
  CHECK(strategy_from_string("multi_output") == MultiLabelStrategy::binary_relevance);
  CHECK(strategy_from_string("mo") == MultiLabelStrategy::binary_relevance);
  CHECK(strategy_from_string("classifier_chain") == MultiLabelStrategy::classifier_chain);
  CHECK(strategy_from_string("chain") == MultiLabelStrategy::classifier_chain);
  CHECK(strategy_from_string("cc") == MultiLabelStrategy::classifier_chain);
  CHECK_THROWS_AS(strategy_from_string("powerset"), InvalidSpec);
  CHECK(to_string(MultiLabelStrategy::classifier_chain) == "classifier_chain");
}

}  // TEST_SUITE
