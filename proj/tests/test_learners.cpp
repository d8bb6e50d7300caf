#include <doctest.h>

#include <cmath>
#include <vector>

#include "clinscreen/errors.hpp"
#include "clinscreen/learners.hpp"
#include "clinscreen/rng.hpp"

using namespace clinscreen;

namespace {

Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& y) {
  Dataset ds;
  ds.n = rows.size();
  ds.d = rows.empty() ? 0 : rows[0].size();
  for (const auto& row : rows) ds.x.insert(ds.x.end(), row.begin(), row.end());
  ds.y = y;
  return ds;
}

double bce(const BinaryLearnerModel& model, const Dataset& ds) {
  double loss = 0.0;
  for (std::size_t i = 0; i < ds.n; ++i) {
    double p = predict_score(model, ds.row(i), ds.d);
    p = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
    loss += ds.y[i] ? -std::log(p) : -std::log(1.0 - p);
  }
  return loss / static_cast<double>(ds.n);
}

// Noiseless 2-D problem separable on feature 0 alone.
Dataset separable_2d(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % 2);
    const double x0 = (label ? 2.0 : -2.0) + rng.next_real();
    rows.push_back({x0, 2.0 * rng.next_real() - 1.0});
    y.push_back(label);
  }
  return make_dataset(rows, y);
}

}  // namespace

TEST_SUITE("learners") {

TEST_CASE("decision tree splits 1-D data at the midpoint") {
  const Dataset ds = make_dataset({{0.0}, {1.0}}, {0, 1});
  LearnerSpec spec;
  spec.kind = LearnerKind::tree;
  spec.max_features = "all";
  const BinaryLearnerModel model = fit_tree(ds, spec);

  REQUIRE(model.trees.size() == 1);
  const auto& nodes = model.trees[0];
  REQUIRE(nodes.size() == 3);  // root plus two leaves
  CHECK(nodes[0].feature == 0);
  CHECK(nodes[0].threshold == doctest::Approx(0.5));
  CHECK(predict_label(model, {0.0}) == 0);
  CHECK(predict_label(model, {1.0}) == 1);
  CHECK(predict_score(model, {0.2}) == 0.0);  // x <= threshold goes left
  CHECK(predict_score(model, {0.7}) == 1.0);
}

TEST_CASE("degenerate trees collapse to a single leaf") {
  LearnerSpec spec;
  spec.kind = LearnerKind::tree;

  const Dataset same = make_dataset({{0.0}, {1.0}, {2.0}}, {1, 1, 1});
  const BinaryLearnerModel leaf = fit_tree(same, spec);
  REQUIRE(leaf.trees[0].size() == 1);
  CHECK(leaf.trees[0][0].feature == -1);
  CHECK(leaf.trees[0][0].prob == 1.0);

  spec.max_depth = 0;
  const Dataset mixed = make_dataset({{0.0}, {1.0}, {2.0}, {3.0}}, {0, 1, 1, 1});
  const BinaryLearnerModel prior = fit_tree(mixed, spec);
  REQUIRE(prior.trees[0].size() == 1);
  CHECK(prior.trees[0][0].prob == doctest::Approx(0.75));

  CHECK_THROWS_AS(fit_tree(Dataset{}, LearnerSpec{}), EmptyDataset);
}

TEST_CASE("predict applies the tie-goes-positive rule and checks width") {
  const Dataset ds = make_dataset({{0.0}, {1.0}, {0.0}, {1.0}}, {0, 1, 1, 0});
  LearnerSpec spec;
  spec.kind = LearnerKind::tree;
  const BinaryLearnerModel model = fit_tree(ds, spec);
  // the 1-D data is 50/50 on both sides: score is exactly 0.5 somewhere
  CHECK(predict_score(model, {0.0}) == 0.5);
  CHECK(predict_label(model, {0.0}) == 1);       // tie at default threshold
  CHECK(predict_label(model, {0.0}, 0.51) == 0);  // raising threshold drops it
  CHECK_THROWS_AS(predict_score(model, {0.0, 1.0}), DimMismatch);
}

TEST_CASE("single-tree forest without bagging equals the plain tree") {
  const Dataset ds = separable_2d(30, 5);
  LearnerSpec spec;
  spec.kind = LearnerKind::forest;
  spec.n_trees = 1;
  spec.bootstrap = false;
  spec.max_features = "all";
  const BinaryLearnerModel forest = fit_forest(ds, spec);

  LearnerSpec tree_spec = spec;
  tree_spec.kind = LearnerKind::tree;
  const BinaryLearnerModel tree = fit_tree(ds, tree_spec);

  for (std::size_t i = 0; i < ds.n; ++i) {
    CHECK(predict_score(forest, ds.row(i), ds.d) == predict_score(tree, ds.row(i), ds.d));
  }
}

TEST_CASE("forest nails separable data and is schedule independent") {
  const Dataset ds = separable_2d(40, 11);
  LearnerSpec spec;
  spec.kind = LearnerKind::forest;
  spec.n_trees = 50;
  spec.seed = 3;
  const BinaryLearnerModel one = fit_forest(ds, spec);
  for (std::size_t i = 0; i < ds.n; ++i) {
    CHECK(predict_label(one, {ds.row(i)[0], ds.row(i)[1]}) == ds.y[i]);
  }

  spec.n_threads = 4;
  const BinaryLearnerModel four = fit_forest(ds, spec);
  REQUIRE(four.trees.size() == one.trees.size());
  for (std::size_t i = 0; i < ds.n; ++i) {
    const double a = predict_score(one, ds.row(i), ds.d);
    const double b = predict_score(four, ds.row(i), ds.d);
    CHECK(a == b);  // bitwise, not approximately
  }
}

TEST_CASE("linear svm separates 1-D data and rejects single-class input") {
  const Dataset ds = make_dataset({{-1.0}, {1.0}, {-0.8}, {0.9}}, {0, 1, 0, 1});
  LearnerSpec spec;
  spec.kind = LearnerKind::linear_svm;
  const BinaryLearnerModel model = fit_linear_svm(ds, spec);
  CHECK(model.w[0] > 0.0);
  for (std::size_t i = 0; i < ds.n; ++i) {
    CHECK(predict_label(model, {ds.row(i)[0]}) == ds.y[i]);
  }
  // svm scores pass through a logistic map so thresholding stays uniform
  CHECK(predict_score(model, {1.0}) > 0.5);
  CHECK(predict_score(model, {-1.0}) < 0.5);

  const Dataset pos_only = make_dataset({{0.0}, {1.0}}, {1, 1});
  CHECK_THROWS_AS(fit_linear_svm(pos_only, spec), SingleClassData);
}

TEST_CASE("svm labels survive feature scaling with lambda scaled by 1/c^2") {
  const Dataset ds = separable_2d(24, 21);
  LearnerSpec spec;
  spec.kind = LearnerKind::linear_svm;
  spec.seed = 2;
  const BinaryLearnerModel base = fit_linear_svm(ds, spec);

  const double c = 10.0;
  Dataset scaled = ds;
  for (double& v : scaled.x) v *= c;
  LearnerSpec scaled_spec = spec;
  scaled_spec.lambda = spec.lambda / (c * c);
  const BinaryLearnerModel rescaled = fit_linear_svm(scaled, scaled_spec);

  for (std::size_t i = 0; i < ds.n; ++i) {
    std::vector<double> row(ds.row(i), ds.row(i) + ds.d);
    std::vector<double> row_scaled = row;
    for (double& v : row_scaled) v *= c;
    CHECK(predict_label(base, row) == predict_label(rescaled, row_scaled));
  }
}

TEST_CASE("mlp learns the AND function") {
  const Dataset ds =
      make_dataset({{0.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}, {1.0, 1.0}}, {0, 0, 0, 1});
  LearnerSpec spec;
  spec.kind = LearnerKind::mlp;
  spec.hidden = {16, 8};
  spec.learning_rate = 0.1;
  spec.mlp_epochs = 2000;
  spec.batch_size = 4;
  spec.seed = 1;
  const BinaryLearnerModel model = fit_mlp(ds, spec);
  CHECK(bce(model, ds) <= 0.05);
  CHECK(predict_label(model, {1.0, 1.0}) == 1);
  CHECK(predict_label(model, {0.0, 1.0}) == 0);
}

TEST_CASE("zero-epoch mlp is a legal random-init model with output in (0,1)") {
  const Dataset ds = separable_2d(10, 9);
  LearnerSpec spec;
  spec.kind = LearnerKind::mlp;
  spec.hidden = {8, 4};
  spec.mlp_epochs = 0;
  spec.seed = 4;
  const BinaryLearnerModel model = fit_mlp(ds, spec);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const double p = predict_score(model, ds.row(i), ds.d);
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
  // all biases start at zero
  for (const auto& layer : model.biases) {
    for (double b : layer) CHECK(b == 0.0);
  }
}

TEST_CASE("mlp training is bitwise deterministic per seed") {
  const Dataset ds = separable_2d(12, 13);
  LearnerSpec spec;
  spec.kind = LearnerKind::mlp;
  spec.hidden = {8, 4};
  spec.mlp_epochs = 50;
  spec.seed = 17;
  const BinaryLearnerModel a = fit_mlp(ds, spec);
  const BinaryLearnerModel b = fit_mlp(ds, spec);
  CHECK(a.weights == b.weights);
  CHECK(a.biases == b.biases);
  spec.seed = 18;
  CHECK(fit_mlp(ds, spec).weights != a.weights);
}

TEST_CASE("mlp analytic gradients match central differences") {
  // continuous inputs keep pre-activations off the exact ReLU kink, where the
  // loss is not differentiable and a finite-difference check is ill-posed
  Rng data_rng(77);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (std::size_t i = 0; i < 8; ++i) {
    std::vector<double> row(6);
    for (double& v : row) v = 2.0 * data_rng.next_real() - 1.0;
    rows.push_back(std::move(row));
    y.push_back(static_cast<int>(i % 2));
  }
  const Dataset ds = make_dataset(rows, y);
  LearnerSpec spec;
  spec.kind = LearnerKind::mlp;
  spec.hidden = {5, 3};
  double best = 1.0;
  for (std::uint64_t seed = 40; seed < 43 && best >= 1e-4; ++seed) {
    spec.seed = seed;  // a near-kink activation can spoil one seed; three tries
    best = std::min(best, mlp_gradient_check(ds, spec));
  }
  CHECK(best < 1e-4);
}

TEST_CASE("forest importances find the informative feature and sum to one") {
  // feature 0 decides the label; features 1-2 are noise
  Rng rng(31);
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2;
    rows.push_back({label ? 1.0 : -1.0, rng.next_real(), rng.next_real()});
    y.push_back(label);
  }
  const Dataset ds = make_dataset(rows, y);
  LearnerSpec spec;
  spec.kind = LearnerKind::forest;
  spec.n_trees = 30;
  spec.max_features = "all";
  const BinaryLearnerModel forest = fit_forest(ds, spec);

  const std::vector<double> imp = forest_importances(forest);
  REQUIRE(imp.size() == 3);
  double sum = 0.0;
  for (double v : imp) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(imp[0] > 0.9);

  // a stump forest puts all mass on its single split feature
  LearnerSpec stump_spec = spec;
  stump_spec.max_depth = 1;
  stump_spec.n_trees = 5;
  const std::vector<double> stump_imp = forest_importances(fit_forest(ds, stump_spec));
  CHECK(stump_imp[0] == doctest::Approx(1.0));

  LearnerSpec svm_spec;
  svm_spec.kind = LearnerKind::linear_svm;
  CHECK_THROWS_AS(forest_importances(fit_linear_svm(ds, svm_spec)), WrongKind);
}

TEST_CASE("hyperparameter validation rejects nonsense specs") {
  const Dataset ds = separable_2d(8, 1);
  LearnerSpec spec;

  spec.kind = LearnerKind::forest;
  spec.n_trees = 0;
  CHECK_THROWS_AS(fit_forest(ds, spec), InvalidSpec);

  spec = LearnerSpec{};
  spec.kind = LearnerKind::linear_svm;
  spec.lambda = 0.0;
  CHECK_THROWS_AS(fit_linear_svm(ds, spec), InvalidSpec);

  spec = LearnerSpec{};
  spec.kind = LearnerKind::mlp;
  spec.hidden = {4};
  CHECK_THROWS_AS(fit_mlp(ds, spec), InvalidSpec);

  spec = LearnerSpec{};
  spec.kind = LearnerKind::mlp;
  spec.momentum = 1.0;
  CHECK_THROWS_AS(fit_mlp(ds, spec), InvalidSpec);

  spec = LearnerSpec{};
  spec.kind = LearnerKind::tree;
  spec.min_samples_split = 1;
  CHECK_THROWS_AS(fit_tree(ds, spec), InvalidSpec);
}

TEST_CASE("fit_learner dispatches on spec.kind") {
  const Dataset ds = separable_2d(16, 2);
  for (LearnerKind kind : {LearnerKind::tree, LearnerKind::forest, LearnerKind::linear_svm,
                           LearnerKind::mlp}) {
    LearnerSpec spec;
    spec.kind = kind;
    spec.n_trees = 5;
    spec.hidden = {4, 3};
    spec.mlp_epochs = 10;
    const BinaryLearnerModel model = fit_learner(ds, spec);
    CHECK(model.kind == kind);
    CHECK(model.dim == ds.d);
  }
}

TEST_CASE("learner kind names round-trip") {
  for (LearnerKind kind : {LearnerKind::tree, LearnerKind::forest, LearnerKind::linear_svm,
                           LearnerKind::mlp}) {
    CHECK(learner_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(learner_kind_from_string("boosting"), InvalidSpec);
}

}  // TEST_SUITE
