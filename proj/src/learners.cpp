#include "clinscreen/learners.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "clinscreen/errors.hpp"
#include "clinscreen/rng.hpp"

namespace clinscreen {

Dataset dataset_from_sparse(const std::vector<SparseVector>& rows, const std::vector<int>& y) {
  if (rows.empty()) throw EmptyDataset();
  if (rows.size() != y.size()) {
    throw ShapeMismatch("feature rows: " + std::to_string(rows.size()) +
                        ", targets: " + std::to_string(y.size()));
  }
  Dataset ds;
  ds.n = rows.size();
  ds.d = rows.front().dim;
  ds.x.assign(ds.n * ds.d, 0.0);
  for (std::size_t i = 0; i < ds.n; ++i) {
    if (rows[i].dim != ds.d) throw DimMismatch(ds.d, rows[i].dim);
    for (const auto& [j, w] : rows[i].entries) ds.x[i * ds.d + j] = w;
  }
  ds.y = y;
  return ds;
}

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::tree: return "tree";
    case LearnerKind::forest: return "forest";
    case LearnerKind::linear_svm: return "linear_svm";
    case LearnerKind::mlp: return "mlp";
  }
  return "unknown";
}

LearnerKind learner_kind_from_string(const std::string& name) {
  if (name == "tree") return LearnerKind::tree;
  if (name == "forest") return LearnerKind::forest;
  if (name == "linear_svm" || name == "svm") return LearnerKind::linear_svm;
  if (name == "mlp") return LearnerKind::mlp;
  throw InvalidSpec("unknown learner kind: " + name);
}

namespace {

void check_dataset(const Dataset& ds) {
  if (ds.n == 0) throw EmptyDataset();
  if (ds.x.size() != ds.n * ds.d) {
    throw ShapeMismatch("feature buffer has " + std::to_string(ds.x.size()) +
                        " values, expected " + std::to_string(ds.n * ds.d));
  }
  if (ds.y.size() != ds.n) {
    throw ShapeMismatch("targets: " + std::to_string(ds.y.size()) +
                        ", rows: " + std::to_string(ds.n));
  }
}

void check_spec(const LearnerSpec& spec) {
  if (spec.max_depth < -1) throw InvalidSpec("max_depth must be >= -1");
  if (spec.min_samples_split < 2) throw InvalidSpec("min_samples_split must be >= 2");
  if (spec.n_trees == 0) throw InvalidSpec("n_trees must be positive");
  if (spec.max_features != "sqrt" && spec.max_features != "all") {
    throw InvalidSpec("max_features must be \"sqrt\" or \"all\"");
  }
  if (spec.n_threads == 0) throw InvalidSpec("n_threads must be positive");
  if (spec.lambda <= 0.0) throw InvalidSpec("lambda must be positive");
  if (spec.hidden.size() != 2 || spec.hidden[0] == 0 || spec.hidden[1] == 0) {
    throw InvalidSpec("mlp needs two positive hidden widths");
  }
  if (spec.learning_rate <= 0.0) throw InvalidSpec("learning_rate must be positive");
  if (spec.momentum < 0.0 || spec.momentum >= 1.0) throw InvalidSpec("momentum must be in [0,1)");
  if (spec.batch_size == 0) throw InvalidSpec("batch_size must be positive");
}

double gini(double p) { return 2.0 * p * (1.0 - p); }

// Recursive CART grower over a flat node array. `indices` may repeat rows
// (bootstrap). The rng is consulted only under the "sqrt" feature policy, in
// pre-order traversal order, so results are schedule-independent.
struct TreeBuilder {
  const Dataset& ds;
  const LearnerSpec& spec;
  Rng& rng;
  std::vector<TreeNode> nodes;

  int grow(std::vector<std::size_t>& indices, int depth) {
    const std::size_t n = indices.size();
    std::size_t pos = 0;
    for (std::size_t i : indices) pos += static_cast<std::size_t>(ds.y[i]);
    TreeNode node;
    node.n = n;
    node.prob = static_cast<double>(pos) / static_cast<double>(n);
    const int id = static_cast<int>(nodes.size());
    nodes.push_back(node);

    const bool depth_capped = spec.max_depth >= 0 && depth >= spec.max_depth;
    const bool pure = pos == 0 || pos == n;
    if (depth_capped || pure || n < spec.min_samples_split) return id;

    std::vector<std::size_t> candidates;
    if (spec.max_features == "sqrt") {
      const auto k = static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(ds.d))));
      candidates = rng.sample_without_replacement(ds.d, k);
    } else {
      candidates.resize(ds.d);
      std::iota(candidates.begin(), candidates.end(), 0);
    }

    // Ties on impurity decrease go to the smaller feature index, then the
    // smaller threshold; ascending scan order makes the first maximum win.
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_decrease = 0.0;
    const double parent_gini = gini(node.prob);
    std::vector<std::pair<double, int>> column(n);  // (value, y)
    for (std::size_t f : candidates) {
      for (std::size_t i = 0; i < n; ++i) {
        column[i] = {ds.x[indices[i] * ds.d + f], ds.y[indices[i]]};
      }
      std::sort(column.begin(), column.end());
      // Prefix scan: after i+1 samples on the left, try the midpoint to the
      // next distinct value.
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_pos += static_cast<std::size_t>(column[i].second);
        if (column[i].first == column[i + 1].first) continue;
        const double threshold = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        const double p_left = static_cast<double>(left_pos) / static_cast<double>(n_left);
        const double p_right =
            static_cast<double>(pos - left_pos) / static_cast<double>(n_right);
        const double decrease =
            parent_gini - (static_cast<double>(n_left) / n) * gini(p_left) -
            (static_cast<double>(n_right) / n) * gini(p_right);
        if (decrease > best_decrease) {
          best_decrease = decrease;
          best_feature = static_cast<int>(f);
          best_threshold = threshold;
        }
      }
    }
    if (best_feature < 0) return id;  // no split improves

    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
    for (std::size_t i : indices) {
      if (ds.x[i * ds.d + best_feature] <= best_threshold) {
        left_idx.push_back(i);
      } else {
        right_idx.push_back(i);
      }
    }
    indices.clear();
    indices.shrink_to_fit();

    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    const int left = grow(left_idx, depth + 1);
    nodes[id].left = left;
    const int right = grow(right_idx, depth + 1);
    nodes[id].right = right;
    return id;
  }
};

std::vector<TreeNode> grow_tree(const Dataset& ds, const LearnerSpec& spec, Rng& rng,
                                std::vector<std::size_t> indices) {
  TreeBuilder builder{ds, spec, rng, {}};
  builder.grow(indices, 0);
  return std::move(builder.nodes);
}

double tree_score(const std::vector<TreeNode>& nodes, const double* x) {
  int at = 0;
  while (nodes[at].feature >= 0) {
    at = x[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
  }
  return nodes[at].prob;
}

double dot(const std::vector<double>& w, const double* x) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
  return s;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// ---- MLP internals ----

struct MlpParams {
  std::vector<std::size_t> sizes;            // {d, h1, h2, 1}
  std::vector<std::vector<double>> weights;  // [l]: sizes[l+1] x sizes[l], row-major
  std::vector<std::vector<double>> biases;   // [l]: sizes[l+1]
};

MlpParams init_mlp(std::size_t d, const LearnerSpec& spec, Rng& rng) {
  MlpParams p;
  p.sizes = {d, spec.hidden[0], spec.hidden[1], 1};
  for (std::size_t l = 0; l + 1 < p.sizes.size(); ++l) {
    const std::size_t fan_in = p.sizes[l];
    const std::size_t fan_out = p.sizes[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::vector<double> w(fan_out * fan_in);
    for (auto& v : w) v = (2.0 * rng.next_real() - 1.0) * limit;
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(fan_out, 0.0);
  }
  return p;
}

struct MlpTrace {
  std::vector<std::vector<double>> pre;   // z per non-input layer
  std::vector<std::vector<double>> act;   // activations per layer incl. input
};

double mlp_forward(const std::vector<std::size_t>& sizes,
                   const std::vector<std::vector<double>>& weights,
                   const std::vector<std::vector<double>>& biases, const double* x,
                   MlpTrace* trace) {
  std::vector<double> cur(x, x + sizes[0]);
  if (trace) {
    trace->pre.clear();
    trace->act.clear();
    trace->act.push_back(cur);
  }
  const std::size_t n_layers = weights.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const std::size_t fan_in = sizes[l];
    const std::size_t fan_out = sizes[l + 1];
    std::vector<double> z(fan_out);
    for (std::size_t o = 0; o < fan_out; ++o) {
      double s = biases[l][o];
      const double* wrow = weights[l].data() + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) s += wrow[i] * cur[i];
      z[o] = s;
    }
    if (trace) trace->pre.push_back(z);
    if (l + 1 < n_layers) {
      for (auto& v : z) v = std::max(0.0, v);  // ReLU
    } else {
      z[0] = logistic(z[0]);
    }
    cur = std::move(z);
    if (trace) trace->act.push_back(cur);
  }
  return cur[0];
}

double mlp_forward(const MlpParams& p, const double* x, MlpTrace* trace) {
  return mlp_forward(p.sizes, p.weights, p.biases, x, trace);
}

struct MlpGrads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  explicit MlpGrads(const MlpParams& p) {
    for (std::size_t l = 0; l < p.weights.size(); ++l) {
      weights.emplace_back(p.weights[l].size(), 0.0);
      biases.emplace_back(p.biases[l].size(), 0.0);
    }
  }

  void scale(double s) {
    for (auto& w : weights) {
      for (auto& v : w) v *= s;
    }
    for (auto& b : biases) {
      for (auto& v : b) v *= s;
    }
  }
};

// Accumulates dBCE/dparam for one sample into `grads`.
void mlp_backward(const MlpParams& p, const MlpTrace& trace, int y, MlpGrads& grads) {
  const std::size_t n_layers = p.weights.size();
  // Output layer: dL/dz = p - y for sigmoid + BCE.
  std::vector<double> delta = {trace.act.back()[0] - static_cast<double>(y)};
  for (std::size_t l = n_layers; l-- > 0;) {
    const std::size_t fan_in = p.sizes[l];
    const std::size_t fan_out = p.sizes[l + 1];
    const auto& input = trace.act[l];
    for (std::size_t o = 0; o < fan_out; ++o) {
      grads.biases[l][o] += delta[o];
      double* grow = grads.weights[l].data() + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) grow[i] += delta[o] * input[i];
    }
    if (l == 0) break;
    std::vector<double> prev(fan_in, 0.0);
    for (std::size_t i = 0; i < fan_in; ++i) {
      if (trace.pre[l - 1][i] <= 0.0) continue;  // ReLU gate
      double s = 0.0;
      for (std::size_t o = 0; o < fan_out; ++o) s += p.weights[l][o * fan_in + i] * delta[o];
      prev[i] = s;
    }
    delta = std::move(prev);
  }
}

double bce(double p, int y) {
  const double eps = 1e-12;
  const double q = std::min(1.0 - eps, std::max(eps, p));
  return y != 0 ? -std::log(q) : -std::log(1.0 - q);
}

}  // namespace

BinaryLearnerModel fit_tree(const Dataset& ds, const LearnerSpec& spec) {
  check_dataset(ds);
  check_spec(spec);
  Rng rng(spec.seed);
  std::vector<std::size_t> all(ds.n);
  std::iota(all.begin(), all.end(), 0);
  BinaryLearnerModel model;
  model.kind = LearnerKind::tree;
  model.dim = ds.d;
  model.trees.push_back(grow_tree(ds, spec, rng, std::move(all)));
  return model;
}

BinaryLearnerModel fit_forest(const Dataset& ds, const LearnerSpec& spec) {
  check_dataset(ds);
  check_spec(spec);
  BinaryLearnerModel model;
  model.kind = LearnerKind::forest;
  model.dim = ds.d;
  model.trees.resize(spec.n_trees);

  // Every tree depends only on its own sub-seed, so any thread schedule
  // produces the same forest.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= spec.n_trees) return;
      Rng rng(stable_hash(spec.seed, static_cast<std::uint64_t>(t)));
      std::vector<std::size_t> indices(ds.n);
      if (spec.bootstrap) {
        for (auto& i : indices) i = static_cast<std::size_t>(rng.below(ds.n));
      } else {
        std::iota(indices.begin(), indices.end(), 0);
      }
      model.trees[t] = grow_tree(ds, spec, rng, std::move(indices));
    }
  };

  const std::size_t n_workers = std::min<std::size_t>(spec.n_threads, spec.n_trees);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return model;
}

BinaryLearnerModel fit_linear_svm(const Dataset& ds, const LearnerSpec& spec) {
  check_dataset(ds);
  check_spec(spec);
  const bool has_pos = std::find(ds.y.begin(), ds.y.end(), 1) != ds.y.end();
  const bool has_neg = std::find(ds.y.begin(), ds.y.end(), 0) != ds.y.end();
  if (!has_pos || !has_neg) throw SingleClassData();

  std::vector<double> w(ds.d, 0.0);
  double b = 0.0;
  Rng rng(spec.seed);
  std::vector<std::size_t> order(ds.n);
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < spec.svm_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      ++t;
      const double eta = 1.0 / (spec.lambda * static_cast<double>(t));
      const double yi = ds.y[i] != 0 ? 1.0 : -1.0;
      const double margin = yi * (dot(w, ds.row(i)) + b);
      const double shrink = 1.0 - eta * spec.lambda;
      for (auto& v : w) v *= shrink;
      b *= shrink;  // bias acts as a constant-one feature, shrunk with w
      if (margin < 1.0) {
        const double* xi = ds.row(i);
        for (std::size_t j = 0; j < ds.d; ++j) w[j] += eta * yi * xi[j];
        b += eta * yi;
      }
    }
  }

  BinaryLearnerModel model;
  model.kind = LearnerKind::linear_svm;
  model.dim = ds.d;
  model.w = std::move(w);
  model.b = b;
  return model;
}

BinaryLearnerModel fit_mlp(const Dataset& ds, const LearnerSpec& spec) {
  check_dataset(ds);
  check_spec(spec);
  Rng rng(spec.seed);
  MlpParams params = init_mlp(ds.d, spec, rng);

  MlpGrads velocity(params);
  std::vector<std::size_t> order(ds.n);
  std::iota(order.begin(), order.end(), 0);
  MlpTrace trace;
  for (std::size_t epoch = 0; epoch < spec.mlp_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < ds.n; start += spec.batch_size) {
      const std::size_t stop = std::min(ds.n, start + spec.batch_size);
      MlpGrads grads(params);
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        mlp_forward(params, ds.row(i), &trace);
        mlp_backward(params, trace, ds.y[i], grads);
      }
      grads.scale(1.0 / static_cast<double>(stop - start));
      for (std::size_t l = 0; l < params.weights.size(); ++l) {
        for (std::size_t j = 0; j < params.weights[l].size(); ++j) {
          velocity.weights[l][j] =
              spec.momentum * velocity.weights[l][j] - spec.learning_rate * grads.weights[l][j];
          params.weights[l][j] += velocity.weights[l][j];
        }
        for (std::size_t j = 0; j < params.biases[l].size(); ++j) {
          velocity.biases[l][j] =
              spec.momentum * velocity.biases[l][j] - spec.learning_rate * grads.biases[l][j];
          params.biases[l][j] += velocity.biases[l][j];
        }
      }
    }
  }

  BinaryLearnerModel model;
  model.kind = LearnerKind::mlp;
  model.dim = ds.d;
  model.layer_sizes = std::move(params.sizes);
  model.weights = std::move(params.weights);
  model.biases = std::move(params.biases);
  return model;
}

BinaryLearnerModel fit_learner(const Dataset& ds, const LearnerSpec& spec) {
  switch (spec.kind) {
    case LearnerKind::tree: return fit_tree(ds, spec);
    case LearnerKind::forest: return fit_forest(ds, spec);
    case LearnerKind::linear_svm: return fit_linear_svm(ds, spec);
    case LearnerKind::mlp: return fit_mlp(ds, spec);
  }
  throw InvalidSpec("unknown learner kind");
}

double predict_score(const BinaryLearnerModel& model, const double* x, std::size_t dim) {
  if (dim != model.dim) throw DimMismatch(model.dim, dim);
  switch (model.kind) {
    case LearnerKind::tree:
      return tree_score(model.trees.front(), x);
    case LearnerKind::forest: {
      double s = 0.0;
      for (const auto& tree : model.trees) s += tree_score(tree, x);
      return s / static_cast<double>(model.trees.size());
    }
    case LearnerKind::linear_svm:
      return logistic(dot(model.w, x) + model.b);
    case LearnerKind::mlp:
      return mlp_forward(model.layer_sizes, model.weights, model.biases, x, nullptr);
  }
  throw WrongKind("model has unknown kind");
}

double predict_score(const BinaryLearnerModel& model, const std::vector<double>& x) {
  return predict_score(model, x.data(), x.size());
}

int predict_label(const BinaryLearnerModel& model, const std::vector<double>& x,
                  double threshold) {
  return predict_score(model, x) >= threshold ? 1 : 0;
}

std::vector<double> forest_importances(const BinaryLearnerModel& model) {
  if (model.kind != LearnerKind::forest) {
    throw WrongKind("feature importances need a forest, got " + to_string(model.kind));
  }
  std::vector<double> total(model.dim, 0.0);
  for (const auto& tree : model.trees) {
    const double n_root = static_cast<double>(tree.front().n);
    for (const auto& node : tree) {
      if (node.feature < 0) continue;
      const auto& l = tree[node.left];
      const auto& r = tree[node.right];
      const double nn = static_cast<double>(node.n);
      const double decrease = gini(node.prob) -
                              (static_cast<double>(l.n) / nn) * gini(l.prob) -
                              (static_cast<double>(r.n) / nn) * gini(r.prob);
      total[node.feature] += (nn / n_root) * decrease;
    }
  }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  if (sum <= 0.0) {
    std::fill(total.begin(), total.end(), 1.0 / static_cast<double>(model.dim));
  } else {
    for (auto& v : total) v /= sum;
  }
  return total;
}

double mlp_gradient_check(const Dataset& ds_small, const LearnerSpec& spec) {
  check_dataset(ds_small);
  check_spec(spec);
  Rng rng(spec.seed);
  MlpParams params = init_mlp(ds_small.d, spec, rng);

  MlpGrads analytic(params);
  MlpTrace trace;
  for (std::size_t i = 0; i < ds_small.n; ++i) {
    mlp_forward(params, ds_small.row(i), &trace);
    mlp_backward(params, trace, ds_small.y[i], analytic);
  }
  analytic.scale(1.0 / static_cast<double>(ds_small.n));

  auto mean_loss = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < ds_small.n; ++i) {
      s += bce(mlp_forward(params, ds_small.row(i), nullptr), ds_small.y[i]);
    }
    return s / static_cast<double>(ds_small.n);
  };

  const double eps = 1e-5;
  double worst = 0.0;
  auto probe = [&](double& param, double g_a) {
    const double saved = param;
    param = saved + eps;
    const double up = mean_loss();
    param = saved - eps;
    const double down = mean_loss();
    param = saved;
    const double g_n = (up - down) / (2.0 * eps);
    const double rel =
        std::fabs(g_a - g_n) / std::max({std::fabs(g_a), std::fabs(g_n), 1e-8});
    worst = std::max(worst, rel);
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    for (std::size_t j = 0; j < params.weights[l].size(); ++j) {
      probe(params.weights[l][j], analytic.weights[l][j]);
    }
    for (std::size_t j = 0; j < params.biases[l].size(); ++j) {
      probe(params.biases[l][j], analytic.biases[l][j]);
    }
  }
  return worst;
}

}  // namespace clinscreen
