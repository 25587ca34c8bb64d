#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "satira/corpus.hpp"

namespace satira {

struct BoostingConfig {
  int n_rounds = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  double lambda = 1.0;  // L2 penalty on leaf weights
  unsigned threads = 1;  // split search only; results do not depend on it
};

// Binary regression tree with axis-aligned splits `x[feature] < threshold`
// going left. Node 0 is the root.
struct RegressionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double weight = 0.0;  // leaf output
  };
  std::vector<Node> nodes;

  template <typename Row>
  int leaf_index(const Row& x) const {
    int n = 0;
    while (nodes[static_cast<std::size_t>(n)].feature >= 0) {
      const auto& node = nodes[static_cast<std::size_t>(n)];
      n = x(node.feature) < node.threshold ? node.left : node.right;
    }
    return n;
  }

  template <typename Row>
  double predict(const Row& x) const {
    return nodes[static_cast<std::size_t>(leaf_index(x))].weight;
  }

  int depth() const;
};

struct BoostedTreesModel {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  int max_depth = 3;
  int n_rounds = 0;
  double base_score = 0.0;  // initial log-odds
  double lambda = 1.0;
  Eigen::Index n_features = 0;
};

struct BoostedTreesFit {
  BoostedTreesModel model;
  // Mean training log-loss: entry 0 for base_score alone, entry k after k trees.
  std::vector<double> training_loss;
};

// Newton boosting on the logistic loss. y holds 0/1 targets (1 = positive).
BoostedTreesFit gbt_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const BoostingConfig& cfg = {});

// Target vector with FAKE as the positive class.
Eigen::VectorXd positive_targets(std::span<const Label> labels);

// Raw margin base_score + lr * sum of tree outputs, per row.
Eigen::VectorXd gbt_margin(const BoostedTreesModel& model, const Eigen::MatrixXd& X);
Eigen::VectorXd gbt_predict_proba(const BoostedTreesModel& model, const Eigen::MatrixXd& X);
// FAKE when probability >= 0.5.
std::vector<Label> gbt_predict(const BoostedTreesModel& model, const Eigen::MatrixXd& X);

// Mean logistic loss of margins against 0/1 targets.
double logistic_loss(const Eigen::VectorXd& margin, const Eigen::VectorXd& y);

void save_model(std::ostream& out, const BoostedTreesModel& model);
BoostedTreesModel load_boosted_trees(std::istream& in, const std::string& source = "<model>");

}  // namespace satira
