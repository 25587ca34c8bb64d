#include "satira/boosted_trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "satira/error.hpp"
#include "model_io.hpp"

namespace satira {

namespace {

constexpr double kBaseRateClamp = 1e-6;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

struct SplitCandidate {
  double gain = 0.0;
  int feature = -1;
  double threshold = 0.0;
};

struct NodeTotals {
  double G = 0.0;
  double H = 0.0;
};

// Level-wise exact greedy tree growth over presorted feature columns.
class TreeGrower {
 public:
  TreeGrower(const Eigen::MatrixXd& X, const std::vector<std::vector<int>>& sorted,
             const BoostingConfig& cfg)
      : X_(X), sorted_(sorted), cfg_(cfg) {}

  RegressionTree grow(const Eigen::VectorXd& g, const Eigen::VectorXd& h) {
    const auto n = static_cast<std::size_t>(X_.rows());
    RegressionTree tree;
    tree.nodes.emplace_back();
    // position of each row: node id in the tree, -1 once its leaf is final
    std::vector<int> node_of(n, 0);
    std::vector<int> active{0};

    for (int depth = 0; !active.empty(); ++depth) {
      std::vector<NodeTotals> totals(tree.nodes.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (node_of[i] < 0) continue;
        totals[static_cast<std::size_t>(node_of[i])].G += g(static_cast<Eigen::Index>(i));
        totals[static_cast<std::size_t>(node_of[i])].H += h(static_cast<Eigen::Index>(i));
      }

      std::vector<SplitCandidate> best(tree.nodes.size());
      if (depth < cfg_.max_depth) best = find_splits(g, h, node_of, totals);

      std::vector<int> next;
      for (int id : active) {
        const auto& t = totals[static_cast<std::size_t>(id)];
        const auto& split = best[static_cast<std::size_t>(id)];
        if (split.feature < 0) {
          tree.nodes[static_cast<std::size_t>(id)].weight = -t.G / (t.H + cfg_.lambda);
          continue;
        }
        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[static_cast<std::size_t>(id)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = left + 1;
        next.push_back(left);
        next.push_back(left + 1);
      }

      for (std::size_t i = 0; i < n; ++i) {
        const int id = node_of[i];
        if (id < 0) continue;
        const auto& node = tree.nodes[static_cast<std::size_t>(id)];
        if (node.feature < 0) {
          node_of[i] = -1;
        } else {
          node_of[i] = X_(static_cast<Eigen::Index>(i), node.feature) < node.threshold ? node.left
                                                                                       : node.right;
        }
      }
      active = std::move(next);
    }
    return tree;
  }

 private:
  double score(double G, double H) const { return G * G / (H + cfg_.lambda); }

  // Best split for one feature across all open nodes.
  void scan_feature(int f, const Eigen::VectorXd& g, const Eigen::VectorXd& h,
                    const std::vector<int>& node_of, const std::vector<NodeTotals>& totals,
                    std::vector<SplitCandidate>& best) const {
    struct Running {
      double GL = 0.0;
      double HL = 0.0;
      double last = 0.0;
      bool seen = false;
    };
    std::vector<Running> run(totals.size());
    best.assign(totals.size(), SplitCandidate{});
    for (int row : sorted_[static_cast<std::size_t>(f)]) {
      const int id = node_of[static_cast<std::size_t>(row)];
      if (id < 0) continue;
      auto& r = run[static_cast<std::size_t>(id)];
      const double x = X_(row, f);
      if (r.seen && x > r.last) {
        const auto& t = totals[static_cast<std::size_t>(id)];
        const double GR = t.G - r.GL;
        const double HR = t.H - r.HL;
        const double gain = 0.5 * (score(r.GL, r.HL) + score(GR, HR) - score(t.G, t.H));
        auto& b = best[static_cast<std::size_t>(id)];
        if (gain > b.gain) {
          double threshold = r.last + 0.5 * (x - r.last);
          if (!(threshold > r.last)) threshold = x;
          b = SplitCandidate{gain, f, threshold};
        }
      }
      r.GL += g(row);
      r.HL += h(row);
      r.last = x;
      r.seen = true;
    }
  }

  std::vector<SplitCandidate> find_splits(const Eigen::VectorXd& g, const Eigen::VectorXd& h,
                                          const std::vector<int>& node_of,
                                          const std::vector<NodeTotals>& totals) const {
    const int n_features = static_cast<int>(X_.cols());
    std::vector<std::vector<SplitCandidate>> per_feature(static_cast<std::size_t>(n_features));
    const unsigned workers =
        std::max(1u, std::min<unsigned>(cfg_.threads, static_cast<unsigned>(n_features)));
    const auto work = [&](unsigned w) {
      for (int f = static_cast<int>(w); f < n_features; f += static_cast<int>(workers))
        scan_feature(f, g, h, node_of, totals, per_feature[static_cast<std::size_t>(f)]);
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }

    // Reduce in feature order: ties keep the lowest feature index, and within
    // a feature the scan already kept the lowest threshold.
    std::vector<SplitCandidate> best(totals.size());
    for (const auto& cands : per_feature)
      for (std::size_t id = 0; id < cands.size(); ++id)
        if (cands[id].gain > best[id].gain) best[id] = cands[id];
    return best;
  }

  const Eigen::MatrixXd& X_;
  const std::vector<std::vector<int>>& sorted_;
  const BoostingConfig& cfg_;
};

}  // namespace

int RegressionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if (node.feature < 0) continue;
    d[static_cast<std::size_t>(node.left)] = d[i] + 1;
    d[static_cast<std::size_t>(node.right)] = d[i] + 1;
    deepest = std::max(deepest, d[i] + 1);
  }
  return deepest;
}

double logistic_loss(const Eigen::VectorXd& margin, const Eigen::VectorXd& y) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < margin.size(); ++i) total += softplus(margin(i)) - y(i) * margin(i);
  return total / static_cast<double>(margin.size());
}

Eigen::VectorXd positive_targets(std::span<const Label> labels) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i)
    y(static_cast<Eigen::Index>(i)) = labels[i] == Label::Fake ? 1.0 : 0.0;
  return y;
}

BoostedTreesFit gbt_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const BoostingConfig& cfg) {
  if (cfg.n_rounds < 1) throw DataError("boosting needs at least one round");
  if (cfg.max_depth < 0) throw DataError("max_depth must be non-negative");
  if (!(cfg.lambda >= 0.0)) throw DataError("lambda must be non-negative");
  if (X.rows() != y.size())
    throw DataError(fmt::format("boosting: {} rows but {} targets", X.rows(), y.size()));
  if (X.rows() == 0) throw DataError("boosting needs at least one training row");
  if (!X.allFinite()) throw DataError("boosting needs finite features");
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y(i) != 0.0 && y(i) != 1.0) throw DataError("boosting targets must be 0 or 1");

  BoostedTreesFit fit;
  auto& model = fit.model;
  model.learning_rate = cfg.learning_rate;
  model.max_depth = cfg.max_depth;
  model.n_rounds = cfg.n_rounds;
  model.lambda = cfg.lambda;
  model.n_features = X.cols();
  const double base_rate = std::clamp(y.mean(), kBaseRateClamp, 1.0 - kBaseRateClamp);
  model.base_score = std::log(base_rate / (1.0 - base_rate));

  std::vector<std::vector<int>> sorted(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index f = 0; f < X.cols(); ++f) {
    auto& order = sorted[static_cast<std::size_t>(f)];
    order.resize(static_cast<std::size_t>(X.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return X(a, f) < X(b, f); });
  }

  TreeGrower grower(X, sorted, cfg);
  Eigen::VectorXd margin = Eigen::VectorXd::Constant(X.rows(), model.base_score);
  Eigen::VectorXd g(X.rows());
  Eigen::VectorXd h(X.rows());
  fit.training_loss.push_back(logistic_loss(margin, y));
  for (int round = 0; round < cfg.n_rounds; ++round) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double p = sigmoid(margin(i));
      g(i) = p - y(i);
      h(i) = p * (1.0 - p);
    }
    model.trees.push_back(grower.grow(g, h));
    const auto& tree = model.trees.back();
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      margin(i) += cfg.learning_rate * tree.predict(X.row(i));
    fit.training_loss.push_back(logistic_loss(margin, y));
  }
  return fit;
}

Eigen::VectorXd gbt_margin(const BoostedTreesModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.n_features)
    throw DataError(fmt::format("boosted trees: model has {} features, input has {}",
                                model.n_features, X.cols()));
  Eigen::VectorXd margin(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += tree.predict(X.row(i));
    margin(i) = model.base_score + model.learning_rate * sum;
  }
  return margin;
}

Eigen::VectorXd gbt_predict_proba(const BoostedTreesModel& model, const Eigen::MatrixXd& X) {
  return gbt_margin(model, X).unaryExpr([](double z) { return sigmoid(z); });
}

std::vector<Label> gbt_predict(const BoostedTreesModel& model, const Eigen::MatrixXd& X) {
  const Eigen::VectorXd p = gbt_predict_proba(model, X);
  std::vector<Label> out(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i)
    out[static_cast<std::size_t>(i)] = p(i) >= 0.5 ? Label::Fake : Label::Real;
  return out;
}

void save_model(std::ostream& out, const BoostedTreesModel& model) {
  model_io::Writer w(out, "boosted_trees");
  w.scalar("learning_rate", model.learning_rate);
  w.scalar("max_depth", model.max_depth);
  w.scalar("n_rounds", model.n_rounds);
  w.scalar("base_score", model.base_score);
  w.scalar("lambda", model.lambda);
  w.scalar("n_features", static_cast<double>(model.n_features));
  w.scalar("n_trees", static_cast<double>(model.trees.size()));
  for (std::size_t t = 0; t < model.trees.size(); ++t) {
    const auto& nodes = model.trees[t].nodes;
    Eigen::MatrixXd m(static_cast<Eigen::Index>(nodes.size()), 5);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      m.row(static_cast<Eigen::Index>(i)) << nodes[i].feature, nodes[i].threshold, nodes[i].left,
          nodes[i].right, nodes[i].weight;
    w.matrix(fmt::format("tree{}", t), m);
  }
}

BoostedTreesModel load_boosted_trees(std::istream& in, const std::string& source) {
  model_io::Reader r(in, source, "boosted_trees");
  BoostedTreesModel model;
  model.learning_rate = r.scalar("learning_rate");
  model.max_depth = static_cast<int>(r.scalar("max_depth"));
  model.n_rounds = static_cast<int>(r.scalar("n_rounds"));
  model.base_score = r.scalar("base_score");
  model.lambda = r.scalar("lambda");
  model.n_features = static_cast<Eigen::Index>(r.scalar("n_features"));
  const auto n_trees = static_cast<std::size_t>(r.scalar("n_trees"));
  for (std::size_t t = 0; t < n_trees; ++t) {
    const Eigen::MatrixXd m = r.matrix(fmt::format("tree{}", t));
    if (m.cols() != 5 || m.rows() < 1) throw DataError(source + ": malformed tree");
    RegressionTree tree;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      RegressionTree::Node node{static_cast<int>(m(i, 0)), m(i, 1), static_cast<int>(m(i, 2)),
                                static_cast<int>(m(i, 3)), m(i, 4)};
      if (node.feature >= model.n_features ||
          (node.feature >= 0 && (node.left <= i || node.right <= i || node.left >= m.rows() ||
                                 node.right >= m.rows())))
        throw DataError(source + ": malformed tree node");
      tree.nodes.push_back(node);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace satira
