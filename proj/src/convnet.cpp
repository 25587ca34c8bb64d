#include "satira/convnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "satira/error.hpp"
#include "satira/random.hpp"
#include "model_io.hpp"

namespace satira {

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce(double logit, double target) { return softplus(logit) - target * logit; }

// Rows of the im2col patch matrix: window t holds tokens t..t+kernel-1.
Eigen::MatrixXd patches(const ConvNetModel& model, std::span<const int> ids) {
  const Eigen::Index dim = model.dim();
  const auto len = static_cast<Eigen::Index>(ids.size());
  const Eigen::Index kernel = model.kernel;
  if (len < kernel)
    throw DataError(fmt::format("sequence of length {} is shorter than the kernel ({})", len, kernel));
  for (int id : ids)
    if (id < 0 || id >= model.embedding.rows())
      throw DataError(fmt::format("token id {} outside the embedding table ({} rows)", id,
                                  model.embedding.rows()));
  const Eigen::Index windows = len - kernel + 1;
  Eigen::MatrixXd P(windows, kernel * dim);
  for (Eigen::Index t = 0; t < windows; ++t)
    for (Eigen::Index j = 0; j < kernel; ++j)
      P.row(t).segment(j * dim, dim) = model.embedding.row(ids[static_cast<std::size_t>(t + j)]);
  return P;
}

struct Activations {
  Eigen::MatrixXd patches;                  // windows x kernel*dim
  Eigen::MatrixXd pre;                      // windows x filters, before ReLU
  Eigen::VectorXd pooled;                   // filters
  std::vector<Eigen::Index> argmax;         // per filter
  double logit = 0.0;
};

Activations forward(const ConvNetModel& model, std::span<const int> ids) {
  Activations a;
  a.patches = patches(model, ids);
  a.pre = a.patches * model.conv_weight.transpose();
  a.pre.rowwise() += model.conv_bias.transpose();
  const Eigen::Index filters = model.filters();
  a.pooled.resize(filters);
  a.argmax.resize(static_cast<std::size_t>(filters));
  for (Eigen::Index f = 0; f < filters; ++f) {
    Eigen::Index t = 0;
    const double best = a.pre.col(f).maxCoeff(&t);
    a.argmax[static_cast<std::size_t>(f)] = t;
    a.pooled(f) = std::max(best, 0.0);
  }
  a.logit = model.dense_weight.dot(a.pooled) + model.dense_bias;
  return a;
}

}  // namespace

Eigen::Index ConvNetModel::trainable_size() const {
  return conv_weight.size() + conv_bias.size() + dense_weight.size() + 1;
}

Eigen::VectorXd ConvNetModel::trainable() const {
  Eigen::VectorXd params(trainable_size());
  Eigen::Index at = 0;
  for (Eigen::Index f = 0; f < conv_weight.rows(); ++f) {
    params.segment(at, conv_weight.cols()) = conv_weight.row(f).transpose();
    at += conv_weight.cols();
  }
  params.segment(at, conv_bias.size()) = conv_bias;
  at += conv_bias.size();
  params.segment(at, dense_weight.size()) = dense_weight;
  at += dense_weight.size();
  params(at) = dense_bias;
  return params;
}

void ConvNetModel::set_trainable(const Eigen::Ref<const Eigen::VectorXd>& params) {
  if (params.size() != trainable_size()) throw DataError("parameter vector has the wrong size");
  Eigen::Index at = 0;
  for (Eigen::Index f = 0; f < conv_weight.rows(); ++f) {
    conv_weight.row(f) = params.segment(at, conv_weight.cols()).transpose();
    at += conv_weight.cols();
  }
  conv_bias = params.segment(at, conv_bias.size());
  at += conv_bias.size();
  dense_weight = params.segment(at, dense_weight.size());
  at += dense_weight.size();
  dense_bias = params(at);
}

ConvNetModel init_convnet(Eigen::MatrixXd embedding, const ConvNetConfig& cfg, std::uint64_t seed) {
  if (cfg.filters < 1 || cfg.kernel < 1) throw DataError("filters and kernel must be positive");
  if (cfg.max_sequence_length < cfg.kernel)
    throw DataError("max_sequence_length must be at least the kernel size");
  if (embedding.rows() < 1 || embedding.cols() < 1) throw DataError("empty embedding matrix");

  ConvNetModel model;
  model.embedding = std::move(embedding);
  model.embedding.row(0).setZero();
  model.kernel = cfg.kernel;
  model.max_sequence_length = cfg.max_sequence_length;

  std::mt19937_64 rng(derive_seed(seed, RandomStream::CnnInit));
  const auto glorot = [&](Eigen::Index rows, Eigen::Index cols, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = limit * (2.0 * uniform01(rng) - 1.0);
    return m;
  };
  const double receptive = static_cast<double>(cfg.kernel);
  const auto dim = static_cast<double>(model.dim());
  model.conv_weight = glorot(cfg.filters, cfg.kernel * model.dim(), receptive * dim,
                             receptive * static_cast<double>(cfg.filters));
  model.conv_bias = Eigen::VectorXd::Zero(cfg.filters);
  model.dense_weight = glorot(cfg.filters, 1, static_cast<double>(cfg.filters), 1.0);
  model.dense_bias = 0.0;
  return model;
}

double cnn_logit(const ConvNetModel& model, std::span<const int> ids) {
  return forward(model, ids).logit;
}

double cnn_forward(const ConvNetModel& model, std::span<const int> ids) {
  constexpr double kLow = std::numeric_limits<double>::denorm_min();
  constexpr double kHigh = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  return std::clamp(sigmoid(cnn_logit(model, ids)), kLow, kHigh);
}

double cnn_loss_and_gradient(const ConvNetModel& model, std::span<const int> ids, double target,
                             Eigen::Ref<Eigen::VectorXd> grad) {
  const Activations a = forward(model, ids);
  const double dlogit = sigmoid(a.logit) - target;

  const Eigen::Index width = model.conv_weight.cols();
  const Eigen::Index filters = model.filters();
  const Eigen::Index bias_at = filters * width;
  const Eigen::Index dense_at = bias_at + filters;
  for (Eigen::Index f = 0; f < filters; ++f) {
    grad(dense_at + f) += dlogit * a.pooled(f);
    if (a.pooled(f) <= 0.0) continue;  // ReLU inactive at the pooled position
    const double dz = dlogit * model.dense_weight(f);
    const Eigen::Index t = a.argmax[static_cast<std::size_t>(f)];
    grad.segment(f * width, width) += dz * a.patches.row(t).transpose();
    grad(bias_at + f) += dz;
  }
  grad(dense_at + filters) += dlogit;
  return bce(a.logit, target);
}

ConvNetFit cnn_train(ConvNetModel model, const std::vector<std::vector<int>>& inputs,
                     std::span<const double> targets, const TrainConfig& cfg) {
  if (cfg.epochs < 0) throw DataError("epochs must be non-negative");
  if (cfg.batch_size < 1) throw DataError("batch_size must be at least 1");
  if (inputs.size() != targets.size())
    throw DataError(fmt::format("{} inputs but {} targets", inputs.size(), targets.size()));
  bool has_pos = false;
  bool has_neg = false;
  for (double t : targets) {
    if (t != 0.0 && t != 1.0) throw DataError("targets must be 0 or 1");
    (t == 1.0 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw DataError("training needs at least one example of each class");

  ConvNetFit fit;
  const Eigen::Index n_params = model.trainable_size();
  Eigen::VectorXd params = model.trainable();
  Eigen::VectorXd m = Eigen::VectorXd::Zero(n_params);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n_params);
  Eigen::VectorXd grad(n_params);
  const auto& adam = cfg.adam;
  double beta1_t = 1.0;
  double beta2_t = 1.0;

  std::mt19937_64 rng(derive_seed(cfg.seed, RandomStream::CnnShuffle));
  std::vector<std::size_t> order(inputs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0, b = 0; start < order.size(); start += batch, ++b) {
      const std::size_t stop = std::min(order.size(), start + batch);
      grad.setZero();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < stop; ++k)
        batch_loss += cnn_loss_and_gradient(model, inputs[order[k]], targets[order[k]], grad);
      if (!std::isfinite(batch_loss))
        throw DataError(fmt::format("non-finite loss at epoch {}, batch {}", epoch + 1, b + 1));
      epoch_loss += batch_loss;
      grad /= static_cast<double>(stop - start);

      beta1_t *= adam.beta1;
      beta2_t *= adam.beta2;
      m = adam.beta1 * m + (1.0 - adam.beta1) * grad;
      v = adam.beta2 * v + (1.0 - adam.beta2) * grad.cwiseAbs2();
      const double step = adam.learning_rate / (1.0 - beta1_t);
      const double v_corr = 1.0 / (1.0 - beta2_t);
      params.array() -= step * m.array() / ((v.array() * v_corr).sqrt() + adam.epsilon);
      model.set_trainable(params);
    }
    fit.epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  fit.model = std::move(model);
  return fit;
}

GradCheckResult grad_check(const ConvNetModel& model, std::span<const int> ids, double target,
                           double tolerance, double h) {
  Eigen::VectorXd analytic = Eigen::VectorXd::Zero(model.trainable_size());
  cnn_loss_and_gradient(model, ids, target, analytic);

  ConvNetModel probe = model;
  const Eigen::VectorXd base = model.trainable();
  Eigen::VectorXd params = base;
  const auto loss_at = [&](Eigen::Index i, double value) {
    params(i) = value;
    probe.set_trainable(params);
    const double loss = bce(cnn_logit(probe, ids), target);
    params(i) = base(i);
    return loss;
  };

  GradCheckResult result;
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    const double numeric = (loss_at(i, base(i) + h) - loss_at(i, base(i) - h)) / (2.0 * h);
    const double a = analytic(i);
    const double err =
        std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-6});
    result.max_relative_error = std::max(result.max_relative_error, err);
    if (i == base.size() - 1) result.dense_bias_relative_error = err;
  }
  result.passed = result.max_relative_error < tolerance;
  return result;
}

void save_model(std::ostream& out, const ConvNetModel& model) {
  model_io::Writer w(out, "convnet");
  w.scalar("kernel", model.kernel);
  w.scalar("max_sequence_length", model.max_sequence_length);
  w.scalar("embedding_rows", static_cast<double>(model.embedding.rows()));
  w.scalar("embedding_dim", static_cast<double>(model.dim()));
  w.matrix("conv_weight", model.conv_weight);
  w.matrix("conv_bias", model.conv_bias);
  w.matrix("dense_weight", model.dense_weight);
  w.scalar("dense_bias", model.dense_bias);
}

ConvNetModel load_convnet(std::istream& in, Eigen::MatrixXd embedding, const std::string& source) {
  model_io::Reader r(in, source, "convnet");
  ConvNetModel model;
  model.kernel = static_cast<int>(r.scalar("kernel"));
  model.max_sequence_length = static_cast<int>(r.scalar("max_sequence_length"));
  const auto rows = static_cast<Eigen::Index>(r.scalar("embedding_rows"));
  const auto dim = static_cast<Eigen::Index>(r.scalar("embedding_dim"));
  if (embedding.rows() != rows || embedding.cols() != dim)
    throw DataError(fmt::format("{}: model expects a {}x{} embedding, got {}x{}", source, rows, dim,
                                embedding.rows(), embedding.cols()));
  model.embedding = std::move(embedding);
  model.conv_weight = r.matrix("conv_weight");
  model.conv_bias = r.matrix("conv_bias");
  model.dense_weight = r.matrix("dense_weight");
  model.dense_bias = r.scalar("dense_bias");
  if (model.conv_weight.cols() != model.kernel * dim ||
      model.conv_bias.size() != model.conv_weight.rows() ||
      model.dense_weight.size() != model.conv_weight.rows())
    throw DataError(source + ": inconsistent convnet parameter shapes");
  return model;
}

}  // namespace satira
