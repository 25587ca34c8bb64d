#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace satira {

struct ConvNetConfig {
  int filters = 126;
  int kernel = 5;
  int max_sequence_length = 400;
};

// embed -> valid Conv1D -> ReLU -> global max pool -> dense -> sigmoid.
//
// conv_weight row f holds filter f flattened position-major: column
// j * dim + c multiplies embedding component c of the token at offset j.
struct ConvNetModel {
  Eigen::MatrixXd embedding;     // vocab rows x dim, frozen; row 0 is all zero
  Eigen::MatrixXd conv_weight;   // filters x (kernel * dim)
  Eigen::VectorXd conv_bias;     // filters
  Eigen::VectorXd dense_weight;  // filters
  double dense_bias = 0.0;
  int kernel = 5;
  int max_sequence_length = 400;

  Eigen::Index dim() const { return embedding.cols(); }
  Eigen::Index filters() const { return conv_weight.rows(); }

  // Conv and dense parameters packed as [conv_weight (row-major), conv_bias,
  // dense_weight, dense_bias]. The embedding is not trainable.
  Eigen::VectorXd trainable() const;
  void set_trainable(const Eigen::Ref<const Eigen::VectorXd>& params);
  Eigen::Index trainable_size() const;
};

// Glorot-uniform conv and dense weights, zero biases.
ConvNetModel init_convnet(Eigen::MatrixXd embedding, const ConvNetConfig& cfg, std::uint64_t seed);

// Pre-sigmoid output. Throws DataError for ids outside the embedding or
// sequences shorter than the kernel.
double cnn_logit(const ConvNetModel& model, std::span<const int> ids);

// Probability in the open interval (0, 1).
double cnn_forward(const ConvNetModel& model, std::span<const int> ids);

// Binary cross-entropy of one example (target 0 or 1) and its gradient with
// respect to trainable(), accumulated into `grad`.
double cnn_loss_and_gradient(const ConvNetModel& model, std::span<const int> ids, double target,
                             Eigen::Ref<Eigen::VectorXd> grad);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  int epochs = 10;
  int batch_size = 10;
  AdamConfig adam;
  std::uint64_t seed = 42;  // batch shuffling
};

struct ConvNetFit {
  ConvNetModel model;
  std::vector<double> epoch_loss;  // mean training BCE per epoch
};

// Mini-batch Adam on mean batch BCE. Throws DataError on a NaN loss with the
// epoch and batch where it appeared.
ConvNetFit cnn_train(ConvNetModel model, const std::vector<std::vector<int>>& inputs,
                     std::span<const double> targets, const TrainConfig& cfg);

struct GradCheckResult {
  double max_relative_error = 0.0;
  double dense_bias_relative_error = 0.0;
  bool passed = false;  // max_relative_error < tolerance
};

// Analytic gradient against central differences with step h on every
// trainable parameter. Relative error is |a - n| / max(|a|, |n|, 1e-6).
GradCheckResult grad_check(const ConvNetModel& model, std::span<const int> ids, double target,
                           double tolerance = 1e-4, double h = 1e-5);

// The embedding matrix is not written; it is reattached on load.
void save_model(std::ostream& out, const ConvNetModel& model);
ConvNetModel load_convnet(std::istream& in, Eigen::MatrixXd embedding,
                          const std::string& source = "<model>");

}  // namespace satira
