#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "oracles.hpp"
#include "satira/convnet.hpp"
#include "satira/embeddings.hpp"
#include "satira/error.hpp"
#include "satira/random.hpp"

using namespace satira;

namespace {

ConvNetModel tiny(std::uint64_t seed, int vocab = 20, int dim = 8, int filters = 4, int kernel = 3) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd emb(vocab, dim);
  for (Eigen::Index i = 0; i < emb.size(); ++i) emb(i) = 2.0 * uniform01(rng) - 1.0;
  auto model = init_convnet(emb, ConvNetConfig{filters, kernel, 7}, seed);
  // Non-zero biases so every parameter group is exercised.
  for (Eigen::Index f = 0; f < model.conv_bias.size(); ++f) model.conv_bias(f) = 0.2 * uniform01(rng) - 0.1;
  model.dense_bias = 0.3;
  return model;
}

std::vector<int> random_ids(std::mt19937_64& rng, int vocab, int len) {
  std::vector<int> ids(static_cast<std::size_t>(len));
  for (auto& id : ids) id = static_cast<int>(rng() % static_cast<std::uint64_t>(vocab));
  return ids;
}

}  // namespace

TEST_CASE("forward matches the direct-summation oracle") {
  std::mt19937_64 rng(1);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto model = tiny(s);
    const auto ids = random_ids(rng, 20, 7);
    CHECK(std::abs(cnn_logit(model, ids) - oracle::conv_logit(model, ids)) < 1e-10);
  }
}

TEST_CASE("embedding row zero is the zero vector") {
  const auto model = tiny(3);
  CHECK(model.embedding.row(0).isZero(0.0));
}

TEST_CASE("all padding gives sigmoid of the dense bias") {
  auto model = tiny(5);
  model.conv_bias.setZero();
  model.dense_bias = -0.4;
  const std::vector<int> pad(7, 0);
  CHECK(cnn_forward(model, pad) == doctest::Approx(1.0 / (1.0 + std::exp(0.4))).epsilon(1e-15));
}

TEST_CASE("outputs lie strictly inside (0, 1)") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 1000; ++t) {
    auto model = tiny(static_cast<std::uint64_t>(t % 10));
    model.dense_weight *= static_cast<double>(1 + rng() % 200);  // push toward saturation
    model.dense_bias = (t % 2 ? 1.0 : -1.0) * static_cast<double>(rng() % 60);
    const double p = cnn_forward(model, random_ids(rng, 20, 7));
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("bad ids are rejected") {
  const auto model = tiny(2);
  CHECK_THROWS_AS(cnn_forward(model, std::vector<int>{0, 1, 20, 3, 4, 5, 6}), DataError);
  CHECK_THROWS_AS(cnn_forward(model, std::vector<int>{0, 1}), DataError);
}

TEST_CASE("gradient check") {
  std::mt19937_64 rng(11);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto model = tiny(100 + s);
    const auto result = grad_check(model, random_ids(rng, 20, 7), static_cast<double>(s % 2));
    CHECK(result.passed);
    CHECK(result.max_relative_error < 1e-4);
    CHECK(result.dense_bias_relative_error < 1e-7);
  }
}

TEST_CASE("zero weights give dense-bias gradient p - y") {
  auto model = tiny(4);
  model.conv_weight.setZero();
  model.conv_bias.setZero();
  model.dense_weight.setZero();
  model.dense_bias = 0.0;
  const std::vector<int> ids{1, 2, 3, 4, 5, 6, 7};
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(model.trainable_size());
  cnn_loss_and_gradient(model, ids, 1.0, grad);
  CHECK(grad(grad.size() - 1) == -0.5);
  grad.setZero();
  cnn_loss_and_gradient(model, ids, 0.0, grad);
  CHECK(grad(grad.size() - 1) == 0.5);
}

TEST_CASE("trainable packing round trips") {
  auto model = tiny(6);
  const Eigen::VectorXd p = model.trainable();
  CHECK(p.size() == model.trainable_size());
  CHECK(p(0) == model.conv_weight(0, 0));
  CHECK(p(1) == model.conv_weight(0, 1));
  CHECK(p(p.size() - 1) == model.dense_bias);
  model.set_trainable(p * 2.0);
  CHECK(model.trainable() == p * 2.0);
}

namespace {

// Two classes over disjoint token ranges whose embeddings differ in sign.
struct ToyData {
  ConvNetModel model;
  std::vector<std::vector<int>> inputs;
  std::vector<double> targets;
};

ToyData toy(std::size_t n_docs) {
  ToyData d;
  std::mt19937_64 rng(9);
  Eigen::MatrixXd emb(21, 6);
  for (Eigen::Index r = 0; r < emb.rows(); ++r)
    for (Eigen::Index c = 0; c < emb.cols(); ++c)
      emb(r, c) = (r <= 10 ? 1.0 : -1.0) * (0.5 + uniform01(rng)) * (c % 2 ? 1 : 0.5);
  d.model = init_convnet(emb, ConvNetConfig{6, 3, 10}, 42);
  for (std::size_t i = 0; i < n_docs; ++i) {
    const bool fake = i % 2 == 0;
    std::vector<int> ids;
    const auto len = 5 + rng() % 6;
    for (std::size_t t = 0; t < len; ++t) ids.push_back(static_cast<int>((fake ? 1 : 11) + rng() % 10));
    ids.resize(10, 0);
    d.inputs.push_back(ids);
    d.targets.push_back(fake ? 1.0 : 0.0);
  }
  return d;
}

}  // namespace

TEST_CASE("training separates disjoint vocabularies") {
  auto data = toy(40);
  const Eigen::MatrixXd before = data.model.embedding;
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.adam.learning_rate = 0.01;
  const auto fit = cnn_train(data.model, data.inputs, data.targets, cfg);
  CHECK(fit.epoch_loss.size() == 10);
  CHECK(fit.epoch_loss.back() < fit.epoch_loss.front());
  int correct = 0;
  for (std::size_t i = 0; i < data.inputs.size(); ++i)
    correct += (cnn_forward(fit.model, data.inputs[i]) >= 0.5) == (data.targets[i] == 1.0);
  CHECK(correct == 40);
  CHECK(fit.model.embedding == before);

  const auto again = cnn_train(data.model, data.inputs, data.targets, cfg);
  CHECK(again.epoch_loss == fit.epoch_loss);
  CHECK(again.model.trainable() == fit.model.trainable());
}

TEST_CASE("zero epochs leave the model unchanged") {
  auto data = toy(10);
  TrainConfig cfg;
  cfg.epochs = 0;
  const auto fit = cnn_train(data.model, data.inputs, data.targets, cfg);
  CHECK(fit.epoch_loss.empty());
  CHECK(fit.model.trainable() == data.model.trainable());
  std::vector<double> one_class(data.targets.size(), 1.0);
  CHECK_THROWS_AS(cnn_train(data.model, data.inputs, one_class, cfg), DataError);
}

TEST_CASE("convnet serialization") {
  const auto model = tiny(8);
  std::stringstream s;
  save_model(s, model);
  const auto back = load_convnet(s, model.embedding);
  CHECK(back.trainable() == model.trainable());
  std::stringstream s2;
  save_model(s2, model);
  CHECK_THROWS_AS(load_convnet(s2, Eigen::MatrixXd::Zero(3, 8)), DataError);
}

TEST_CASE("token index") {
  const TokenIndex index({"ب", "ا", "ب"});
  CHECK(index.size() == 2);
  CHECK(index.id("ا") == 1);
  CHECK(index.id("ب") == 2);
  CHECK(index.id("ج") == 0);
  const std::vector<std::string> toks{"ب", "ج", "ا"};
  CHECK(index.encode(toks, 5) == std::vector<int>{2, 0, 1, 0, 0});
  CHECK(index.encode(toks, 2) == std::vector<int>{2, 0});
}

TEST_CASE("embedding file reader") {
  std::vector<std::string> words;
  for (int i = 0; i < 10; ++i) words.push_back("w" + std::to_string(i));
  const TokenIndex index(words);
  std::string file = "9 3\n";
  for (int i = 0; i < 9; ++i) file += fmt::format("w{} {} 0.5 -1e-2\n", i, i);
  std::istringstream in(file);
  const auto table = read_embeddings(in, index, 3);
  CHECK(table.coverage == doctest::Approx(0.9));
  CHECK(table.matrix.rows() == 11);
  CHECK(table.matrix.row(0).isZero(0.0));
  CHECK(table.matrix(index.id("w9"), 0) == 0.0);
  CHECK(table.matrix(index.id("w4"), 0) == 4.0);
  CHECK(table.matrix(index.id("w4"), 2) == -0.01);

  std::istringstream empty_index("1 3\nx 1 2 3\n");
  CHECK(read_embeddings(empty_index, TokenIndex(), 3).coverage == 1.0);

  std::istringstream wrong_dim("1 4\nx 1 2 3 4\n");
  CHECK_THROWS_AS(read_embeddings(wrong_dim, index, 300), DataError);

  std::istringstream short_line("2 3\nw1 1 2 3\nw2 1 2\n");
  try {
    read_embeddings(short_line, index, 3);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}
