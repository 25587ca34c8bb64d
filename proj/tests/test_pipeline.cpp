#include <doctest.h>

#include "satira/error.hpp"
#include "satira/eval.hpp"
#include "satira/pipeline.hpp"
#include "support.hpp"

using namespace satira;
namespace st = satira::testing;

namespace {

PipelineConfig config_for(ModelKind kind, const std::filesystem::path& embeddings = {}) {
  PipelineConfig cfg;
  cfg.model = kind;
  cfg.boosting.n_rounds = 20;
  cfg.convnet = ConvNetConfig{8, 3, 24};
  cfg.training.epochs = 3;
  cfg.training.adam.learning_rate = 0.01;
  cfg.embeddings = embeddings;
  cfg.embedding_dim = 12;
  return cfg;
}

}  // namespace

TEST_CASE("every model survives a save/load round trip") {
  st::TempDir dir;
  const auto corpus = st::separable_corpus(80, 3, 20);
  st::write_class_embeddings(dir / "vectors.txt", 20, 12, 5, 2);
  const auto parts = split(corpus, SplitConfig{});
  for (auto kind : {ModelKind::NaiveBayes, ModelKind::BoostedTrees, ModelKind::ConvNet}) {
    CAPTURE(to_string(kind));
    const auto clf = train_classifier(parts.train.documents(), config_for(kind, dir / "vectors.txt"));
    const auto pred = clf.predict(parts.test.documents());
    CHECK(evaluate(pred.labels, labels_of(parts.test)).accuracy == 1.0);

    const auto model_dir = dir / std::string(to_string(kind));
    clf.save(model_dir);
    const auto back = TrainedClassifier::load(model_dir);
    const auto again = back.predict(parts.test.documents());
    CHECK(again.labels == pred.labels);
    CHECK(again.fake_probability == pred.fake_probability);
    CHECK(back.config().split.seed == 42);
  }
}

TEST_CASE("cnn coverage and embedding checks") {
  st::TempDir dir;
  const auto corpus = st::separable_corpus(40, 4, 20);
  st::write_class_embeddings(dir / "vectors.txt", 20, 12, 5, 2);
  const auto clf = train_classifier(corpus.documents(), config_for(ModelKind::ConvNet, dir / "vectors.txt"));
  CHECK(clf.embedding_coverage() < 1.0);
  CHECK(clf.embedding_coverage() > 0.9);
  clf.save(dir / "cnn");
  st::write_class_embeddings(dir / "vectors.txt", 20, 12, 6, 2);
  CHECK_THROWS_AS(TrainedClassifier::load(dir / "cnn"), DataError);
  CHECK_THROWS_AS(train_classifier(corpus.documents(), config_for(ModelKind::ConvNet)), DataError);
}

TEST_CASE("fixed seeds give bitwise-identical models") {
  st::TempDir dir;
  const auto corpus = st::separable_corpus(60, 8, 20);
  st::write_class_embeddings(dir / "vectors.txt", 20, 12, 5);
  for (auto kind : {ModelKind::BoostedTrees, ModelKind::ConvNet}) {
    const auto cfg = config_for(kind, dir / "vectors.txt");
    const auto a = train_classifier(corpus.documents(), cfg);
    const auto b = train_classifier(corpus.documents(), cfg);
    CHECK(a.training_loss() == b.training_loss());
    CHECK(a.predict(corpus.documents()).fake_probability == b.predict(corpus.documents()).fake_probability);
  }
}

TEST_CASE("model kind names") {
  CHECK(parse_model_kind("gbt") == ModelKind::BoostedTrees);
  CHECK(to_string(ModelKind::ConvNet) == "cnn");
  CHECK_THROWS_AS(parse_model_kind("svm"), DataError);
}
