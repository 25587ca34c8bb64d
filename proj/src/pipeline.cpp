#include "satira/pipeline.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "satira/checksum.hpp"
#include "satira/error.hpp"
#include "model_io.hpp"

namespace satira {

namespace {

std::string_view weighting_name(Weighting w) { return w == Weighting::Count ? "count" : "tfidf"; }
std::string_view analyzer_name(Analyzer a) { return a == Analyzer::Word ? "word" : "char"; }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw DataError(source + ": bad seed '" + text + "'");
}

void write_config(std::ostream& out, const PipelineConfig& cfg, const std::string& embeddings_sha) {
  model_io::Writer w(out, "pipeline");
  w.text("model", to_string(cfg.model));
  w.text("weighting", weighting_name(cfg.vectorizer.weighting));
  w.text("analyzer", analyzer_name(cfg.vectorizer.analyzer));
  w.scalar("ngram_lo", cfg.vectorizer.ngram_lo);
  w.scalar("ngram_hi", cfg.vectorizer.ngram_hi);
  w.scalar("max_features", static_cast<double>(cfg.vectorizer.max_features));
  w.scalar("max_df", cfg.vectorizer.max_df);
  w.scalar("nb_alpha", cfg.nb_alpha);
  w.scalar("gbt_rounds", cfg.boosting.n_rounds);
  w.scalar("gbt_max_depth", cfg.boosting.max_depth);
  w.scalar("gbt_learning_rate", cfg.boosting.learning_rate);
  w.scalar("gbt_lambda", cfg.boosting.lambda);
  w.scalar("cnn_filters", cfg.convnet.filters);
  w.scalar("cnn_kernel", cfg.convnet.kernel);
  w.scalar("cnn_max_sequence_length", cfg.convnet.max_sequence_length);
  w.scalar("epochs", cfg.training.epochs);
  w.scalar("batch_size", cfg.training.batch_size);
  w.scalar("adam_learning_rate", cfg.training.adam.learning_rate);
  w.scalar("adam_beta1", cfg.training.adam.beta1);
  w.scalar("adam_beta2", cfg.training.adam.beta2);
  w.scalar("adam_epsilon", cfg.training.adam.epsilon);
  w.text("training_seed", std::to_string(cfg.training.seed));
  w.text("embeddings", cfg.embeddings.string());
  w.text("embeddings_sha256", embeddings_sha);
  w.scalar("embedding_dim", cfg.embedding_dim);
  w.text("seed", std::to_string(cfg.seed));
  w.scalar("split_test_fraction", cfg.split.test_fraction);
  w.text("split_seed", std::to_string(cfg.split.seed));
  w.scalar("split_stratified", cfg.split.stratified ? 1 : 0);
  w.scalar("segmented", cfg.segmented ? 1 : 0);
}

PipelineConfig read_config(std::istream& in, const std::string& source, std::string& embeddings_sha) {
  model_io::Reader r(in, source, "pipeline");
  PipelineConfig cfg;
  cfg.model = parse_model_kind(r.text("model"));
  const auto weighting = r.text("weighting");
  if (weighting != "count" && weighting != "tfidf") throw DataError(source + ": bad weighting");
  cfg.vectorizer.weighting = weighting == "count" ? Weighting::Count : Weighting::TfIdf;
  const auto analyzer = r.text("analyzer");
  if (analyzer != "word" && analyzer != "char") throw DataError(source + ": bad analyzer");
  cfg.vectorizer.analyzer = analyzer == "word" ? Analyzer::Word : Analyzer::Char;
  cfg.vectorizer.ngram_lo = static_cast<int>(r.scalar("ngram_lo"));
  cfg.vectorizer.ngram_hi = static_cast<int>(r.scalar("ngram_hi"));
  cfg.vectorizer.max_features = static_cast<std::size_t>(r.scalar("max_features"));
  cfg.vectorizer.max_df = r.scalar("max_df");
  cfg.nb_alpha = r.scalar("nb_alpha");
  cfg.boosting.n_rounds = static_cast<int>(r.scalar("gbt_rounds"));
  cfg.boosting.max_depth = static_cast<int>(r.scalar("gbt_max_depth"));
  cfg.boosting.learning_rate = r.scalar("gbt_learning_rate");
  cfg.boosting.lambda = r.scalar("gbt_lambda");
  cfg.convnet.filters = static_cast<int>(r.scalar("cnn_filters"));
  cfg.convnet.kernel = static_cast<int>(r.scalar("cnn_kernel"));
  cfg.convnet.max_sequence_length = static_cast<int>(r.scalar("cnn_max_sequence_length"));
  cfg.training.epochs = static_cast<int>(r.scalar("epochs"));
  cfg.training.batch_size = static_cast<int>(r.scalar("batch_size"));
  cfg.training.adam.learning_rate = r.scalar("adam_learning_rate");
  cfg.training.adam.beta1 = r.scalar("adam_beta1");
  cfg.training.adam.beta2 = r.scalar("adam_beta2");
  cfg.training.adam.epsilon = r.scalar("adam_epsilon");
  cfg.training.seed = parse_seed(r.text("training_seed"), source);
  cfg.embeddings = r.text("embeddings");
  embeddings_sha = r.text("embeddings_sha256");
  cfg.embedding_dim = static_cast<int>(r.scalar("embedding_dim"));
  cfg.seed = parse_seed(r.text("seed"), source);
  cfg.split.test_fraction = r.scalar("split_test_fraction");
  cfg.split.seed = parse_seed(r.text("split_seed"), source);
  cfg.split.stratified = r.scalar("split_stratified") != 0.0;
  cfg.segmented = r.scalar("segmented") != 0.0;
  return cfg;
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
  switch (kind) {
    case ModelKind::NaiveBayes: return "nb";
    case ModelKind::BoostedTrees: return "gbt";
    case ModelKind::ConvNet: return "cnn";
  }
  return "nb";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "nb") return ModelKind::NaiveBayes;
  if (text == "gbt") return ModelKind::BoostedTrees;
  if (text == "cnn") return ModelKind::ConvNet;
  throw DataError("unknown model '" + std::string(text) + "' (expected nb, gbt or cnn)");
}

std::vector<std::vector<int>> encode_documents(std::span<const Document> docs,
                                               const TokenIndex& index, std::size_t length) {
  std::vector<std::vector<int>> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) out.push_back(index.encode(doc.tokens, length));
  return out;
}

TrainedClassifier train_classifier(std::span<const Document> train, const PipelineConfig& cfg) {
  std::vector<Label> labels;
  labels.reserve(train.size());
  for (const auto& doc : train) {
    if (!doc.label) throw DataError("training document '" + doc.id + "' is unlabeled");
    labels.push_back(*doc.label);
  }

  TrainedClassifier clf;
  clf.cfg_ = cfg;
  switch (cfg.model) {
    case ModelKind::NaiveBayes: {
      clf.vocab_ = fit_vocabulary(train, cfg.vectorizer);
      clf.nb_ = nb_fit(transform(train, *clf.vocab_, cfg.vectorizer), labels, cfg.nb_alpha);
      break;
    }
    case ModelKind::BoostedTrees: {
      clf.vocab_ = fit_vocabulary(train, cfg.vectorizer);
      const Eigen::MatrixXd X(transform(train, *clf.vocab_, cfg.vectorizer));
      auto fit = gbt_fit(X, positive_targets(labels), cfg.boosting);
      clf.gbt_ = std::move(fit.model);
      clf.loss_ = std::move(fit.training_loss);
      break;
    }
    case ModelKind::ConvNet: {
      if (cfg.embeddings.empty()) throw DataError("the cnn model needs an embeddings file");
      clf.tokens_ = TokenIndex::from_corpus(train);
      auto table = load_embeddings(cfg.embeddings, *clf.tokens_, cfg.embedding_dim);
      clf.coverage_ = table.coverage;
      spdlog::info("embedding coverage {:.4f} of {} training tokens", table.coverage,
                   clf.tokens_->size());
      auto model = init_convnet(std::move(table.matrix), cfg.convnet, cfg.seed);
      const auto inputs = encode_documents(
          train, *clf.tokens_, static_cast<std::size_t>(cfg.convnet.max_sequence_length));
      std::vector<double> targets;
      targets.reserve(labels.size());
      for (Label l : labels) targets.push_back(l == Label::Fake ? 1.0 : 0.0);
      auto fit = cnn_train(std::move(model), inputs, targets, cfg.training);
      clf.cnn_ = std::move(fit.model);
      clf.loss_ = std::move(fit.epoch_loss);
      break;
    }
  }
  return clf;
}

Prediction TrainedClassifier::predict(std::span<const Document> docs) const {
  Prediction out;
  out.labels.reserve(docs.size());
  out.fake_probability.reserve(docs.size());
  switch (cfg_.model) {
    case ModelKind::NaiveBayes: {
      const auto X = transform(docs, *vocab_, cfg_.vectorizer);
      const Eigen::MatrixX2d joint = nb_log_joint(*nb_, X);
      out.labels = nb_predict(*nb_, X);
      for (Eigen::Index r = 0; r < joint.rows(); ++r)
        out.fake_probability.push_back(sigmoid(joint(r, 0) - joint(r, 1)));
      break;
    }
    case ModelKind::BoostedTrees: {
      const Eigen::MatrixXd X(transform(docs, *vocab_, cfg_.vectorizer));
      const Eigen::VectorXd p = gbt_predict_proba(*gbt_, X);
      out.fake_probability.assign(p.data(), p.data() + p.size());
      out.labels = gbt_predict(*gbt_, X);
      break;
    }
    case ModelKind::ConvNet: {
      const auto length = static_cast<std::size_t>(cnn_->max_sequence_length);
      for (const auto& doc : docs) {
        const double p = cnn_forward(*cnn_, tokens_->encode(doc.tokens, length));
        out.fake_probability.push_back(p);
        out.labels.push_back(p >= 0.5 ? Label::Fake : Label::Real);
      }
      break;
    }
  }
  return out;
}

void TrainedClassifier::save(const std::filesystem::path& dir, const std::string& header) const {
  std::filesystem::create_directories(dir);
  const auto open = [&](const char* name) {
    auto out = open_out(dir / name);
    if (!header.empty()) out << "# " << header << '\n';
    return out;
  };
  std::string embeddings_sha;
  if (cfg_.model == ModelKind::ConvNet) embeddings_sha = sha256_file(cfg_.embeddings);
  {
    auto out = open("run.txt");
    write_config(out, cfg_, embeddings_sha);
  }
  auto model_out = open("model.txt");
  switch (cfg_.model) {
    case ModelKind::NaiveBayes: save_model(model_out, *nb_); break;
    case ModelKind::BoostedTrees: save_model(model_out, *gbt_); break;
    case ModelKind::ConvNet: save_model(model_out, *cnn_); break;
  }
  if (vocab_) {
    auto out = open("vocab.txt");
    vocab_->save(out);
  }
  if (tokens_) {
    auto out = open("tokens.txt");
    for (const auto& token : tokens_->tokens()) out << token << '\n';
  }
}

TrainedClassifier TrainedClassifier::load(const std::filesystem::path& dir) {
  TrainedClassifier clf;
  std::string embeddings_sha;
  {
    auto in = open_in(dir / "run.txt");
    clf.cfg_ = read_config(in, (dir / "run.txt").string(), embeddings_sha);
  }
  const auto model_path = dir / "model.txt";
  auto model_in = open_in(model_path);
  if (clf.cfg_.model == ModelKind::ConvNet) {
    auto in = open_in(dir / "tokens.txt");
    std::vector<std::string> tokens;
    for (std::string line; std::getline(in, line);)
      if (!(tokens.empty() && line.starts_with("# "))) tokens.push_back(line);
    clf.tokens_ = TokenIndex(std::move(tokens));
    if (sha256_file(clf.cfg_.embeddings) != embeddings_sha)
      throw DataError("embeddings file " + clf.cfg_.embeddings.string() +
                      " changed since the model was trained");
    auto table = load_embeddings(clf.cfg_.embeddings, *clf.tokens_, clf.cfg_.embedding_dim);
    clf.coverage_ = table.coverage;
    clf.cnn_ = load_convnet(model_in, std::move(table.matrix), model_path.string());
    return clf;
  }

  auto vin = open_in(dir / "vocab.txt");
  clf.vocab_ = Vocabulary::load(vin, (dir / "vocab.txt").string());
  if (clf.cfg_.model == ModelKind::NaiveBayes) {
    clf.nb_ = load_naive_bayes(model_in, model_path.string());
    if (static_cast<std::size_t>(clf.nb_->n_features()) != clf.vocab_->size())
      throw DataError("model and vocabulary sizes differ in " + dir.string());
  } else {
    clf.gbt_ = load_boosted_trees(model_in, model_path.string());
    if (static_cast<std::size_t>(clf.gbt_->n_features) != clf.vocab_->size())
      throw DataError("model and vocabulary sizes differ in " + dir.string());
  }
  return clf;
}

}  // namespace satira
