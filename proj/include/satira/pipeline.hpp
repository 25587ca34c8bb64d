#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "satira/boosted_trees.hpp"
#include "satira/convnet.hpp"
#include "satira/corpus.hpp"
#include "satira/embeddings.hpp"
#include "satira/naive_bayes.hpp"
#include "satira/vectorize.hpp"

namespace satira {

enum class ModelKind { NaiveBayes, BoostedTrees, ConvNet };

std::string_view to_string(ModelKind kind) noexcept;
ModelKind parse_model_kind(std::string_view text);  // "nb" | "gbt" | "cnn"

struct PipelineConfig {
  ModelKind model = ModelKind::NaiveBayes;
  VectorizerConfig vectorizer;
  double nb_alpha = 1.0;
  BoostingConfig boosting;
  ConvNetConfig convnet;
  TrainConfig training;
  std::filesystem::path embeddings;  // required for ConvNet
  int embedding_dim = 300;
  std::uint64_t seed = 42;  // CNN init; training.seed drives shuffling
  SplitConfig split;        // recorded so evaluation can rebuild the held-out set
  bool segmented = false;   // corpus was pre-segmented; metadata only
};

struct Prediction {
  std::vector<Label> labels;
  std::vector<double> fake_probability;
};

// A fitted model plus whatever maps documents to its inputs.
class TrainedClassifier {
 public:
  ModelKind kind() const noexcept { return cfg_.model; }
  const PipelineConfig& config() const noexcept { return cfg_; }

  Prediction predict(std::span<const Document> docs) const;

  const NaiveBayesModel* naive_bayes() const { return nb_ ? &*nb_ : nullptr; }
  const BoostedTreesModel* boosted_trees() const { return gbt_ ? &*gbt_ : nullptr; }
  const ConvNetModel* convnet() const { return cnn_ ? &*cnn_ : nullptr; }
  const Vocabulary* vocabulary() const { return vocab_ ? &*vocab_ : nullptr; }
  const TokenIndex* token_index() const { return tokens_ ? &*tokens_ : nullptr; }

  // Training diagnostics: GBT loss per round or CNN loss per epoch.
  const std::vector<double>& training_loss() const noexcept { return loss_; }
  // Share of the CNN token index covered by the embedding file.
  double embedding_coverage() const noexcept { return coverage_; }

  // Writes run.txt, model.txt and vocab.txt or tokens.txt into dir. A
  // non-empty header becomes a leading `# ` comment line in each file.
  void save(const std::filesystem::path& dir, const std::string& header = {}) const;
  static TrainedClassifier load(const std::filesystem::path& dir);

  friend TrainedClassifier train_classifier(std::span<const Document> train,
                                            const PipelineConfig& cfg);

 private:
  PipelineConfig cfg_;
  std::optional<Vocabulary> vocab_;
  std::optional<TokenIndex> tokens_;
  std::optional<NaiveBayesModel> nb_;
  std::optional<BoostedTreesModel> gbt_;
  std::optional<ConvNetModel> cnn_;
  std::vector<double> loss_;
  double coverage_ = 1.0;
};

TrainedClassifier train_classifier(std::span<const Document> train, const PipelineConfig& cfg);

// Token-id sequences padded/truncated to the model's sequence length.
std::vector<std::vector<int>> encode_documents(std::span<const Document> docs,
                                               const TokenIndex& index, std::size_t length);

}  // namespace satira
