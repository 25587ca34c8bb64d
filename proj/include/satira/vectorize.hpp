#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "satira/corpus.hpp"

namespace satira {

enum class Weighting { Count, TfIdf };
enum class Analyzer { Word, Char };

struct VectorizerConfig {
  Weighting weighting = Weighting::Count;
  Analyzer analyzer = Analyzer::Word;
  int ngram_lo = 1;
  int ngram_hi = 1;
  std::size_t max_features = 1500;
  double max_df = 0.7;  // proportion of documents

  void validate() const;
  bool same_features(const VectorizerConfig& other) const {
    return analyzer == other.analyzer && ngram_lo == other.ngram_lo && ngram_hi == other.ngram_hi;
  }
};

// Rows are documents, columns vocabulary features.
using DocTermMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Analyzer output for one document: word n-grams joined by single spaces, or
// code point n-grams over the space-joined token stream.
std::vector<std::string> analyze(const Document& doc, const VectorizerConfig& cfg);

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(VectorizerConfig cfg, std::vector<std::string> features,
             std::vector<std::size_t> document_frequency, std::size_t n_docs_fitted);

  const VectorizerConfig& config() const noexcept { return cfg_; }
  std::size_t size() const noexcept { return features_.size(); }
  const std::vector<std::string>& features() const noexcept { return features_; }
  const std::string& feature(std::size_t index) const { return features_[index]; }
  const std::vector<std::size_t>& document_frequency() const noexcept { return df_; }
  // Smoothed idf, ln((1 + n) / (1 + df)) + 1, for every feature.
  const std::vector<double>& idf() const noexcept { return idf_; }
  std::size_t n_docs_fitted() const noexcept { return n_docs_; }

  // -1 when the feature is not in the vocabulary.
  long index_of(const std::string& feature) const;

  void save(std::ostream& out) const;
  static Vocabulary load(std::istream& in, const std::string& source = "<vocabulary>");

 private:
  VectorizerConfig cfg_;
  std::vector<std::string> features_;  // sorted; position is the column index
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

Vocabulary fit_vocabulary(std::span<const Document> docs, const VectorizerConfig& cfg);
inline Vocabulary fit_vocabulary(const LabeledCorpus& corpus, const VectorizerConfig& cfg) {
  return fit_vocabulary(std::span<const Document>(corpus.documents()), cfg);
}

// Throws DataError if cfg does not describe the same features as the vocabulary.
DocTermMatrix transform(std::span<const Document> docs, const Vocabulary& vocab,
                        const VectorizerConfig& cfg);
inline DocTermMatrix transform(const LabeledCorpus& corpus, const Vocabulary& vocab,
                               const VectorizerConfig& cfg) {
  return transform(std::span<const Document>(corpus.documents()), vocab, cfg);
}

}  // namespace satira
