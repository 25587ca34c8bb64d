#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "satira/corpus.hpp"

namespace satira {

// Token -> row id. Id 0 is reserved for padding and out-of-vocabulary tokens;
// known tokens take ids 1..size() in lexicographic order.
class TokenIndex {
 public:
  TokenIndex() = default;
  explicit TokenIndex(std::vector<std::string> tokens);

  static TokenIndex from_corpus(std::span<const Document> docs);

  // 0 when unknown.
  int id(const std::string& token) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  // Rows needed by an embedding matrix: size() + 1.
  Eigen::Index rows() const noexcept { return static_cast<Eigen::Index>(tokens_.size()) + 1; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  // Truncates the tail or right-pads with id 0 to exactly `length` ids.
  std::vector<int> encode(std::span<const std::string> tokens, std::size_t length) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

struct EmbeddingTable {
  Eigen::MatrixXd matrix;  // index.rows() x dim; uncovered rows are zero
  double coverage = 1.0;   // covered tokens / index.size(); 1 for an empty index
};

// Word-vector text format: header `<count> <dim>`, then `token v1 .. v_dim`.
// expected_dim == 0 accepts whatever the header declares.
EmbeddingTable read_embeddings(std::istream& in, const TokenIndex& index, int expected_dim,
                               const std::string& source = "<embeddings>");
EmbeddingTable load_embeddings(const std::filesystem::path& path, const TokenIndex& index,
                               int expected_dim = 300);

}  // namespace satira
