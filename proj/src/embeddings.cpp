#include "satira/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "satira/error.hpp"

namespace satira {

TokenIndex::TokenIndex(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  std::sort(tokens_.begin(), tokens_.end());
  tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
  for (std::size_t i = 0; i < tokens_.size(); ++i) ids_.emplace(tokens_[i], static_cast<int>(i) + 1);
}

TokenIndex TokenIndex::from_corpus(std::span<const Document> docs) {
  std::set<std::string> unique;
  for (const auto& doc : docs) unique.insert(doc.tokens.begin(), doc.tokens.end());
  return TokenIndex(std::vector<std::string>(unique.begin(), unique.end()));
}

int TokenIndex::id(const std::string& token) const {
  const auto it = ids_.find(token);
  return it == ids_.end() ? 0 : it->second;
}

std::vector<int> TokenIndex::encode(std::span<const std::string> tokens, std::size_t length) const {
  std::vector<int> ids(length, 0);
  const std::size_t n = std::min(length, tokens.size());
  for (std::size_t i = 0; i < n; ++i) ids[i] = id(tokens[i]);
  return ids;
}

namespace {

bool parse_double(std::string_view text, double& out) {
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

EmbeddingTable read_embeddings(std::istream& in, const TokenIndex& index, int expected_dim,
                               const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source, 1, "missing header '<count> <dim>'");
  long declared = -1;
  int dim = -1;
  {
    std::istringstream ss(line);
    std::string extra;
    if (!(ss >> declared >> dim) || (ss >> extra) || declared < 0 || dim < 1)
      throw ParseError(source, 1, "header must be '<count> <dim>'");
  }
  if (expected_dim > 0 && dim != expected_dim)
    throw ParseError(source, 1,
                     fmt::format("embedding dimension {} but the model expects {}", dim, expected_dim));

  EmbeddingTable table;
  table.matrix = Eigen::MatrixXd::Zero(index.rows(), dim);
  std::vector<bool> filled(static_cast<std::size_t>(index.rows()), false);
  std::size_t covered = 0;
  long vectors = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++vectors;
    std::size_t pos = line.find(' ');
    if (pos == std::string::npos || pos == 0) throw ParseError(source, line_no, "expected 'token v1 .. vN'");
    const std::string token = line.substr(0, pos);
    const int id = index.id(token);
    Eigen::VectorXd values(dim);
    int count = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size()) break;
      auto end = line.find(' ', pos);
      if (end == std::string::npos) end = line.size();
      if (count >= dim) throw ParseError(source, line_no, fmt::format("more than {} values", dim));
      if (!parse_double(std::string_view(line).substr(pos, end - pos), values(count)))
        throw ParseError(source, line_no, "malformed number '" + line.substr(pos, end - pos) + "'");
      ++count;
      pos = end;
    }
    if (count != dim)
      throw ParseError(source, line_no, fmt::format("expected {} values, found {}", dim, count));
    if (id > 0 && !filled[static_cast<std::size_t>(id)]) {
      table.matrix.row(id) = values.transpose();
      filled[static_cast<std::size_t>(id)] = true;
      ++covered;
    }
  }
  if (vectors != declared)
    throw ParseError(source, line_no,
                     fmt::format("header declares {} vectors, file holds {}", declared, vectors));
  table.coverage = index.size() == 0
                       ? 1.0
                       : static_cast<double>(covered) / static_cast<double>(index.size());
  return table;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path, const TokenIndex& index,
                               int expected_dim) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file " + path.string());
  return read_embeddings(in, index, expected_dim, path.string());
}

}  // namespace satira
