#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "satira/corpus.hpp"

namespace satira::testing {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            fmt::format("satira-test-{}-{}", rd(), counter++);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Document make_doc(std::string id, std::vector<std::string> tokens,
                         std::optional<Label> label = std::nullopt) {
  Document d;
  d.id = std::move(id);
  for (std::size_t i = 0; i < tokens.size(); ++i) d.text += (i ? " " : "") + tokens[i];
  d.tokens = std::move(tokens);
  d.label = label;
  return d;
}

// Arabic-letter pseudo-words: class 0 draws from one block of stems, class 1
// from a disjoint block, so the vocabularies never overlap.
inline std::vector<std::string> class_vocabulary(int cls, int size) {
  static const char* const letters[] = {"ب", "ت", "ث", "ج", "ح", "خ", "د", "ذ", "ر", "ز",
                                        "س", "ش", "ص", "ض", "ط", "ظ", "ع", "غ", "ف", "ق"};
  std::vector<std::string> words;
  for (int i = 0; i < size; ++i) {
    const int k = cls * size + i;
    words.push_back(std::string(cls == 0 ? "م" : "ل") + letters[k % 20] + letters[(k / 20) % 20] +
                    letters[(k / 7 + 3) % 20]);
  }
  return words;
}

// Balanced corpus with disjoint per-class vocabularies.
inline LabeledCorpus separable_corpus(std::size_t n_docs, std::uint64_t seed, int vocab_per_class = 40,
                                      int min_len = 8, int max_len = 20) {
  std::mt19937_64 rng(seed);
  const auto fake_words = class_vocabulary(0, vocab_per_class);
  const auto real_words = class_vocabulary(1, vocab_per_class);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < n_docs; ++i) {
    const Label label = i % 2 == 0 ? Label::Fake : Label::Real;
    const auto& words = label == Label::Fake ? fake_words : real_words;
    const int len = min_len + static_cast<int>(rng() % static_cast<std::uint64_t>(max_len - min_len + 1));
    std::vector<std::string> tokens;
    for (int t = 0; t < len; ++t) tokens.push_back(words[rng() % words.size()]);
    docs.push_back(make_doc(fmt::format("d{:04}", i), std::move(tokens), label));
  }
  return LabeledCorpus(std::move(docs));
}

// Word-vector file where each class's words cluster around opposite
// directions; the first `skip` words of class 1 are left out to exercise OOV.
inline void write_class_embeddings(const std::filesystem::path& path, int vocab_per_class, int dim,
                                   std::uint64_t seed, int skip = 0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<std::string> lines;
  for (int cls = 0; cls < 2; ++cls) {
    const auto words = class_vocabulary(cls, vocab_per_class);
    for (std::size_t w = cls == 1 ? static_cast<std::size_t>(skip) : 0; w < words.size(); ++w) {
      std::string line = words[w];
      for (int c = 0; c < dim; ++c)
        line += fmt::format(" {:.6f}", (cls == 0 ? 1.0 : -1.0) * (c % 3 == 0 ? 1.0 : 0.2) + noise(rng));
      lines.push_back(std::move(line));
    }
  }
  std::ofstream out(path);
  out << lines.size() << ' ' << dim << '\n';
  for (const auto& line : lines) out << line << '\n';
}

}  // namespace satira::testing
