#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace satira {

// FAKE is the positive class throughout (class index 0).
enum class Label : int { Fake = 0, Real = 1 };

inline constexpr std::array<Label, 2> kLabels{Label::Fake, Label::Real};

constexpr int index_of(Label label) noexcept { return static_cast<int>(label); }
std::string_view to_string(Label label) noexcept;
// Accepts exactly "fake" / "real"; anything else throws DataError.
Label parse_label(std::string_view text);

struct Document {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  std::optional<Label> label;
};

class LabeledCorpus {
 public:
  LabeledCorpus() = default;
  // Throws DataError on duplicate ids.
  explicit LabeledCorpus(std::vector<Document> documents);

  const std::vector<Document>& documents() const noexcept { return documents_; }
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  std::size_t class_count(Label label) const noexcept { return class_counts_[index_of(label)]; }
  std::size_t labeled_count() const noexcept { return class_counts_[0] + class_counts_[1]; }

  auto begin() const noexcept { return documents_.begin(); }
  auto end() const noexcept { return documents_.end(); }

 private:
  std::vector<Document> documents_;
  std::array<std::size_t, 2> class_counts_{0, 0};
};

enum class CorpusFormat { Jsonl, Csv };

struct SplitConfig {
  double test_fraction = 0.2;
  std::uint64_t seed = 42;
  bool stratified = true;
};

struct TrainTestSplit {
  LabeledCorpus train;
  LabeledCorpus test;
};

// Whitespace split; no empty tokens.
std::vector<std::string> whitespace_tokens(std::string_view text);

// Lines starting with '#' are treated as metadata comments in JSONL input.
LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
LabeledCorpus read_jsonl(std::istream& in, const std::string& source = "<jsonl>");
LabeledCorpus read_csv(std::istream& in, const std::string& source = "<csv>");

// Canonical JSONL: keys in the order id, text, label; label omitted when absent.
void write_jsonl(std::ostream& out, const LabeledCorpus& corpus);
std::string to_jsonl_line(const Document& doc);

CorpusFormat format_from_extension(const std::filesystem::path& path);

TrainTestSplit split(const LabeledCorpus& corpus, const SplitConfig& cfg);

// Labels in corpus order; throws DataError if any document is unlabeled.
std::vector<Label> labels_of(const LabeledCorpus& corpus);

}  // namespace satira
