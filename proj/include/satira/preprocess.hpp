#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "satira/corpus.hpp"

namespace satira {

struct NormalizationConfig {
  bool strip_diacritics = true;  // U+064B..U+065F, U+0670
  bool strip_latin = true;       // Basic-Latin letters
  bool strip_special = true;     // anything that is not a letter, digit or space
  bool collapse_whitespace = true;
};

// Total on any byte string; invalid UTF-8 sequences count as special characters.
std::string normalize(std::string_view text, const NormalizationConfig& cfg = {});

std::vector<std::string> tokenize(std::string_view text);

// Re-derives text and tokens from normalize(text).
Document normalize_document(const Document& doc, const NormalizationConfig& cfg = {});

struct NgramFrequency {
  int n = 1;
  std::map<std::string, std::size_t> counts;  // space-joined n-gram -> count
};

// Windows never cross document boundaries. n must be 1, 2 or 3.
NgramFrequency ngram_frequency(const LabeledCorpus& corpus, int n);
NgramFrequency ngram_frequency(std::span<const Document> docs, int n);

// The highest-count entries, count descending then n-gram ascending.
// The number kept is fraction * distinct keys rounded to nearest (halves up),
// never fewer than one for a non-empty dictionary.
std::vector<std::pair<std::string, std::size_t>> top_fraction(const NgramFrequency& freq,
                                                              double fraction);

void write_ngram_tsv(std::ostream& out,
                     const std::vector<std::pair<std::string, std::size_t>>& entries);

// Ordered list of 1-3 token phrases, unique and non-empty.
class StopPhraseList {
 public:
  StopPhraseList() = default;
  // Throws DataError on empty, duplicate or over-long phrases.
  explicit StopPhraseList(std::vector<std::string> phrases);

  const std::vector<std::string>& phrases() const noexcept { return phrases_; }
  bool empty() const noexcept { return phrases_.empty(); }

 private:
  std::vector<std::string> phrases_;
};

// One phrase per line, '#' starts a comment line, blank lines skipped. Each
// phrase is passed through normalize(cfg) so it matches normalized corpora.
std::vector<std::string> read_phrase_lines(std::istream& in, const std::string& source,
                                           const NormalizationConfig& cfg = {});
StopPhraseList load_stop_phrases(const std::filesystem::path& path,
                                 const NormalizationConfig& cfg = {});

// Longest-phrase-first, left-to-right, non-overlapping matcher over token
// streams. Shared by stop-phrase removal and lexicon scoring.
class PhraseMatcher {
 public:
  explicit PhraseMatcher(std::span<const std::string> phrases);

  // Length in tokens of the longest phrase matching at tokens[pos], or 0.
  std::size_t match_at(std::span<const std::string> tokens, std::size_t pos) const;

  // Number of non-overlapping matches found by a left-to-right scan.
  std::size_t count_matches(std::span<const std::string> tokens) const;

  // Tokens with every match deleted.
  std::vector<std::string> remove_matches(std::span<const std::string> tokens) const;

  bool empty() const noexcept { return by_first_.empty(); }

 private:
  // first token -> candidate phrases (as token lists), longest first
  std::unordered_map<std::string, std::vector<std::vector<std::string>>> by_first_;
};

Document apply_stop_phrases(const Document& doc, const StopPhraseList& phrases);
Document apply_stop_phrases(const Document& doc, const PhraseMatcher& matcher);

}  // namespace satira
