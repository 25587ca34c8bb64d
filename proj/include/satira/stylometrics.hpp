#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "satira/corpus.hpp"
#include "satira/preprocess.hpp"

namespace satira {

// A named set of 1-3 token phrases (journalistic cliches, emotive terms).
class Lexicon {
 public:
  // Throws DataError when empty or when a phrase is longer than 3 tokens.
  Lexicon(std::string name, std::vector<std::string> phrases, std::string checksum = {});

  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& phrases() const noexcept { return phrases_; }
  // SHA-256 of the source file, empty for in-memory lexicons.
  const std::string& checksum() const noexcept { return checksum_; }
  const PhraseMatcher& matcher() const noexcept { return matcher_; }

 private:
  std::string name_;
  std::vector<std::string> phrases_;
  std::string checksum_;
  PhraseMatcher matcher_;
};

Lexicon load_lexicon(const std::filesystem::path& path, const NormalizationConfig& cfg = {});

struct PosToken {
  std::string surface;
  std::string pos;
};

using TaggedDocument = std::vector<PosToken>;

// `surface<TAB>pos` per line, one blank line between documents.
std::vector<TaggedDocument> read_tagged(std::istream& in, const std::string& source = "<tagged>");
std::vector<TaggedDocument> load_tagged(const std::filesystem::path& path);

struct MeasureVector {
  std::string doc_id;
  double journalistic_register = 0.0;
  double sentiment_intensity = 0.0;
  std::optional<double> fpp_verb_ratio;
};

// Matched occurrences / |tokens|. A multi-token phrase counts once per
// non-overlapping match; throws DataError on an empty document.
double lexicon_score(const Document& doc, const Lexicon& lexicon);

// True for "VERB" and Penn-style "VB*" tags.
bool is_verb_tag(std::string_view pos);

// Share of verbs whose surface starts with U+0646 or ends with U+0646 U+0627.
// nullopt when there are no verbs.
std::optional<double> fpp_verb_ratio(const TaggedDocument& tagged);

struct CorpusProfile {
  std::vector<MeasureVector> fake;
  std::vector<MeasureVector> real;

  const std::vector<MeasureVector>& of(Label label) const {
    return label == Label::Fake ? fake : real;
  }
};

// `tagged`, when given, must hold one entry per corpus document, in order.
CorpusProfile corpus_profile(const LabeledCorpus& corpus, const Lexicon& cliches,
                             const Lexicon& emotions,
                             const std::vector<TaggedDocument>* tagged = nullptr);

// CSV `doc_id,label,J,S,fpp_ratio`, fake rows first; undefined ratio -> empty.
void write_profile_csv(std::ostream& out, const CorpusProfile& profile);

// Per-class columns read back from a profile CSV. Empty fields become NaN.
struct MeasureColumns {
  std::vector<double> values[2];  // indexed by index_of(Label)
};
MeasureColumns read_profile_column(std::istream& in, const std::string& column,
                                   const std::string& source = "<measures>");

}  // namespace satira
