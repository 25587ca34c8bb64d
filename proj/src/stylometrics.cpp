#include "satira/stylometrics.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "satira/checksum.hpp"
#include "satira/error.hpp"
#include "csv.hpp"

namespace satira {

namespace {

std::vector<std::string> dedup(std::vector<std::string> phrases) {
  std::unordered_set<std::string> seen;
  std::vector<std::string> out;
  for (auto& p : phrases)
    if (seen.insert(p).second) out.push_back(std::move(p));
  return out;
}

}  // namespace

Lexicon::Lexicon(std::string name, std::vector<std::string> phrases, std::string checksum)
    : name_(std::move(name)),
      phrases_(dedup(std::move(phrases))),
      checksum_(std::move(checksum)),
      matcher_(phrases_) {
  if (phrases_.empty()) throw DataError("lexicon '" + name_ + "' is empty");
  for (const auto& phrase : phrases_) {
    const auto n = tokenize(phrase).size();
    if (n == 0 || n > 3)
      throw DataError("lexicon '" + name_ + "': phrase must have 1-3 tokens: '" + phrase + "'");
  }
}

Lexicon load_lexicon(const std::filesystem::path& path, const NormalizationConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file " + path.string());
  auto phrases = read_phrase_lines(in, path.string(), cfg);
  return Lexicon(path.stem().string(), std::move(phrases), sha256_file(path));
}

std::vector<TaggedDocument> read_tagged(std::istream& in, const std::string& source) {
  std::vector<TaggedDocument> docs;
  TaggedDocument current;
  bool open = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      // A blank line closes the current document, even an empty one.
      docs.push_back(std::move(current));
      current.clear();
      open = false;
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || line.find('\t', tab + 1) != std::string::npos)
      throw ParseError(source, line_no, "expected 'surface<TAB>pos'");
    current.push_back({line.substr(0, tab), line.substr(tab + 1)});
    open = true;
  }
  if (open) docs.push_back(std::move(current));
  return docs;
}

std::vector<TaggedDocument> load_tagged(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open tagged file " + path.string());
  return read_tagged(in, path.string());
}

double lexicon_score(const Document& doc, const Lexicon& lexicon) {
  if (doc.tokens.empty())
    throw DataError("document '" + doc.id + "' has no tokens; lexicon score is undefined");
  const auto matches = lexicon.matcher().count_matches(doc.tokens);
  return static_cast<double>(matches) / static_cast<double>(doc.tokens.size());
}

bool is_verb_tag(std::string_view pos) { return pos == "VERB" || pos.starts_with("VB"); }

std::optional<double> fpp_verb_ratio(const TaggedDocument& tagged) {
  static constexpr std::string_view kNoon = "ن";
  static constexpr std::string_view kNaa = "نا";
  std::size_t verbs = 0;
  std::size_t first_plural = 0;
  for (const auto& token : tagged) {
    if (!is_verb_tag(token.pos)) continue;
    ++verbs;
    const std::string_view s = token.surface;
    if (s.starts_with(kNoon) || s.ends_with(kNaa)) ++first_plural;
  }
  if (verbs == 0) return std::nullopt;
  return static_cast<double>(first_plural) / static_cast<double>(verbs);
}

CorpusProfile corpus_profile(const LabeledCorpus& corpus, const Lexicon& cliches,
                             const Lexicon& emotions, const std::vector<TaggedDocument>* tagged) {
  if (tagged && tagged->size() != corpus.size())
    throw DataError(fmt::format("tagged input holds {} documents but the corpus holds {}",
                                tagged->size(), corpus.size()));
  CorpusProfile profile;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& doc = corpus[i];
    if (!doc.label) throw DataError("document '" + doc.id + "' is unlabeled");
    MeasureVector m{doc.id, 0.0, 0.0, std::nullopt};
    try {
      m.journalistic_register = lexicon_score(doc, cliches);
      m.sentiment_intensity = lexicon_score(doc, emotions);
    } catch (const DataError& e) {
      throw DataError("measuring document '" + doc.id + "': " + e.what());
    }
    if (tagged) m.fpp_verb_ratio = fpp_verb_ratio((*tagged)[i]);
    (*doc.label == Label::Fake ? profile.fake : profile.real).push_back(std::move(m));
  }
  return profile;
}

void write_profile_csv(std::ostream& out, const CorpusProfile& profile) {
  out << "doc_id,label,J,S,fpp_ratio\n";
  for (Label label : kLabels) {
    for (const auto& m : profile.of(label)) {
      out << csv::escape(m.doc_id) << ',' << to_string(label) << ','
          << fmt::format("{:.17g},{:.17g},", m.journalistic_register, m.sentiment_intensity);
      if (m.fpp_verb_ratio) out << fmt::format("{:.17g}", *m.fpp_verb_ratio);
      out << '\n';
    }
  }
}

MeasureColumns read_profile_column(std::istream& in, const std::string& column,
                                   const std::string& source) {
  // Skip metadata comment lines before the header.
  std::size_t line = 1;
  while (in.peek() == '#') {
    std::string skipped;
    std::getline(in, skipped);
    ++line;
  }
  std::vector<std::string> fields;
  std::size_t record_line = line;
  if (!csv::next_record(in, fields, line, record_line, source))
    throw DataError(source + ": empty measures file");
  std::size_t col = fields.size();
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i] == column) col = i;
  if (col == fields.size()) throw ParseError(source, record_line, "no column named '" + column + "'");
  std::size_t label_col = fields.size();
  for (std::size_t i = 0; i < fields.size(); ++i)
    if (fields[i] == "label") label_col = i;
  if (label_col == fields.size()) throw ParseError(source, record_line, "no 'label' column");

  MeasureColumns columns;
  const std::size_t width = fields.size();
  while (csv::next_record(in, fields, line, record_line, source)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != width) throw ParseError(source, record_line, "wrong number of fields");
    Label label;
    try {
      label = parse_label(fields[label_col]);
    } catch (const DataError& e) {
      throw ParseError(source, record_line, e.what());
    }
    double value = std::numeric_limits<double>::quiet_NaN();
    if (!fields[col].empty()) {
      try {
        std::size_t used = 0;
        value = std::stod(fields[col], &used);
        if (used != fields[col].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ParseError(source, record_line, "not a number: '" + fields[col] + "'");
      }
    }
    columns.values[index_of(label)].push_back(value);
  }
  return columns;
}

}  // namespace satira
