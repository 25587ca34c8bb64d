#include "satira/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "satira/error.hpp"
#include "utf8.hpp"

namespace satira {

namespace {

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_arabic_diacritic(char32_t cp) { return in(cp, 0x064B, 0x065F) || cp == 0x0670; }

bool is_latin_letter(char32_t cp) { return in(cp, U'A', U'Z') || in(cp, U'a', U'z'); }

bool is_digit(char32_t cp) {
  return in(cp, U'0', U'9') || in(cp, 0x0660, 0x0669) || in(cp, 0x06F0, 0x06F9);
}

bool is_arabic_letter(char32_t cp) {
  return in(cp, 0x0621, 0x063A) || in(cp, 0x0641, 0x064A) || in(cp, 0x066E, 0x066F) ||
         in(cp, 0x0671, 0x06D3) || cp == 0x06D5 || in(cp, 0x06EE, 0x06EF) ||
         in(cp, 0x06FA, 0x06FC) || cp == 0x06FF || in(cp, 0x0750, 0x077F) ||
         in(cp, 0x08A0, 0x08C9) || in(cp, 0xFB50, 0xFD3D) || in(cp, 0xFD50, 0xFDFB) ||
         in(cp, 0xFE70, 0xFEFC);
}

// Marks that live inside words: dropped instead of becoming a word break.
bool is_intra_word_mark(char32_t cp) {
  return in(cp, 0x0610, 0x061A) || cp == 0x0640 || in(cp, 0x06D6, 0x06DC) ||
         in(cp, 0x06DF, 0x06E8) || in(cp, 0x06EA, 0x06ED) || in(cp, 0x200C, 0x200D);
}

}  // namespace

std::string normalize(std::string_view text, const NormalizationConfig& cfg) {
  std::u32string kept;
  kept.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const char32_t cp = utf8::next(text, pos);
    if (cfg.strip_diacritics && is_arabic_diacritic(cp)) continue;
    if (cfg.strip_latin && is_latin_letter(cp)) continue;
    if (cfg.strip_special && !utf8::is_space(cp) && !is_arabic_letter(cp) &&
        !is_arabic_diacritic(cp) && !is_latin_letter(cp) && !is_digit(cp)) {
      if (!is_intra_word_mark(cp)) kept.push_back(U' ');
      continue;
    }
    kept.push_back(cp);
  }

  if (!cfg.collapse_whitespace) return utf8::encode(kept);

  std::u32string collapsed;
  collapsed.reserve(kept.size());
  bool pending_space = false;
  for (char32_t cp : kept) {
    if (utf8::is_space(cp)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) collapsed.push_back(U' ');
    pending_space = false;
    collapsed.push_back(cp);
  }
  return utf8::encode(collapsed);
}

std::vector<std::string> tokenize(std::string_view text) { return utf8::split_whitespace(text); }

Document normalize_document(const Document& doc, const NormalizationConfig& cfg) {
  Document out{doc.id, normalize(doc.text, cfg), {}, doc.label};
  out.tokens = tokenize(out.text);
  return out;
}

NgramFrequency ngram_frequency(std::span<const Document> docs, int n) {
  if (n < 1 || n > 3) throw DataError("n-gram order must be 1, 2 or 3, got " + std::to_string(n));
  NgramFrequency freq{n, {}};
  const auto width = static_cast<std::size_t>(n);
  std::string key;
  for (const auto& doc : docs) {
    const auto& tokens = doc.tokens;
    if (tokens.size() < width) continue;
    for (std::size_t i = 0; i + width <= tokens.size(); ++i) {
      key = tokens[i];
      for (std::size_t j = 1; j < width; ++j) {
        key.push_back(' ');
        key += tokens[i + j];
      }
      ++freq.counts[key];
    }
  }
  return freq;
}

NgramFrequency ngram_frequency(const LabeledCorpus& corpus, int n) {
  return ngram_frequency(std::span<const Document>(corpus.documents()), n);
}

std::vector<std::pair<std::string, std::size_t>> top_fraction(const NgramFrequency& freq,
                                                              double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw DataError("fraction must lie in (0, 1], got " + std::to_string(fraction));
  std::vector<std::pair<std::string, std::size_t>> entries(freq.counts.begin(),
                                                           freq.counts.end());
  if (entries.empty()) return entries;

  const double wanted = fraction * static_cast<double>(entries.size());
  const auto keep = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(wanted + 0.5)),
                                            1, entries.size());
  // std::string comparison is byte-wise, which for UTF-8 is code point order.
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  entries.resize(keep);
  return entries;
}

void write_ngram_tsv(std::ostream& out,
                     const std::vector<std::pair<std::string, std::size_t>>& entries) {
  for (const auto& [ngram, count] : entries) out << ngram << '\t' << count << '\n';
}

StopPhraseList::StopPhraseList(std::vector<std::string> phrases) : phrases_(std::move(phrases)) {
  std::unordered_set<std::string> seen;
  for (const auto& phrase : phrases_) {
    const auto tokens = tokenize(phrase);
    if (tokens.empty()) throw DataError("empty stop phrase");
    if (tokens.size() > 3) throw DataError("stop phrase longer than 3 tokens: '" + phrase + "'");
    if (!seen.insert(phrase).second) throw DataError("duplicate stop phrase '" + phrase + "'");
  }
}

std::vector<std::string> read_phrase_lines(std::istream& in, const std::string& source,
                                           const NormalizationConfig& cfg) {
  std::vector<std::string> phrases;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto phrase = normalize(line, cfg);
    const auto tokens = tokenize(phrase);
    if (tokens.empty()) continue;  // line consisted only of stripped characters
    if (tokens.size() > 3) throw ParseError(source, line_no, "phrase longer than 3 tokens");
    // Distinct raw lines can collapse to one normalized phrase; keep the first.
    if (seen.insert(phrase).second) phrases.push_back(std::move(phrase));
  }
  return phrases;
}

StopPhraseList load_stop_phrases(const std::filesystem::path& path,
                                 const NormalizationConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open phrase file " + path.string());
  return StopPhraseList(read_phrase_lines(in, path.string(), cfg));
}

PhraseMatcher::PhraseMatcher(std::span<const std::string> phrases) {
  for (const auto& phrase : phrases) {
    auto tokens = tokenize(phrase);
    if (tokens.empty()) continue;
    auto& bucket = by_first_[tokens.front()];
    if (std::find(bucket.begin(), bucket.end(), tokens) == bucket.end())
      bucket.push_back(std::move(tokens));
  }
  for (auto& [first, bucket] : by_first_) {
    std::stable_sort(bucket.begin(), bucket.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
  }
}

std::size_t PhraseMatcher::match_at(std::span<const std::string> tokens, std::size_t pos) const {
  const auto it = by_first_.find(tokens[pos]);
  if (it == by_first_.end()) return 0;
  for (const auto& phrase : it->second) {
    if (pos + phrase.size() > tokens.size()) continue;
    if (std::equal(phrase.begin() + 1, phrase.end(), tokens.begin() + pos + 1))
      return phrase.size();
  }
  return 0;
}

std::size_t PhraseMatcher::count_matches(std::span<const std::string> tokens) const {
  std::size_t count = 0;
  for (std::size_t pos = 0; pos < tokens.size();) {
    const std::size_t len = match_at(tokens, pos);
    if (len > 0) {
      ++count;
      pos += len;
    } else {
      ++pos;
    }
  }
  return count;
}

std::vector<std::string> PhraseMatcher::remove_matches(std::span<const std::string> tokens) const {
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (std::size_t pos = 0; pos < tokens.size();) {
    const std::size_t len = match_at(tokens, pos);
    if (len > 0) {
      pos += len;
    } else {
      kept.push_back(tokens[pos]);
      ++pos;
    }
  }
  return kept;
}

Document apply_stop_phrases(const Document& doc, const StopPhraseList& phrases) {
  return apply_stop_phrases(doc, PhraseMatcher(phrases.phrases()));
}

Document apply_stop_phrases(const Document& doc, const PhraseMatcher& matcher) {
  Document out{doc.id, {}, matcher.remove_matches(doc.tokens), doc.label};
  for (const auto& token : out.tokens) {
    if (!out.text.empty()) out.text.push_back(' ');
    out.text += token;
  }
  return out;
}

}  // namespace satira
