#include "satira/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "satira/error.hpp"
#include "utf8.hpp"

namespace satira {

namespace {

constexpr std::string_view kVocabMagic = "satira-vocabulary";
constexpr int kVocabVersion = 1;

std::string_view weighting_name(Weighting w) { return w == Weighting::Count ? "count" : "tfidf"; }
std::string_view analyzer_name(Analyzer a) { return a == Analyzer::Word ? "word" : "char"; }

}  // namespace

void VectorizerConfig::validate() const {
  if (ngram_lo < 1 || ngram_lo > ngram_hi)
    throw DataError(fmt::format("invalid n-gram range ({}, {})", ngram_lo, ngram_hi));
  if (max_features < 1) throw DataError("max_features must be at least 1");
  if (!(max_df > 0.0 && max_df <= 1.0)) throw DataError("max_df must lie in (0, 1]");
}

std::vector<std::string> analyze(const Document& doc, const VectorizerConfig& cfg) {
  std::vector<std::string> grams;
  const auto lo = static_cast<std::size_t>(cfg.ngram_lo);
  const auto hi = static_cast<std::size_t>(cfg.ngram_hi);
  if (cfg.analyzer == Analyzer::Word) {
    const auto& tokens = doc.tokens;
    for (std::size_t n = lo; n <= hi; ++n) {
      if (tokens.size() < n) break;
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (std::size_t j = 1; j < n; ++j) {
          gram.push_back(' ');
          gram += tokens[i + j];
        }
        grams.push_back(std::move(gram));
      }
    }
    return grams;
  }

  std::u32string text;
  for (const auto& token : doc.tokens) {
    if (!text.empty()) text.push_back(U' ');
    text += utf8::decode(token);
  }
  for (std::size_t n = lo; n <= hi; ++n) {
    if (text.size() < n) break;
    for (std::size_t i = 0; i + n <= text.size(); ++i)
      grams.push_back(utf8::encode(std::u32string_view(text).substr(i, n)));
  }
  return grams;
}

Vocabulary::Vocabulary(VectorizerConfig cfg, std::vector<std::string> features,
                       std::vector<std::size_t> document_frequency, std::size_t n_docs_fitted)
    : cfg_(cfg), features_(std::move(features)), df_(std::move(document_frequency)),
      n_docs_(n_docs_fitted) {
  if (df_.size() != features_.size())
    throw DataError("vocabulary: feature and document-frequency counts differ");
  idf_.resize(features_.size());
  const double n = static_cast<double>(n_docs_);
  for (std::size_t i = 0; i < features_.size(); ++i) {
    idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df_[i]))) + 1.0;
    if (!index_.emplace(features_[i], i).second)
      throw DataError("vocabulary: duplicate feature '" + features_[i] + "'");
  }
}

long Vocabulary::index_of(const std::string& feature) const {
  const auto it = index_.find(feature);
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

void Vocabulary::save(std::ostream& out) const {
  out << kVocabMagic << ' ' << kVocabVersion << '\n'
      << "weighting " << weighting_name(cfg_.weighting) << '\n'
      << "analyzer " << analyzer_name(cfg_.analyzer) << '\n'
      << "ngram " << cfg_.ngram_lo << ' ' << cfg_.ngram_hi << '\n'
      << "max_features " << cfg_.max_features << '\n'
      << fmt::format("max_df {:.17g}\n", cfg_.max_df)
      << "n_docs " << n_docs_ << '\n'
      << "features " << features_.size() << '\n';
  for (std::size_t i = 0; i < features_.size(); ++i)
    out << features_[i] << '\t' << i << '\t' << df_[i] << '\t' << fmt::format("{:.17g}", idf_[i])
        << '\n';
}

Vocabulary Vocabulary::load(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  const auto next_line = [&]() -> std::istringstream {
    if (!std::getline(in, line)) throw ParseError(source, line_no + 1, "unexpected end of file");
    ++line_no;
    return std::istringstream(line);
  };
  const auto expect_key = [&](std::istringstream& ss, std::string_view key) {
    std::string got;
    ss >> got;
    if (got != key) throw ParseError(source, line_no, "expected '" + std::string(key) + "'");
  };

  {
    auto ss = next_line();
    while (line.starts_with("# ")) ss = next_line();  // leading metadata comments
    std::string magic;
    int version = 0;
    ss >> magic >> version;
    if (magic != kVocabMagic) throw ParseError(source, line_no, "not a vocabulary file");
    if (version != kVocabVersion)
      throw ParseError(source, line_no, fmt::format("unsupported vocabulary version {}", version));
  }
  VectorizerConfig cfg;
  std::string word;
  {
    auto ss = next_line();
    expect_key(ss, "weighting");
    ss >> word;
    if (word != "count" && word != "tfidf") throw ParseError(source, line_no, "bad weighting");
    cfg.weighting = word == "count" ? Weighting::Count : Weighting::TfIdf;
  }
  {
    auto ss = next_line();
    expect_key(ss, "analyzer");
    ss >> word;
    if (word != "word" && word != "char") throw ParseError(source, line_no, "bad analyzer");
    cfg.analyzer = word == "word" ? Analyzer::Word : Analyzer::Char;
  }
  {
    auto ss = next_line();
    expect_key(ss, "ngram");
    if (!(ss >> cfg.ngram_lo >> cfg.ngram_hi)) throw ParseError(source, line_no, "bad ngram range");
  }
  {
    auto ss = next_line();
    expect_key(ss, "max_features");
    if (!(ss >> cfg.max_features)) throw ParseError(source, line_no, "bad max_features");
  }
  {
    auto ss = next_line();
    expect_key(ss, "max_df");
    if (!(ss >> cfg.max_df)) throw ParseError(source, line_no, "bad max_df");
  }
  std::size_t n_docs = 0;
  {
    auto ss = next_line();
    expect_key(ss, "n_docs");
    if (!(ss >> n_docs)) throw ParseError(source, line_no, "bad n_docs");
  }
  std::size_t count = 0;
  {
    auto ss = next_line();
    expect_key(ss, "features");
    if (!(ss >> count)) throw ParseError(source, line_no, "bad feature count");
  }
  std::vector<std::string> features(count);
  std::vector<std::size_t> df(count);
  for (std::size_t i = 0; i < count; ++i) {
    next_line();
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    const auto t3 = t2 == std::string::npos ? t2 : line.find('\t', t2 + 1);
    if (t3 == std::string::npos) throw ParseError(source, line_no, "expected feature<TAB>index<TAB>df<TAB>idf");
    try {
      if (std::stoul(line.substr(t1 + 1, t2 - t1 - 1)) != i)
        throw ParseError(source, line_no, "feature indices must be consecutive from 0");
      df[i] = std::stoul(line.substr(t2 + 1, t3 - t2 - 1));
    } catch (const std::logic_error&) {
      throw ParseError(source, line_no, "malformed feature line");
    }
    features[i] = line.substr(0, t1);
  }
  return Vocabulary(cfg, std::move(features), std::move(df), n_docs);
}

Vocabulary fit_vocabulary(std::span<const Document> docs, const VectorizerConfig& cfg) {
  cfg.validate();
  if (docs.empty()) throw DataError("cannot fit a vocabulary on an empty corpus");

  struct Stats {
    std::size_t total = 0;
    std::size_t df = 0;
    std::size_t last_doc = static_cast<std::size_t>(-1);
  };
  std::map<std::string, Stats> stats;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (auto& gram : analyze(docs[d], cfg)) {
      auto& s = stats[std::move(gram)];
      ++s.total;
      if (s.last_doc != d) {
        ++s.df;
        s.last_doc = d;
      }
    }
  }

  const double n = static_cast<double>(docs.size());
  std::vector<std::pair<const std::string*, const Stats*>> kept;
  for (const auto& [gram, s] : stats)
    if (static_cast<double>(s.df) / n <= cfg.max_df) kept.emplace_back(&gram, &s);
  if (kept.empty()) throw DataError("every candidate feature was filtered out by max_df");

  if (kept.size() > cfg.max_features) {
    // `stats` is ordered, so a stable sort on frequency keeps lexicographic ties.
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a.second->total > b.second->total; });
    kept.resize(cfg.max_features);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return *a.first < *b.first; });
  }

  std::vector<std::string> features;
  std::vector<std::size_t> df;
  features.reserve(kept.size());
  df.reserve(kept.size());
  for (const auto& [gram, s] : kept) {
    features.push_back(*gram);
    df.push_back(s->df);
  }
  return Vocabulary(cfg, std::move(features), std::move(df), docs.size());
}

DocTermMatrix transform(std::span<const Document> docs, const Vocabulary& vocab,
                        const VectorizerConfig& cfg) {
  if (!cfg.same_features(vocab.config()))
    throw DataError("vectorizer configuration does not match the fitted vocabulary");

  std::vector<Eigen::Triplet<double>> triplets;
  std::map<std::size_t, double> row;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    row.clear();
    for (const auto& gram : analyze(docs[d], cfg)) {
      const long col = vocab.index_of(gram);
      if (col >= 0) row[static_cast<std::size_t>(col)] += 1.0;
    }
    if (cfg.weighting == Weighting::TfIdf) {
      double norm2 = 0.0;
      for (auto& [col, value] : row) {
        value *= vocab.idf()[col];
        norm2 += value * value;
      }
      const double norm = std::sqrt(norm2);
      if (norm > 0.0)
        for (auto& [col, value] : row) value /= norm;
    }
    for (const auto& [col, value] : row)
      triplets.emplace_back(static_cast<int>(d), static_cast<int>(col), value);
  }
  DocTermMatrix m(static_cast<Eigen::Index>(docs.size()), static_cast<Eigen::Index>(vocab.size()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace satira
