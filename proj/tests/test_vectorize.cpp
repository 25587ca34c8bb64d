#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "satira/error.hpp"
#include "satira/vectorize.hpp"
#include "support.hpp"

using namespace satira;
using satira::testing::make_doc;

namespace {

VectorizerConfig word(double max_df = 0.7, std::size_t max_features = 1500) {
  VectorizerConfig cfg;
  cfg.max_df = max_df;
  cfg.max_features = max_features;
  return cfg;
}

}  // namespace

TEST_CASE("max_df filter") {
  const std::vector<Document> docs{make_doc("1", {"a", "b"}), make_doc("2", {"a", "c"})};
  const auto vocab = fit_vocabulary(docs, word(0.7));
  CHECK(vocab.features() == std::vector<std::string>{"b", "c"});
}

TEST_CASE("max_features keeps the most frequent, ties lexicographic") {
  const std::vector<Document> docs{make_doc("1", {"a", "b"}), make_doc("2", {"a", "c"})};
  const auto vocab = fit_vocabulary(docs, word(1.0, 2));
  CHECK(vocab.features() == std::vector<std::string>{"a", "b"});
  CHECK(vocab.index_of("a") == 0);
  CHECK(vocab.index_of("c") == -1);
}

TEST_CASE("char windows") {
  VectorizerConfig cfg = word(1.0);
  cfg.analyzer = Analyzer::Char;
  cfg.ngram_lo = 2;
  cfg.ngram_hi = 3;
  const std::vector<Document> docs{make_doc("1", {"ab"})};
  CHECK(fit_vocabulary(docs, cfg).features() == std::vector<std::string>{"ab"});
  const auto grams = analyze(make_doc("2", {"قل", "لا"}), cfg);
  CHECK(std::count(grams.begin(), grams.end(), "ل ") == 1);
  CHECK(std::count(grams.begin(), grams.end(), "ل ل") == 1);
  CHECK(std::count(grams.begin(), grams.end(), " لا") == 1);
}

TEST_CASE("word ngram range") {
  VectorizerConfig cfg = word(1.0);
  cfg.ngram_lo = 1;
  cfg.ngram_hi = 2;
  const auto grams = analyze(make_doc("1", {"a", "b", "c"}), cfg);
  CHECK(std::set<std::string>(grams.begin(), grams.end()) ==
        std::set<std::string>{"a", "b", "c", "a b", "b c"});
}

TEST_CASE("count transform") {
  const Vocabulary vocab(word(1.0), {"b", "c"}, {1, 1}, 2);
  const std::vector<Document> docs{make_doc("1", {"b", "b", "c"}), make_doc("2", {"z"})};
  const auto X = transform(docs, vocab, word(1.0));
  CHECK(X.coeff(0, 0) == 2.0);
  CHECK(X.coeff(0, 1) == 1.0);
  CHECK(X.row(1).nonZeros() == 0);
}

TEST_CASE("tfidf hand computation") {
  VectorizerConfig cfg = word(1.0);
  cfg.weighting = Weighting::TfIdf;
  const std::vector<Document> train{make_doc("1", {"a", "b"}), make_doc("2", {"a"})};
  const auto vocab = fit_vocabulary(train, cfg);
  REQUIRE(vocab.features() == std::vector<std::string>{"a", "b"});
  const double idf_b = std::log(3.0 / 2.0) + 1.0;
  CHECK(vocab.idf()[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(vocab.idf()[1] == doctest::Approx(idf_b).epsilon(1e-15));
  const std::vector<Document> doc{make_doc("x", {"a", "b"})};
  const auto X = transform(doc, vocab, cfg);
  const double norm = std::sqrt(1.0 + idf_b * idf_b);
  CHECK(X.coeff(0, 0) == doctest::Approx(1.0 / norm).epsilon(1e-14));
  CHECK(X.coeff(0, 1) == doctest::Approx(idf_b / norm).epsilon(1e-14));
}

TEST_CASE("mismatched config is rejected") {
  const std::vector<Document> docs{make_doc("1", {"a", "b"})};
  const auto vocab = fit_vocabulary(docs, word(1.0));
  VectorizerConfig other = word(1.0);
  other.analyzer = Analyzer::Char;
  CHECK_THROWS_AS(transform(docs, vocab, other), DataError);
  CHECK_THROWS_AS(fit_vocabulary(std::vector<Document>{}, word()), DataError);
  CHECK_THROWS_AS(fit_vocabulary(std::vector<Document>{make_doc("1", {"a"})}, word(0.5)), DataError);
}

TEST_CASE("vectorizer properties on random corpora") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Document> docs;
    for (int d = 0; d < 25; ++d) {
      std::vector<std::string> toks;
      for (auto k = rng() % 15; k > 0; --k) toks.push_back(std::string(1, static_cast<char>('a' + rng() % 12)));
      docs.push_back(make_doc(std::to_string(d), toks));
    }
    VectorizerConfig cfg = word(0.6, 1 + rng() % 10);
    cfg.ngram_hi = 1 + static_cast<int>(rng() % 2);
    Vocabulary vocab;
    try {
      vocab = fit_vocabulary(docs, cfg);
    } catch (const DataError&) {
      continue;
    }
    CHECK(vocab.size() <= cfg.max_features);
    for (std::size_t f = 0; f < vocab.size(); ++f) {
      CHECK(vocab.index_of(vocab.feature(f)) == static_cast<long>(f));
      CHECK(static_cast<double>(vocab.document_frequency()[f]) / 25.0 <= cfg.max_df);
    }
    const auto again = fit_vocabulary(docs, cfg);
    CHECK(again.features() == vocab.features());

    const auto counts = transform(docs, vocab, cfg);
    for (Eigen::Index r = 0; r < counts.rows(); ++r)
      for (DocTermMatrix::InnerIterator it(counts, r); it; ++it) {
        CHECK(it.value() >= 1.0);
        CHECK(it.value() == std::floor(it.value()));
      }

    VectorizerConfig tf = cfg;
    tf.weighting = Weighting::TfIdf;
    const auto tf_vocab = fit_vocabulary(docs, tf);
    const auto X = transform(docs, tf_vocab, tf);
    for (Eigen::Index r = 0; r < X.rows(); ++r) {
      const double n = X.row(r).norm();
      CHECK((std::abs(n) < 1e-9 || std::abs(n - 1.0) < 1e-9));
    }

    auto reversed = docs;
    std::reverse(reversed.begin(), reversed.end());
    const auto R = transform(reversed, vocab, cfg);
    for (Eigen::Index r = 0; r < R.rows(); ++r)
      CHECK((Eigen::RowVectorXd(R.row(r)) - Eigen::RowVectorXd(counts.row(counts.rows() - 1 - r))).norm() == 0.0);
  }
}

TEST_CASE("vocabulary round trip") {
  VectorizerConfig cfg = word(1.0);
  cfg.weighting = Weighting::TfIdf;
  cfg.ngram_hi = 2;
  const std::vector<Document> docs{make_doc("1", {"قال", "b"}), make_doc("2", {"قال", "c", "b"})};
  const auto vocab = fit_vocabulary(docs, cfg);
  std::stringstream s;
  vocab.save(s);
  const auto back = Vocabulary::load(s);
  CHECK(back.features() == vocab.features());
  CHECK(back.idf() == vocab.idf());
  CHECK(back.document_frequency() == vocab.document_frequency());
  CHECK(back.config().weighting == Weighting::TfIdf);
  std::istringstream bad("satira-vocabulary 99\n");
  CHECK_THROWS_AS(Vocabulary::load(bad), DataError);
}
