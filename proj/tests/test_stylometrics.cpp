#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "satira/checksum.hpp"
#include "satira/error.hpp"
#include "satira/stylometrics.hpp"
#include "support.hpp"

using namespace satira;
using satira::testing::make_doc;

TEST_CASE("lexicon score examples") {
  const Lexicon single("c", {"قال", "الناطق"});
  CHECK(lexicon_score(make_doc("1", {"قال", "الناطق", "اليوم", "قال"}), single) == doctest::Approx(0.75));
  CHECK(lexicon_score(make_doc("2", {"خبر", "عاجل"}), single) == 0.0);
  const Lexicon phrase("c", {"قال الناطق باسم"});
  CHECK(lexicon_score(make_doc("3", {"قال", "الناطق", "باسم", "خبر"}), phrase) == doctest::Approx(0.25));
  CHECK_THROWS_AS(lexicon_score(make_doc("4", {}), single), DataError);
}

TEST_CASE("lexicons are validated") {
  CHECK_THROWS_AS(Lexicon("empty", {}), DataError);
  CHECK_THROWS_AS(Lexicon("long", {"a b c d"}), DataError);
}

TEST_CASE("lexicon file carries a checksum") {
  satira::testing::TempDir dir;
  const auto path = dir / "emotions.txt";
  satira::testing::write_file(path, "# emotive\nفرح\nحزن\n");
  const auto lex = load_lexicon(path);
  CHECK(lex.name() == "emotions");
  CHECK(lex.phrases().size() == 2);
  CHECK(lex.checksum() == sha256_file(path));
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("single-token lexicon scores are order and duplication invariant") {
  std::mt19937_64 rng(21);
  const Lexicon lex("l", {"a", "c"});
  for (int t = 0; t < 300; ++t) {
    std::vector<std::string> toks;
    for (auto k = 1 + rng() % 15; k > 0; --k) toks.push_back(std::string(1, static_cast<char>('a' + rng() % 5)));
    const double base = lexicon_score(make_doc("d", toks), lex);
    auto shuffled = toks;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(lexicon_score(make_doc("d", shuffled), lex) == doctest::Approx(base).epsilon(1e-15));
    std::vector<std::string> doubled;
    for (const auto& tok : toks) {
      doubled.push_back(tok);
      doubled.push_back(tok);
    }
    CHECK(lexicon_score(make_doc("d", doubled), lex) == doctest::Approx(base).epsilon(1e-15));
  }
}

TEST_CASE("first person plural verb ratio") {
  CHECK(fpp_verb_ratio({{"نروي", "VERB"}, {"قال", "VERB"}}) == 0.5);
  CHECK_FALSE(fpp_verb_ratio({{"ناطق", "NOUN"}}).has_value());
  CHECK(fpp_verb_ratio({{"شارفنا", "VERB"}, {"نأسف", "VERB"}}) == 1.0);
  CHECK(fpp_verb_ratio({{"نقول", "VBP"}, {"كتب", "VBD"}}) == 0.5);
}

TEST_CASE("non-verb insertions leave the verb ratio unchanged") {
  std::mt19937_64 rng(8);
  const std::vector<std::string> surfaces{"نكتب", "كتبنا", "قال", "ذهب", "نحن", "ناس"};
  for (int t = 0; t < 200; ++t) {
    TaggedDocument doc;
    for (auto k = 1 + rng() % 8; k > 0; --k) doc.push_back({surfaces[rng() % surfaces.size()], "VERB"});
    const auto base = fpp_verb_ratio(doc);
    auto noisy = doc;
    for (int k = 0; k < 5; ++k)
      noisy.insert(noisy.begin() + static_cast<long>(rng() % (noisy.size() + 1)),
                   PosToken{surfaces[rng() % surfaces.size()], "NOUN"});
    CHECK(fpp_verb_ratio(noisy) == base);
  }
}

TEST_CASE("tagged reader") {
  std::istringstream in("نروي\tVERB\nالخبر\tNOUN\n\nقال\tVERB\n");
  const auto docs = read_tagged(in);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].size() == 2);
  CHECK(docs[1][0].surface == "قال");
  std::istringstream bad("نروي VERB\n");
  CHECK_THROWS_AS(read_tagged(bad), ParseError);
}

TEST_CASE("corpus profile groups by label") {
  const Lexicon cliches("c", {"صرح"});
  const Lexicon emotions("e", {"فرح"});
  std::vector<Document> docs{make_doc("f1", {"فرح", "صرح", "x"}, Label::Fake),
                             make_doc("r1", {"x", "y"}, Label::Real)};
  const LabeledCorpus corpus(docs);
  const auto profile = corpus_profile(corpus, cliches, emotions);
  REQUIRE(profile.fake.size() == 1);
  REQUIRE(profile.real.size() == 1);
  CHECK_FALSE(profile.fake[0].fpp_verb_ratio.has_value());
  CHECK(profile.fake[0].sentiment_intensity == doctest::Approx(1.0 / 3.0));

  const std::vector<TaggedDocument> tagged{{{"نروي", "VERB"}}, {{"قال", "VERB"}}};
  const auto with_pos = corpus_profile(corpus, cliches, emotions, &tagged);
  CHECK(with_pos.fake[0].fpp_verb_ratio == 1.0);
  CHECK(with_pos.real[0].fpp_verb_ratio == 0.0);

  std::ostringstream csv;
  write_profile_csv(csv, profile);
  std::istringstream back(csv.str());
  const auto col = read_profile_column(back, "fpp_ratio");
  CHECK(std::isnan(col.values[0][0]));
}

TEST_CASE("repeated cliche raises fake register") {
  const Lexicon cliches("c", {"صرح"});
  const Lexicon emotions("e", {"فرح"});
  std::vector<Document> docs;
  for (int i = 0; i < 10; ++i) {
    docs.push_back(make_doc("f" + std::to_string(i), {"صرح", "a", "b"}, Label::Fake));
    docs.push_back(make_doc("r" + std::to_string(i), {"c", "a", "b"}, Label::Real));
  }
  const auto p = corpus_profile(LabeledCorpus(docs), cliches, emotions);
  double fake = 0, real = 0;
  for (const auto& m : p.fake) fake += m.journalistic_register;
  for (const auto& m : p.real) real += m.journalistic_register;
  CHECK(fake > real);
}
