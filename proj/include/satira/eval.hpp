#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "satira/corpus.hpp"
#include "satira/naive_bayes.hpp"
#include "satira/vectorize.hpp"

namespace satira {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
  // Set when the metric's denominator was zero and the value defaulted to 0.
  bool precision_undefined = false;
  bool recall_undefined = false;
};

struct EvalReport {
  std::size_t n = 0;
  double accuracy = 0.0;
  std::array<ClassMetrics, 2> per_class;  // indexed by index_of(Label)
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  // confusion[gold][predicted]
  std::array<std::array<std::size_t, 2>, 2> confusion{};

  const ClassMetrics& of(Label label) const { return per_class[index_of(label)]; }
};

// Throws DataError on length mismatch or empty input.
EvalReport evaluate(std::span<const Label> predicted, std::span<const Label> gold);

// Flat `key value` lines.
void write_report_text(std::ostream& out, const EvalReport& report);
void write_report_json(std::ostream& out, const EvalReport& report);

struct RankedFeature {
  std::string feature;
  double score = 0.0;     // log P(f|class) - log P(f|other class)
  double log_prob = 0.0;  // log P(f|class)
};

struct FeatureRanking {
  Label label = Label::Fake;
  std::vector<RankedFeature> entries;  // score non-increasing
};

// Most indicative features per class; k larger than the vocabulary is clamped.
std::pair<FeatureRanking, FeatureRanking> top_informative_features(const NaiveBayesModel& model,
                                                                   const Vocabulary& vocab,
                                                                   std::size_t k);

// TSV `rank<TAB>feature<TAB>score<TAB>log_prob`, rank starting at 1.
void write_ranking_tsv(std::ostream& out, const FeatureRanking& ranking);

}  // namespace satira
