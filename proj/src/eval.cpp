#include "satira/eval.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "satira/error.hpp"

namespace satira {

EvalReport evaluate(std::span<const Label> predicted, std::span<const Label> gold) {
  if (predicted.size() != gold.size())
    throw DataError(fmt::format("{} predictions for {} gold labels", predicted.size(), gold.size()));
  if (gold.empty()) throw DataError("cannot evaluate an empty prediction set");

  EvalReport r;
  r.n = gold.size();
  for (std::size_t i = 0; i < gold.size(); ++i)
    ++r.confusion[static_cast<std::size_t>(index_of(gold[i]))]
                 [static_cast<std::size_t>(index_of(predicted[i]))];

  const double n = static_cast<double>(r.n);
  r.accuracy = static_cast<double>(r.confusion[0][0] + r.confusion[1][1]) / n;
  for (std::size_t c = 0; c < 2; ++c) {
    auto& m = r.per_class[c];
    const std::size_t tp = r.confusion[c][c];
    const std::size_t predicted_c = r.confusion[0][c] + r.confusion[1][c];
    m.support = r.confusion[c][0] + r.confusion[c][1];
    if (predicted_c == 0) {
      m.precision_undefined = true;
    } else {
      m.precision = static_cast<double>(tp) / static_cast<double>(predicted_c);
    }
    if (m.support == 0) {
      m.recall_undefined = true;
    } else {
      m.recall = static_cast<double>(tp) / static_cast<double>(m.support);
    }
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
  }
  r.macro_precision = 0.5 * (r.per_class[0].precision + r.per_class[1].precision);
  r.macro_recall = 0.5 * (r.per_class[0].recall + r.per_class[1].recall);
  r.macro_f1 = 0.5 * (r.per_class[0].f1 + r.per_class[1].f1);
  return r;
}

void write_report_text(std::ostream& out, const EvalReport& r) {
  out << fmt::format("n {}\n", r.n) << fmt::format("accuracy {:.17g}\n", r.accuracy)
      << fmt::format("macro_precision {:.17g}\n", r.macro_precision)
      << fmt::format("macro_recall {:.17g}\n", r.macro_recall)
      << fmt::format("macro_f1 {:.17g}\n", r.macro_f1);
  for (Label label : kLabels) {
    const auto& m = r.of(label);
    const auto name = to_string(label);
    out << fmt::format("{}_precision {:.17g}\n", name, m.precision)
        << fmt::format("{}_recall {:.17g}\n", name, m.recall)
        << fmt::format("{}_f1 {:.17g}\n", name, m.f1)
        << fmt::format("{}_support {}\n", name, m.support);
    if (m.precision_undefined) out << name << "_precision_undefined 1\n";
    if (m.recall_undefined) out << name << "_recall_undefined 1\n";
  }
  for (Label gold : kLabels)
    for (Label pred : kLabels)
      out << fmt::format("confusion_{}_{} {}\n", to_string(gold), to_string(pred),
                         r.confusion[static_cast<std::size_t>(index_of(gold))]
                                    [static_cast<std::size_t>(index_of(pred))]);
}

void write_report_json(std::ostream& out, const EvalReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["accuracy"] = r.accuracy;
  j["macro_precision"] = r.macro_precision;
  j["macro_recall"] = r.macro_recall;
  j["macro_f1"] = r.macro_f1;
  for (Label label : kLabels) {
    const auto& m = r.of(label);
    auto& c = j["classes"][std::string(to_string(label))];
    c["precision"] = m.precision;
    c["recall"] = m.recall;
    c["f1"] = m.f1;
    c["support"] = m.support;
    c["precision_undefined"] = m.precision_undefined;
    c["recall_undefined"] = m.recall_undefined;
  }
  j["confusion"] = {{r.confusion[0][0], r.confusion[0][1]}, {r.confusion[1][0], r.confusion[1][1]}};
  j["confusion_order"] = {"fake", "real"};
  out << j.dump(2) << '\n';
}

std::pair<FeatureRanking, FeatureRanking> top_informative_features(const NaiveBayesModel& model,
                                                                   const Vocabulary& vocab,
                                                                   std::size_t k) {
  if (static_cast<std::size_t>(model.n_features()) != vocab.size())
    throw DataError(fmt::format("model has {} features but the vocabulary has {}",
                                model.n_features(), vocab.size()));
  if (k == 0) throw DataError("k must be at least 1");
  if (k > vocab.size()) {
    spdlog::warn("requested {} features but the vocabulary holds {}; clamping", k, vocab.size());
    k = vocab.size();
  }

  const auto rank = [&](Label label) {
    const auto self = static_cast<Eigen::Index>(index_of(label));
    const Eigen::Index other = 1 - self;
    FeatureRanking ranking{label, {}};
    ranking.entries.reserve(vocab.size());
    for (std::size_t f = 0; f < vocab.size(); ++f) {
      const auto col = static_cast<Eigen::Index>(f);
      const double lp = model.feature_log_prob(self, col);
      ranking.entries.push_back({vocab.feature(f), lp - model.feature_log_prob(other, col), lp});
    }
    std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                     [](const RankedFeature& a, const RankedFeature& b) {
                       if (a.score != b.score) return a.score > b.score;
                       return a.feature < b.feature;
                     });
    ranking.entries.resize(k);
    return ranking;
  };
  return {rank(Label::Fake), rank(Label::Real)};
}

void write_ranking_tsv(std::ostream& out, const FeatureRanking& ranking) {
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    const auto& e = ranking.entries[i];
    out << fmt::format("{}\t{}\t{:.17g}\t{:.17g}\n", i + 1, e.feature, e.score, e.log_prob);
  }
}

}  // namespace satira
