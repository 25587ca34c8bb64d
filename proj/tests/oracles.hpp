#pragma once

// Independent reference computations written without the library's code paths.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "satira/convnet.hpp"
#include "satira/corpus.hpp"

namespace satira::oracle {

// Direct nested-loop evaluation of the conv net's pre-sigmoid output.
inline double conv_logit(const ConvNetModel& m, const std::vector<int>& ids) {
  const int k = m.kernel;
  const auto d = static_cast<int>(m.embedding.cols());
  const auto filters = static_cast<int>(m.conv_weight.rows());
  const int positions = static_cast<int>(ids.size()) - k + 1;
  double out = m.dense_bias;
  for (int f = 0; f < filters; ++f) {
    double best = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < positions; ++t) {
      double s = m.conv_bias(f);
      for (int j = 0; j < k; ++j)
        for (int c = 0; c < d; ++c) s += m.conv_weight(f, j * d + c) * m.embedding(ids[static_cast<std::size_t>(t + j)], c);
      best = std::max(best, std::max(s, 0.0));
    }
    out += m.dense_weight(f) * best;
  }
  return out;
}

struct PooledT {
  double statistic;
  double p_value;
  double df;
};

// Textbook pooled-variance Student t with a reference incomplete beta.
inline PooledT pooled_ttest(const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
  };
  const double ma = mean(a), mb = mean(b);
  double ssa = 0, ssb = 0;
  for (double v : a) ssa += (v - ma) * (v - ma);
  for (double v : b) ssb += (v - mb) * (v - mb);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double df = na + nb - 2;
  const double sp2 = (ssa + ssb) / df;
  const double t = (ma - mb) / std::sqrt(sp2 * (1 / na + 1 / nb));
  const double p = boost::math::ibeta(df / 2, 0.5, df / (df + t * t));
  return {t, p, df};
}

// confusion[gold][pred] by direct counting.
inline std::array<std::array<std::size_t, 2>, 2> recount(const std::vector<Label>& pred,
                                                         const std::vector<Label>& gold) {
  std::array<std::array<std::size_t, 2>, 2> c{};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool gf = gold[i] == Label::Fake, pf = pred[i] == Label::Fake;
    if (gf && pf) ++c[0][0];
    if (gf && !pf) ++c[0][1];
    if (!gf && pf) ++c[1][0];
    if (!gf && !pf) ++c[1][1];
  }
  return c;
}

}  // namespace satira::oracle
