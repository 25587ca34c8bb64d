#include "satira/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "satira/error.hpp"

namespace satira {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // unbiased
  std::size_t n = 0;
};

// Two-pass mean/variance; exact shift invariance matters for the t statistic.
Moments moments(const std::vector<double>& xs) {
  Moments m;
  m.n = xs.size();
  for (double x : xs) m.mean += x;
  m.mean /= static_cast<double>(m.n);
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.var = ss / static_cast<double>(m.n - 1);
  return m;
}

// Continued fraction for I_x(a,b), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

std::vector<double> prepare(std::span<const double> xs, NanPolicy policy, bool& saw_nan) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    if (std::isnan(x)) {
      saw_nan = true;
      if (policy == NanPolicy::Omit) continue;
    }
    out.push_back(x);
  }
  return out;
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw DataError("incomplete beta needs a, b > 0");
  if (std::isnan(x)) return kNaN;
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t) || std::isnan(df)) return kNaN;
  if (std::isinf(t)) return 0.0;
  const double p = incomplete_beta(df / (df + t * t), 0.5 * df, 0.5);
  return std::clamp(p, 0.0, 1.0);
}

TTestResult ttest_two_tailed(std::span<const double> a, std::span<const double> b,
                             TTestVariant variant, NanPolicy nan_policy) {
  bool saw_nan = false;
  const auto xs = prepare(a, nan_policy, saw_nan);
  const auto ys = prepare(b, nan_policy, saw_nan);

  TTestResult r;
  r.variant = variant;
  r.nan_policy = nan_policy;
  r.n_a = xs.size();
  r.n_b = ys.size();
  if (xs.size() < 2 || ys.size() < 2)
    throw DataError(fmt::format("t-test needs at least 2 values per sample (got {} and {})",
                                xs.size(), ys.size()));

  const double na = static_cast<double>(xs.size());
  const double nb = static_cast<double>(ys.size());
  if (saw_nan && nan_policy == NanPolicy::Propagate) {
    r.statistic = kNaN;
    r.p_value = kNaN;
    r.df = variant == TTestVariant::Pooled ? na + nb - 2.0 : kNaN;
    return r;
  }

  const Moments ma = moments(xs);
  const Moments mb = moments(ys);
  const double diff = ma.mean - mb.mean;
  double se2 = 0.0;
  if (variant == TTestVariant::Pooled) {
    r.df = na + nb - 2.0;
    const double pooled = ((na - 1.0) * ma.var + (nb - 1.0) * mb.var) / r.df;
    se2 = pooled * (1.0 / na + 1.0 / nb);
  } else {
    const double va = ma.var / na;
    const double vb = mb.var / nb;
    se2 = va + vb;
    r.df = se2 * se2 / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
  }

  if (se2 == 0.0) {
    if (diff == 0.0) throw DataError("t statistic undefined: both samples constant with equal means");
    r.statistic = diff > 0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
    if (variant == TTestVariant::Welch) r.df = na + nb - 2.0;
    r.p_value = 0.0;
    return r;
  }
  r.statistic = diff / std::sqrt(se2);
  r.p_value = student_t_two_sided_p(r.statistic, r.df);
  return r;
}

DensityEstimate density_histogram(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw DataError("histogram needs at least one bin");
  std::vector<double> finite;
  for (double v : values)
    if (std::isfinite(v)) finite.push_back(v);
  if (finite.empty()) throw DataError("histogram needs at least one finite value");

  const auto [lo_it, hi_it] = std::minmax_element(finite.begin(), finite.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / static_cast<double>(bins);

  DensityEstimate est;
  est.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) est.bin_edges[i] = lo + width * static_cast<double>(i);
  est.bin_edges.back() = hi;

  std::vector<std::size_t> counts(bins, 0);
  for (double v : finite) {
    auto i = static_cast<std::size_t>((v - lo) / width);
    i = std::min(i, bins - 1);
    // Guard against rounding putting v just outside its bin.
    while (i > 0 && v < est.bin_edges[i]) --i;
    while (i + 1 < bins && v >= est.bin_edges[i + 1]) ++i;
    ++counts[i];
  }
  est.densities.resize(bins);
  const double n = static_cast<double>(finite.size());
  for (std::size_t i = 0; i < bins; ++i)
    est.densities[i] = static_cast<double>(counts[i]) / (n * est.bin_width(i));
  return est;
}

void write_density_csv(std::ostream& out, const DensityEstimate& density) {
  out << "bin_left,bin_right,density\n";
  for (std::size_t i = 0; i < density.densities.size(); ++i)
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", density.bin_edges[i], density.bin_edges[i + 1],
                       density.densities[i]);
}

}  // namespace satira
