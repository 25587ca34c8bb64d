#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace satira {

enum class TTestVariant { Pooled, Welch };
enum class NanPolicy { Propagate, Omit };

struct TTestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  TTestVariant variant = TTestVariant::Pooled;
  NanPolicy nan_policy = NanPolicy::Propagate;
};

// Independent two-sample, two-tailed t-test. Throws DataError when a sample
// has fewer than two values or both samples are constant with equal means.
TTestResult ttest_two_tailed(std::span<const double> a, std::span<const double> b,
                             TTestVariant variant = TTestVariant::Pooled,
                             NanPolicy nan_policy = NanPolicy::Propagate);

// Regularized incomplete beta I_x(a, b), continued fraction (modified Lentz).
double incomplete_beta(double x, double a, double b);

// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct DensityEstimate {
  std::vector<double> bin_edges;  // size = bins + 1
  std::vector<double> densities;  // size = bins

  double bin_width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
};

// Equal-width histogram normalised to unit area. Non-finite values are ignored.
DensityEstimate density_histogram(std::span<const double> values, std::size_t bins);

// CSV `bin_left,bin_right,density`.
void write_density_csv(std::ostream& out, const DensityEstimate& density);

}  // namespace satira
