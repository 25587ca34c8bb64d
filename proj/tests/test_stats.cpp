#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "satira/error.hpp"
#include "satira/stats.hpp"

using namespace satira;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> sample(std::mt19937_64& rng, std::size_t n, double mean, double sd) {
  std::normal_distribution<double> dist(mean, sd);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace

TEST_CASE("identical samples") {
  const std::vector<double> a{1, 2, 3};
  const auto r = ttest_two_tailed(a, a);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.df == 4.0);
}

TEST_CASE("pooled fixture") {
  const auto r = ttest_two_tailed(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 4});
  // diff -1/3, pooled variance 5/3, se sqrt(5/3 * 2/3) -> t = -1/sqrt(10)
  CHECK(r.statistic == doctest::Approx(-1.0 / std::sqrt(10.0)).epsilon(1e-14));
  CHECK(std::abs(r.statistic + 0.3162) < 1e-4);
}

TEST_CASE("omit drops NaN; propagate spreads it") {
  const std::vector<double> a{1, kNaN, 2, 3};
  const std::vector<double> clean{1, 2, 3};
  const std::vector<double> b{1, 2, 4};
  const auto omit = ttest_two_tailed(a, b, TTestVariant::Pooled, NanPolicy::Omit);
  const auto ref = ttest_two_tailed(clean, b);
  CHECK(omit.statistic == ref.statistic);
  CHECK(omit.p_value == ref.p_value);
  CHECK(omit.n_a == 3);
  const auto prop = ttest_two_tailed(a, b, TTestVariant::Pooled, NanPolicy::Propagate);
  CHECK(std::isnan(prop.statistic));
  CHECK(std::isnan(prop.p_value));
}

TEST_CASE("degenerate inputs") {
  CHECK_THROWS_AS(ttest_two_tailed(std::vector<double>{1}, std::vector<double>{1, 2}), DataError);
  CHECK_THROWS_AS(ttest_two_tailed(std::vector<double>{1, kNaN}, std::vector<double>{1, 2},
                                   TTestVariant::Pooled, NanPolicy::Omit),
                  DataError);
  CHECK_THROWS_AS(ttest_two_tailed(std::vector<double>{2, 2}, std::vector<double>{2, 2}), DataError);
  const auto apart = ttest_two_tailed(std::vector<double>{1, 1}, std::vector<double>{2, 2});
  CHECK(std::isinf(apart.statistic));
  CHECK(apart.p_value == 0.0);
}

TEST_CASE("welch against direct formula") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto a = sample(rng, 3 + rng() % 30, 0.0, 1.0);
    const auto b = sample(rng, 3 + rng() % 30, 0.5, 3.0);
    auto mv = [](const std::vector<double>& x) {
      double m = 0;
      for (double v : x) m += v;
      m /= static_cast<double>(x.size());
      double s = 0;
      for (double v : x) s += (v - m) * (v - m);
      return std::pair{m, s / static_cast<double>(x.size() - 1)};
    };
    const auto [ma, va] = mv(a);
    const auto [mb, vb] = mv(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double qa = va / na, qb = vb / nb;
    const double t_ref = (ma - mb) / std::sqrt(qa + qb);
    const double df_ref = (qa + qb) * (qa + qb) / (qa * qa / (na - 1) + qb * qb / (nb - 1));
    const double p_ref = boost::math::ibeta(df_ref / 2, 0.5, df_ref / (df_ref + t_ref * t_ref));
    const auto r = ttest_two_tailed(a, b, TTestVariant::Welch);
    CHECK(r.statistic == doctest::Approx(t_ref).epsilon(1e-12));
    CHECK(r.df == doctest::Approx(df_ref).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(p_ref).epsilon(1e-9));
  }
}

TEST_CASE("incomplete beta against reference implementation") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> x(0.0, 1.0), ab(0.05, 200.0);
  for (int t = 0; t < 2000; ++t) {
    const double xv = x(rng), a = ab(rng), b = ab(rng);
    CHECK(incomplete_beta(xv, a, b) == doctest::Approx(boost::math::ibeta(a, b, xv)).epsilon(1e-12));
  }
  CHECK(incomplete_beta(0.0, 2, 3) == 0.0);
  CHECK(incomplete_beta(1.0, 2, 3) == 1.0);
}

TEST_CASE("t-test invariances") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const auto a = sample(rng, 2 + rng() % 20, 0.0, 1.0);
    const auto b = sample(rng, 2 + rng() % 20, 0.3, 1.5);
    for (auto variant : {TTestVariant::Pooled, TTestVariant::Welch}) {
      const auto r = ttest_two_tailed(a, b, variant);
      const auto swapped = ttest_two_tailed(b, a, variant);
      CHECK(swapped.statistic == -r.statistic);
      CHECK(swapped.p_value == r.p_value);
      CHECK(r.p_value >= 0.0);
      CHECK(r.p_value <= 1.0);

      auto shift = [](std::vector<double> v, double c) {
        for (auto& x : v) x += c;
        return v;
      };
      auto scale = [](std::vector<double> v, double c) {
        for (auto& x : v) x *= c;
        return v;
      };
      const auto shifted = ttest_two_tailed(shift(a, 3.5), shift(b, 3.5), variant);
      CHECK(shifted.statistic == doctest::Approx(r.statistic).epsilon(1e-12));
      CHECK(shifted.p_value == doctest::Approx(r.p_value).epsilon(1e-12));
      const auto scaled = ttest_two_tailed(scale(a, 7.25), scale(b, 7.25), variant);
      CHECK(scaled.statistic == doctest::Approx(r.statistic).epsilon(1e-12));
    }
  }
}

TEST_CASE("p value decreases with |t|") {
  for (double df : {1.0, 3.0, 10.0, 58.0, 6000.0}) {
    double prev = 1.0;
    for (double t = 0.0; t < 30.0; t += 0.25) {
      const double p = student_t_two_sided_p(t, df);
      CHECK(p <= prev);
      prev = p;
    }
  }
}

TEST_CASE("density histogram") {
  const auto two = density_histogram(std::vector<double>{0.0, 1.0}, 2);
  CHECK(two.bin_edges == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(two.densities == std::vector<double>{1.0, 1.0});

  const auto flat = density_histogram(std::vector<double>(4, 0.3), 5);
  double area = 0;
  for (std::size_t i = 0; i < flat.densities.size(); ++i) area += flat.densities[i] * flat.bin_width(i);
  CHECK(area == doctest::Approx(1.0));
  CHECK(flat.bin_edges.front() == doctest::Approx(-0.2));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> values(10000);
  for (auto& v : values) v = u(rng);
  const auto d = density_histogram(values, 10);
  area = 0;
  for (std::size_t i = 0; i < d.densities.size(); ++i) {
    CHECK(std::abs(d.densities[i] - 1.0) < 0.1);
    CHECK(d.bin_edges[i + 1] > d.bin_edges[i]);
    area += d.densities[i] * d.bin_width(i);
  }
  CHECK(area == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(density_histogram(std::vector<double>{}, 3), DataError);
  CHECK_THROWS_AS(density_histogram(std::vector<double>{kNaN}, 3), DataError);
  CHECK_THROWS_AS(density_histogram(std::vector<double>{1.0}, 0), DataError);

  std::ostringstream csv;
  write_density_csv(csv, two);
  CHECK(csv.str().rfind("bin_left,bin_right,density\n", 0) == 0);
}
