#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reprokit/errors.hpp"
#include "reprokit/numerics.hpp"
#include "reprokit/run_model.hpp"

// Two-sided Student-t tests with a self-contained p-value computation via
// the regularized incomplete beta function. Paired tests serve the
// same-collection (reproduction) comparison, unpaired tests the
// different-collection (replication) one.

namespace reprokit {

enum class TestKind { paired, unpaired_pooled, unpaired_welch };

inline const char* test_kind_name(TestKind kind) {
  switch (kind) {
    case TestKind::paired: return "paired";
    case TestKind::unpaired_pooled: return "unpaired-pooled";
    case TestKind::unpaired_welch: return "unpaired-welch";
  }
  return "?";
}

// statistic/p_value are empty for the degenerate zero-variance-with-drift
// case; that sentinel never coerces to a number downstream.
struct TestResult {
  std::optional<double> statistic;
  std::optional<double> p_value;
  double df = 0.0;
  TestKind kind = TestKind::paired;
};

// I_x(a,b) by the continued fraction of Numerical Recipes' betacf, with the
// symmetry switch at x > (a+1)/(a+b+2) so the fraction always converges
// fast. Relative tolerance 1e-12, at most 300 iterations; failure to
// converge raises instead of returning a silent wrong value.
inline double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("regularized_incomplete_beta: a and b must be positive");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::invalid_argument("regularized_incomplete_beta: x must lie in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_incomplete_beta(1.0 - x, b, a);

  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);

  constexpr double kTiny = 1e-300;
  constexpr double kRelTol = 1e-12;
  constexpr int kMaxIter = 300;

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
    double coeff = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + coeff * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + coeff / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    coeff = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + coeff * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + coeff / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kRelTol)
      return std::exp(ln_front) * h / a;
  }
  throw std::runtime_error("regularized_incomplete_beta: continued fraction did not converge");
}

// Two-sided tail probability of the Student-t distribution:
// p = I_{df/(df+t^2)}(df/2, 1/2).
inline double student_t_sf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("student_t_sf: df must be positive");
  const double x = df / (df + t * t);
  return regularized_incomplete_beta(x, df / 2.0, 0.5);
}

namespace detail {

inline TestResult degenerate_or_throw(double mean_diff, double df, TestKind kind) {
  TestResult result;
  result.df = df;
  result.kind = kind;
  if (mean_diff == 0.0) {
    result.statistic = 0.0;
    result.p_value = 1.0;
  }
  // zero variance with nonzero mean: statistic and p stay undefined
  return result;
}

}  // namespace detail

inline TestResult paired_t_test_samples(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("paired t-test: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw SemanticError("paired t-test: needs at least 2 pairs");
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = x[i] - y[i];
  const double m = mean(diff);
  const double var = sample_variance(diff);
  const double df = static_cast<double>(n - 1);
  if (var == 0.0) return detail::degenerate_or_throw(m, df, TestKind::paired);
  TestResult result;
  result.kind = TestKind::paired;
  result.df = df;
  const double t = m / std::sqrt(var / static_cast<double>(n));
  result.statistic = t;
  result.p_value = student_t_sf(t, df);
  return result;
}

// Pairs scores by topic id; the two maps must cover exactly the same topics.
inline TestResult paired_t_test(const TopicScoreMap& x, const TopicScoreMap& y) {
  const PairingReport pairing = pair_topics(x, y);
  if (!pairing.only_a.empty() || !pairing.only_b.empty())
    throw SemanticError("paired t-test: topic sets differ");
  std::vector<double> xs, ys;
  xs.reserve(x.scores.size());
  ys.reserve(y.scores.size());
  for (const auto& [topic, v] : x.scores) {
    xs.push_back(v);
    ys.push_back(y.scores.at(topic));
  }
  return paired_t_test_samples(xs, ys);
}

inline TestResult unpaired_t_test_samples(std::span<const double> x, std::span<const double> y,
                                          bool welch = false) {
  const std::size_t nx = x.size(), ny = y.size();
  if (nx < 2 || ny < 2) throw SemanticError("unpaired t-test: each sample needs at least 2 values");
  const double mx = mean(x), my = mean(y);
  const double vx = sample_variance(x), vy = sample_variance(y);
  const double dnx = static_cast<double>(nx), dny = static_cast<double>(ny);

  if (welch) {
    const double ex = vx / dnx, ey = vy / dny;
    const double se2 = ex + ey;
    if (se2 == 0.0)
      return detail::degenerate_or_throw(mx - my, dnx + dny - 2.0, TestKind::unpaired_welch);
    const double df = se2 * se2 / (ex * ex / (dnx - 1.0) + ey * ey / (dny - 1.0));
    TestResult result;
    result.kind = TestKind::unpaired_welch;
    result.df = df;
    const double t = (mx - my) / std::sqrt(se2);
    result.statistic = t;
    result.p_value = student_t_sf(t, df);
    return result;
  }

  const double df = dnx + dny - 2.0;
  const double pooled = ((dnx - 1.0) * vx + (dny - 1.0) * vy) / df;
  if (pooled == 0.0) return detail::degenerate_or_throw(mx - my, df, TestKind::unpaired_pooled);
  TestResult result;
  result.kind = TestKind::unpaired_pooled;
  result.df = df;
  const double t = (mx - my) / std::sqrt(pooled * (1.0 / dnx + 1.0 / dny));
  result.statistic = t;
  result.p_value = student_t_sf(t, df);
  return result;
}

// Topic sets may differ: this is the replication comparison, the two score
// maps typically come from different test collections.
inline TestResult unpaired_t_test(const TopicScoreMap& x, const TopicScoreMap& y,
                                  bool welch = false) {
  std::vector<double> xs, ys;
  xs.reserve(x.scores.size());
  ys.reserve(y.scores.size());
  for (const auto& [topic, v] : x.scores) xs.push_back(v);
  for (const auto& [topic, v] : y.scores) ys.push_back(v);
  return unpaired_t_test_samples(xs, ys, welch);
}

}  // namespace reprokit
