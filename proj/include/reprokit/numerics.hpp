#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace reprokit {

// Kahan-compensated accumulator. Score sums feed p-value computations that
// are checked against 1e-8 oracles, so plain left-to-right summation is not
// good enough on long topic lists.
class KahanSum {
 public:
  void add(double v) {
    const double y = v - compensation_;
    const double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }

  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double kahan_total(std::span<const double> values) {
  KahanSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

inline double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean of empty sample");
  return kahan_total(values) / static_cast<double>(values.size());
}

// Unbiased sample variance (n-1 denominator), two-pass with compensated
// sums. Returns exactly 0.0 for a constant sample.
inline double sample_variance(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("sample variance needs n >= 2");
  bool constant = true;
  for (double v : values) {
    if (v != values[0]) {
      constant = false;
      break;
    }
  }
  if (constant) return 0.0;
  const double m = mean(values);
  KahanSum acc;
  for (double v : values) {
    const double d = v - m;
    acc.add(d * d);
  }
  return acc.value() / static_cast<double>(n - 1);
}

// Fixed 6-decimal rendering used by all text and CSV output.
inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::string fixed6(const std::optional<double>& v) {
  return v ? fixed6(*v) : std::string("undef");
}

// Shortest representation that round-trips to the same double; used by the
// run writer so that write/parse is an identity.
inline std::string shortest_repr(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::invalid_argument("unrepresentable double");
  return std::string(buf, ptr);
}

}  // namespace reprokit
