#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace wise {

/// Neumaier-compensated accumulator. Pair statistics at large n are small
/// differences of large sums, so every reduction in the library uses this.
class StableSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  StableSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

double normal_cdf(double x);
double normal_quantile(double p);

/// sup_t |F_sample(t) - cdf(t)| for a continuous reference cdf.
double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf);
double ks_distance_normal(std::span<const double> sample);
/// Two-sample Kolmogorov distance sup_t |F_a(t) - F_b(t)|.
double ks_distance_two_sample(std::span<const double> a, std::span<const double> b);

struct MeanStat {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double std_error = 0.0;
  std::size_t count = 0;
};
MeanStat mean_stat(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
};
/// Ordinary least squares y ~ a + b x.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace wise
