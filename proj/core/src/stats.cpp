#include "pubshare/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pubshare/errors.hpp"

namespace pubshare::stats {
namespace {

void require_valid(const BinomialSample& s) {
  if (s.total < 1) {
    throw InvalidInput("invalid sample: total must be >= 1, got " + std::to_string(s.total));
  }
  if (s.count < 0 || s.count > s.total) {
    throw InvalidInput("invalid sample: count " + std::to_string(s.count) +
                       " outside [0, " + std::to_string(s.total) + "]");
  }
}

void require_valid_z(double z) {
  if (!std::isfinite(z) || z < 0.0) {
    throw InvalidInput("critical value z must be finite and >= 0");
  }
}

}  // namespace

ProportionInterval wilson_interval(const BinomialSample& sample, double z) {
  require_valid(sample);
  require_valid_z(z);

  const double n = static_cast<double>(sample.total);
  const double p = sample.proportion();
  const double z2 = z * z;

  const double centre = p + z2 / (2.0 * n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  const double denom = 1.0 + z2 / n;

  ProportionInterval out{std::clamp((centre - half) / denom, 0.0, 1.0),
                         std::clamp((centre + half) / denom, 0.0, 1.0)};
  // At p = 0 (p = 1) centre and half-width cancel exactly; pin the bound
  // rather than trust the rounding of sqrt.
  if (sample.count == 0) out.lower = 0.0;
  if (sample.count == sample.total) out.upper = 1.0;
  return out;
}

double predicted_count(const BinomialSample& sample, std::int64_t future_total) {
  require_valid(sample);
  if (future_total < 1) {
    throw InvalidInput("future total m must be >= 1, got " + std::to_string(future_total));
  }
  return static_cast<double>(future_total) * static_cast<double>(sample.count) /
         static_cast<double>(sample.total);
}

CountInterval count_prediction_interval(const BinomialSample& sample,
                                        const PredictionSetup& setup) {
  require_valid_z(setup.z);
  const double yhat = predicted_count(sample, setup.future_total);

  const double n = static_cast<double>(sample.total);
  const double m = static_cast<double>(setup.future_total);
  const double z2 = setup.z * setup.z;

  const double centre = yhat * (1.0 - z2 / (m + n)) + z2 * m / (2.0 * n);
  const double half =
      setup.z * std::sqrt(yhat * (m - yhat) * (1.0 / m + 1.0 / n) + z2 * m * m / (4.0 * n * n));
  const double denom = 1.0 + z2 * m / (n * (m + n));

  CountInterval out;
  out.lower_real = std::clamp((centre - half) / denom, 0.0, m);
  out.upper_real = std::clamp((centre + half) / denom, 0.0, m);
  if (sample.count == 0) out.lower_real = 0.0;
  if (sample.count == sample.total) out.upper_real = m;

  out.lower = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(out.lower_real)));
  out.upper = std::min<std::int64_t>(setup.future_total,
                                     static_cast<std::int64_t>(std::floor(out.upper_real)));
  return out;
}

ProportionInterval proportion_prediction_interval(const BinomialSample& sample,
                                                  const PredictionSetup& setup,
                                                  BoundRounding rounding) {
  const CountInterval counts = count_prediction_interval(sample, setup);
  const double m = static_cast<double>(setup.future_total);
  if (rounding == BoundRounding::Integer) {
    return {static_cast<double>(counts.lower) / m, static_cast<double>(counts.upper) / m};
  }
  return {std::clamp(counts.lower_real / m, 0.0, 1.0),
          std::clamp(counts.upper_real / m, 0.0, 1.0)};
}

double scaled_expectation(const ScalingInputs& inputs) {
  if (inputs.world_base < 1 || inputs.world_target < 1) {
    throw InvalidInput("world totals must be >= 1");
  }
  if (inputs.group_base < 0 || inputs.group_base > inputs.world_base) {
    throw InvalidInput("group base count must lie in [0, world base]");
  }
  return static_cast<double>(inputs.group_base) * static_cast<double>(inputs.world_target) /
         static_cast<double>(inputs.world_base);
}

double nominal_level(double z) {
  require_valid_z(z);
  return std::erf(z / std::sqrt(2.0));
}

}  // namespace pubshare::stats
