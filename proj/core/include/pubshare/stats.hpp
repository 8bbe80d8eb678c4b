#pragma once

// Closed-form interval formulas for a group's share of a venue's output.
//
// A venue-year with `total` articles, `count` of them attributable to a group,
// is treated as one draw from Binomial(total, P) where P is the group's
// underlying probability of authoring any given article. The Wilson score
// interval bounds P; the joint-distribution prediction interval bounds the
// count (or share) expected in a later year of `future_total` articles if P
// has not changed.

#include <cstdint>

namespace pubshare::stats {

inline constexpr double kDefaultZ = 1.96;

struct BinomialSample {
  std::int64_t count = 0;  // articles attributed to the group
  std::int64_t total = 0;  // all articles in the venue-year

  double proportion() const noexcept {
    return static_cast<double>(count) / static_cast<double>(total);
  }
  bool valid() const noexcept { return total >= 1 && count >= 0 && count <= total; }

  friend bool operator==(const BinomialSample&, const BinomialSample&) = default;
};

struct ProportionInterval {
  double lower = 0.0;
  double upper = 1.0;

  double width() const noexcept { return upper - lower; }

  friend bool operator==(const ProportionInterval&, const ProportionInterval&) = default;
};

// Prediction interval for a future count. The integer bounds round the real
// bounds inward (lower up, upper down); rounding can leave lower > upper when
// the real interval is narrower than one article, see empty().
struct CountInterval {
  double lower_real = 0.0;
  double upper_real = 0.0;
  std::int64_t lower = 0;
  std::int64_t upper = 0;

  bool empty() const noexcept { return lower > upper; }
  bool contains(std::int64_t value) const noexcept {
    return value >= lower && value <= upper;
  }
};

struct PredictionSetup {
  std::int64_t future_total = 0;  // m, articles in the year being predicted
  double z = kDefaultZ;
};

// Which bounds a proportion prediction interval is built from.
enum class BoundRounding { Real, Integer };

struct ScalingInputs {
  std::int64_t group_base = 0;    // group's articles in the base year
  std::int64_t world_base = 0;    // all articles in the base year
  std::int64_t world_target = 0;  // all articles in the later year
};

// Wilson score interval for the group's underlying probability, clamped to
// [0, 1]. Throws InvalidInput for an invalid sample or a negative/non-finite z.
ProportionInterval wilson_interval(const BinomialSample& sample, double z = kDefaultZ);

/// Predicted future count under an unchanged probability: m * x / n.
double predicted_count(const BinomialSample& sample, std::int64_t future_total);

/// Joint-distribution prediction interval for the count a group will reach
/// out of `setup.future_total` articles, given `sample` from an earlier year.
/// Real bounds are clamped to [0, m]; integer bounds are ceil(lower) and
/// floor(upper).
CountInterval count_prediction_interval(const BinomialSample& sample,
                                        const PredictionSetup& setup);

/// The count prediction interval divided by m.
ProportionInterval proportion_prediction_interval(const BinomialSample& sample,
                                                  const PredictionSetup& setup,
                                                  BoundRounding rounding = BoundRounding::Real);

// Count expected in the later year if the group keeps pace with the world:
// group_base * world_target / world_base.
double scaled_expectation(const ScalingInputs& inputs);

// Closed on both ends.
constexpr bool contains(const ProportionInterval& interval, double p) noexcept {
  return interval.lower <= p && p <= interval.upper;
}

// Two-sided nominal coverage of a symmetric normal critical value z.
double nominal_level(double z);

}  // namespace pubshare::stats
