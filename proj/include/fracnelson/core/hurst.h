#pragma once

namespace fracnelson::core {

/// Hurst parameter of a fractional Brownian motion, restricted to the open interval (0, 1).
class HurstIndex {
 public:
  explicit HurstIndex(double value);

  double value() const noexcept { return value_; }

  /// True when H > 1/2; several kernel and operator formulas are only valid there.
  bool regular() const noexcept { return value_ > 0.5; }
  bool brownian() const noexcept { return value_ == 0.5; }

  friend bool operator==(const HurstIndex&, const HurstIndex&) = default;

 private:
  double value_;
};

}  // namespace fracnelson::core
