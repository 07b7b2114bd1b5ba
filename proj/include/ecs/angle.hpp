#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ecs {

// A phase angle. Angles built from rational multiples of pi remember the
// fraction so that the unit phasor of a multiple of pi/2 is exact
// (e^{-i pi/2} is -i, not 6e-17 - i).
class Angle {
 public:
  Angle() = default;

  static Angle radians(double value);
  // num/den * pi, reduced; den must be nonzero.
  static Angle pi_fraction(std::int64_t num, std::int64_t den);

  // Accepts "pi/2", "-pi", "3pi/4", "3*pi/4", "pi*3/4", "2/3pi", "0", "1.5707".
  static Angle parse(std::string_view text);

  double value() const { return radians_; }
  const std::optional<std::pair<std::int64_t, std::int64_t>>& fraction() const { return fraction_; }

  // e^{i*angle}
  std::complex<double> phasor() const;

  Angle operator-() const;
  Angle operator+(const Angle& other) const;

  // Canonical text: "pi/2", "-3pi/4", "0" or a 17-digit decimal.
  std::string to_string() const;

  friend bool operator==(const Angle& a, const Angle& b) {
    return a.radians_ == b.radians_ && a.fraction_ == b.fraction_;
  }

 private:
  double radians_ = 0.0;
  std::optional<std::pair<std::int64_t, std::int64_t>> fraction_ = std::pair<std::int64_t, std::int64_t>{0, 1};
};

}  // namespace ecs
