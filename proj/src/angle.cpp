#include "ecs/angle.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "ecs/errors.hpp"

namespace ecs {

namespace {

bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  std::string copy(s);
  char* end = nullptr;
  out = std::strtod(copy.c_str(), &end);
  return end == copy.c_str() + copy.size() && std::isfinite(out);
}

// "N", "N/D", "" (means 1), "-" (means -1). Returns false if not rational.
bool parse_rational(std::string_view s, std::int64_t& num, std::int64_t& den) {
  if (s.empty() || s == "+") {
    num = 1;
    den = 1;
    return true;
  }
  if (s == "-") {
    num = -1;
    den = 1;
    return true;
  }
  auto slash = s.find('/');
  if (slash == std::string_view::npos) {
    den = 1;
    return parse_int(s, num);
  }
  return parse_int(s.substr(0, slash), num) && parse_int(s.substr(slash + 1), den) && den != 0;
}

}  // namespace

Angle Angle::radians(double value) {
  if (value == 0.0) return Angle{};
  Angle a;
  a.radians_ = value;
  a.fraction_.reset();
  return a;
}

Angle Angle::pi_fraction(std::int64_t num, std::int64_t den) {
  if (den == 0) throw ValidationError("angle: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num == 0) den = 1;
  Angle a;
  a.radians_ = static_cast<double>(num) * std::numbers::pi / static_cast<double>(den);
  a.fraction_ = std::pair{num, den};
  return a;
}

Angle Angle::parse(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  if (s.empty()) throw ValidationError("angle: empty");
  const auto pos = s.find("pi");
  if (pos == std::string::npos) {
    std::int64_t num = 0;
    if (parse_int(s, num) && num == 0) return Angle{};
    double v = 0.0;
    if (!parse_double(s, v)) throw ValidationError("angle: cannot parse '" + std::string(text) + "'");
    return radians(v);
  }
  std::string_view prefix(s.data(), pos);
  std::string_view suffix(s.data() + pos + 2, s.size() - pos - 2);
  if (!prefix.empty() && prefix.back() == '*') prefix.remove_suffix(1);
  std::int64_t num = 1, den = 1;
  std::int64_t div = 1;
  bool rational = parse_rational(prefix, num, den);
  if (!suffix.empty()) {
    if (suffix.front() == '/') {
      rational = rational && parse_int(suffix.substr(1), div) && div != 0;
    } else if (suffix.front() == '*') {
      std::int64_t n2 = 1, d2 = 1;
      rational = rational && parse_rational(suffix.substr(1), n2, d2);
      num *= n2;
      den *= d2;
    } else {
      rational = false;
    }
  }
  if (rational) return pi_fraction(num, den * div);
  // Non-integer coefficient such as "0.25pi".
  double coeff = 0.0;
  if (prefix.empty() || !parse_double(prefix, coeff) || !suffix.empty())
    throw ValidationError("angle: cannot parse '" + std::string(text) + "'");
  return radians(coeff * std::numbers::pi);
}

std::complex<double> Angle::phasor() const {
  if (fraction_) {
    auto [num, den] = *fraction_;
    // Exact values on the quarter-turn grid.
    if (den == 1 || den == 2) {
      const std::int64_t quarter = ((den == 1 ? 2 * num : num) % 4 + 4) % 4;
      switch (quarter) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
      }
    }
  }
  return std::polar(1.0, radians_);
}

Angle Angle::operator-() const {
  if (fraction_) return pi_fraction(-fraction_->first, fraction_->second);
  return radians(-radians_);
}

Angle Angle::operator+(const Angle& other) const {
  if (fraction_ && other.fraction_) {
    auto [a, b] = *fraction_;
    auto [c, d] = *other.fraction_;
    return pi_fraction(a * d + c * b, b * d);
  }
  return radians(radians_ + other.radians_);
}

std::string Angle::to_string() const {
  if (fraction_) {
    auto [num, den] = *fraction_;
    if (num == 0) return "0";
    std::string out;
    if (num == -1)
      out = "-pi";
    else if (num == 1)
      out = "pi";
    else
      out = std::to_string(num) + "pi";
    if (den != 1) out += "/" + std::to_string(den);
    return out;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", radians_);
  return buf;
}

}  // namespace ecs
