#pragma once

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

namespace cdf {

/// Exact integer type used throughout the Integer domain.
using Int = mpz_class;

enum class Domain { Integer, Real };

inline const char* domain_name(Domain d) {
  return d == Domain::Integer ? "Integer" : "Real";
}

/// A runtime value: exact integer or 64-bit real, matching the owning
/// function's domain tag.
class Value {
 public:
  Value() : rep_(Int(0)) {}
  explicit Value(Int v) : rep_(std::move(v)) {}
  explicit Value(long v) : rep_(Int(v)) {}
  explicit Value(double v) : rep_(v) {}

  bool is_int() const { return std::holds_alternative<Int>(rep_); }
  bool is_real() const { return std::holds_alternative<double>(rep_); }
  Domain domain() const { return is_int() ? Domain::Integer : Domain::Real; }

  const Int& as_int() const { return std::get<Int>(rep_); }
  double as_real() const { return std::get<double>(rep_); }

  /// Numeric view usable in either domain (lossy for large integers).
  double to_double() const {
    return is_int() ? as_int().get_d() : as_real();
  }

  bool operator==(const Value& o) const { return rep_ == o.rep_; }

  /// Total order: integers compare exactly, reals by value; an Int never
  /// equals a Real (domains are not mixed inside one analysis).
  bool operator<(const Value& o) const {
    if (is_int() != o.is_int()) return is_int() && !o.is_int();
    if (is_int()) return as_int() < o.as_int();
    return as_real() < o.as_real();
  }

  std::string str() const {
    if (is_int()) return as_int().get_str();
    std::string s = format_real(as_real());
    return s;
  }

  /// Shortest decimal that round-trips through a double.
  static std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    for (int prec = 1; prec <= 17; ++prec) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
      if (std::strtod(buf, nullptr) == v) return buf;
    }
    return std::to_string(v);
  }

 private:
  std::variant<Int, double> rep_;
};

/// |a - b| <= eps * max(1, |a|); the relative tolerance used for Real-domain
/// orbit equality (ε-cycles).
inline bool approx_eq(double a, double b, double eps) {
  return std::fabs(a - b) <= eps * std::max(1.0, std::fabs(a));
}

inline bool values_equal(const Value& a, const Value& b, double float_eps) {
  if (a.is_int() != b.is_int()) return false;
  if (a.is_int()) return a.as_int() == b.as_int();
  return approx_eq(a.as_real(), b.as_real(), float_eps);
}

}  // namespace cdf
