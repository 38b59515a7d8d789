#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace haargc {

enum class BoundKind { exact, lower, upper };

inline std::string_view to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::exact: return "exact";
    case BoundKind::lower: return "lower";
    case BoundKind::upper: return "upper";
  }
  return "unknown";
}

/// A named numeric statement about a constant: its value, whether that value
/// is the constant itself or a one-sided bound, and how it was obtained.
struct ConstantBound {
  std::string name;
  double value = 0.0;
  BoundKind kind = BoundKind::exact;
  std::string source;

  static ConstantBound make(std::string name, double value, BoundKind kind, std::string source) {
    if (!std::isfinite(value) || value < 0.0) {
      throw std::domain_error("constant " + name + " must be finite and nonnegative");
    }
    return ConstantBound{std::move(name), value, kind, std::move(source)};
  }
};

}  // namespace haargc
