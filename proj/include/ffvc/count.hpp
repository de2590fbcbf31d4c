#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <limits>
#include <string>

namespace ffvc {

/// Exact counts. Chain and prism totals outgrow 64 bits quickly.
using Count = boost::multiprecision::cpp_int;

inline Count ipow(std::uint64_t base, unsigned exp) {
  Count r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

/// k (k-1) ... (k-n+1); zero when n > k.
inline Count falling_factorial(std::uint64_t k, unsigned n) {
  if (n > k) return 0;
  Count r = 1;
  for (unsigned i = 0; i < n; ++i) r *= (k - i);
  return r;
}

inline std::uint64_t factorial_u64(unsigned n) {
  std::uint64_t r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

inline std::string to_string(const Count& c) { return c.str(); }

inline long double to_long_double(const Count& c) { return c.convert_to<long double>(); }

inline bool fits_u64(const Count& c) { return c >= 0 && c <= std::numeric_limits<std::uint64_t>::max(); }

}  // namespace ffvc
