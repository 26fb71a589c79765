#pragma once
// Exact arithmetic helpers.
//
// Two independent concerns live here:
//
//  1. Exact comparison of an integer count against a product of IEEE doubles
//     (thresholds such as  count <= delta0 * n * p).  Every finite double is
//     a dyadic rational m * 2^e, so products and comparisons are carried out
//     exactly in arbitrary-precision integers; no rounding of the real
//     product can flip a boundary case.
//
//  2. Modular arithmetic over word-size primes (128-bit product reduction,
//     modular exponentiation, deterministic Miller-Rabin) used by the exact
//     singularity certificate.

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rmtsharp/errors.hpp"

namespace rmtsharp {

using bigint = boost::multiprecision::cpp_int;

// A dyadic rational m * 2^e with exact integer mantissa.
struct ExactReal {
  bigint m;
  long e = 0;

  static ExactReal from_double(double d) {
    if (!std::isfinite(d)) throw parameter_error("exact comparison requires finite values");
    if (d == 0.0) return {bigint(0), 0};
    int exp2 = 0;
    const double frac = std::frexp(d, &exp2);  // d = frac * 2^exp2, |frac| in [0.5,1)
    const auto mant = static_cast<long long>(std::ldexp(frac, 53));  // exact for doubles
    return {bigint(mant), exp2 - 53};
  }

  static ExactReal from_int(long long v) { return {bigint(v), 0}; }

  ExactReal operator*(const ExactReal& o) const { return {m * o.m, e + o.e}; }

  // Exact division by a power of two.
  ExactReal shifted(long by) const { return {m, e + by}; }
};

// Sign of (a - b), computed exactly.
inline int exact_compare(const ExactReal& a, const ExactReal& b) {
  bigint lhs = a.m, rhs = b.m;
  // Align exponents by shifting the larger-exponent mantissa left.
  if (a.e >= b.e)
    lhs <<= static_cast<unsigned>(a.e - b.e);
  else
    rhs <<= static_cast<unsigned>(b.e - a.e);
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

// count <= a * b * scale, evaluated exactly (scale is an exact integer).
inline bool count_within(long long count, double a, double b, long long scale) {
  const ExactReal rhs =
      ExactReal::from_double(a) * ExactReal::from_double(b) * ExactReal::from_int(scale);
  return exact_compare(ExactReal::from_int(count), rhs) <= 0;
}

// count <= (a * b * scale) / 2^halvings, evaluated exactly.
inline bool count_within_halved(long long count, double a, double b, long long scale,
                                long halvings) {
  const ExactReal rhs = (ExactReal::from_double(a) * ExactReal::from_double(b) *
                         ExactReal::from_int(scale))
                            .shifted(-halvings);
  return exact_compare(ExactReal::from_int(count), rhs) <= 0;
}

// k * p <= c, evaluated exactly; the subset-size admissibility test.
inline bool scaled_int_below(long long k, double p, double c) {
  const ExactReal lhs = ExactReal::from_int(k) * ExactReal::from_double(p);
  return exact_compare(lhs, ExactReal::from_double(c)) <= 0;
}

// ---------------------------------------------------------------------------
// Modular arithmetic.

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) % p);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t acc = 1 % p;
  base %= p;
  while (exp != 0) {
    if (exp & 1u) acc = mulmod(acc, base, p);
    base = mulmod(base, base, p);
    exp >>= 1;
  }
  return acc;
}

// Deterministic Miller-Rabin; the fixed base set decides primality exactly
// for every n < 3.3e24, far beyond the 62-bit values used here.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                          29ull, 31ull, 37ull}) {
    if (n == q) return true;
    if (n % q == 0) return false;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1u) == 0) {
    d >>= 1;
    ++r;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull,
                          29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

// The two fixed certificate primes: the largest primes below 2^62 at offsets
// 57 and 117. Verified by is_prime_u64 in the unit suite.
inline constexpr std::uint64_t kCertPrime1 = 4611686018427387847ULL;  // 2^62 - 57
inline constexpr std::uint64_t kCertPrime2 = 4611686018427387787ULL;  // 2^62 - 117

}  // namespace rmtsharp
