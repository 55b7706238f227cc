#pragma once

#include <gmpxx.h>

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chabauty/error.hpp"

namespace chabauty {

// Valuation used for exact zero and for "no precision bound".
inline constexpr long kInfinity = std::numeric_limits<long>::max() / 4;

class PrimeContext;
using Context = std::shared_ptr<const PrimeContext>;

class PrimeContext {
 public:
  static Context make(long p, int precision = 32);

  long prime() const { return p_; }
  const mpz_class& prime_z() const { return pz_; }
  int precision() const { return precision_; }
  // p^k for k >= 0.
  mpz_class power(long k) const;

 private:
  PrimeContext(long p, int precision);
  long p_;
  mpz_class pz_;
  int precision_;
  std::vector<mpz_class> powers_;
};

bool is_prime(long n);
// Exponent of p in n (n != 0).
long valuation_of(const mpz_class& n, long p);
long valuation_of(const mpq_class& q, long p);

// Element of Q_p: exact rational, approximate p^v * unit + O(p^(v+k)), an
// unknown value O(p^a), or an exact zero.
class PadicNumber {
 public:
  enum class Kind { Zero, Exact, Approx, BigOh };

  PadicNumber() = default;

  static PadicNumber zero(const Context& ctx);
  static PadicNumber one(const Context& ctx);
  static PadicNumber from_int(const Context& ctx, long value);
  static PadicNumber from_rational(const Context& ctx, const mpq_class& q);
  // p^v * unit known to `digits` digits; unit must be prime to p.
  static PadicNumber approx(const Context& ctx, long v, const mpz_class& unit, long digits);
  static PadicNumber big_oh(const Context& ctx, long absolute_precision);
  // Rounds an exact rational to absolute precision `abs_prec`.
  static PadicNumber rounded(const Context& ctx, const mpq_class& q, long abs_prec);
  static PadicNumber parse(const Context& ctx, const std::string& text);

  Kind kind() const { return kind_; }
  const Context& context() const { return ctx_; }
  bool is_exact() const { return kind_ == Kind::Zero || kind_ == Kind::Exact; }
  bool is_exact_zero() const { return kind_ == Kind::Zero; }
  bool is_big_oh() const { return kind_ == Kind::BigOh; }
  // Certified nonzero (exact nonzero or approximate).
  bool is_certified_nonzero() const { return kind_ == Kind::Exact || kind_ == Kind::Approx; }

  // kInfinity for exact zero; throws PrecisionExhausted for O(p^a).
  long valuation() const;
  // Lower bound on the valuation that never throws.
  long valuation_lower_bound() const;
  const mpz_class& unit() const { return unit_; }
  long certified_digits() const;
  long absolute_precision() const;
  const mpq_class& exact_value() const;

  // Unit part modulo p^digits; exact values supply any depth.
  mpz_class unit_mod(long digits) const;

  // Throws PrecisionExhausted on O(p^a).
  bool is_zero() const;
  // Equality to the precision both sides carry; never throws.
  bool equals_to_precision(const PadicNumber& other) const;
  // Absolute p-adic digits to which the two values agree (kInfinity if exactly equal).
  long agreement(const PadicNumber& other) const;

  PadicNumber operator-() const;
  PadicNumber inv() const;
  PadicNumber pow(long e) const;
  PadicNumber with_absolute_precision(long abs_prec) const;

  friend PadicNumber operator+(const PadicNumber& a, const PadicNumber& b);
  friend PadicNumber operator-(const PadicNumber& a, const PadicNumber& b);
  friend PadicNumber operator*(const PadicNumber& a, const PadicNumber& b);
  friend PadicNumber operator/(const PadicNumber& a, const PadicNumber& b);
  PadicNumber& operator+=(const PadicNumber& o) { return *this = *this + o; }
  PadicNumber& operator-=(const PadicNumber& o) { return *this = *this - o; }
  PadicNumber& operator*=(const PadicNumber& o) { return *this = *this * o; }
  PadicNumber& operator/=(const PadicNumber& o) { return *this = *this / o; }

  std::string to_string() const;

 private:
  const PrimeContext& ctx() const;

  Kind kind_ = Kind::Zero;
  Context ctx_;
  long val_ = kInfinity;
  mpz_class unit_;
  long digits_ = 0;
  long abs_ = kInfinity;
  mpq_class exact_;
};

inline bool operator==(const PadicNumber& a, const PadicNumber& b) { return a.equals_to_precision(b); }
inline bool operator!=(const PadicNumber& a, const PadicNumber& b) { return !a.equals_to_precision(b); }

std::ostream& operator<<(std::ostream& os, const PadicNumber& x);

}  // namespace chabauty
