#include "chabauty/padic.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>

namespace chabauty {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::DivisionByZero: return "DivisionByZero";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::PrecisionExhausted: return "PrecisionExhausted";
    case Errc::Singular: return "Singular";
    case Errc::NotSubalgebra: return "NotSubalgebra";
    case Errc::NonInvertibleFamily: return "NonInvertibleFamily";
    case Errc::NonConvergent: return "NonConvergent";
    case Errc::NotStabilized: return "NotStabilized";
    case Errc::NoWitnessNeeded: return "NoWitnessNeeded";
    case Errc::NotBlockConstant: return "NotBlockConstant";
    case Errc::RootOutOfDomain: return "RootOutOfDomain";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::DegenerateParameter: return "DegenerateParameter";
    case Errc::ParseError: return "ParseError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

long valuation_of(const mpz_class& n, long p) {
  if (n == 0) return kInfinity;
  mpz_class rest;
  mpz_class pz = p;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t()));
}

long valuation_of(const mpq_class& q, long p) {
  if (q == 0) return kInfinity;
  return valuation_of(q.get_num(), p) - valuation_of(q.get_den(), p);
}

PrimeContext::PrimeContext(long p, int precision) : p_(p), pz_(p), precision_(precision) {
  const int cached = 4 * precision + 16;
  powers_.reserve(cached + 1);
  mpz_class acc = 1;
  for (int i = 0; i <= cached; ++i) {
    powers_.push_back(acc);
    acc *= pz_;
  }
}

Context PrimeContext::make(long p, int precision) {
  if (!is_prime(p)) throw Error(Errc::InvalidArgument, "modulus " + std::to_string(p) + " is not prime");
  if (precision < 4) throw Error(Errc::InvalidArgument, "precision must be at least 4");
  return Context(new PrimeContext(p, precision));
}

mpz_class PrimeContext::power(long k) const {
  if (k < 0) throw Error(Errc::InvalidArgument, "negative exponent in power()");
  if (k < static_cast<long>(powers_.size())) return powers_[k];
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), pz_.get_mpz_t(), static_cast<unsigned long>(k));
  return r;
}

namespace {

mpz_class mod_positive(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

mpz_class invert_mod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw Error(Errc::DivisionByZero, "non-invertible residue");
  return r;
}

// Strips p from numerator/denominator; returns unit residue mod p^digits.
mpz_class rational_unit_mod(const mpq_class& q, const PrimeContext& ctx, long digits) {
  mpz_class num, den;
  mpz_remove(num.get_mpz_t(), q.get_num_mpz_t(), ctx.prime_z().get_mpz_t());
  mpz_remove(den.get_mpz_t(), q.get_den_mpz_t(), ctx.prime_z().get_mpz_t());
  const mpz_class m = ctx.power(digits);
  return mod_positive(num * invert_mod(den, m), m);
}

}  // namespace

const PrimeContext& PadicNumber::ctx() const {
  if (!ctx_) throw Error(Errc::InvalidArgument, "p-adic value without a prime context");
  return *ctx_;
}

PadicNumber PadicNumber::zero(const Context& ctx) {
  PadicNumber z;
  z.ctx_ = ctx;
  return z;
}

PadicNumber PadicNumber::one(const Context& ctx) { return from_int(ctx, 1); }

PadicNumber PadicNumber::from_int(const Context& ctx, long value) {
  return from_rational(ctx, mpq_class(value));
}

PadicNumber PadicNumber::from_rational(const Context& ctx, const mpq_class& q_in) {
  mpq_class q = q_in;
  q.canonicalize();
  PadicNumber r;
  r.ctx_ = ctx;
  if (q == 0) return r;
  r.kind_ = Kind::Exact;
  r.exact_ = q;
  r.val_ = valuation_of(q, ctx->prime());
  r.digits_ = ctx->precision();
  r.unit_ = rational_unit_mod(q, *ctx, r.digits_);
  return r;
}

PadicNumber PadicNumber::approx(const Context& ctx, long v, const mpz_class& unit, long digits) {
  if (digits < 1) return big_oh(ctx, v);
  digits = std::min<long>(digits, ctx->precision());
  PadicNumber r;
  r.ctx_ = ctx;
  r.kind_ = Kind::Approx;
  r.val_ = v;
  r.digits_ = digits;
  r.unit_ = mod_positive(unit, ctx->power(digits));
  if (r.unit_ % ctx->prime_z() == 0) throw Error(Errc::InvalidArgument, "unit part divisible by p");
  r.abs_ = v + digits;
  return r;
}

PadicNumber PadicNumber::big_oh(const Context& ctx, long absolute_precision) {
  PadicNumber r;
  r.ctx_ = ctx;
  r.kind_ = Kind::BigOh;
  r.abs_ = absolute_precision;
  r.val_ = kInfinity;
  return r;
}

PadicNumber PadicNumber::rounded(const Context& ctx, const mpq_class& q, long abs_prec) {
  if (q == 0) return big_oh(ctx, abs_prec);
  const long v = valuation_of(q, ctx->prime());
  if (v >= abs_prec) return big_oh(ctx, abs_prec);
  const long digits = std::min<long>(abs_prec - v, ctx->precision());
  return approx(ctx, v, rational_unit_mod(q, *ctx, digits), digits);
}

long PadicNumber::valuation() const {
  if (kind_ == Kind::BigOh)
    throw Error(Errc::PrecisionExhausted, "valuation of " + to_string() + " is not certified");
  return val_;
}

long PadicNumber::valuation_lower_bound() const { return kind_ == Kind::BigOh ? abs_ : val_; }

long PadicNumber::certified_digits() const {
  switch (kind_) {
    case Kind::Zero: return kInfinity;
    case Kind::Exact: return ctx().precision();
    case Kind::Approx: return digits_;
    case Kind::BigOh: return 0;
  }
  return 0;
}

long PadicNumber::absolute_precision() const {
  return (kind_ == Kind::Approx || kind_ == Kind::BigOh) ? abs_ : kInfinity;
}

const mpq_class& PadicNumber::exact_value() const {
  static const mpq_class zero_q(0);
  if (kind_ == Kind::Zero) return zero_q;
  if (kind_ != Kind::Exact) throw Error(Errc::PrecisionExhausted, "value " + to_string() + " is not exact");
  return exact_;
}

mpz_class PadicNumber::unit_mod(long digits) const {
  if (kind_ == Kind::Zero || kind_ == Kind::BigOh)
    throw Error(Errc::PrecisionExhausted, "no unit part for " + to_string());
  if (digits <= 0) return 0;
  if (kind_ == Kind::Exact) {
    if (digits <= digits_) return mod_positive(unit_, ctx().power(digits));
    return rational_unit_mod(exact_, ctx(), digits);
  }
  if (digits > digits_)
    throw Error(Errc::PrecisionExhausted, "requested " + std::to_string(digits) + " digits of " + to_string());
  return mod_positive(unit_, ctx().power(digits));
}

bool PadicNumber::is_zero() const {
  if (kind_ == Kind::BigOh) throw Error(Errc::PrecisionExhausted, "zero test on " + to_string());
  return kind_ == Kind::Zero;
}

bool PadicNumber::equals_to_precision(const PadicNumber& other) const {
  const PadicNumber d = *this - other;
  return d.kind_ == Kind::Zero || d.kind_ == Kind::BigOh;
}

long PadicNumber::agreement(const PadicNumber& other) const {
  const PadicNumber d = *this - other;
  if (d.kind_ == Kind::Zero) return kInfinity;
  if (d.kind_ == Kind::BigOh) return d.abs_;
  return d.val_;
}

PadicNumber PadicNumber::operator-() const {
  PadicNumber r = *this;
  if (kind_ == Kind::Exact) return from_rational(ctx_, -exact_);
  if (kind_ == Kind::Approx) r.unit_ = ctx().power(digits_) - unit_;
  return r;
}

PadicNumber PadicNumber::inv() const {
  switch (kind_) {
    case Kind::Zero: throw Error(Errc::DivisionByZero, "inverse of exact zero");
    case Kind::BigOh: throw Error(Errc::PrecisionExhausted, "inverse of " + to_string());
    case Kind::Exact: return from_rational(ctx_, 1 / exact_);
    case Kind::Approx: return approx(ctx_, -val_, invert_mod(unit_, ctx().power(digits_)), digits_);
  }
  return *this;
}

PadicNumber PadicNumber::pow(long e) const {
  if (e < 0) return inv().pow(-e);
  if (kind_ == Kind::Exact) {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), exact_.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(den.get_mpz_t(), exact_.get_den_mpz_t(), static_cast<unsigned long>(e));
    return from_rational(ctx_, mpq_class(num, den));
  }
  PadicNumber result = one(ctx_);
  PadicNumber base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

PadicNumber PadicNumber::with_absolute_precision(long abs_prec) const {
  switch (kind_) {
    case Kind::Zero:
    case Kind::Exact: return rounded(ctx_, exact_value(), abs_prec);
    case Kind::BigOh: return big_oh(ctx_, std::min(abs_, abs_prec));
    case Kind::Approx:
      if (val_ >= abs_prec) return big_oh(ctx_, abs_prec);
      return approx(ctx_, val_, unit_, std::min(digits_, abs_prec - val_));
  }
  return *this;
}

PadicNumber operator+(const PadicNumber& a, const PadicNumber& b) {
  using Kind = PadicNumber::Kind;
  if (a.kind_ == Kind::Zero) return b.ctx_ ? b : a;
  if (b.kind_ == Kind::Zero) return a;
  const Context& ctx = a.ctx_;
  if (a.kind_ == Kind::Exact && b.kind_ == Kind::Exact) return PadicNumber::from_rational(ctx, a.exact_ + b.exact_);

  const long A = std::min(a.absolute_precision(), b.absolute_precision());
  const PadicNumber* ops[2] = {&a, &b};
  long vmin = kInfinity;
  for (const PadicNumber* x : ops)
    if (x->kind_ != Kind::BigOh && x->val_ < A) vmin = std::min(vmin, x->val_);
  if (vmin == kInfinity) return PadicNumber::big_oh(ctx, A);

  const mpz_class mod = ctx->power(A - vmin);
  mpz_class sum = 0;
  for (const PadicNumber* x : ops) {
    if (x->kind_ == Kind::BigOh || x->val_ >= A) continue;
    sum += x->unit_mod(A - x->val_) * ctx->power(x->val_ - vmin);
  }
  sum = mod_positive(sum, mod);
  if (sum == 0) return PadicNumber::big_oh(ctx, A);
  const long w = valuation_of(sum, ctx->prime());
  const long v = vmin + w;
  return PadicNumber::approx(ctx, v, sum / ctx->power(w), A - v);
}

PadicNumber operator-(const PadicNumber& a, const PadicNumber& b) { return a + (-b); }

PadicNumber operator*(const PadicNumber& a, const PadicNumber& b) {
  using Kind = PadicNumber::Kind;
  const Context& ctx = a.ctx_ ? a.ctx_ : b.ctx_;
  if (a.kind_ == Kind::Zero || b.kind_ == Kind::Zero) return PadicNumber::zero(ctx);
  if (a.kind_ == Kind::Exact && b.kind_ == Kind::Exact) return PadicNumber::from_rational(ctx, a.exact_ * b.exact_);
  if (a.kind_ == Kind::BigOh || b.kind_ == Kind::BigOh)
    return PadicNumber::big_oh(ctx, a.valuation_lower_bound() + b.valuation_lower_bound());
  const long digits = std::min(a.certified_digits(), b.certified_digits());
  return PadicNumber::approx(ctx, a.val_ + b.val_, a.unit_mod(digits) * b.unit_mod(digits), digits);
}

PadicNumber operator/(const PadicNumber& a, const PadicNumber& b) { return a * b.inv(); }

std::string PadicNumber::to_string() const {
  switch (kind_) {
    case Kind::Zero: return "0";
    case Kind::Exact: return exact_.get_str();
    case Kind::Approx: {
      std::ostringstream os;
      os << "p^" << val_ << "*" << unit_.get_str() << "+O(p^" << abs_ << ")";
      return os.str();
    }
    case Kind::BigOh: return "O(p^" + std::to_string(abs_) + ")";
  }
  return "?";
}

std::ostream& operator<<(std::ostream& os, const PadicNumber& x) { return os << x.to_string(); }

namespace {

[[noreturn]] void parse_fail(const std::string& text, const std::string& why) {
  throw Error(Errc::ParseError, "cannot read p-adic literal '" + text + "': " + why);
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

long parse_long(const std::string& text, const std::string& s) {
  std::string body = s;
  bool neg = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    neg = body[0] == '-';
    body = body.substr(1);
  }
  if (!all_digits(body) || body.size() > 15) parse_fail(text, "bad exponent '" + s + "'");
  const long v = std::stol(body);
  return neg ? -v : v;
}

mpz_class parse_integer(const std::string& text, const std::string& s) {
  std::string body = s;
  bool neg = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    neg = body[0] == '-';
    body = body.substr(1);
  }
  if (!all_digits(body)) parse_fail(text, "bad integer '" + s + "'");
  mpz_class z(body, 10);
  return neg ? mpz_class(-z) : z;
}

// Accepts "p" or the decimal prime itself as the base of a power.
bool is_prime_base(const std::string& s, long p) { return s == "p" || s == std::to_string(p); }

// Parses "p^a" (or "<prime>^a") returning a.
long parse_power(const std::string& text, const std::string& s, long p) {
  const auto caret = s.find('^');
  if (caret == std::string::npos) {
    if (is_prime_base(s, p)) return 1;
    parse_fail(text, "expected a power of p, got '" + s + "'");
  }
  if (!is_prime_base(s.substr(0, caret), p)) parse_fail(text, "base must be p in '" + s + "'");
  return parse_long(text, s.substr(caret + 1));
}

}  // namespace

PadicNumber PadicNumber::parse(const Context& ctx, const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) parse_fail(text, "empty");
  const long p = ctx->prime();

  std::optional<long> abs_prec;
  const auto opos = s.find("O(");
  if (opos != std::string::npos) {
    if (s.back() != ')') parse_fail(text, "unterminated O(...)");
    abs_prec = parse_power(text, s.substr(opos + 2, s.size() - opos - 3), p);
    if (opos == 0) return big_oh(ctx, *abs_prec);
    if (s[opos - 1] != '+') parse_fail(text, "O(...) must follow '+'");
    s = s.substr(0, opos - 1);
  }

  mpq_class value;
  const bool power_form = s.find('^') != std::string::npos || s[0] == 'p' || s.rfind("-p", 0) == 0;
  if (power_form) {
    bool neg = false;
    std::string body = s;
    if (body[0] == '-') {
      neg = true;
      body = body.substr(1);
    }
    const auto star = body.find('*');
    const long v = parse_power(text, body.substr(0, star), p);
    mpz_class u = star == std::string::npos ? mpz_class(1) : parse_integer(text, body.substr(star + 1));
    if (neg) u = -u;
    if (v >= 0)
      value = mpq_class(u * ctx->power(v));
    else
      value = mpq_class(u, ctx->power(-v));
  } else {
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
      value = mpq_class(parse_integer(text, s));
    } else {
      const mpz_class den = parse_integer(text, s.substr(slash + 1));
      if (den == 0) parse_fail(text, "zero denominator");
      value = mpq_class(parse_integer(text, s.substr(0, slash)), den);
    }
  }
  value.canonicalize();
  if (abs_prec) return rounded(ctx, value, *abs_prec);
  return from_rational(ctx, value);
}

}  // namespace chabauty
