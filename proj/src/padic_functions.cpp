#include "chabauty/padic_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace chabauty {

namespace {

mpz_class mod_positive(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

mpz_class powmod(const mpz_class& b, long e, const mpz_class& m) {
  mpz_class r;
  mpz_powm_ui(r.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(e), m.get_mpz_t());
  return r;
}

mpz_class invmod(const mpz_class& a, const mpz_class& m) {
  mpz_class r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
    throw Error(Errc::DivisionByZero, "non-invertible residue");
  return r;
}

long vp_long(long n, long p) {
  long v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

long log_domain(long p) { return p == 2 ? 2 : 1; }

// Integer residue S (mod p^A) turned into a p-adic value with absolute precision A.
PadicNumber from_residue(const Context& ctx, const mpz_class& s, long A) {
  return PadicNumber::rounded(ctx, mpq_class(s), A);
}

}  // namespace

PadicNumber padic_inv(const PadicNumber& x) { return x.inv(); }

PadicNumber padic_log(const PadicNumber& x) {
  const Context& ctx = x.context();
  if (x.is_big_oh()) throw Error(Errc::PrecisionExhausted, "log of " + x.to_string());
  if (x.is_exact_zero()) throw Error(Errc::OutOfDomain, "log of zero");
  const long p = ctx->prime();
  const PadicNumber z = x - PadicNumber::one(ctx);
  if (z.is_exact_zero()) return PadicNumber::zero(ctx);
  const long dom = log_domain(p);
  if (z.is_big_oh()) {
    if (z.absolute_precision() < dom) throw Error(Errc::PrecisionExhausted, "log argument too coarse");
    return z;
  }
  const long vz = z.valuation();
  if (vz < dom) throw Error(Errc::OutOfDomain, "log needs v(x-1) >= " + std::to_string(dom));

  const long A = std::min(z.absolute_precision(), vz + ctx->precision());
  const mpz_class mod = ctx->power(A);
  const mpz_class zu = z.unit_mod(A - vz);
  mpz_class sum = 0;
  for (long i = 1;; ++i) {
    const long lower = i * vz - static_cast<long>(std::floor(std::log2(static_cast<double>(i))));
    if (lower >= A) break;
    const long vi = vp_long(i, p);
    const long e = i * vz - vi;
    if (e >= A) continue;
    long cofactor = i;
    for (long k = 0; k < vi; ++k) cofactor /= p;
    mpz_class term = ctx->power(e) * powmod(zu, i, mod) * invmod(mpz_class(cofactor), mod);
    if (i % 2 == 0) term = -term;
    sum += term;
  }
  return from_residue(ctx, mod_positive(sum, mod), A);
}

PadicNumber padic_exp(const PadicNumber& y) {
  const Context& ctx = y.context();
  const long p = ctx->prime();
  const long N = ctx->precision();
  const long dom = log_domain(p);
  if (y.is_exact_zero()) return PadicNumber::one(ctx);
  if (y.is_big_oh()) {
    if (y.absolute_precision() < dom) throw Error(Errc::PrecisionExhausted, "exp argument too coarse");
    return PadicNumber::approx(ctx, 0, 1, std::min(y.absolute_precision(), N));
  }
  const long vy = y.valuation();
  if (vy < dom) throw Error(Errc::OutOfDomain, "exp needs v(x) >= " + std::to_string(dom));
  const long A = std::min(y.absolute_precision(), N);
  if (vy >= A) return PadicNumber::approx(ctx, 0, 1, A);

  const mpz_class mod = ctx->power(A);
  const mpz_class yu = y.unit_mod(A - vy);
  mpz_class sum = 1;
  mpz_class fact_unit = 1;
  long fact_val = 0;
  for (long i = 1;; ++i) {
    // v_p(i!) <= (i-1)/(p-1)
    if (i * vy - (i - 1) / (p - 1) >= A) break;
    long c = i;
    while (c % p == 0) {
      c /= p;
      ++fact_val;
    }
    fact_unit = mod_positive(fact_unit * c, mod);
    const long e = i * vy - fact_val;
    if (e >= A) continue;
    sum += ctx->power(e) * powmod(yu, i, mod) * invmod(fact_unit, mod);
  }
  return from_residue(ctx, mod_positive(sum, mod), A);
}

PadicNumber nth_root(const PadicNumber& x, long m) {
  if (m < 1) throw Error(Errc::InvalidArgument, "root index must be positive");
  const Context& ctx = x.context();
  const long p = ctx->prime();
  const PadicNumber z = x - PadicNumber::one(ctx);
  if (z.is_exact_zero()) return x;
  const long need = log_domain(p) + vp_long(m, p);
  if (z.valuation_lower_bound() < need || (z.is_big_oh() && z.absolute_precision() < need))
    throw Error(Errc::OutOfDomain, "nth_root needs v(x-1) >= " + std::to_string(need));
  return padic_exp(padic_log(x) / PadicNumber::from_int(ctx, m));
}

std::optional<PadicNumber> kth_root(const PadicNumber& x, long k) {
  if (k < 1) throw Error(Errc::InvalidArgument, "root index must be positive");
  const Context& ctx = x.context();
  if (x.is_exact_zero()) return x;
  if (x.is_big_oh()) throw Error(Errc::PrecisionExhausted, "root of " + x.to_string());
  if (k == 1) return x;
  const long v = x.valuation();
  if (v % k != 0) return std::nullopt;

  if (x.kind() == PadicNumber::Kind::Exact) {
    const mpq_class& q = x.exact_value();
    const bool negative = q < 0;
    if (!(negative && k % 2 == 0)) {
      mpz_class num = abs(q.get_num()), den = q.get_den(), rn, rd;
      if (mpz_root(rn.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(k)) &&
          mpz_root(rd.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(k))) {
        mpq_class r(negative ? mpz_class(-rn) : rn, rd);
        return PadicNumber::from_rational(ctx, r);
      }
    }
  }

  const long p = ctx->prime();
  const long vk = vp_long(k, p);
  const long M = 2 * vk + 1;
  const long have = x.kind() == PadicNumber::Kind::Exact ? ctx->precision() + vk : x.certified_digits();
  if (have < M) throw Error(Errc::PrecisionExhausted, "unit known to fewer than " + std::to_string(M) + " digits");
  const long target = std::min<long>(have - vk, ctx->precision());
  const mpz_class modM = ctx->power(M);
  if (modM > mpz_class(1L << 26)) throw Error(Errc::InvalidArgument, "residue search space too large");
  const mpz_class uM = x.unit_mod(M);

  std::optional<mpz_class> start;
  for (mpz_class y = 1; y < modM; ++y) {
    if (y % p == 0) continue;
    if (powmod(y, k, modM) == uM) {
      start = y;
      break;
    }
  }
  if (!start) return std::nullopt;

  const mpz_class work = ctx->power(target + vk);
  const mpz_class u = x.unit_mod(target + vk);
  const mpz_class pvk = ctx->power(vk);
  const mpz_class k_unit = mpz_class(k) / pvk;
  mpz_class y = *start;
  for (int iter = 0; iter < 256; ++iter) {
    const mpz_class f = mod_positive(powmod(y, k, work) - u, work);
    if (f == 0) break;
    const mpz_class deriv = mod_positive(k_unit * powmod(y, k - 1, work), work);
    y = mod_positive(y - (f / pvk) * invmod(deriv, work), work);
  }
  if (mod_positive(powmod(y, k, work) - u, work) != 0)
    throw Error(Errc::NonConvergent, "Hensel lifting did not converge");
  return PadicNumber::approx(ctx, v / k, y, target);
}

long power_class_depth(long p, long k) { return 2 * vp_long(k, p) + 1; }

namespace {

// Residues mod p^M: k-th power subgroup and minimal coset representatives.
struct UnitClassTable {
  long modulus = 0;
  std::vector<long> kth_powers;
  std::vector<char> is_power;

  UnitClassTable(long p, long k) {
    const long M = power_class_depth(p, k);
    mpz_class m = 1;
    for (long i = 0; i < M; ++i) m *= p;
    if (m > mpz_class(1L << 24)) throw Error(Errc::InvalidArgument, "power-class table too large");
    modulus = m.get_si();
    is_power.assign(modulus, 0);
    for (long y = 1; y < modulus; ++y) {
      if (y % p == 0) continue;
      const long r = powmod(mpz_class(y), k, m).get_si();
      if (!is_power[r]) {
        is_power[r] = 1;
        kth_powers.push_back(r);
      }
    }
  }

  long unit_count(long p) const { return modulus - modulus / p; }

  long representative(long u) const {
    long best = modulus;
    for (long h : kth_powers) best = std::min(best, static_cast<long>((static_cast<__int128>(u) * h) % modulus));
    return best;
  }
};

PowerClassLabel make_label(const Context& ctx, long k, long a, long unit_rep) {
  PowerClassLabel label;
  label.exponent = k;
  label.valuation_class = a;
  label.unit_rep = unit_rep;
  label.representative = PadicNumber::from_rational(ctx, mpq_class(ctx->power(a) * unit_rep));
  return label;
}

}  // namespace

std::string PowerClassLabel::to_string() const {
  return "p^" + std::to_string(valuation_class) + "*" + unit_rep.get_str();
}

PowerClassDecision power_class_decide(const PadicNumber& x, long k) {
  if (k < 2) throw Error(Errc::InvalidArgument, "power class exponent must be >= 2");
  if (x.is_exact_zero()) throw Error(Errc::InvalidArgument, "power class of zero");
  if (x.is_big_oh()) throw Error(Errc::PrecisionExhausted, "power class of " + x.to_string());
  const Context& ctx = x.context();
  const long p = ctx->prime();
  const long M = power_class_depth(p, k);
  if (ctx->precision() < M)
    throw Error(Errc::PrecisionExhausted, "precision below power-class depth " + std::to_string(M));
  if (x.kind() == PadicNumber::Kind::Approx && x.certified_digits() < M)
    throw Error(Errc::PrecisionExhausted, "unit of " + x.to_string() + " too coarse for power class");
  const UnitClassTable table(p, k);
  const long u = x.unit_mod(M).get_si();
  const long v = x.valuation();
  const long a = ((v % k) + k) % k;
  PowerClassDecision out;
  out.is_kth_power = (a == 0) && table.is_power[u];
  out.label = make_label(ctx, k, a, table.representative(u));
  return out;
}

long count_power_classes(long p, long k) {
  if (!is_prime(p)) throw Error(Errc::InvalidArgument, "p must be prime");
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be positive");
  if (k == 1) return 1;
  const UnitClassTable table(p, k);
  return k * (table.unit_count(p) / static_cast<long>(table.kth_powers.size()));
}

std::vector<PowerClassLabel> power_class_transversal(const Context& ctx, long k) {
  const long p = ctx->prime();
  const UnitClassTable table(p, k);
  std::set<long> reps;
  for (long u = 1; u < table.modulus; ++u)
    if (u % p != 0) reps.insert(table.representative(u));
  std::vector<PowerClassLabel> out;
  for (long a = 0; a < k; ++a)
    for (long r : reps) out.push_back(make_label(ctx, k, a, r));
  return out;
}

std::vector<PadicNumber> roots_of_unity(const Context& ctx, long n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "n must be positive");
  const long p = ctx->prime();
  std::vector<PadicNumber> out{PadicNumber::one(ctx)};
  if (p == 2) {
    if (n % 2 == 0) out.push_back(PadicNumber::from_int(ctx, -1));
    return out;
  }
  const long g = std::gcd(n, p - 1);
  const mpz_class mod = ctx->power(ctx->precision());
  for (long r = 2; r < p; ++r) {
    if (powmod(mpz_class(r), g, mpz_class(p)) != 1) continue;
    if (r == p - 1) {
      out.push_back(PadicNumber::from_int(ctx, -1));
      continue;
    }
    mpz_class y = r;
    for (int iter = 0; iter < 128; ++iter) {
      const mpz_class f = mod_positive(powmod(y, g, mod) - 1, mod);
      if (f == 0) break;
      y = mod_positive(y - f * invmod(mpz_class(g) * powmod(y, g - 1, mod), mod), mod);
    }
    out.push_back(PadicNumber::approx(ctx, 0, y, ctx->precision()));
  }
  return out;
}

}  // namespace chabauty
