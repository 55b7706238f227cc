#include "chabauty/tree.hpp"

#include <sstream>

#include "chabauty/plinalg.hpp"

namespace chabauty {

namespace {

mpq_class p_power(const Context& ctx, long e) {
  if (e >= 0) return mpq_class(ctx->power(e));
  return mpq_class(mpz_class(1), ctx->power(-e));
}

// Valuation for pivot comparison: exact zero is infinite, O(p^a) is unusable.
long pivot_valuation(const PadicNumber& x) {
  if (x.is_exact_zero()) return kInfinity;
  if (x.is_big_oh()) return kInfinity - 1;
  return x.valuation();
}

// Canonical representative of x modulo p^c: the digits of x below p^c.
mpq_class reduce_mod(const PadicNumber& x, long c) {
  if (x.is_exact_zero()) return 0;
  if (x.is_big_oh()) {
    if (x.absolute_precision() >= c) return 0;
    throw Error(Errc::PrecisionExhausted, "lattice entry O(p^" + std::to_string(x.absolute_precision()) +
                                              ") does not determine a vertex at depth " + std::to_string(c));
  }
  const long v = x.valuation();
  if (v >= c) return 0;
  if (x.certified_digits() < c - v)
    throw Error(Errc::PrecisionExhausted, "too few digits to place the vertex");
  mpq_class rep(x.unit_mod(c - v));
  rep *= p_power(x.context(), v);
  rep.canonicalize();
  return rep;
}

bool integral(const PadicNumber& x) {
  if (x.is_exact_zero()) return true;
  if (x.is_big_oh()) {
    if (x.absolute_precision() >= 0) return true;
    throw Error(Errc::PrecisionExhausted, "entry known only to O(p^" + std::to_string(x.absolute_precision()) + ")");
  }
  return x.valuation() >= 0;
}

PMatrix inverse2(const PMatrix& m) {
  const PadicNumber d = m.det();
  if (!d.is_certified_nonzero()) throw Error(Errc::Singular, "singular lattice basis");
  const PadicNumber di = d.inv();
  PMatrix r(m.context(), 2);
  r(0, 0) = m(1, 1) * di;
  r(0, 1) = -m(0, 1) * di;
  r(1, 0) = -m(1, 0) * di;
  r(1, 1) = m(0, 0) * di;
  return r;
}

void require_2x2(const PMatrix& g) {
  if (g.size() != 2) throw Error(Errc::InvalidArgument, "tree operations need a 2x2 matrix");
}

std::string bits(const std::vector<bool>& v) {
  std::string s;
  for (bool b : v) s += b ? '1' : '0';
  return s;
}

}  // namespace

// ------------------------------------------------------------ LatticeVertex

LatticeVertex LatticeVertex::base(const Context& ctx) { return ray_point(ctx, 0); }

LatticeVertex LatticeVertex::ray_point(const Context& ctx, long l) {
  LatticeVertex v;
  v.ctx_ = ctx;
  v.c_ = l;
  return v;
}

LatticeVertex LatticeVertex::from_basis(const PMatrix& m) {
  require_2x2(m);
  const long v0 = pivot_valuation(m(0, 0)), v1 = pivot_valuation(m(0, 1));
  if (std::min(v0, v1) >= kInfinity - 1)
    throw Error(Errc::PrecisionExhausted, "first row of the lattice basis is not certified nonzero");
  const int k = v0 <= v1 ? 0 : 1;
  const PadicNumber& other = m(0, 1 - k);
  if (other.is_big_oh() && other.absolute_precision() < std::min(v0, v1))
    throw Error(Errc::PrecisionExhausted, "pivot of the lattice basis is ambiguous to precision");
  const PadicNumber det = m.det();
  if (!det.is_certified_nonzero()) throw Error(Errc::Singular, "lattice basis is singular to precision");
  LatticeVertex out;
  out.ctx_ = m.context();
  out.c_ = det.valuation() - 2 * m(0, k).valuation();
  out.b_ = reduce_mod(m(1, k) / m(0, k), out.c_);
  return out;
}

PMatrix LatticeVertex::basis() const {
  return PMatrix::from_rationals(ctx_, {{mpq_class(1), mpq_class(0)}, {b_, p_power(ctx_, c_)}});
}

std::vector<LatticeVertex> LatticeVertex::neighbors() const {
  const long p = ctx_->prime();
  const PMatrix m = basis();
  std::vector<LatticeVertex> out;
  for (long j = 0; j < p; ++j)
    out.push_back(from_basis(m * PMatrix::from_rationals(ctx_, {{1, 0}, {j, p}})));
  out.push_back(from_basis(m * PMatrix::from_rationals(ctx_, {{p, 0}, {0, 1}})));
  return out;
}

std::string LatticeVertex::to_string() const {
  std::ostringstream os;
  os << "[p^0, " << b_.get_str() << "; 0, p^" << c_ << "]";
  return os.str();
}

// ---------------------------------------------------------------- geometry

LatticeVertex act(const PMatrix& g, const LatticeVertex& v) {
  require_2x2(g);
  return LatticeVertex::from_basis(g * v.basis());
}

long distance(const LatticeVertex& v, const LatticeVertex& w) {
  const long p = v.context()->prime();
  // M_v^-1 M_w = [[1, 0], [(b_w - b_v) p^-c_v, p^(c_w - c_v)]]
  const long det_v = w.c() - v.c();
  long min_v = std::min(0L, det_v);
  const mpq_class diff = w.b() - v.b();
  if (diff != 0) min_v = std::min(min_v, valuation_of(diff, p) - v.c());
  return det_v - 2 * min_v;
}

bool stabilizer_membership(const PMatrix& g, const LatticeVertex& v) {
  require_2x2(g);
  const PMatrix m = v.basis();
  const PMatrix conj = inverse2(m) * g * m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!integral(conj(i, j))) return false;
  const PadicNumber d = conj.det();
  return d.is_certified_nonzero() && d.valuation() == 0;
}

std::vector<LatticeVertex> ball(const LatticeVertex& center, long radius) {
  std::vector<LatticeVertex> out{center};
  std::vector<std::pair<size_t, size_t>> frontier{{0, SIZE_MAX}};  // (vertex, parent)
  for (long r = 0; r < radius; ++r) {
    std::vector<std::pair<size_t, size_t>> next;
    for (const auto& [idx, parent] : frontier) {
      for (auto& nb : out[idx].neighbors()) {
        if (parent != SIZE_MAX && nb == out[parent]) continue;
        out.push_back(std::move(nb));
        next.emplace_back(out.size() - 1, idx);
      }
    }
    frontier = std::move(next);
  }
  return out;
}

long translation_length(const PMatrix& g) {
  require_2x2(g);
  mpq_class widest = 0;
  for (const auto& s : newton_slopes(g).slopes()) widest = std::max<mpq_class>(widest, abs(s));
  const mpq_class len = 2 * widest;
  if (len.get_den() != 1) throw Error(Errc::InvalidArgument, "slopes of a determinant-one matrix must be half-integral");
  return len.get_num().get_si();
}

long translation_length_by_ball(const PMatrix& g, long radius) {
  require_2x2(g);
  const LatticeVertex o = LatticeVertex::base(g.context());
  if (radius < 0) radius = (distance(o, act(g, o)) + 1) / 2;
  long best = kInfinity;
  for (const auto& v : ball(o, radius)) best = std::min(best, distance(v, act(g, v)));
  return best;
}

// ------------------------------------------------------------ ray checks

std::string ParahoricReport::to_string() const {
  std::ostringstream os;
  os << "ray depth " << depth << ", " << rows.size() << " unipotents\n";
  for (const auto& r : rows)
    os << "  u12=" << r.element(0, 1).to_string() << " expected=" << r.expected_first
       << " observed=" << r.observed_first << " fixes=" << bits(r.fixes) << (r.ok ? "" : "  FAIL") << "\n";
  os << "deep fixers " << deep_fixers << ", triangular to depth " << deep_fixers_triangular << "\n";
  for (const auto& v : violations) os << "violation: " << v << "\n";
  os << (passed ? "passed" : "failed") << "\n";
  return os.str();
}

ParahoricReport parahoric_limit_check(const std::vector<PMatrix>& unipotents, long depth) {
  if (depth < 1) throw Error(Errc::InvalidArgument, "ray depth must be at least 1");
  ParahoricReport rep;
  rep.depth = depth;
  std::vector<PMatrix> candidates;

  auto fix_table = [&](const PMatrix& g) {
    std::vector<bool> f;
    for (long l = 0; l <= depth; ++l) f.push_back(stabilizer_membership(g, LatticeVertex::ray_point(g.context(), l)));
    return f;
  };

  for (size_t i = 0; i < unipotents.size(); ++i) {
    const PMatrix& u = unipotents[i];
    require_2x2(u);
    const PadicNumber one = PadicNumber::one(u.context());
    if (!u.is_upper_triangular() || u(0, 0) != one || u(1, 1) != one)
      throw Error(Errc::InvalidArgument, "sample " + std::to_string(i) + " is not upper unipotent");
    RayRow row;
    row.element = u;
    const PadicNumber& x = u(0, 1);
    row.expected_first = x.is_exact_zero() ? 0 : std::max(0L, -x.valuation());
    row.fixes = fix_table(u);
    for (long l = depth; l >= 0 && row.fixes[l]; --l) row.observed_first = l;
    const long want = row.expected_first > depth ? -1 : row.expected_first;
    row.ok = row.observed_first == want;
    if (!row.ok)
      rep.violations.push_back("sample " + std::to_string(i) + ": first fixed ray point " +
                               std::to_string(row.observed_first) + ", expected " + std::to_string(want));
    if (!x.is_exact_zero() && x.valuation() < depth) {
      const PMatrix ut = u.transpose();
      row.transpose_escapes = !stabilizer_membership(ut, LatticeVertex::ray_point(u.context(), depth));
      if (!row.transpose_escapes)
        rep.violations.push_back("sample " + std::to_string(i) + ": transpose fixes ray point " +
                                 std::to_string(depth));
      candidates.push_back(ut);
      if (i + 1 < unipotents.size()) candidates.push_back(unipotents[i + 1] * ut);
    }
    candidates.push_back(u);
    rep.rows.push_back(std::move(row));
  }

  for (const auto& g : candidates) {
    const auto f = fix_table(g);
    bool deep = true;
    for (long l = depth / 2; l <= depth; ++l) deep = deep && f[l];
    if (!deep) continue;
    ++rep.deep_fixers;
    const PadicNumber& c = g(1, 0);
    const bool tri = c.is_exact_zero() || (c.is_big_oh() ? c.absolute_precision() >= depth : c.valuation() >= depth);
    if (tri)
      ++rep.deep_fixers_triangular;
    else
      rep.violations.push_back("element fixing the deep ray has lower-left entry " + c.to_string());
  }
  rep.passed = rep.violations.empty();
  return rep;
}

StabilizationReport stabilization_check(const Context& ctx, const mpq_class& a, const mpq_class& b,
                                        const mpq_class& c, long terms) {
  if (a == 0) throw Error(Errc::InvalidArgument, "limit needs a nonzero (1,1) entry");
  if (terms < 2) throw Error(Errc::InvalidArgument, "need at least two terms");
  StabilizationReport rep;
  rep.limit = PMatrix::from_rationals(ctx, {{a, b}, {0, 1 / a}});
  rep.limit_kind = classify_isometry(rep.limit);
  rep.limit_length = translation_length(rep.limit);
  for (long l = 0; l < terms; ++l) {
    const mpq_class low = c * p_power(ctx, l);
    const mpq_class d = (1 + b * low) / a;
    const PMatrix g = PMatrix::from_rationals(ctx, {{a, b}, {low, d}});
    rep.kinds.push_back(classify_isometry(g));
    rep.lengths.push_back(translation_length(g));
  }
  for (long l = terms - 1; l >= 0; --l) {
    if (rep.kinds[l] != rep.limit_kind || rep.lengths[l] != rep.limit_length) break;
    rep.onset = l;
  }
  rep.passed = rep.onset >= 0 && rep.onset <= terms / 2;
  return rep;
}

}  // namespace chabauty
