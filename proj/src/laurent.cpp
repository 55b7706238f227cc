#include "chabauty/laurent.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "chabauty/detail/berkowitz.hpp"
#include "chabauty/group.hpp"

namespace chabauty {

// ---------------------------------------------------------------- LaurentPoly

void LaurentPoly::add_term(long degree, const PadicNumber& c) {
  if (c.is_exact_zero()) return;
  if (!ctx_) ctx_ = c.context();
  auto it = terms_.find(degree);
  if (it == terms_.end()) {
    terms_.emplace(degree, c);
    return;
  }
  it->second += c;
  if (it->second.is_exact_zero()) terms_.erase(it);
}

LaurentPoly LaurentPoly::constant(const PadicNumber& c) { return monomial(c, 0); }

LaurentPoly LaurentPoly::monomial(const PadicNumber& c, long degree) {
  LaurentPoly r(c.context());
  r.add_term(degree, c);
  return r;
}

LaurentPoly LaurentPoly::variable(const Context& ctx) { return monomial(PadicNumber::one(ctx), 1); }

bool LaurentPoly::is_exact() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second.is_exact(); });
}

long LaurentPoly::top_degree() const {
  if (terms_.empty()) throw Error(Errc::InvalidArgument, "degree of the zero Laurent polynomial");
  return terms_.rbegin()->first;
}

long LaurentPoly::bottom_degree() const {
  if (terms_.empty()) throw Error(Errc::InvalidArgument, "degree of the zero Laurent polynomial");
  return terms_.begin()->first;
}

PadicNumber LaurentPoly::coeff(long degree) const {
  auto it = terms_.find(degree);
  return it == terms_.end() ? PadicNumber::zero(ctx_) : it->second;
}

PadicNumber LaurentPoly::evaluate(const PadicNumber& s) const {
  PadicNumber acc = PadicNumber::zero(s.context());
  for (const auto& [d, c] : terms_) acc += c * s.pow(d);
  return acc;
}

PadicNumber LaurentPoly::evaluate_at_level(long m) const {
  const Context& ctx = ctx_;
  if (!ctx) throw Error(Errc::InvalidArgument, "evaluating a context-free zero polynomial");
  PadicNumber acc = PadicNumber::zero(ctx);
  for (const auto& [d, c] : terms_) {
    const long e = -m * d;
    const mpq_class scale = e >= 0 ? mpq_class(ctx->power(e)) : mpq_class(1, ctx->power(-e));
    acc += c * PadicNumber::from_rational(ctx, scale);
  }
  return acc;
}

LaurentPoly LaurentPoly::rescaled(const PadicNumber& c) const {
  LaurentPoly r(ctx_);
  for (const auto& [d, x] : terms_) r.add_term(d, x * c.pow(d));
  return r;
}

LaurentPoly LaurentPoly::shifted(long k) const {
  LaurentPoly r(ctx_);
  for (const auto& [d, x] : terms_) r.terms_.emplace(d + k, x);
  return r;
}

LaurentPoly LaurentPoly::divided_by_monomial(const LaurentPoly& m) const {
  if (!m.is_monomial()) throw Error(Errc::InvalidArgument, "divisor is not a monomial");
  const auto& [d0, c0] = *m.terms_.begin();
  const PadicNumber inv = c0.inv();
  LaurentPoly r(ctx_ ? ctx_ : m.ctx_);
  for (const auto& [d, x] : terms_) r.add_term(d - d0, x * inv);
  return r;
}

LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r = a;
  if (!r.ctx_) r.ctx_ = b.ctx_;
  for (const auto& [d, x] : b.terms_) r.add_term(d, x);
  return r;
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly r(ctx_);
  for (const auto& [d, x] : terms_) r.terms_.emplace(d, -x);
  return r;
}

LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + (-b); }

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
  LaurentPoly r(a.ctx_ ? a.ctx_ : b.ctx_);
  for (const auto& [da, xa] : a.terms_)
    for (const auto& [db, xb] : b.terms_) r.add_term(da + db, xa * xb);
  return r;
}

LaurentPoly operator*(const PadicNumber& c, const LaurentPoly& a) {
  LaurentPoly r(a.ctx_ ? a.ctx_ : c.context());
  for (const auto& [d, x] : a.terms_) r.add_term(d, c * x);
  return r;
}

std::string LaurentPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [d, c] = *it;
    std::string cs = c.to_string();
    bool negative = c.is_exact() && c.exact_value() < 0;
    if (negative) cs = (-c).to_string();
    if (!first) os << (negative ? " - " : " + ");
    else if (negative) os << "-";
    first = false;
    const bool unit_coeff = c.is_exact() && abs(c.exact_value()) == 1;
    if (d == 0) {
      os << cs;
    } else {
      if (!unit_coeff) os << (c.is_exact() ? cs : "(" + cs + ")") << "*";
      os << "s";
      if (d != 1) os << "^" << d;
    }
  }
  return os.str();
}

namespace {

// expr   = [ "-" ] term { ( "+" | "-" ) term }
// term   = factor { ( "*" | "/" ) factor }
// factor = integer | "s" [ "^" exponent ] | "p" [ "^" exponent ] | "(" expr ")"
class LaurentParser {
 public:
  LaurentParser(const Context& ctx, const std::string& text) : ctx_(ctx), text_(text) {}

  LaurentPoly parse() {
    LaurentPoly r = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(Errc::ParseError, "column " + std::to_string(pos_ + 1) + " of '" + text_ + "': " + why);
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  mpz_class integer() {
    skip();
    const size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a number");
    return mpz_class(text_.substr(start, pos_ - start), 10);
  }
  long exponent() {
    const bool neg = accept('-');
    if (!neg) accept('+');
    const mpz_class e = integer();
    if (!e.fits_slong_p() || e > 100000) fail("exponent out of range");
    return neg ? -e.get_si() : e.get_si();
  }
  LaurentPoly expr() {
    const bool neg = accept('-');
    LaurentPoly acc = term();
    if (neg) acc = -acc;
    while (true) {
      if (accept('+'))
        acc = acc + term();
      else if (accept('-'))
        acc = acc - term();
      else
        return acc;
    }
  }
  LaurentPoly term() {
    LaurentPoly acc = factor();
    while (true) {
      if (accept('*')) {
        acc = acc * factor();
      } else if (accept('/')) {
        const LaurentPoly d = factor();
        if (d.is_zero()) fail("division by zero");
        if (!d.is_monomial()) fail("division by a non-monomial");
        acc = acc.divided_by_monomial(d);
      } else {
        return acc;
      }
    }
  }
  LaurentPoly factor() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of entry");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      LaurentPoly inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (c == 's') {
      ++pos_;
      const long e = accept('^') ? exponent() : 1;
      return LaurentPoly::monomial(PadicNumber::one(ctx_), e);
    }
    if (c == 'p') {
      ++pos_;
      const long e = accept('^') ? exponent() : 1;
      const mpq_class v = e >= 0 ? mpq_class(ctx_->power(e)) : mpq_class(1, ctx_->power(-e));
      return LaurentPoly::constant(PadicNumber::from_rational(ctx_, v));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const mpz_class v = integer();
      return LaurentPoly::constant(PadicNumber::from_rational(ctx_, mpq_class(v)));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const Context& ctx_;
  const std::string& text_;
  size_t pos_ = 0;
};

}  // namespace

LaurentPoly LaurentPoly::parse(const Context& ctx, const std::string& text) {
  LaurentPoly r = LaurentParser(ctx, text).parse();
  if (!r.ctx_) r.ctx_ = ctx;
  return r;
}

// -------------------------------------------------------------- LaurentFamily

LaurentGrid laurent_product(const LaurentGrid& a, const LaurentGrid& b) {
  const size_t n = a.size();
  Context ctx;
  for (const auto* g : {&a, &b})
    for (const auto& row : *g)
      for (const auto& x : row)
        if (!ctx && x.context()) ctx = x.context();
  LaurentGrid r(n, std::vector<LaurentPoly>(n, LaurentPoly(ctx)));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k) {
      if (a[i][k].is_zero()) continue;
      for (size_t j = 0; j < n; ++j)
        if (!b[k][j].is_zero()) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

LaurentGrid laurent_from_matrix(const PMatrix& m) {
  const int n = m.size();
  LaurentGrid g(n, std::vector<LaurentPoly>(n, LaurentPoly(m.context())));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g[i][j] = LaurentPoly::constant(m(i, j));
  return g;
}

LaurentFamily::LaurentFamily(Context ctx, LaurentGrid g) : ctx_(std::move(ctx)), g_(std::move(g)) {
  const size_t n = g_.size();
  for (const auto& row : g_)
    if (row.size() != n) throw Error(Errc::InvalidArgument, "family matrix is not square");
  for (auto& row : g_)
    for (auto& x : row)
      if (!x.context()) x = LaurentPoly(ctx_);
  const LaurentPoly zero(ctx_);
  const LaurentPoly one = LaurentPoly::constant(PadicNumber::one(ctx_));
  const auto cp = detail::berkowitz(g_, zero, one);
  const LaurentPoly c0 = cp[0];
  det_ = (n % 2 == 0) ? c0 : -c0;
  if (!c0.is_monomial())
    throw Error(Errc::NonInvertibleFamily, "determinant " + det_.to_string() + " is not a unit Laurent monomial");
  // g^{-1} = -(g^{n-1} + c_{n-1} g^{n-2} + ... + c_1) / c_0
  LaurentGrid acc(n, std::vector<LaurentPoly>(n, zero));
  for (size_t k = n; k >= 1; --k) {
    acc = laurent_product(acc, g_);
    for (size_t i = 0; i < n; ++i) acc[i][i] += cp[k];
  }
  inv_ = acc;
  const LaurentPoly neg_c0 = -c0;
  for (auto& row : inv_)
    for (auto& x : row) x = x.divided_by_monomial(neg_c0);
  const LaurentGrid check = laurent_product(g_, inv_);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      const LaurentPoly expect = i == j ? one : zero;
      const LaurentPoly diff = check[i][j] - expect;
      for (const auto& [d, c] : diff.terms())
        if (c.is_certified_nonzero())
          throw Error(Errc::NonInvertibleFamily, "inverse verification failed");
    }
}

LaurentFamily LaurentFamily::constant(const PMatrix& m) { return LaurentFamily(m.context(), laurent_from_matrix(m)); }

LaurentFamily LaurentFamily::parse(const Context& ctx, const std::vector<std::vector<std::string>>& grid) {
  LaurentGrid g;
  for (size_t i = 0; i < grid.size(); ++i) {
    std::vector<LaurentPoly> row;
    for (size_t j = 0; j < grid[i].size(); ++j) {
      try {
        row.push_back(LaurentPoly::parse(ctx, grid[i][j]));
      } catch (const Error& e) {
        throw Error(Errc::ParseError, "conjugator entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                                          "): " + e.what());
      }
    }
    g.push_back(std::move(row));
  }
  return LaurentFamily(ctx, std::move(g));
}

PMatrix LaurentFamily::evaluate(long m) const {
  const int n = size();
  PMatrix r(ctx_, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = g_[i][j].evaluate_at_level(m);
  return r;
}

PMatrix LaurentFamily::evaluate_inverse(long m) const {
  const int n = size();
  PMatrix r(ctx_, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = inv_[i][j].evaluate_at_level(m);
  return r;
}

LaurentFamily LaurentFamily::rescaled(const PadicNumber& c) const {
  LaurentGrid g = g_;
  for (auto& row : g)
    for (auto& x : row) x = x.rescaled(c);
  return LaurentFamily(ctx_, std::move(g));
}

LaurentFamily LaurentFamily::times_right(const PMatrix& k) const {
  return LaurentFamily(ctx_, laurent_product(g_, laurent_from_matrix(k)));
}

std::vector<std::vector<std::string>> LaurentFamily::to_strings() const {
  std::vector<std::vector<std::string>> out;
  for (const auto& row : g_) {
    out.emplace_back();
    for (const auto& x : row) out.back().push_back(x.to_string());
  }
  return out;
}

// ------------------------------------------------------------ AlgebraFamily

namespace {

std::vector<LaurentPoly> laurent_coords(const LaurentGrid& m, Coords coords, const Context& ctx) {
  const size_t n = m.size();
  std::vector<LaurentPoly> v;
  if (coords == Coords::Matrix) {
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) v.push_back(m[i][j]);
    return v;
  }
  LaurentPoly trace(ctx);
  for (size_t i = 0; i < n; ++i) trace += m[i][i];
  for (const auto& [d, c] : trace.terms())
    if (c.is_certified_nonzero()) throw Error(Errc::InvalidArgument, "conjugated element is not trace zero");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j) v.push_back(m[i][j]);
  LaurentPoly acc(ctx);
  for (size_t i = 0; i + 1 < n; ++i) {
    acc += m[i][i];
    v.push_back(acc);
  }
  return v;
}

}  // namespace

AlgebraFamily conjugate_family(const Subspace& base, const LaurentFamily& fam) {
  if (base.n() != fam.size()) throw Error(Errc::InvalidArgument, "family and base have different sizes");
  AlgebraFamily af{base, fam, {}};
  for (const auto& b : base.basis_matrices()) {
    const LaurentGrid conj = laurent_product(laurent_product(fam.matrix(), laurent_from_matrix(b)), fam.inverse());
    af.rows.push_back(laurent_coords(conj, base.coords(), fam.context()));
  }
  return af;
}

LimitComputation grassmann_limit_detailed(const AlgebraFamily& af) {
  const Context& ctx = af.family.context();
  const int n = af.base.n();
  const Coords coords = af.base.coords();
  const int D = ambient_dim(n, coords);
  const size_t k = af.rows.size();
  LimitComputation out;
  out.reduced_rows = af.rows;
  auto& rows = out.reduced_rows;
  if (k == 0) {
    out.limit = Subspace::zero(ctx, n, coords);
    return out;
  }

  auto top_of = [&](const std::vector<LaurentPoly>& row) {
    long top = -kInfinity;
    for (const auto& x : row)
      if (!x.is_zero()) top = std::max(top, x.top_degree());
    if (top == -kInfinity) throw Error(Errc::InvalidArgument, "conjugated rows are dependent");
    return top;
  };
  long hi = -kInfinity, lo = kInfinity;
  for (const auto& row : rows)
    for (const auto& x : row)
      if (!x.is_zero()) {
        hi = std::max(hi, x.top_degree());
        lo = std::min(lo, x.bottom_degree());
      }
  const long guard = 10 * static_cast<long>(k) * (hi - lo + 1);

  const PadicNumber zero = PadicNumber::zero(ctx);
  const PadicNumber one = PadicNumber::one(ctx);
  for (long step = 0;; ++step) {
    if (step > guard) throw Error(Errc::NonConvergent, "leading-term reduction exceeded its iteration guard");
    std::vector<long> tops(k);
    std::vector<Vec> augmented(k);
    for (size_t i = 0; i < k; ++i) {
      tops[i] = top_of(rows[i]);
      Vec v;
      for (const auto& x : rows[i]) v.push_back(x.coeff(tops[i]));
      for (size_t j = 0; j < k; ++j) v.push_back(i == j ? one : zero);
      augmented[i] = std::move(v);
    }
    const Echelon e = row_reduce(ctx, augmented, D + static_cast<int>(k));
    std::optional<Vec> dependency;
    for (size_t r = 0; r < e.rows.size(); ++r)
      if (e.pivots[r] >= D) {
        dependency = Vec(e.rows[r].begin() + D, e.rows[r].end());
        break;
      }
    if (!dependency) {
      std::vector<Vec> leading;
      for (const auto& a : augmented) leading.emplace_back(a.begin(), a.begin() + D);
      out.limit = Subspace::echelonize(ctx, n, coords, leading);
      out.top_degrees = tops;
      out.steps = static_cast<int>(step);
      return out;
    }
    const Vec& c = *dependency;
    long top = -kInfinity;
    for (size_t i = 0; i < k; ++i)
      if (c[i].is_certified_nonzero()) top = std::max(top, tops[i]);
    size_t target = k;
    for (size_t i = 0; i < k && target == k; ++i)
      if (c[i].is_certified_nonzero() && tops[i] == top) target = i;
    std::vector<LaurentPoly> combined(D, LaurentPoly(ctx));
    for (size_t i = 0; i < k; ++i) {
      if (!c[i].is_certified_nonzero()) continue;
      for (int j = 0; j < D; ++j) combined[j] += c[i] * rows[i][j].shifted(top - tops[i]);
    }
    // cancel the exact leading block that the dependency annihilates
    for (auto& x : combined) {
      if (x.is_zero() || x.top_degree() < top) continue;
      LaurentPoly trimmed(ctx);
      for (const auto& [d, coeff] : x.terms())
        if (d < top) trimmed += LaurentPoly::monomial(coeff, d);
      x = trimmed;
    }
    rows[target] = std::move(combined);
  }
}

Subspace grassmann_limit(const AlgebraFamily& af) { return grassmann_limit_detailed(af).limit; }

// ------------------------------------------------------------ numeric oracle

namespace {

using QMat = std::vector<std::vector<mpq_class>>;

long qval(const mpq_class& q, long p) { return valuation_of(q, p); }

// Complete p-adic pivoting: columns of the maximal Pluecker coordinate.
std::vector<int> max_chart(QMat m, long p) {
  const size_t k = m.size();
  const size_t D = k ? m[0].size() : 0;
  std::vector<int> chart;
  std::vector<bool> used_row(k, false), used_col(D, false);
  for (size_t step = 0; step < k; ++step) {
    long best_v = kInfinity;
    size_t bi = k, bj = D;
    for (size_t i = 0; i < k; ++i) {
      if (used_row[i]) continue;
      for (size_t j = 0; j < D; ++j) {
        if (used_col[j] || m[i][j] == 0) continue;
        const long v = qval(m[i][j], p);
        if (v < best_v) {
          best_v = v;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == k) throw Error(Errc::InvalidArgument, "evaluated rows are dependent");
    used_row[bi] = used_col[bj] = true;
    chart.push_back(static_cast<int>(bj));
    for (size_t i = 0; i < k; ++i) {
      if (used_row[i] || m[i][bj] == 0) continue;
      const mpq_class f = m[i][bj] / m[bi][bj];
      for (size_t j = 0; j < D; ++j) m[i][j] -= f * m[bi][j];
    }
  }
  std::sort(chart.begin(), chart.end());
  return chart;
}

// Basis of the row space with the identity on the chart columns.
QMat chart_form(QMat m, const std::vector<int>& chart) {
  const size_t k = m.size();
  const size_t D = m[0].size();
  for (size_t r = 0; r < k; ++r) {
    const size_t col = static_cast<size_t>(chart[r]);
    size_t piv = r;
    while (piv < k && m[piv][col] == 0) ++piv;
    if (piv == k) throw Error(Errc::InvalidArgument, "chart is singular");
    std::swap(m[r], m[piv]);
    const mpq_class inv = 1 / m[r][col];
    for (size_t j = 0; j < D; ++j) m[r][j] *= inv;
    for (size_t i = 0; i < k; ++i) {
      if (i == r || m[i][col] == 0) continue;
      const mpq_class f = m[i][col];
      for (size_t j = 0; j < D; ++j) m[i][j] -= f * m[r][j];
    }
  }
  return m;
}

// Value at u = 0 of the interpolating polynomial through (u_j, y_j).
mpq_class neville_at_zero(const std::vector<mpq_class>& u, std::vector<mpq_class> y) {
  const size_t n = u.size();
  for (size_t level = 1; level < n; ++level)
    for (size_t i = 0; i + level < n; ++i) {
      const size_t j = i + level;
      y[i] = (u[j] * y[i] - u[i] * y[i + 1]) / (u[j] - u[i]);
    }
  return y[0];
}

}  // namespace

OracleResult numeric_limit_oracle(const AlgebraFamily& af, const std::vector<long>& m_range) {
  if (m_range.size() < 2) throw Error(Errc::InvalidArgument, "oracle needs at least two levels");
  const Context& ctx = af.family.context();
  const long p = ctx->prime();
  const long N = ctx->precision();
  const size_t k = af.rows.size();
  const int n = af.base.n();
  const Coords coords = af.base.coords();
  const int D = ambient_dim(n, coords);
  if (k == 0) return {Subspace::zero(ctx, n, coords), N, {}, m_range};

  std::vector<std::vector<int>> charts;
  std::vector<QMat> forms;
  for (long m : m_range) {
    QMat mat(k, std::vector<mpq_class>(D));
    for (size_t i = 0; i < k; ++i)
      for (int j = 0; j < D; ++j) mat[i][j] = af.rows[i][j].evaluate_at_level(m).exact_value();
    charts.push_back(max_chart(mat, p));
    forms.push_back(chart_form(mat, charts.back()));
  }
  const size_t last = m_range.size() - 1;
  if (charts[last] != charts[last - 1])
    throw Error(Errc::NotStabilized, "maximal chart changed between the last two levels");
  size_t first = last - 1;
  while (first > 0 && charts[first - 1] == charts[last]) --first;

  OracleResult out;
  out.chart = charts[last];
  out.levels.assign(m_range.begin() + static_cast<long>(first), m_range.end());
  std::vector<mpq_class> nodes;
  for (size_t t = first; t <= last; ++t) nodes.push_back(mpq_class(ctx->power(m_range[t])));

  QMat extrapolated(k, std::vector<mpq_class>(D));
  long digits = N;
  for (size_t i = 0; i < k; ++i)
    for (int j = 0; j < D; ++j) {
      std::vector<mpq_class> ys;
      for (size_t t = first; t <= last; ++t) ys.push_back(forms[t][i][j]);
      const mpq_class full = neville_at_zero(nodes, ys);
      extrapolated[i][j] = full;
      if (nodes.size() >= 3) {
        // drop the coarsest level to estimate the remaining error
        const mpq_class coarse = neville_at_zero(std::vector<mpq_class>(nodes.begin() + 1, nodes.end()),
                                                 std::vector<mpq_class>(ys.begin() + 1, ys.end()));
        if (coarse != full) digits = std::min(digits, qval(full - coarse, p));
      } else if (ys[0] != ys[1]) {
        digits = std::min(digits, qval(ys[1] - ys[0], p));
      }
    }
  out.certified_digits = digits;
  std::vector<Vec> rows;
  for (const auto& row : extrapolated) {
    Vec v;
    for (const auto& x : row) v.push_back(PadicNumber::rounded(ctx, x, digits));
    rows.push_back(std::move(v));
  }
  out.limit = Subspace::echelonize(ctx, n, coords, rows, true);
  return out;
}

// ------------------------------------------------------------ group limits

GroupLimitReport chabauty_group_limit(const AlgebraFamily& af, const std::vector<long>& levels) {
  const LimitComputation lc = grassmann_limit_detailed(af);
  const Context& ctx = af.family.context();
  const long p = ctx->prime();
  const int n = af.base.n();
  const Coords coords = af.base.coords();
  GroupLimitReport report;
  report.algebra = lc.limit;
  const GrGroup limit_group = GrGroup::from_algebra(lc.limit);
  if (lc.reduced_rows.empty()) {
    report.limit_element_in_group = true;
    report.converging = true;
    return report;
  }

  // X(s) = sum_i R_i(s) / s^{d_i}: an element of A_m converging to sum_i L_i.
  const size_t D = static_cast<size_t>(ambient_dim(n, coords));
  std::vector<LaurentPoly> x(D, LaurentPoly(ctx));
  for (size_t i = 0; i < lc.reduced_rows.size(); ++i)
    for (size_t j = 0; j < D; ++j) x[j] += lc.reduced_rows[i][j].shifted(-lc.top_degrees[i]);
  long min_v = 0;
  for (const auto& e : x)
    for (const auto& [d, c] : e.terms()) {
      if (d > 0) throw Error(Errc::NonConvergent, "normalized element still has positive degree");
      if (c.is_certified_nonzero()) min_v = std::min(min_v, c.valuation());
    }
  const long shift = (p == 2 ? 2 : 1) - min_v;
  const PadicNumber scale = PadicNumber::from_rational(ctx, mpq_class(ctx->power(shift)));

  Vec limit_coords;
  for (const auto& e : x) limit_coords.push_back(scale * e.coeff(0));
  const PMatrix h = exp_matrix(from_coords(ctx, n, limit_coords, coords));
  report.limit_element_in_group = gr_membership(limit_group, h);

  for (long m : levels) {
    Vec xm;
    for (const auto& e : x) xm.push_back(scale * e.evaluate_at_level(m));
    const PMatrix hm = exp_matrix(from_coords(ctx, n, xm, coords));
    report.levels.push_back(m);
    report.agreement.push_back(std::min<long>(hm.agreement(h), ctx->precision()));
  }
  report.converging = std::is_sorted(report.agreement.begin(), report.agreement.end()) &&
                      report.agreement.back() > report.agreement.front();
  return report;
}

}  // namespace chabauty
