#include "chabauty/matrix.hpp"

#include <algorithm>
#include <sstream>

#include "chabauty/detail/berkowitz.hpp"

namespace chabauty {

PMatrix::PMatrix(Context ctx, int n)
    : ctx_(std::move(ctx)), n_(n), a_(static_cast<size_t>(n) * n, PadicNumber::zero(ctx_)) {}

PMatrix PMatrix::identity(const Context& ctx, int n) {
  PMatrix m(ctx, n);
  for (int i = 0; i < n; ++i) m(i, i) = PadicNumber::one(ctx);
  return m;
}

PMatrix PMatrix::unit(const Context& ctx, int n, int i, int j) {
  PMatrix m(ctx, n);
  m(i, j) = PadicNumber::one(ctx);
  return m;
}

PMatrix PMatrix::diagonal(const std::vector<PadicNumber>& d) {
  if (d.empty()) throw Error(Errc::InvalidArgument, "empty diagonal");
  PMatrix m(d[0].context(), static_cast<int>(d.size()));
  for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

PMatrix PMatrix::from_rationals(const Context& ctx, const std::vector<std::vector<mpq_class>>& rows) {
  const int n = static_cast<int>(rows.size());
  PMatrix m(ctx, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n) throw Error(Errc::InvalidArgument, "matrix is not square");
    for (int j = 0; j < n; ++j) m(i, j) = PadicNumber::from_rational(ctx, rows[i][j]);
  }
  return m;
}

PMatrix PMatrix::parse(const Context& ctx, const std::vector<std::vector<std::string>>& rows) {
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw Error(Errc::ParseError, "empty matrix");
  PMatrix m(ctx, n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw Error(Errc::ParseError, "row " + std::to_string(i + 1) + " has wrong length");
    for (int j = 0; j < n; ++j) m(i, j) = PadicNumber::parse(ctx, rows[i][j]);
  }
  return m;
}

PadicNumber PMatrix::trace() const {
  PadicNumber t = PadicNumber::zero(ctx_);
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

PadicNumber PMatrix::det() const {
  const auto cp = char_poly(*this);
  return (n_ % 2 == 0) ? cp[0] : -cp[0];
}

PMatrix PMatrix::transpose() const {
  PMatrix t(ctx_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

PMatrix PMatrix::pow(long e) const {
  if (e < 0) throw Error(Errc::InvalidArgument, "negative matrix power");
  PMatrix result = identity(ctx_, n_);
  PMatrix base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return result;
}

bool PMatrix::is_exact() const {
  return std::all_of(a_.begin(), a_.end(), [](const PadicNumber& x) { return x.is_exact(); });
}

bool PMatrix::is_upper_triangular() const {
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < i; ++j)
      if ((*this)(i, j).is_certified_nonzero()) return false;
  return true;
}

bool PMatrix::equals_to_precision(const PMatrix& other) const {
  if (n_ != other.n_) return false;
  for (size_t k = 0; k < a_.size(); ++k)
    if (!a_[k].equals_to_precision(other.a_[k])) return false;
  return true;
}

long PMatrix::agreement(const PMatrix& other) const {
  long best = kInfinity;
  for (size_t k = 0; k < a_.size(); ++k) best = std::min(best, a_[k].agreement(other.a_[k]));
  return best;
}

long PMatrix::min_valuation() const {
  long best = kInfinity;
  for (const auto& x : a_)
    if (x.is_certified_nonzero()) best = std::min(best, x.valuation());
  return best;
}

PMatrix operator+(const PMatrix& a, const PMatrix& b) {
  PMatrix r = a;
  for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] += b.a_[k];
  return r;
}

PMatrix operator-(const PMatrix& a, const PMatrix& b) {
  PMatrix r = a;
  for (size_t k = 0; k < r.a_.size(); ++k) r.a_[k] -= b.a_[k];
  return r;
}

PMatrix operator*(const PMatrix& a, const PMatrix& b) {
  if (a.n_ != b.n_) throw Error(Errc::InvalidArgument, "matrix size mismatch");
  PMatrix r(a.ctx_, a.n_);
  for (int i = 0; i < a.n_; ++i)
    for (int k = 0; k < a.n_; ++k) {
      const PadicNumber& x = a(i, k);
      if (x.is_exact_zero()) continue;
      for (int j = 0; j < a.n_; ++j) {
        const PadicNumber& y = b(k, j);
        if (y.is_exact_zero()) continue;
        r(i, j) += x * y;
      }
    }
  return r;
}

PMatrix operator*(const PadicNumber& c, const PMatrix& a) {
  PMatrix r = a;
  for (auto& x : r.a_) x = c * x;
  return r;
}

PMatrix PMatrix::operator-() const {
  PMatrix r = *this;
  for (auto& x : r.a_) x = -x;
  return r;
}

std::vector<std::vector<std::string>> PMatrix::to_strings() const {
  std::vector<std::vector<std::string>> out(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[i].push_back((*this)(i, j).to_string());
  return out;
}

std::string PMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < n_; ++i) {
    if (i) os << "; ";
    for (int j = 0; j < n_; ++j) os << (j ? ", " : "") << (*this)(i, j);
  }
  os << "]";
  return os.str();
}

PMatrix commutator(const PMatrix& a, const PMatrix& b) { return a * b - b * a; }

std::vector<PadicNumber> char_poly(const PMatrix& m) {
  const int n = m.size();
  std::vector<std::vector<PadicNumber>> grid(n, std::vector<PadicNumber>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) grid[i][j] = m(i, j);
  return detail::berkowitz(grid, PadicNumber::zero(m.context()), PadicNumber::one(m.context()));
}

PMatrix evaluate_poly(const std::vector<PadicNumber>& coeffs, const PMatrix& m) {
  PMatrix acc(m.context(), m.size());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
    acc = acc * m + (*it) * PMatrix::identity(m.context(), m.size());
  return acc;
}

}  // namespace chabauty
