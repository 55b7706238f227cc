#include "chabauty/plinalg.hpp"

#include <algorithm>
#include <sstream>

namespace chabauty {

int ambient_dim(int n, Coords coords) { return coords == Coords::Matrix ? n * n : n * n - 1; }

Vec to_coords(const PMatrix& m, Coords coords) {
  const int n = m.size();
  Vec v;
  v.reserve(ambient_dim(n, coords));
  if (coords == Coords::Matrix) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) v.push_back(m(i, j));
    return v;
  }
  if (m.trace().is_certified_nonzero())
    throw Error(Errc::InvalidArgument, "matrix is not trace zero: " + m.to_string());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) v.push_back(m(i, j));
  PadicNumber acc = PadicNumber::zero(m.context());
  for (int i = 0; i + 1 < n; ++i) {
    acc += m(i, i);
    v.push_back(acc);
  }
  return v;
}

PMatrix from_coords(const Context& ctx, int n, const Vec& v, Coords coords) {
  if (static_cast<int>(v.size()) != ambient_dim(n, coords))
    throw Error(Errc::InvalidArgument, "coordinate vector has wrong length");
  PMatrix m(ctx, n);
  size_t k = 0;
  if (coords == Coords::Matrix) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = v[k++];
    return m;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) m(i, j) = v[k++];
  for (int i = 0; i + 1 < n; ++i, ++k) {
    m(i, i) += v[k];
    m(i + 1, i + 1) -= v[k];
  }
  return m;
}

Echelon row_reduce(const Context& ctx, std::vector<Vec> rows, int ncols, bool tolerate_small, bool reduced) {
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != ncols) throw Error(Errc::InvalidArgument, "vector length mismatch");
  const PadicNumber zero = PadicNumber::zero(ctx);
  const PadicNumber one = PadicNumber::one(ctx);
  Echelon out;
  size_t r = 0;
  for (int col = 0; col < ncols && r < rows.size(); ++col) {
    long best = -1;
    long best_v = kInfinity;
    bool small = false;
    for (size_t i = r; i < rows.size(); ++i) {
      const PadicNumber& x = rows[i][col];
      if (x.is_certified_nonzero()) {
        const long v = x.valuation();
        if (best < 0 || v < best_v) {
          best = static_cast<long>(i);
          best_v = v;
        }
      } else if (x.is_big_oh()) {
        small = true;
      }
    }
    if (best < 0) {
      if (small && !tolerate_small)
        throw Error(Errc::PrecisionExhausted, "rank decision in column " + std::to_string(col) + " is uncertified");
      continue;
    }
    std::swap(rows[r], rows[static_cast<size_t>(best)]);
    const PadicNumber inv = rows[r][col].inv();
    for (int j = col + 1; j < ncols; ++j)
      if (!rows[r][j].is_exact_zero()) rows[r][j] = rows[r][j] * inv;
    rows[r][col] = one;
    for (size_t i = reduced ? 0 : r + 1; i < rows.size(); ++i) {
      if (i == r) continue;
      const PadicNumber f = rows[i][col];
      if (f.is_exact_zero()) continue;
      for (int j = col + 1; j < ncols; ++j)
        if (!rows[r][j].is_exact_zero()) rows[i][j] -= f * rows[r][j];
      rows[i][col] = zero;
    }
    out.pivots.push_back(col);
    ++r;
  }
  rows.resize(r);
  out.rows = std::move(rows);
  return out;
}

Subspace Subspace::echelonize(const Context& ctx, int n, Coords coords, const std::vector<Vec>& vectors,
                              bool tolerate_small) {
  Echelon e = row_reduce(ctx, vectors, ambient_dim(n, coords), tolerate_small, true);
  Subspace s;
  s.ctx_ = ctx;
  s.n_ = n;
  s.coords_ = coords;
  s.basis_ = std::move(e.rows);
  s.pivots_ = std::move(e.pivots);
  return s;
}

Subspace Subspace::span(const std::vector<PMatrix>& matrices, Coords coords, bool tolerate_small) {
  if (matrices.empty()) throw Error(Errc::InvalidArgument, "span of an empty list needs a context");
  std::vector<Vec> rows;
  for (const auto& m : matrices) rows.push_back(to_coords(m, coords));
  return echelonize(matrices[0].context(), matrices[0].size(), coords, rows, tolerate_small);
}

Subspace Subspace::zero(const Context& ctx, int n, Coords coords) { return echelonize(ctx, n, coords, {}); }

std::vector<PMatrix> Subspace::basis_matrices() const {
  std::vector<PMatrix> out;
  for (const auto& b : basis_) out.push_back(from_coords(ctx_, n_, b, coords_));
  return out;
}

Vec Subspace::reduce(const Vec& v) const {
  if (static_cast<int>(v.size()) != ambient()) throw Error(Errc::InvalidArgument, "vector length mismatch");
  Vec res = v;
  for (size_t k = 0; k < basis_.size(); ++k) {
    const PadicNumber f = res[pivots_[k]];
    if (f.is_exact_zero()) continue;
    for (int j = 0; j < ambient(); ++j)
      if (!basis_[k][j].is_exact_zero()) res[j] -= f * basis_[k][j];
    res[pivots_[k]] = PadicNumber::zero(ctx_);
  }
  return res;
}

bool Subspace::contains(const Vec& v) const {
  const Vec res = reduce(v);
  return std::none_of(res.begin(), res.end(), [](const PadicNumber& x) { return x.is_certified_nonzero(); });
}

bool Subspace::contains(const PMatrix& m) const {
  if (coords_ == Coords::TraceZero && m.trace().is_certified_nonzero()) return false;
  return contains(to_coords(m, coords_));
}

Subspace Subspace::sum(const Subspace& other) const {
  std::vector<Vec> rows = basis_;
  rows.insert(rows.end(), other.basis_.begin(), other.basis_.end());
  return echelonize(ctx_, n_, coords_, rows);
}

Subspace Subspace::intersect(const Subspace& other) const {
  if (other.coords_ != coords_ || other.n_ != n_) throw Error(Errc::InvalidArgument, "ambient mismatch");
  const int D = ambient();
  // Zassenhaus: rows (a | a) and (b | 0); rows with vanishing left half span the intersection.
  std::vector<Vec> rows;
  for (const auto& a : basis_) {
    Vec row = a;
    row.insert(row.end(), a.begin(), a.end());
    rows.push_back(std::move(row));
  }
  for (const auto& b : other.basis_) {
    Vec row = b;
    row.insert(row.end(), static_cast<size_t>(D), PadicNumber::zero(ctx_));
    rows.push_back(std::move(row));
  }
  const Echelon e = row_reduce(ctx_, std::move(rows), 2 * D, false, false);
  std::vector<Vec> right;
  for (size_t k = 0; k < e.rows.size(); ++k)
    if (e.pivots[k] >= D) right.emplace_back(e.rows[k].begin() + D, e.rows[k].end());
  return echelonize(ctx_, n_, coords_, right);
}

bool Subspace::equals(const Subspace& other) const {
  if (n_ != other.n_ || coords_ != other.coords_ || pivots_ != other.pivots_) return false;
  for (size_t k = 0; k < basis_.size(); ++k)
    for (int j = 0; j < ambient(); ++j)
      if (!basis_[k][j].equals_to_precision(other.basis_[k][j])) return false;
  return true;
}

long Subspace::agreement(const Subspace& other) const {
  if (n_ != other.n_ || coords_ != other.coords_ || pivots_ != other.pivots_) return -1;
  long best = kInfinity;
  for (size_t k = 0; k < basis_.size(); ++k)
    for (int j = 0; j < ambient(); ++j) best = std::min(best, basis_[k][j].agreement(other.basis_[k][j]));
  return best;
}

bool Subspace::is_exact() const {
  for (const auto& b : basis_)
    for (const auto& x : b)
      if (!x.is_exact()) return false;
  return true;
}

Subspace Subspace::in_coords(Coords target) const {
  if (target == coords_) return *this;
  if (target == Coords::Matrix) {
    std::vector<Vec> rows;
    for (const auto& m : basis_matrices()) rows.push_back(to_coords(m, Coords::Matrix));
    return echelonize(ctx_, n_, Coords::Matrix, rows);
  }
  // Matrix -> TraceZero: intersect with the trace-zero hyperplane first.
  std::vector<PMatrix> tz;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j) tz.push_back(PMatrix::unit(ctx_, n_, i, j));
  for (int i = 0; i + 1 < n_; ++i) tz.push_back(PMatrix::unit(ctx_, n_, i, i) - PMatrix::unit(ctx_, n_, i + 1, i + 1));
  const Subspace hyper = span(tz, Coords::Matrix);
  const Subspace cut = intersect(hyper);
  std::vector<Vec> rows;
  for (const auto& m : cut.basis_matrices()) rows.push_back(to_coords(m, Coords::TraceZero));
  return echelonize(ctx_, n_, Coords::TraceZero, rows);
}

Subspace Subspace::with_identity() const {
  Subspace m = in_coords(Coords::Matrix);
  std::vector<Vec> rows = m.basis_;
  rows.push_back(to_coords(PMatrix::identity(ctx_, n_), Coords::Matrix));
  return echelonize(ctx_, n_, Coords::Matrix, rows);
}

std::string Subspace::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& m : basis_matrices()) {
    os << (first ? "" : ", ") << m.to_string();
    first = false;
  }
  os << "}";
  return os.str();
}

Subspace cartan_algebra(const Context& ctx, int n) {
  std::vector<PMatrix> h;
  for (int i = 0; i + 1 < n; ++i) h.push_back(PMatrix::unit(ctx, n, i, i) - PMatrix::unit(ctx, n, i + 1, i + 1));
  if (h.empty()) return Subspace::zero(ctx, n, Coords::TraceZero);
  return Subspace::span(h, Coords::TraceZero);
}

std::vector<mpq_class> NewtonPolygon::slopes() const {
  std::vector<mpq_class> out;
  for (const auto& s : segments)
    for (int i = 0; i < s.multiplicity; ++i) out.push_back(s.slope);
  return out;
}

bool NewtonPolygon::has_nonzero_slope() const {
  return std::any_of(segments.begin(), segments.end(), [](const NewtonSegment& s) { return s.slope != 0; });
}

NewtonPolygon newton_polygon(const std::vector<PadicNumber>& coeffs) {
  NewtonPolygon poly;
  const int deg = static_cast<int>(coeffs.size()) - 1;
  int lo = 0;
  while (lo <= deg && coeffs[lo].is_exact_zero()) ++lo;
  if (lo > deg) throw Error(Errc::InvalidArgument, "zero polynomial");
  if (coeffs[lo].is_big_oh())
    throw Error(Errc::PrecisionExhausted, "lowest coefficient of the polynomial is uncertified");
  poly.zero_roots = lo;

  struct Pt {
    long x;
    long y;
  };
  std::vector<Pt> pts;
  std::vector<Pt> bounds;  // O(p^a) coefficients: only a lower bound on the height
  for (int i = lo; i <= deg; ++i) {
    if (coeffs[i].is_certified_nonzero())
      pts.push_back({i, coeffs[i].valuation()});
    else if (coeffs[i].is_big_oh())
      bounds.push_back({i, coeffs[i].absolute_precision()});
  }
  if (pts.back().x != deg) throw Error(Errc::PrecisionExhausted, "leading coefficient is uncertified");

  std::vector<Pt> hull;
  for (const Pt& q : pts) {
    while (hull.size() >= 2) {
      const Pt& a = hull[hull.size() - 2];
      const Pt& b = hull.back();
      // drop b if it lies on or above segment a-q
      if ((b.y - a.y) * (q.x - a.x) >= (q.y - a.y) * (b.x - a.x))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(q);
  }
  for (const Pt& b : bounds) {
    for (size_t k = 0; k + 1 < hull.size(); ++k) {
      const Pt& a = hull[k];
      const Pt& c = hull[k + 1];
      if (b.x <= a.x || b.x >= c.x) continue;
      // hull height at b.x is a.y + (c.y-a.y)(b.x-a.x)/(c.x-a.x); need b.y strictly above it
      if (b.y * (c.x - a.x) <= a.y * (c.x - a.x) + (c.y - a.y) * (b.x - a.x))
        throw Error(Errc::PrecisionExhausted, "uncertified coefficient could change the Newton polygon");
    }
  }
  for (size_t k = 0; k + 1 < hull.size(); ++k) {
    NewtonSegment seg;
    seg.multiplicity = static_cast<int>(hull[k + 1].x - hull[k].x);
    seg.slope = mpq_class(hull[k + 1].y - hull[k].y, hull[k + 1].x - hull[k].x);
    seg.slope.canonicalize();
    poly.segments.push_back(seg);
  }
  return poly;
}

NewtonPolygon newton_slopes(const PMatrix& m) { return newton_polygon(char_poly(m)); }

bool is_closed_under_product(const Subspace& within) {
  const Subspace w = within.in_coords(Coords::Matrix);
  const auto mats = w.basis_matrices();
  for (const auto& a : mats)
    for (const auto& b : mats)
      if (!w.contains(a * b)) return false;
  return true;
}

PMatrix ch_inverse(const PMatrix& a, const Subspace& within) {
  const Subspace w = within.in_coords(Coords::Matrix);
  if (!is_closed_under_product(w)) throw Error(Errc::NotSubalgebra, "subspace is not closed under products");
  if (!w.contains(a)) throw Error(Errc::InvalidArgument, "matrix is not in the given subalgebra");
  const int n = a.size();
  const auto cp = char_poly(a);
  if (cp[0].is_big_oh()) throw Error(Errc::PrecisionExhausted, "determinant is uncertified");
  if (cp[0].is_exact_zero()) throw Error(Errc::Singular, "matrix is singular");
  // a^{-1} = -(a^{n-1} + c_{n-1} a^{n-2} + ... + c_1) / c_0
  std::vector<PadicNumber> q(cp.begin() + 1, cp.end());
  PMatrix inv = (-(cp[0].inv())) * evaluate_poly(q, a);
  if (!(inv * a).equals_to_precision(PMatrix::identity(a.context(), n)))
    throw Error(Errc::PrecisionExhausted, "inverse check failed to precision");
  if (!w.contains(inv)) throw Error(Errc::NotSubalgebra, "inverse left the subalgebra");
  return inv;
}

bool is_abelian_algebra(const Subspace& a) {
  const auto mats = a.basis_matrices();
  for (size_t i = 0; i < mats.size(); ++i)
    for (size_t j = i + 1; j < mats.size(); ++j) {
      const PMatrix c = commutator(mats[i], mats[j]);
      for (int r = 0; r < c.size(); ++r)
        for (int s = 0; s < c.size(); ++s)
          if (c(r, s).is_certified_nonzero()) return false;
    }
  return true;
}

}  // namespace chabauty
