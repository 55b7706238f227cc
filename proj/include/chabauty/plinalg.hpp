#pragma once

#include <string>
#include <vector>

#include "chabauty/matrix.hpp"

namespace chabauty {

using Vec = std::vector<PadicNumber>;

// Matrix: all n^2 entries, row-major E_ij.
// TraceZero: off-diagonal E_ij (row-major), then E_ii - E_{i+1,i+1}.
enum class Coords { Matrix, TraceZero };

int ambient_dim(int n, Coords coords);
Vec to_coords(const PMatrix& m, Coords coords);
PMatrix from_coords(const Context& ctx, int n, const Vec& v, Coords coords);

struct Echelon {
  std::vector<Vec> rows;
  std::vector<int> pivots;
};

// Row echelon form over `ncols` columns; within each column the pivot is the
// entry of least valuation, ties to the lowest row. Pivots are normalized to 1.
Echelon row_reduce(const Context& ctx, std::vector<Vec> rows, int ncols, bool tolerate_small = false,
                   bool reduced = true);

class Subspace {
 public:
  Subspace() = default;

  // Canonical reduced echelon basis. With `tolerate_small`, columns holding
  // only O(p^a) entries are treated as zero instead of raising.
  static Subspace echelonize(const Context& ctx, int n, Coords coords, const std::vector<Vec>& vectors,
                             bool tolerate_small = false);
  static Subspace span(const std::vector<PMatrix>& matrices, Coords coords, bool tolerate_small = false);
  static Subspace zero(const Context& ctx, int n, Coords coords);

  const Context& context() const { return ctx_; }
  int n() const { return n_; }
  Coords coords() const { return coords_; }
  int ambient() const { return ambient_dim(n_, coords_); }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Vec>& basis() const { return basis_; }
  const std::vector<int>& pivots() const { return pivots_; }
  std::vector<PMatrix> basis_matrices() const;

  Vec reduce(const Vec& v) const;
  bool contains(const Vec& v) const;
  bool contains(const PMatrix& m) const;
  Subspace sum(const Subspace& other) const;
  Subspace intersect(const Subspace& other) const;
  bool equals(const Subspace& other) const;
  // Digits of agreement of canonical bases; -1 when the pivot patterns differ.
  long agreement(const Subspace& other) const;
  bool is_exact() const;

  Subspace in_coords(Coords target) const;
  // span(A) + Q_p*Id in matrix coordinates.
  Subspace with_identity() const;

  std::string to_string() const;

 private:
  Context ctx_;
  int n_ = 0;
  Coords coords_ = Coords::TraceZero;
  std::vector<Vec> basis_;
  std::vector<int> pivots_;
};

// Trace-zero diagonal matrices.
Subspace cartan_algebra(const Context& ctx, int n);

struct NewtonSegment {
  mpq_class slope;
  int multiplicity = 0;
};

struct NewtonPolygon {
  std::vector<NewtonSegment> segments;  // increasing slope
  int zero_roots = 0;
  // Expanded multiset of slopes.
  std::vector<mpq_class> slopes() const;
  bool has_nonzero_slope() const;
};

// Lower hull of (i, v(c_i)) for ascending coefficients c.
NewtonPolygon newton_polygon(const std::vector<PadicNumber>& coeffs);
NewtonPolygon newton_slopes(const PMatrix& m);

// Inverse of a inside a unital subalgebra (matrix coordinates).
PMatrix ch_inverse(const PMatrix& a, const Subspace& within);
// Basis-pair closure of a subspace (matrix coordinates) under multiplication.
bool is_closed_under_product(const Subspace& within);
bool is_abelian_algebra(const Subspace& a);

}  // namespace chabauty
