#pragma once

#include <string>
#include <vector>

#include "chabauty/group.hpp"
#include "chabauty/matrix.hpp"

namespace chabauty {

// Homothety class of a rank-2 Z_p-lattice: the column span of
// [[1, 0], [b, p^c]] with b a canonical representative of Q_p / p^c Z_p.
// Printed with basis vectors as rows, "[p^0, b; 0, p^c]".
class LatticeVertex {
 public:
  LatticeVertex() = default;
  static LatticeVertex base(const Context& ctx);
  // Class of the lattice spanned by the columns of an invertible matrix.
  static LatticeVertex from_basis(const PMatrix& m);
  // Class of diag(1, p^l).
  static LatticeVertex ray_point(const Context& ctx, long l);

  long c() const { return c_; }
  const mpq_class& b() const { return b_; }
  const Context& context() const { return ctx_; }
  // Exact column basis in normal form.
  PMatrix basis() const;
  // The p + 1 adjacent vertices.
  std::vector<LatticeVertex> neighbors() const;

  std::string to_string() const;
  friend bool operator==(const LatticeVertex& x, const LatticeVertex& y) { return x.c_ == y.c_ && x.b_ == y.b_; }

 private:
  Context ctx_;
  long c_ = 0;
  mpq_class b_;
};

LatticeVertex act(const PMatrix& g, const LatticeVertex& v);
long distance(const LatticeVertex& v, const LatticeVertex& w);
// g stabilizes v iff M^-1 g M lies in GL(2, Z_p).
bool stabilizer_membership(const PMatrix& g, const LatticeVertex& v);

// Vertices within distance `radius` of `center`, in breadth-first order.
std::vector<LatticeVertex> ball(const LatticeVertex& center, long radius);

// 2 * |slope| of the characteristic polynomial's Newton polygon.
long translation_length(const PMatrix& g);
// min d(v, g v) over the ball of the given radius around base. A negative
// radius selects ceil(d(base, g base) / 2), which always reaches Min(g).
long translation_length_by_ball(const PMatrix& g, long radius = -1);

struct RayRow {
  PMatrix element;
  long expected_first = 0;  // max(0, -v(u_12)), or 0 for u = Id
  long observed_first = -1;  // least l from which every deeper point is fixed, -1 if none
  std::vector<bool> fixes;   // fixes[l] for l = 0..depth
  bool transpose_escapes = true;  // the transposed unipotent leaves the deep ray points
  bool ok = false;
};

struct ParahoricReport {
  long depth = 0;
  std::vector<RayRow> rows;
  long deep_fixers = 0;            // elements fixing every ray point from their onset to depth
  long deep_fixers_triangular = 0;  // of those, lower-left entry in p^depth Z_p
  std::vector<std::string> violations;
  bool passed = false;
  std::string to_string() const;
};

// Eventual fixing of ray points by upper unipotents, and upper-triangularity
// of elements surviving to the end of the ray.
ParahoricReport parahoric_limit_check(const std::vector<PMatrix>& unipotents, long depth);

struct StabilizationReport {
  PMatrix limit;
  Isometry limit_kind = Isometry::Elliptic;
  long limit_length = 0;
  std::vector<Isometry> kinds;   // per sequence index
  std::vector<long> lengths;
  long onset = -1;  // first index from which kind and length match the limit
  bool passed = false;
};

// g_l = [[a, b], [c p^l, d_l]] with det g_l = 1, converging to [[a, b], [0, 1/a]].
StabilizationReport stabilization_check(const Context& ctx, const mpq_class& a, const mpq_class& b,
                                        const mpq_class& c, long terms);

}  // namespace chabauty
