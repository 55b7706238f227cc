#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chabauty/plinalg.hpp"

namespace chabauty {

// Gr(A) = <A, Id> ∩ SL(n, Q_p) for an abelian subalgebra A of sl(n, Q_p).
class GrGroup {
 public:
  GrGroup() = default;
  static GrGroup from_algebra(const Subspace& algebra);

  const Subspace& algebra() const { return algebra_; }          // trace-zero coordinates
  const Subspace& span_with_id() const { return with_id_; }     // matrix coordinates
  int n() const { return algebra_.n(); }
  const Context& context() const { return algebra_.context(); }
  // Basis-pair product closure of <A, Id>.
  bool is_closed() const;

 private:
  Subspace algebra_;
  Subspace with_id_;
};

// Trace-zero part of the unital algebra Q_p[a] = span(Id, a, ..., a^(n-1)).
Subspace generated_algebra(const PMatrix& a);

// det(g) = 1 to precision and g in <A, Id>.
bool gr_membership(const GrGroup& group, const PMatrix& g);

// exp(X) by its power series. Nilpotent exact X gives an exact finite sum;
// otherwise X must satisfy v(X) >= 1 (>= 2 for p = 2) and the result carries
// absolute precision N on the closure of X's support.
PMatrix exp_matrix(const PMatrix& x);
PMatrix exp_into_group(const GrGroup& group, const PMatrix& x);

enum class Isometry { Elliptic, Hyperbolic };
std::string to_string(Isometry kind);
// Hyperbolic iff the Newton polygon of the characteristic polynomial has a nonzero slope.
Isometry classify_isometry(const PMatrix& g);

struct HyperbolicWitness {
  PadicNumber lambda;
  long exponent = 0;       // lambda = p^exponent - a_shift
  int diagonal_index = 0;  // i with |h_ii| > 1
  PMatrix h;               // (a + lambda)^n / det(a + lambda)
};

// For upper-triangular trace-zero a with a nonzero diagonal, an element of
// <a, Id> ∩ SL_n with a diagonal entry of negative valuation.
HyperbolicWitness hyperbolic_witness(const PMatrix& a);

// g = lambda * u with u upper unitriangular and lambda^n = 1.
bool in_unipotent_times_roots(const PMatrix& g);

struct BlockPartition {
  std::vector<int> sizes;
  std::string to_string() const;
  friend bool operator==(const BlockPartition& a, const BlockPartition& b) { return a.sizes == b.sizes; }
};

// Maximal runs of positions on which every basis element has a common
// diagonal value; throws NotBlockConstant if some entry lies below the
// resulting block diagonal.
BlockPartition block_structure_check(const Subspace& a);

// Uniform integer in [lo, hi] with a fixed, platform-independent reduction.
long draw(std::mt19937_64& rng, long lo, long hi);
mpq_class draw_rational(std::mt19937_64& rng, long bound);

// Random elements of Gr(A): Y^n / det(Y) for random Y in <A, Id>, the
// central sign, and products of earlier samples. All samples are exact.
std::vector<PMatrix> sample_group(const GrGroup& group, int count, std::mt19937_64& rng);

// dim span(samples ∪ {Id}) - (dim A + 1). Throws InsufficientSamples when
// the final fifth of the samples still enlarged the span.
long flatness_defect(const std::vector<PMatrix>& samples, const Subspace& a);

struct CrossRatioSet {
  std::vector<PadicNumber> values;  // six values, with multiplicity
  // Equality as unordered multisets, to precision.
  bool same_as(const CrossRatioSet& other) const;
  bool intersects(const CrossRatioSet& other) const;
};

// Cross ratios of {0, 1, 2, alpha} in every order.
CrossRatioSet cross_ratio_set(const PadicNumber& alpha);
// All beta for which {0, 1, 2, beta} is projectively equivalent to {0, 1, 2, alpha}.
std::vector<PadicNumber> cross_ratio_class(const PadicNumber& alpha);

// Seven-dimensional unipotent representation of Q_p^6 with parameter alpha.
PMatrix rho_alpha(const PadicNumber& alpha, const Vec& v);
// Its tangent algebra (trace-zero coordinates).
Subspace rho_alpha_algebra(const Context& ctx, const mpq_class& alpha);
// Projective dimension of the orbit of [x] under the image of rho_alpha.
int orbit_dimension(const PadicNumber& alpha, const Vec& x);

// Conjugation invariants of a commutative algebra <A, Id>.
struct AlgebraSignature {
  int semisimple_rank = 0;  // dim <A, Id> - dim of its nilradical
  int nil_dim = 0;
  int nil_square_dim = 0;
  int nil_cube_dim = 0;
  int common_kernel_dim = 0;
  int image_dim = 0;
  int centralizer_dim = 0;  // in gl(n)
  int normalizer_dim = 0;   // in gl(n)

  std::string to_string() const;
  auto operator<=>(const AlgebraSignature&) const = default;
};

AlgebraSignature algebra_signature(const Subspace& a);

// Rank of a list of vectors of length ncols.
int rank_of(const Context& ctx, const std::vector<Vec>& rows, int ncols);

}  // namespace chabauty
