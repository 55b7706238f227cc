#pragma once

#include <map>
#include <string>
#include <vector>

#include "chabauty/plinalg.hpp"

namespace chabauty {

// Finite Laurent polynomial in s over Q_p. The m-th member of a family is
// obtained at s = p^(-m).
class LaurentPoly {
 public:
  LaurentPoly() = default;
  explicit LaurentPoly(Context ctx) : ctx_(std::move(ctx)) {}

  static LaurentPoly constant(const PadicNumber& c);
  static LaurentPoly monomial(const PadicNumber& c, long degree);
  static LaurentPoly variable(const Context& ctx);
  // Grammar documented in docs/family-format.md.
  static LaurentPoly parse(const Context& ctx, const std::string& text);

  const Context& context() const { return ctx_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }
  bool is_exact() const;
  long top_degree() const;
  long bottom_degree() const;
  PadicNumber coeff(long degree) const;
  const std::map<long, PadicNumber>& terms() const { return terms_; }

  PadicNumber evaluate(const PadicNumber& s) const;
  PadicNumber evaluate_at_level(long m) const;
  // s -> c*s
  LaurentPoly rescaled(const PadicNumber& c) const;
  LaurentPoly shifted(long k) const;  // multiply by s^k
  LaurentPoly divided_by_monomial(const LaurentPoly& m) const;

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
  friend LaurentPoly operator*(const PadicNumber& c, const LaurentPoly& a);
  LaurentPoly operator-() const;
  LaurentPoly& operator+=(const LaurentPoly& o) { return *this = *this + o; }

  std::string to_string() const;

 private:
  void add_term(long degree, const PadicNumber& c);

  Context ctx_;
  std::map<long, PadicNumber> terms_;
};

using LaurentGrid = std::vector<std::vector<LaurentPoly>>;

// Invertible matrix family over the Laurent ring with its exact inverse.
class LaurentFamily {
 public:
  LaurentFamily() = default;
  LaurentFamily(Context ctx, LaurentGrid g);

  static LaurentFamily constant(const PMatrix& m);
  static LaurentFamily parse(const Context& ctx, const std::vector<std::vector<std::string>>& grid);

  const Context& context() const { return ctx_; }
  int size() const { return static_cast<int>(g_.size()); }
  const LaurentGrid& matrix() const { return g_; }
  const LaurentGrid& inverse() const { return inv_; }
  const LaurentPoly& det() const { return det_; }

  PMatrix evaluate(long m) const;
  PMatrix evaluate_inverse(long m) const;
  LaurentFamily rescaled(const PadicNumber& c) const;
  LaurentFamily times_right(const PMatrix& k) const;
  std::vector<std::vector<std::string>> to_strings() const;

 private:
  Context ctx_;
  LaurentGrid g_;
  LaurentGrid inv_;
  LaurentPoly det_;
};

LaurentGrid laurent_product(const LaurentGrid& a, const LaurentGrid& b);
LaurentGrid laurent_from_matrix(const PMatrix& m);

struct AlgebraFamily {
  Subspace base;
  LaurentFamily family;
  std::vector<std::vector<LaurentPoly>> rows;  // coordinates of g b_i g^{-1} in base.coords()
};

AlgebraFamily conjugate_family(const Subspace& base, const LaurentFamily& fam);

struct LimitComputation {
  Subspace limit;
  std::vector<std::vector<LaurentPoly>> reduced_rows;  // same span as the input rows
  std::vector<long> top_degrees;                       // leading degree of each reduced row
  int steps = 0;
};

LimitComputation grassmann_limit_detailed(const AlgebraFamily& af);
Subspace grassmann_limit(const AlgebraFamily& af);

struct OracleResult {
  Subspace limit;
  long certified_digits = 0;  // estimated absolute accuracy of the extrapolated chart entries
  std::vector<int> chart;     // coordinates of the maximal Pluecker chart
  std::vector<long> levels;   // m values used for extrapolation
};

// Evaluates the family at s = p^(-m) for each m, fixes the maximal Pluecker
// chart, and extrapolates the chart coordinates to m = infinity.
OracleResult numeric_limit_oracle(const AlgebraFamily& af, const std::vector<long>& m_range);

struct GroupLimitReport {
  Subspace algebra;
  bool limit_element_in_group = false;
  std::vector<long> levels;
  std::vector<long> agreement;  // digits to which h_m matches the limit element
  bool converging = false;
};

// Certifies on a sampled sequence h_m in Gr(A_m) that the group limit lies in Gr(A).
GroupLimitReport chabauty_group_limit(const AlgebraFamily& af, const std::vector<long>& levels = {4, 6, 8, 10});

}  // namespace chabauty
