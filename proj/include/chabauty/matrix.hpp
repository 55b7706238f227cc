#pragma once

#include <string>
#include <vector>

#include "chabauty/padic.hpp"

namespace chabauty {

class PMatrix {
 public:
  PMatrix() = default;
  PMatrix(Context ctx, int n);  // zero matrix

  static PMatrix identity(const Context& ctx, int n);
  static PMatrix unit(const Context& ctx, int n, int i, int j);  // E_ij, zero-based
  static PMatrix diagonal(const std::vector<PadicNumber>& d);
  static PMatrix from_rationals(const Context& ctx, const std::vector<std::vector<mpq_class>>& rows);
  // Row-major entries in the scalar literal grammar.
  static PMatrix parse(const Context& ctx, const std::vector<std::vector<std::string>>& rows);

  int size() const { return n_; }
  const Context& context() const { return ctx_; }
  PadicNumber& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  const PadicNumber& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  PadicNumber trace() const;
  PadicNumber det() const;
  PMatrix transpose() const;
  PMatrix pow(long e) const;
  bool is_exact() const;
  bool is_upper_triangular() const;  // zero-to-precision below the diagonal
  bool equals_to_precision(const PMatrix& other) const;
  // Minimum absolute agreement over entries.
  long agreement(const PMatrix& other) const;
  // Least valuation over certified-nonzero entries (kInfinity for a zero matrix).
  long min_valuation() const;

  friend PMatrix operator+(const PMatrix& a, const PMatrix& b);
  friend PMatrix operator-(const PMatrix& a, const PMatrix& b);
  friend PMatrix operator*(const PMatrix& a, const PMatrix& b);
  friend PMatrix operator*(const PadicNumber& c, const PMatrix& a);
  PMatrix operator-() const;

  std::vector<std::vector<std::string>> to_strings() const;
  std::string to_string() const;

 private:
  Context ctx_;
  int n_ = 0;
  std::vector<PadicNumber> a_;
};

PMatrix commutator(const PMatrix& a, const PMatrix& b);

// Characteristic polynomial det(t*Id - M), coefficients in ascending degree.
std::vector<PadicNumber> char_poly(const PMatrix& m);
PMatrix evaluate_poly(const std::vector<PadicNumber>& coeffs, const PMatrix& m);

}  // namespace chabauty
