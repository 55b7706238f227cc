#pragma once

#include <optional>
#include <vector>

#include "chabauty/padic.hpp"

namespace chabauty {

PadicNumber padic_inv(const PadicNumber& x);
PadicNumber padic_log(const PadicNumber& x);
PadicNumber padic_exp(const PadicNumber& x);
// exp(log(x)/m) on its convergence domain.
PadicNumber nth_root(const PadicNumber& x, long m);
// Any k-th root of x in Q_p, or nullopt when x is not a k-th power.
// Exact rational roots are preferred when they exist.
std::optional<PadicNumber> kth_root(const PadicNumber& x, long k);

struct PowerClassLabel {
  long exponent = 0;        // k
  long valuation_class = 0; // v(x) mod k
  mpz_class unit_rep;       // minimal unit representative of the coset
  PadicNumber representative;

  std::string to_string() const;
  friend bool operator==(const PowerClassLabel& a, const PowerClassLabel& b) {
    return a.exponent == b.exponent && a.valuation_class == b.valuation_class &&
           a.unit_rep == b.unit_rep;
  }
  friend bool operator<(const PowerClassLabel& a, const PowerClassLabel& b) {
    if (a.valuation_class != b.valuation_class) return a.valuation_class < b.valuation_class;
    return a.unit_rep < b.unit_rep;
  }
};

struct PowerClassDecision {
  bool is_kth_power = false;
  PowerClassLabel label;
};

// Depth 2*v_p(k)+1 at which k-th power residues decide k-th powers.
long power_class_depth(long p, long k);
PowerClassDecision power_class_decide(const PadicNumber& x, long k);
long count_power_classes(long p, long k);
// Canonical transversal of Q_p^*/(Q_p^*)^k in label order.
std::vector<PowerClassLabel> power_class_transversal(const Context& ctx, long k);

std::vector<PadicNumber> roots_of_unity(const Context& ctx, long n);

}  // namespace chabauty
