#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chabauty/group.hpp"
#include "chabauty/laurent.hpp"
#include "chabauty/padic_functions.hpp"

namespace chabauty {

using QGrid = std::vector<std::vector<mpq_class>>;

// One family of limit algebras, optionally depending on a parameter.
struct LimitFamilySpec {
  std::string name;  // e.g. "N4[alpha=5]"
  std::string stem;  // e.g. "N4"
  int n = 0;
  std::optional<mpq_class> parameter;
  long class_exponent = 0;  // k of Q_p^*/(Q_p^*)^k indexing the parameter, 0 if none
  std::vector<QGrid> generators;                    // spanning matrices of the algebra
  std::vector<std::vector<std::string>> conjugator;  // Laurent entries in s = p^(-m)
  std::vector<int> blocks;                           // declared block partition
  std::string provenance;
};

Subspace family_algebra(const Context& ctx, const LimitFamilySpec& spec);
LaurentFamily family_conjugator(const Context& ctx, const LimitFamilySpec& spec);
AlgebraFamily family_limit_problem(const Context& ctx, const LimitFamilySpec& spec);

// Named families; parameterized ones take their parameter explicitly.
LimitFamilySpec sl2_cartan();
LimitFamilySpec sl2_nilpotent();
LimitFamilySpec sl3_family(const std::string& stem);  // "C", "H", "N12", "N23"
LimitFamilySpec sl3_n_alpha(const mpq_class& alpha);
LimitFamilySpec sl4_family(const std::string& stem);  // the twelve parameter-free families
LimitFamilySpec sl4_n1(const mpq_class& beta);
LimitFamilySpec sl4_n4(const mpq_class& alpha);
// The seven-dimensional family whose orbit geometry carries a cross ratio.
LimitFamilySpec sl7_rho(const mpq_class& alpha);

// Looks up "sl3-Nalpha", "sl4-N4" and similar; parameterized stems need `parameter`.
LimitFamilySpec preset(const std::string& name, const std::optional<mpq_class>& parameter = std::nullopt);
std::vector<std::string> preset_names();

// All classes exhibited for SL(n): parameter-free families plus one member
// per power class of each parameterized family.
std::vector<LimitFamilySpec> table_families(const Context& ctx, int n);

// Tangent algebra and group elements of the four-parameter abelian subgroup
// of SL(5, Q_p) that is not flat.
Subspace sl5_nonflat_algebra(const Context& ctx);
PMatrix sl5_nonflat_element(const Context& ctx, const mpq_class& a, const mpq_class& b, const mpq_class& c,
                            const mpq_class& d);

enum class Verdict { Distinct, Conjugate, Undecided };
std::string to_string(Verdict v);

struct InvariantResult {
  Verdict verdict = Verdict::Undecided;
  std::string reason;
  std::optional<PowerClassLabel> label1, label2;
  std::optional<PMatrix> conjugator;  // diagonal T with T A1 T^-1 = A2
  bool conjugator_verified = false;
};

InvariantResult conjugacy_invariant(const Context& ctx, const LimitFamilySpec& a, const LimitFamilySpec& b);

struct FamilyCheck {
  std::string name;
  std::string stem;
  std::string provenance;
  std::string parameter_label;  // power-class representative, empty if none
  int dimension = 0;
  bool abelian = false;
  bool closed = false;
  bool limit_matches = false;
  long oracle_agreement = -1;
  long oracle_digits = 0;
  bool oracle_ok = false;
  std::string blocks;
  bool blocks_ok = false;
  long flatness = -1;
  AlgebraSignature signature;
  std::string limit;
  std::string error;
  bool passed = false;
};

struct TableReport {
  int n = 0;
  long p = 0;
  int precision = 0;
  std::vector<FamilyCheck> families;
  long classes = 0;           // pairwise-separated classes exhibited
  long expected_classes = 0;  // closed-form count (lower bound for n = 4)
  long upper_bound = 0;       // closed-form upper bound (n = 4 only)
  std::string formula;
  bool separated = false;
  bool passed = false;
  std::vector<double> seconds;  // per family, parallel to `families`
};

struct TableOptions {
  std::vector<long> oracle_levels{6, 7, 8, 9, 10};
  int samples = 50;
  unsigned long long seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Verifies every family of the SL(n) table, n in {2, 3, 4}.
TableReport verify_table(const Context& ctx, int n, const TableOptions& opts = {});

}  // namespace chabauty
