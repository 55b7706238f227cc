#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <random>

#include "chabauty/group.hpp"
#include "chabauty/tables.hpp"

using namespace chabauty;

namespace {

PadicNumber R(const Context& ctx, const mpq_class& q) { return PadicNumber::from_rational(ctx, q); }

using QMat = std::vector<std::vector<mpq_class>>;

QMat qmul(const QMat& a, const QMat& b) {
  const size_t n = a.size();
  QMat c(n, std::vector<mpq_class>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t k = 0; k < n; ++k)
      for (size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Truncated exponential sum over Q.
QMat qexp(const QMat& x, int terms) {
  const size_t n = x.size();
  QMat sum(n, std::vector<mpq_class>(n)), term(n, std::vector<mpq_class>(n));
  for (size_t i = 0; i < n; ++i) sum[i][i] = term[i][i] = 1;
  for (int k = 1; k < terms; ++k) {
    term = qmul(term, x);
    for (auto& row : term)
      for (auto& e : row) e /= k;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) sum[i][j] += term[i][j];
  }
  return sum;
}

mpq_class cross_ratio(const mpq_class& a, const mpq_class& b, const mpq_class& c, const mpq_class& d) {
  return ((c - a) * (d - b)) / ((c - b) * (d - a));
}

}  // namespace

TEST(Group, ExpOfNilpotentIsExactFiniteSum) {
  auto ctx = PrimeContext::make(5, 24);
  const QMat x{{0, 2, mpq_class(1, 5), 3}, {0, 0, 7, -1}, {0, 0, 0, mpq_class(2, 25)}, {0, 0, 0, 0}};
  const PMatrix e = exp_matrix(PMatrix::from_rationals(ctx, x));
  EXPECT_TRUE(e.is_exact());
  EXPECT_TRUE(e.equals_to_precision(PMatrix::from_rationals(ctx, qexp(x, 6))));
}

TEST(Group, ExpSeriesMatchesRationalTruncation) {
  auto ctx = PrimeContext::make(7, 20);
  const QMat x{{7, 14}, {49, -7}};
  const PMatrix e = exp_matrix(PMatrix::from_rationals(ctx, x));
  const PMatrix ref = PMatrix::from_rationals(ctx, qexp(x, 40));
  EXPECT_GE(e.agreement(ref), 20);
  EXPECT_THROW((void)exp_matrix(PMatrix::from_rationals(ctx, {{1, 0}, {0, -1}})), Error);
}

TEST(Group, ClassifyIsometry) {
  auto ctx = PrimeContext::make(5, 24);
  EXPECT_EQ(classify_isometry(PMatrix::from_rationals(ctx, {{5, 0, 0}, {0, 1, 0}, {0, 0, mpq_class(1, 5)}})),
            Isometry::Hyperbolic);
  EXPECT_EQ(classify_isometry(PMatrix::from_rationals(ctx, {{1, 125, 0}, {0, 1, mpq_class(1, 25)}, {0, 0, 1}})),
            Isometry::Elliptic);
  EXPECT_EQ(classify_isometry(PMatrix::from_rationals(ctx, {{0, 1}, {-1, 0}})), Isometry::Elliptic);
}

TEST(Group, HyperbolicWitnessLandsInGroup) {
  auto ctx = PrimeContext::make(5, 32);
  std::mt19937_64 rng(17);
  for (int t = 0; t < 20; ++t) {
    QMat a(3, std::vector<mpq_class>(3));
    a[0][1] = draw_rational(rng, 20);
    a[0][2] = draw_rational(rng, 20);
    a[1][2] = draw_rational(rng, 20);
    a[0][0] = draw(rng, 1, 9);
    a[1][1] = draw_rational(rng, 20);
    a[2][2] = -a[0][0] - a[1][1];
    const PMatrix am = PMatrix::from_rationals(ctx, a);
    const HyperbolicWitness w = hyperbolic_witness(am);
    EXPECT_LT(w.h(w.diagonal_index, w.diagonal_index).valuation(), 0);
    EXPECT_EQ(classify_isometry(w.h), Isometry::Hyperbolic);
    const GrGroup g = GrGroup::from_algebra(generated_algebra(am));
    EXPECT_TRUE(gr_membership(g, w.h));
  }
}

TEST(Group, NilpotentNeedsNoWitness) {
  auto ctx = PrimeContext::make(5, 24);
  try {
    (void)hyperbolic_witness(PMatrix::from_rationals(ctx, {{0, 1, 2}, {0, 0, 3}, {0, 0, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NoWitnessNeeded);
  }
  const PMatrix neg = PMatrix::from_rationals(ctx, {{-1, 4}, {0, -1}});
  EXPECT_TRUE(in_unipotent_times_roots(neg));
  EXPECT_FALSE(in_unipotent_times_roots(PMatrix::from_rationals(ctx, {{2, 0, 0}, {0, 1, 0}, {0, 0, mpq_class(1, 2)}})));
}

TEST(Group, BlockPartitions) {
  auto ctx = PrimeContext::make(7, 24);
  EXPECT_EQ(block_structure_check(family_algebra(ctx, sl3_family("C"))).sizes, (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(block_structure_check(family_algebra(ctx, sl3_family("H"))).sizes, (std::vector<int>{2, 1}));
  EXPECT_EQ(block_structure_check(family_algebra(ctx, sl4_family("F0"))).sizes, (std::vector<int>{2, 2}));
  EXPECT_EQ(block_structure_check(family_algebra(ctx, sl4_n4(3))).sizes, (std::vector<int>{4}));
  const Subspace lower = Subspace::span({PMatrix::from_rationals(ctx, {{1, 0}, {1, -1}})}, Coords::TraceZero);
  try {
    (void)block_structure_check(lower);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotBlockConstant);
  }
}

TEST(Group, FlatnessSeparatesTableFromNonFlatExample) {
  auto ctx = PrimeContext::make(5, 24);
  std::mt19937_64 rng(5);
  const Subspace f1 = family_algebra(ctx, sl4_family("F1"));
  EXPECT_EQ(flatness_defect(sample_group(GrGroup::from_algebra(f1), 50, rng), f1), 0);

  const Subspace nonflat = sl5_nonflat_algebra(ctx);
  std::vector<PMatrix> samples;
  for (int i = 0; i < 40; ++i)
    samples.push_back(sl5_nonflat_element(ctx, draw_rational(rng, 9), draw_rational(rng, 9), draw_rational(rng, 9),
                                          draw_rational(rng, 9)));
  EXPECT_GE(flatness_defect(samples, nonflat), 1);
}

TEST(Group, CrossRatioSetMatchesAllOrderings) {
  auto ctx = PrimeContext::make(7, 24);
  for (const mpq_class alpha : {mpq_class(5), mpq_class(-3), mpq_class(7, 4), mpq_class(1, 49)}) {
    std::array<mpq_class, 4> pts{0, 1, 2, alpha};
    std::array<int, 4> idx{0, 1, 2, 3};
    std::vector<mpq_class> direct;
    do {
      direct.push_back(cross_ratio(pts[idx[0]], pts[idx[1]], pts[idx[2]], pts[idx[3]]));
    } while (std::next_permutation(idx.begin(), idx.end()));
    std::sort(direct.begin(), direct.end());
    direct.erase(std::unique(direct.begin(), direct.end()), direct.end());

    std::vector<mpq_class> ours;
    for (const auto& v : cross_ratio_set(R(ctx, alpha)).values) ours.push_back(v.exact_value());
    std::sort(ours.begin(), ours.end());
    ours.erase(std::unique(ours.begin(), ours.end()), ours.end());
    EXPECT_EQ(ours, direct) << alpha.get_str();

    for (const auto& beta : cross_ratio_class(R(ctx, alpha)))
      EXPECT_TRUE(cross_ratio_set(beta).same_as(cross_ratio_set(R(ctx, alpha)))) << beta.to_string();
  }
}

TEST(Group, OrbitDimensionCases) {
  auto ctx = PrimeContext::make(7, 24);
  const PadicNumber alpha = R(ctx, 5);
  auto point = [&](long x6, long x7) {
    Vec x;
    for (long c : {3L, -1L, 4L, 1L, 2L, x6, x7}) x.push_back(R(ctx, c));
    return x;
  };
  EXPECT_EQ(orbit_dimension(alpha, point(0, 0)), 0);
  EXPECT_EQ(orbit_dimension(alpha, point(3, 1)), 5);
  for (long t : {0L, 1L, 2L, 5L}) EXPECT_EQ(orbit_dimension(alpha, point(-t, 1)), 4) << "t=" << t;
}

TEST(Group, SignatureSeparatesNilpotentFamilies) {
  auto ctx = PrimeContext::make(5, 24);
  const auto n5 = algebra_signature(family_algebra(ctx, sl4_family("N5")));
  const auto n6 = algebra_signature(family_algebra(ctx, sl4_family("N6")));
  EXPECT_NE(n5, n6);
  EXPECT_EQ(n5.nil_dim, 3);
  const auto c = algebra_signature(cartan_algebra(ctx, 4));
  EXPECT_EQ(c.semisimple_rank, 4);
  EXPECT_EQ(c.nil_dim, 0);
}

TEST(Group, SamplingIsDeterministic) {
  auto ctx = PrimeContext::make(5, 24);
  const GrGroup g = GrGroup::from_algebra(family_algebra(ctx, sl3_family("N12")));
  std::mt19937_64 r1(9), r2(9);
  const auto a = sample_group(g, 10, r1);
  const auto b = sample_group(g, 10, r2);
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].to_string(), b[i].to_string());
  for (const auto& m : a) EXPECT_TRUE(gr_membership(g, m));
}
