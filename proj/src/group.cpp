#include "chabauty/group.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "chabauty/padic_functions.hpp"

namespace chabauty {

namespace {

long exp_domain(long p) { return p == 2 ? 2 : 1; }

PadicNumber rat(const Context& ctx, const mpq_class& q) { return PadicNumber::from_rational(ctx, q); }

Vec concat(const std::vector<Vec>& parts) {
  Vec out;
  for (const auto& v : parts) out.insert(out.end(), v.begin(), v.end());
  return out;
}

// Left kernel of a k x width system: coefficient vectors c with sum c_i rows_i = 0.
std::vector<Vec> left_kernel(const Context& ctx, const std::vector<Vec>& rows, int width) {
  const size_t k = rows.size();
  const PadicNumber zero = PadicNumber::zero(ctx);
  const PadicNumber one = PadicNumber::one(ctx);
  std::vector<Vec> aug;
  for (size_t i = 0; i < k; ++i) {
    Vec v = rows[i];
    for (size_t j = 0; j < k; ++j) v.push_back(i == j ? one : zero);
    aug.push_back(std::move(v));
  }
  const Echelon e = row_reduce(ctx, aug, width + static_cast<int>(k));
  std::vector<Vec> out;
  for (size_t r = 0; r < e.rows.size(); ++r)
    if (e.pivots[r] >= width) out.emplace_back(e.rows[r].begin() + width, e.rows[r].end());
  return out;
}

std::vector<PMatrix> span_basis(const Context& ctx, int n, const std::vector<PMatrix>& mats) {
  if (mats.empty()) return {};
  std::vector<Vec> rows;
  for (const auto& m : mats) rows.push_back(to_coords(m, Coords::Matrix));
  return Subspace::echelonize(ctx, n, Coords::Matrix, rows).basis_matrices();
}

}  // namespace

int rank_of(const Context& ctx, const std::vector<Vec>& rows, int ncols) {
  if (rows.empty()) return 0;
  return static_cast<int>(row_reduce(ctx, rows, ncols).rows.size());
}

// ------------------------------------------------------------------- GrGroup

GrGroup GrGroup::from_algebra(const Subspace& algebra) {
  GrGroup g;
  g.algebra_ = algebra.coords() == Coords::TraceZero ? algebra : algebra.in_coords(Coords::TraceZero);
  g.with_id_ = g.algebra_.with_identity();
  return g;
}

bool GrGroup::is_closed() const { return is_closed_under_product(with_id_); }

Subspace generated_algebra(const PMatrix& a) {
  const Context& ctx = a.context();
  const int n = a.size();
  std::vector<PMatrix> powers{PMatrix::identity(ctx, n)};
  for (int k = 1; k < n; ++k) powers.push_back(powers.back() * a);
  const Subspace unital = Subspace::span(powers, Coords::Matrix);
  const PadicNumber nn = PadicNumber::from_int(ctx, n);
  std::vector<PMatrix> traceless;
  for (const auto& m : unital.basis_matrices()) traceless.push_back(m - (m.trace() / nn) * PMatrix::identity(ctx, n));
  return Subspace::span(traceless, Coords::TraceZero, true);
}

bool gr_membership(const GrGroup& group, const PMatrix& g) {
  if (g.size() != group.n()) throw Error(Errc::InvalidArgument, "matrix size does not match the group");
  const PadicNumber d = g.det() - PadicNumber::one(g.context());
  if (d.is_certified_nonzero()) return false;
  if (d.is_big_oh() && d.absolute_precision() < 1)
    throw Error(Errc::PrecisionExhausted, "determinant is not certified to a single digit");
  return group.span_with_id().contains(g);
}

// ----------------------------------------------------------------------- exp

PMatrix exp_matrix(const PMatrix& x) {
  const Context& ctx = x.context();
  const int n = x.size();
  const long p = ctx->prime();
  const long N = ctx->precision();
  const PMatrix id = PMatrix::identity(ctx, n);

  if (x.is_exact()) {
    PMatrix acc = id, term = id;
    for (int k = 1; k <= n; ++k) {
      term = rat(ctx, mpq_class(1, k)) * (term * x);
      bool zero = true;
      for (int i = 0; i < n && zero; ++i)
        for (int j = 0; j < n && zero; ++j) zero = term(i, j).is_exact_zero();
      if (zero) return acc;
      acc = acc + term;
    }
  }

  const long v = x.min_valuation();
  if (v < exp_domain(p)) throw Error(Errc::OutOfDomain, "exp needs v(X) >= " + std::to_string(exp_domain(p)));

  // v(X^k / k!) >= k v - (k-1)/(p-1); stop once that bound reaches N.
  long K = 1;
  while ((K * v - N) * (p - 1) < K - 1) ++K;

  // support of the series: closure of the pattern of X together with the diagonal
  std::vector<char> support(static_cast<size_t>(n) * n, 0), step(support.size(), 0);
  for (int i = 0; i < n; ++i) {
    support[static_cast<size_t>(i) * n + i] = 1;
    for (int j = 0; j < n; ++j)
      if (!x(i, j).is_exact_zero()) step[static_cast<size_t>(i) * n + j] = 1;
  }
  for (bool grew = true; grew;) {
    grew = false;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        if (!support[static_cast<size_t>(i) * n + k]) continue;
        for (int j = 0; j < n; ++j)
          if (step[static_cast<size_t>(k) * n + j] && !support[static_cast<size_t>(i) * n + j]) {
            support[static_cast<size_t>(i) * n + j] = 1;
            grew = true;
          }
      }
  }

  PMatrix acc = id, term = id;
  for (long k = 1; k < K; ++k) {
    term = rat(ctx, mpq_class(1, k)) * (term * x);
    acc = acc + term;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!support[static_cast<size_t>(i) * n + j]) continue;
      PadicNumber& e = acc(i, j);
      e = e.is_exact_zero() ? PadicNumber::big_oh(ctx, N) : e.with_absolute_precision(N);
    }
  return acc;
}

PMatrix exp_into_group(const GrGroup& group, const PMatrix& x) {
  if (!group.algebra().contains(x)) throw Error(Errc::InvalidArgument, "X is not in the algebra");
  PMatrix g = exp_matrix(x);
  if (!gr_membership(group, g)) throw Error(Errc::PrecisionExhausted, "exp(X) failed the membership check");
  return g;
}

// ------------------------------------------------------------ classification

std::string to_string(Isometry kind) { return kind == Isometry::Elliptic ? "elliptic" : "hyperbolic"; }

Isometry classify_isometry(const PMatrix& g) {
  return newton_slopes(g).has_nonzero_slope() ? Isometry::Hyperbolic : Isometry::Elliptic;
}

HyperbolicWitness hyperbolic_witness(const PMatrix& a) {
  const Context& ctx = a.context();
  const int n = a.size();
  const long N = ctx->precision();
  if (!a.is_upper_triangular()) throw Error(Errc::InvalidArgument, "witness needs an upper-triangular matrix");
  if (a.trace().is_certified_nonzero()) throw Error(Errc::InvalidArgument, "witness needs a trace-zero matrix");
  std::vector<PadicNumber> diag;
  for (int i = 0; i < n; ++i) diag.push_back(a(i, i));
  if (std::none_of(diag.begin(), diag.end(), [](const PadicNumber& d) { return d.is_certified_nonzero(); }))
    throw Error(Errc::NoWitnessNeeded, "diagonal is identically zero");

  // shift by the last diagonal entry, then use the entry of least valuation
  const int j = n - 1;
  std::vector<PadicNumber> b;
  for (const auto& d : diag) b.push_back(d - diag[j]);
  int best = -1;
  long best_v = kInfinity;
  for (int i = 0; i < n; ++i)
    if (b[i].is_certified_nonzero() && b[i].valuation() < best_v) {
      best = i;
      best_v = b[i].valuation();
    }
  if (best < 0) throw Error(Errc::PrecisionExhausted, "diagonal differences are uncertified");

  const PMatrix id = PMatrix::identity(ctx, n);
  for (long m = 1; m <= N / 2; ++m) {
    const PadicNumber lambda = rat(ctx, mpq_class(ctx->power(m))) - diag[j];
    std::vector<long> vals;
    bool ok = true;
    for (int t = 0; t < n && ok; ++t) {
      const PadicNumber e = diag[t] + lambda;
      if (!e.is_certified_nonzero()) ok = false;
      else vals.push_back(e.valuation());
    }
    if (!ok) continue;
    const long total = std::accumulate(vals.begin(), vals.end(), 0L);
    // |a_i + lambda|^n > prod_t |a_t + lambda|  <=>  n v_i < sum_t v_t
    if (n * vals[best] >= total) continue;
    const PMatrix shifted = a + lambda * id;
    const PadicNumber det = shifted.det();
    PMatrix h = det.inv() * shifted.pow(n);
    HyperbolicWitness w{lambda, m, best, h};
    if (!h(best, best).is_certified_nonzero() || h(best, best).valuation() >= 0)
      throw Error(Errc::PrecisionExhausted, "witness diagonal lost precision");
    return w;
  }
  throw Error(Errc::PrecisionExhausted, "no witness exponent up to N/2");
}

bool in_unipotent_times_roots(const PMatrix& g) {
  const int n = g.size();
  if (!g.is_upper_triangular()) return false;
  const PadicNumber lambda = g(0, 0);
  for (int i = 1; i < n; ++i)
    if (!g(i, i).equals_to_precision(lambda)) return false;
  return lambda.pow(n).equals_to_precision(PadicNumber::one(g.context()));
}

std::string BlockPartition::to_string() const {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < sizes.size(); ++i) os << (i ? "," : "") << sizes[i];
  os << ")";
  return os.str();
}

BlockPartition block_structure_check(const Subspace& a) {
  const int n = a.n();
  const auto mats = a.basis_matrices();
  BlockPartition part;
  std::vector<int> block_of(n, 0);
  int start = 0;
  for (int k = 1; k <= n; ++k) {
    bool same = k < n;
    for (const auto& m : mats) {
      if (!same) break;
      same = m(k, k).equals_to_precision(m(k - 1, k - 1));
    }
    if (!same) {
      part.sizes.push_back(k - start);
      for (int t = start; t < k; ++t) block_of[t] = static_cast<int>(part.sizes.size()) - 1;
      start = k;
    }
  }
  for (const auto& m : mats)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (m(i, j).is_certified_nonzero() && block_of[i] != block_of[j])
          throw Error(Errc::NotBlockConstant,
                      "entry (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") lies below the block diagonal");
  return part;
}

// ------------------------------------------------------------------ sampling

long draw(std::mt19937_64& rng, long lo, long hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<long>(rng() % span);
}

mpq_class draw_rational(std::mt19937_64& rng, long bound) {
  mpq_class q(draw(rng, -bound, bound), draw(rng, 1, bound));
  q.canonicalize();
  return q;
}

std::vector<PMatrix> sample_group(const GrGroup& group, int count, std::mt19937_64& rng) {
  const Context& ctx = group.context();
  const int n = group.n();
  const auto basis = group.span_with_id().basis_matrices();
  std::vector<PMatrix> out;
  while (static_cast<int>(out.size()) < count) {
    const long kind = draw(rng, 0, 9);
    if (kind == 0 && n % 2 == 0) {
      out.push_back(-PMatrix::identity(ctx, n));
      continue;
    }
    if (kind <= 2 && out.size() >= 2) {
      const auto i = static_cast<size_t>(draw(rng, 0, static_cast<long>(out.size()) - 1));
      const auto j = static_cast<size_t>(draw(rng, 0, static_cast<long>(out.size()) - 1));
      out.push_back(out[i] * out[j]);
      continue;
    }
    PMatrix y(ctx, n);
    for (const auto& b : basis) y = y + rat(ctx, draw_rational(rng, 9)) * b;
    const PadicNumber d = y.det();
    if (!d.is_certified_nonzero()) continue;
    out.push_back(d.inv() * y.pow(n));
  }
  return out;
}

long flatness_defect(const std::vector<PMatrix>& samples, const Subspace& a) {
  if (samples.empty()) throw Error(Errc::InsufficientSamples, "no samples");
  const Context& ctx = samples[0].context();
  const int n = samples[0].size();
  const int D = n * n;
  std::vector<Vec> rows{to_coords(PMatrix::identity(ctx, n), Coords::Matrix)};
  int rank = 1;
  size_t last_growth = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    rows.push_back(to_coords(samples[i], Coords::Matrix));
    Echelon e = row_reduce(ctx, rows, D);
    if (static_cast<int>(e.rows.size()) > rank) {
      rank = static_cast<int>(e.rows.size());
      last_growth = i + 1;
    }
    rows = std::move(e.rows);
  }
  const size_t window = std::max<size_t>(5, samples.size() / 5);
  if (samples.size() < window || last_growth > samples.size() - window)
    throw Error(Errc::InsufficientSamples, "span still growing after " + std::to_string(samples.size()) + " samples");
  return rank - (a.dim() + 1);
}

// --------------------------------------------------------------- cross ratio

bool CrossRatioSet::same_as(const CrossRatioSet& other) const {
  if (values.size() != other.values.size()) return false;
  std::vector<bool> used(other.values.size(), false);
  for (const auto& v : values) {
    bool found = false;
    for (size_t j = 0; j < other.values.size() && !found; ++j)
      if (!used[j] && v.equals_to_precision(other.values[j])) used[j] = found = true;
    if (!found) return false;
  }
  return true;
}

bool CrossRatioSet::intersects(const CrossRatioSet& other) const {
  for (const auto& v : values)
    for (const auto& w : other.values)
      if (v.equals_to_precision(w)) return true;
  return false;
}

CrossRatioSet cross_ratio_set(const PadicNumber& alpha) {
  const Context& ctx = alpha.context();
  const PadicNumber one = PadicNumber::one(ctx);
  const PadicNumber two = PadicNumber::from_int(ctx, 2);
  for (const auto& bad : {PadicNumber::zero(ctx), one, two})
    if (alpha.equals_to_precision(bad)) throw Error(Errc::DegenerateParameter, "alpha must avoid 0, 1, 2");
  const PadicNumber lambda = two * (alpha - one) / alpha;
  CrossRatioSet set;
  set.values = {lambda, lambda.inv(), one - lambda, (one - lambda).inv(), lambda / (lambda - one), (lambda - one) / lambda};
  return set;
}

std::vector<PadicNumber> cross_ratio_class(const PadicNumber& alpha) {
  const Context& ctx = alpha.context();
  const PadicNumber two = PadicNumber::from_int(ctx, 2);
  std::vector<PadicNumber> out;
  // 2(beta-1)/beta = mu  <=>  beta = 2/(2-mu)
  for (const auto& mu : cross_ratio_set(alpha).values) {
    const PadicNumber d = two - mu;
    if (!d.is_certified_nonzero()) continue;
    const PadicNumber beta = two / d;
    if (std::none_of(out.begin(), out.end(), [&](const PadicNumber& b) { return b.equals_to_precision(beta); }))
      out.push_back(beta);
  }
  return out;
}

PMatrix rho_alpha(const PadicNumber& alpha, const Vec& v) {
  if (v.size() != 6) throw Error(Errc::InvalidArgument, "rho_alpha takes six parameters");
  const Context& ctx = alpha.context();
  PMatrix g = PMatrix::identity(ctx, 7);
  const PadicNumber two = PadicNumber::from_int(ctx, 2);
  g(0, 5) = v[0];
  g(1, 5) = v[1];
  g(1, 6) = v[1];
  g(2, 5) = v[2];
  g(2, 6) = two * v[2];
  g(3, 5) = v[3];
  g(3, 6) = alpha * v[3];
  g(4, 5) = v[4];
  g(4, 6) = v[5];
  return g;
}

Subspace rho_alpha_algebra(const Context& ctx, const mpq_class& alpha) {
  const PadicNumber a = rat(ctx, alpha);
  const PMatrix id = PMatrix::identity(ctx, 7);
  std::vector<PMatrix> gens;
  for (int k = 0; k < 6; ++k) {
    Vec v(6, PadicNumber::zero(ctx));
    v[k] = PadicNumber::one(ctx);
    gens.push_back(rho_alpha(a, v) - id);
  }
  return Subspace::span(gens, Coords::TraceZero);
}

int orbit_dimension(const PadicNumber& alpha, const Vec& x) {
  if (x.size() != 7) throw Error(Errc::InvalidArgument, "orbit_dimension takes a point of P^6");
  const Context& ctx = alpha.context();
  const PMatrix id = PMatrix::identity(ctx, 7);
  std::vector<Vec> images;
  for (int k = 0; k < 6; ++k) {
    Vec v(6, PadicNumber::zero(ctx));
    v[k] = PadicNumber::one(ctx);
    const PMatrix d = rho_alpha(alpha, v) - id;
    Vec img(7, PadicNumber::zero(ctx));
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) img[i] += d(i, j) * x[j];
    images.push_back(std::move(img));
  }
  return rank_of(ctx, images, 7);
}

// ----------------------------------------------------------------- signature

std::string AlgebraSignature::to_string() const {
  std::ostringstream os;
  os << "ss=" << semisimple_rank << " nil=" << nil_dim << " nil2=" << nil_square_dim << " nil3=" << nil_cube_dim
     << " ker=" << common_kernel_dim << " im=" << image_dim << " cent=" << centralizer_dim
     << " norm=" << normalizer_dim;
  return os.str();
}

AlgebraSignature algebra_signature(const Subspace& a) {
  const Context& ctx = a.context();
  const int n = a.n();
  const Subspace tz = a.coords() == Coords::TraceZero ? a : a.in_coords(Coords::TraceZero);
  const auto unital = tz.with_identity().basis_matrices();
  const size_t k = unital.size();
  AlgebraSignature sig;

  // nilradical of a commutative algebra = radical of the trace form
  std::vector<Vec> gram;
  for (size_t i = 0; i < k; ++i) {
    Vec row;
    for (size_t j = 0; j < k; ++j) row.push_back((unital[i] * unital[j]).trace());
    gram.push_back(std::move(row));
  }
  std::vector<PMatrix> nil;
  for (const auto& c : left_kernel(ctx, gram, static_cast<int>(k))) {
    PMatrix m(ctx, n);
    for (size_t i = 0; i < k; ++i) m = m + c[i] * unital[i];
    nil.push_back(m);
  }
  nil = span_basis(ctx, n, nil);
  sig.nil_dim = static_cast<int>(nil.size());
  sig.semisimple_rank = static_cast<int>(k) - sig.nil_dim;

  std::vector<PMatrix> sq, cube;
  for (const auto& x : nil)
    for (const auto& y : nil) sq.push_back(x * y);
  sq = span_basis(ctx, n, sq);
  for (const auto& x : sq)
    for (const auto& y : nil) cube.push_back(x * y);
  cube = span_basis(ctx, n, cube);
  sig.nil_square_dim = static_cast<int>(sq.size());
  sig.nil_cube_dim = static_cast<int>(cube.size());

  std::vector<Vec> row_stack, col_stack;
  for (const auto& x : nil)
    for (int i = 0; i < n; ++i) {
      Vec r, c;
      for (int j = 0; j < n; ++j) {
        r.push_back(x(i, j));
        c.push_back(x(j, i));
      }
      row_stack.push_back(std::move(r));
      col_stack.push_back(std::move(c));
    }
  sig.common_kernel_dim = n - rank_of(ctx, row_stack, n);
  sig.image_dim = rank_of(ctx, col_stack, n);

  const auto basis = tz.basis_matrices();
  std::vector<Vec> cent_rows, norm_rows;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const PMatrix e = PMatrix::unit(ctx, n, i, j);
      std::vector<Vec> cparts, nparts;
      for (const auto& b : basis) {
        const PMatrix c = commutator(e, b);
        cparts.push_back(to_coords(c, Coords::Matrix));
        nparts.push_back(tz.reduce(to_coords(c, Coords::TraceZero)));
      }
      cent_rows.push_back(concat(cparts));
      norm_rows.push_back(concat(nparts));
    }
  const int width_c = static_cast<int>(basis.size()) * n * n;
  const int width_n = static_cast<int>(basis.size()) * (n * n - 1);
  sig.centralizer_dim = n * n - (basis.empty() ? 0 : rank_of(ctx, cent_rows, width_c));
  sig.normalizer_dim = n * n - (basis.empty() ? 0 : rank_of(ctx, norm_rows, width_n));
  return sig;
}

}  // namespace chabauty
