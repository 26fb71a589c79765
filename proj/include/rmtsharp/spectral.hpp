#pragma once
// Extremal singular values, exact singularity certification, centered
// operator norms, condition numbers, the dominant eigenpair, the
// Hilbert-Schmidt norm of the inverse, and the two column-distance formulas
// (orthogonal projection, and the quadratic-form identity it validates).
//
// Numeric layout: matrices at or below n_dense go through a dense symmetric
// eigensolve of A^T A; larger ones use Lanczos with full reorthogonalization
// (for the top of the spectrum) or Lanczos on (A^T A)^{-1} through a sparse
// LU factorization (for the bottom). Singularity is never decided in floating
// point: certify_singularity performs modular elimination and its verdict is
// exact.

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmtsharp/errors.hpp"
#include "rmtsharp/exact.hpp"
#include "rmtsharp/matrix.hpp"
#include "rmtsharp/models.hpp"
#include "rmtsharp/rng.hpp"

namespace rmtsharp {

enum class Certificate { Invertible, Singular, Unknown };

inline Certificate certify_singularity(const SparseBinaryMatrix& a);

inline const char* to_string(Certificate c) {
  switch (c) {
    case Certificate::Invertible: return "invertible";
    case Certificate::Singular: return "singular";
    default: return "unknown";
  }
}

// One row of results from the spectral pipeline; fields are filled by the
// operations that were actually run (experiments skip what a campaign does
// not need). Ratios use +inf when the matrix is singular.
struct SpectralSummary {
  std::optional<double> s_min;
  std::optional<double> s2;
  std::optional<double> s_max;
  std::optional<double> centered_norm;
  std::optional<double> sigma;
  std::optional<double> sigma_tilde;
  std::optional<double> lambda0;
  std::optional<double> eigvec_dev;
  Certificate singular_exact = Certificate::Unknown;
};

struct SingularTriple {
  double s_min = 0.0;
  double s2 = 0.0;
  double s_max = 0.0;
};

// ---------------------------------------------------------------------------
// Lanczos on a symmetric positive semidefinite operator.

namespace detail {

constexpr double kDefaultTol = 1e-10;
constexpr int kDefaultMaxIter = 10000;

// Deterministic unit start vector; keyed by dimension only so repeated calls
// on equal inputs reproduce bit-identical iterations.
inline Eigen::VectorXd lanczos_start(int dim) {
  CounterStream cs(SeededRng{0x4C414E43ULL, 0}, rng_tag::kProbe,
                   static_cast<std::uint64_t>(dim));
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = 2.0 * cs.next_unit() - 1.0;
  const double norm = v.norm();
  if (norm == 0.0) v.setConstant(1.0 / std::sqrt(static_cast<double>(dim)));
  else v /= norm;
  return v;
}

// Returns the `want` largest eigenvalues of a PSD operator given through
// `apply`, using Lanczos with full reorthogonalization. Residual bounds
// (beta * |last eigenvector component|) certify convergence to tol * lambda1;
// exhausting the space yields the exact spectrum of the Krylov restriction.
template <typename Apply>
std::vector<double> lanczos_top_eigs(int dim, Apply&& apply, int want, double tol,
                                     int max_iter, const char* what) {
  if (dim < 1) throw parameter_error("operator dimension must be positive");
  want = std::min(want, dim);
  std::vector<Eigen::VectorXd> basis;
  basis.push_back(lanczos_start(dim));
  std::vector<double> alpha, beta;  // tridiagonal coefficients
  Eigen::VectorXd w(dim);

  auto ritz_values = [&](std::vector<double>* residuals) {
    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < k) {
        t(i, i + 1) = beta[static_cast<std::size_t>(i)];
        t(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        t, residuals ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    std::vector<double> vals;  // descending
    for (int i = k - 1; i >= 0 && static_cast<int>(vals.size()) < want; --i)
      vals.push_back(es.eigenvalues()[i]);
    if (residuals) {
      residuals->clear();
      const double beta_last = beta.empty() ? 0.0 : beta.back();
      for (int i = k - 1; i >= 0 && static_cast<int>(residuals->size()) < want; --i)
        residuals->push_back(std::fabs(beta_last * es.eigenvectors()(k - 1, i)));
    }
    return vals;
  };

  int next_check = want + 1;
  for (int iter = 0; iter < max_iter; ++iter) {
    const int k = static_cast<int>(alpha.size());
    apply(basis[static_cast<std::size_t>(k)], w);
    const double a = w.dot(basis[static_cast<std::size_t>(k)]);
    alpha.push_back(a);
    w -= a * basis[static_cast<std::size_t>(k)];
    if (k > 0) w -= beta.back() * basis[static_cast<std::size_t>(k - 1)];
    // Two-pass full reorthogonalization keeps the basis orthonormal even
    // after Ritz values converge.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) w -= q.dot(w) * q;

    const double b = w.norm();
    const double scale =
        std::max({std::fabs(a), beta.empty() ? 0.0 : beta.back(), 1e-300});
    if (k + 1 == dim || b <= 1e-13 * scale) {
      // Invariant subspace (or the whole space): the restriction is exact.
      return ritz_values(nullptr);
    }
    beta.push_back(b);
    basis.push_back(w / b);

    if (k + 1 >= next_check && k + 1 >= want + 1) {
      std::vector<double> residuals;
      const std::vector<double> vals = ritz_values(&residuals);
      const double top = std::max(vals.empty() ? 0.0 : vals.front(), 1e-300);
      bool done = static_cast<int>(vals.size()) >= want;
      for (int i = 0; done && i < want; ++i)
        if (residuals[static_cast<std::size_t>(i)] > tol * top) done = false;
      if (done) return vals;
      next_check = k + 1 + std::max(4, (k + 1) / 8);
    }
  }
  throw convergence_error(std::string(what) + " did not converge within " +
                          std::to_string(max_iter) + " Lanczos iterations");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Extremal singular values.

inline SingularTriple singular_extremes(const SparseBinaryMatrix& a,
                                        double tol = detail::kDefaultTol,
                                        int n_dense = 1024,
                                        int max_iter = detail::kDefaultMaxIter) {
  if (a.rows() != a.cols())
    throw parameter_error("singular_extremes requires a square matrix");
  if (!(tol > 0.0)) throw parameter_error("tolerance must be positive");
  const int n = a.rows();
  SingularTriple out;

  if (n <= n_dense) {
    const Eigen::MatrixXd d = a.to_dense();
    const Eigen::MatrixXd gram = d.transpose() * d;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();  // ascending
    out.s_min = std::sqrt(std::max(ev[0], 0.0));
    out.s_max = std::sqrt(std::max(ev[n - 1], 0.0));
    out.s2 = (n >= 2) ? std::sqrt(std::max(ev[n - 2], 0.0)) : out.s_max;
    return out;
  }

  // Top of the spectrum: Lanczos on A^T A.
  Eigen::VectorXd tmp(n);
  auto gram_apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    a.multiply(x, tmp);
    a.multiply_transpose(tmp, y);
  };
  const std::vector<double> top =
      detail::lanczos_top_eigs(n, gram_apply, 2, tol, max_iter, "singular_extremes(top)");
  out.s_max = std::sqrt(std::max(top[0], 0.0));
  out.s2 = std::sqrt(std::max(top.size() > 1 ? top[1] : top[0], 0.0));

  // Bottom of the spectrum: Lanczos on (A^T A)^{-1} through one sparse LU.
  Eigen::SparseMatrix<double> sp = a.to_sparse();
  sp.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(sp);
  if (lu.info() != Eigen::Success) {
    // The factorization collapsed on an exact zero pivot chain; decide
    // singularity exactly instead of guessing from the residue.
    Certificate cert = certify_singularity(a);
    if (cert == Certificate::Singular) {
      out.s_min = 0.0;
      return out;
    }
    throw convergence_error(
        "sparse LU broke down on an exactly invertible matrix; "
        "smallest singular value unresolved");
  }
  auto inv_gram_apply = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    tmp = lu.transpose().solve(x);  // A^T t = x
    y = lu.solve(tmp);              // A y = t
  };
  const std::vector<double> bottom = detail::lanczos_top_eigs(
      n, inv_gram_apply, 1, tol, max_iter, "singular_extremes(bottom)");
  out.s_min = (bottom[0] > 0.0) ? 1.0 / std::sqrt(bottom[0]) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Exact singularity certificate.
//
// Verdicts are exact: a zero line, a repeated line, or rank deficiency modulo
// both 62-bit primes decides Singular; full rank modulo any single prime
// (including 2 and the word-sized screening prime) proves a nonzero
// determinant and decides Invertible. Cheap screens run first so the heavy
// eliminations are reserved for genuinely ambiguous matrices.

namespace detail {

inline bool full_rank_gf2(const SparseBinaryMatrix& a) {
  const int n = a.rows();
  const int words = (n + 63) / 64;
  std::vector<std::uint64_t> rows(static_cast<std::size_t>(n) * words, 0);
  for (int i = 0; i < n; ++i)
    for (int j : a.row_support(i))
      rows[static_cast<std::size_t>(i) * words + static_cast<std::size_t>(j / 64)] |=
          (std::uint64_t{1} << (j % 64));
  int rank = 0;
  for (int col = 0; col < n; ++col) {
    const int word = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    int piv = -1;
    for (int i = rank; i < n; ++i)
      if (rows[static_cast<std::size_t>(i) * words + word] & bit) {
        piv = i;
        break;
      }
    if (piv < 0) return false;
    for (int w = 0; w < words; ++w)
      std::swap(rows[static_cast<std::size_t>(rank) * words + w],
                rows[static_cast<std::size_t>(piv) * words + w]);
    for (int i = 0; i < n; ++i) {
      if (i == rank) continue;
      if (rows[static_cast<std::size_t>(i) * words + word] & bit)
        for (int w = word; w < words; ++w)
          rows[static_cast<std::size_t>(i) * words + w] ^=
              rows[static_cast<std::size_t>(rank) * words + w];
    }
    ++rank;
  }
  return true;
}

// Elimination modulo a word-sized prime; products of reduced entries fit in
// 32 bits, so the inner loop stays vectorizable.
inline bool full_rank_mod_small(const SparseBinaryMatrix& a) {
  constexpr std::uint32_t q = 65521;
  const int n = a.rows();
  std::vector<std::vector<std::uint32_t>> m(
      static_cast<std::size_t>(n), std::vector<std::uint32_t>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i)
    for (int j : a.row_support(i)) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
  auto pow_mod = [&](std::uint32_t base, std::uint32_t exp) {
    std::uint64_t acc = 1, b = base;
    while (exp) {
      if (exp & 1) acc = acc * b % q;
      b = b * b % q;
      exp >>= 1;
    }
    return static_cast<std::uint32_t>(acc);
  };
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return false;
    m[static_cast<std::size_t>(k)].swap(m[static_cast<std::size_t>(piv)]);
    const std::uint32_t inv = pow_mod(m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)], q - 2);
    const std::uint32_t* rk = m[static_cast<std::size_t>(k)].data();
    for (int i = k + 1; i < n; ++i) {
      std::uint32_t* ri = m[static_cast<std::size_t>(i)].data();
      const std::uint32_t f = ri[k];
      if (f == 0) continue;
      // Add (q - f/pivot) * pivot_row; every term is < 2^32.
      const std::uint32_t mult =
          (q - static_cast<std::uint32_t>(static_cast<std::uint64_t>(f) * inv % q)) % q;
      if (mult == 0) continue;
      for (int j = k; j < n; ++j) ri[j] = (ri[j] + mult * rk[j]) % q;
    }
  }
  return true;
}

// Montgomery arithmetic for a fixed odd 62-bit modulus: multiplication costs
// three word products, no 128-bit division.
struct Montgomery {
  std::uint64_t p;
  std::uint64_t p_neg_inv;  // -p^{-1} mod 2^64
  std::uint64_t r2;         // 2^128 mod p

  explicit Montgomery(std::uint64_t prime) : p(prime) {
    std::uint64_t inv = prime;  // Newton iteration for p^{-1} mod 2^64
    for (int i = 0; i < 6; ++i) inv *= 2 - prime * inv;
    p_neg_inv = ~inv + 1;
    // 2^128 mod p, via (2^128 - 1) mod p + 1; the sum cannot reach p because
    // an odd prime never divides 2^128.
    r2 = static_cast<std::uint64_t>((~static_cast<unsigned __int128>(0)) % p + 1);
  }

  std::uint64_t reduce(unsigned __int128 t) const {
    const std::uint64_t m = static_cast<std::uint64_t>(t) * p_neg_inv;
    const std::uint64_t res =
        static_cast<std::uint64_t>((t + static_cast<unsigned __int128>(m) * p) >> 64);
    return res >= p ? res - p : res;
  }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return reduce(static_cast<unsigned __int128>(a) * b);
  }
  std::uint64_t to_domain(std::uint64_t a) const { return mul(a, r2); }
  std::uint64_t pow(std::uint64_t a_domain, std::uint64_t exp) const {
    std::uint64_t acc = to_domain(1);
    while (exp) {
      if (exp & 1) acc = mul(acc, a_domain);
      a_domain = mul(a_domain, a_domain);
      exp >>= 1;
    }
    return acc;
  }
};

inline bool full_rank_mod_big(const SparseBinaryMatrix& a, std::uint64_t prime) {
  const Montgomery mont(prime);
  const int n = a.rows();
  const std::uint64_t one = mont.to_domain(1);
  std::vector<std::vector<std::uint64_t>> m(
      static_cast<std::size_t>(n), std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i)
    for (int j : a.row_support(i)) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = one;
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) return false;
    m[static_cast<std::size_t>(k)].swap(m[static_cast<std::size_t>(piv)]);
    const std::uint64_t inv =
        mont.pow(m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)], prime - 2);
    const std::uint64_t* rk = m[static_cast<std::size_t>(k)].data();
    for (int i = k + 1; i < n; ++i) {
      std::uint64_t* ri = m[static_cast<std::size_t>(i)].data();
      if (ri[k] == 0) continue;
      const std::uint64_t f = mont.mul(ri[k], inv);
      for (int j = k; j < n; ++j) {
        const std::uint64_t sub = mont.mul(f, rk[j]);
        ri[j] = ri[j] >= sub ? ri[j] - sub : ri[j] + prime - sub;
      }
    }
  }
  return true;
}

inline bool has_duplicate_lines(const SparseBinaryMatrix& a) {
  auto scan = [](const SparseBinaryMatrix& m, bool rows) {
    const int count = rows ? m.rows() : m.cols();
    std::vector<const std::vector<int>*> lines(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      lines[static_cast<std::size_t>(i)] = rows ? &m.row_support(i) : &m.col_support(i);
    std::sort(lines.begin(), lines.end(),
              [](const std::vector<int>* x, const std::vector<int>* y) { return *x < *y; });
    for (std::size_t i = 1; i < lines.size(); ++i)
      if (*lines[i - 1] == *lines[i]) return true;
    return false;
  };
  return scan(a, true) || scan(a, false);
}

}  // namespace detail

inline Certificate certify_singularity(const SparseBinaryMatrix& a) {
  if (a.rows() != a.cols())
    throw parameter_error("certify_singularity requires a square matrix");
  for (int i = 0; i < a.rows(); ++i)
    if (a.row_support(i).empty()) return Certificate::Singular;
  for (int j = 0; j < a.cols(); ++j)
    if (a.col_support(j).empty()) return Certificate::Singular;
  if (detail::has_duplicate_lines(a)) return Certificate::Singular;
  if (detail::full_rank_gf2(a)) return Certificate::Invertible;  // odd determinant
  if (detail::full_rank_mod_small(a)) return Certificate::Invertible;
  if (detail::full_rank_mod_big(a, kCertPrime1)) return Certificate::Invertible;
  if (detail::full_rank_mod_big(a, kCertPrime2)) return Certificate::Invertible;
  return Certificate::Singular;
}

// ---------------------------------------------------------------------------
// Centered operator norm.

// Largest singular value of A - E, where E = off*J + (diag-off)*I is given
// symbolically; matrix-vector products apply A sparsely and correct with the
// rank-one all-ones term, never materializing the dense mean.
inline double centered_operator_norm(const SparseBinaryMatrix& a, const ExpectedMatrix& mean,
                                     double tol = detail::kDefaultTol,
                                     int max_iter = detail::kDefaultMaxIter) {
  if (a.rows() != a.cols())
    throw parameter_error("centered_operator_norm requires a square matrix");
  if (a.rows() != mean.n)
    throw parameter_error("mean dimension does not match the matrix");
  if (!(tol > 0.0)) throw parameter_error("tolerance must be positive");
  const int n = a.rows();
  const double off = mean.off_diag;
  const double shift = mean.diag - mean.off_diag;  // coefficient of I

  Eigen::VectorXd mid(n);
  auto apply_centered = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    a.multiply(x, y);
    const double s = x.sum();
    y.array() -= off * s;
    if (shift != 0.0) y -= shift * x;
  };
  auto apply_centered_t = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    a.multiply_transpose(x, y);
    const double s = x.sum();
    y.array() -= off * s;
    if (shift != 0.0) y -= shift * x;
  };
  auto gram = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    apply_centered(x, mid);
    apply_centered_t(mid, y);
  };
  const std::vector<double> top =
      detail::lanczos_top_eigs(n, gram, 1, tol, max_iter, "centered_operator_norm");
  return std::sqrt(std::max(top[0], 0.0));
}

inline double centered_operator_norm(const SparseBinaryMatrix& a, const GraphModel& model,
                                     double tol = detail::kDefaultTol,
                                     int max_iter = detail::kDefaultMaxIter) {
  return centered_operator_norm(a, expected_matrix(model), tol, max_iter);
}

// ---------------------------------------------------------------------------
// Condition numbers.

inline std::pair<double, double> condition_numbers(const SpectralSummary& s) {
  if (!s.s_min || !s.s2 || !s.s_max)
    throw parameter_error("condition_numbers requires populated singular extremes");
  const double inf = std::numeric_limits<double>::infinity();
  if (s.singular_exact == Certificate::Singular || *s.s_min == 0.0) return {inf, inf};
  return {*s.s_max / *s.s_min, *s.s2 / *s.s_min};
}

// ---------------------------------------------------------------------------
// Dominant eigenpair.

struct TopEigenpair {
  double lambda0 = 0.0;
  Eigen::VectorXd v0;
  double eigvec_dev = 0.0;  // distance from the flat unit vector
  bool converged = false;
};

// Power iteration started at the flat vector. The dominant eigenvalue of
// these ensembles is real, positive and well separated in the regimes under
// test; an oscillating (complex or negative dominant) spectrum simply fails
// the residual test and is reported as non-converged.
inline TopEigenpair top_eigenpair(const SparseBinaryMatrix& a,
                                  double tol = detail::kDefaultTol,
                                  int max_iter = detail::kDefaultMaxIter) {
  if (a.rows() != a.cols())
    throw parameter_error("top_eigenpair requires a square matrix");
  const int n = a.rows();
  TopEigenpair out;
  out.v0 = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd w(n);
  double lambda = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    a.multiply(out.v0, w);
    lambda = w.dot(out.v0);
    const double res = (w - lambda * out.v0).norm();
    const double wn = w.norm();
    if (res <= tol * std::max(std::fabs(lambda), 1e-300)) {
      out.converged = true;
      break;
    }
    if (wn == 0.0) {  // zero matrix: everything is an eigenvector of 0
      lambda = 0.0;
      out.converged = true;
      break;
    }
    out.v0 = w / wn;
  }
  out.lambda0 = lambda;
  if (out.v0.sum() < 0.0) out.v0 = -out.v0;
  out.eigvec_dev =
      (out.v0 - Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)))).norm();
  return out;
}

// ---------------------------------------------------------------------------
// Hilbert-Schmidt norm of the inverse.

inline double hs_norm_inverse(const SparseBinaryMatrix& a) {
  if (a.rows() != a.cols())
    throw parameter_error("hs_norm_inverse requires a square matrix");
  const Eigen::MatrixXd d = a.to_dense();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
  if (!lu.isInvertible())
    throw parameter_error("hs_norm_inverse: singular input rejected");
  // One factorization, n solves: the inverse columns are A^{-1} e_k.
  const Eigen::MatrixXd inv = lu.inverse();
  return inv.norm();
}

// ---------------------------------------------------------------------------
// Column distances.

// Distance from column j (1-based) to the span of the remaining columns,
// by orthogonal projection through a rank-revealing QR. This is the
// independent oracle the quadratic-form identity is checked against.
inline double distance_column_to_span(const SparseBinaryMatrix& a, int j) {
  if (a.rows() != a.cols())
    throw parameter_error("distance_column_to_span requires a square matrix");
  const int n = a.rows();
  if (j < 1 || j > n)
    throw parameter_error("column index must lie in [1, n], got " + std::to_string(j));
  const Eigen::MatrixXd d = a.to_dense();
  const Eigen::VectorXd target = d.col(j - 1);
  if (n == 1) return target.norm();  // empty span
  Eigen::MatrixXd rest(n, n - 1);
  if (j > 1) rest.leftCols(j - 1) = d.leftCols(j - 1);
  if (j < n) rest.rightCols(n - j) = d.rightCols(n - j);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rest);
  const auto rank = qr.rank();
  if (rank == 0) return target.norm();
  const Eigen::VectorXd rotated = qr.householderQ().transpose() * target;
  return rotated.tail(n - rank).norm();
}

// The bordered system the quadratic-form identity operates on: C is the
// trailing principal submatrix of A^T, and (x, y, a11) are the border row,
// border column and corner of A.
struct DistanceInstance {
  SparseBinaryMatrix a;  // (n+1) x (n+1)
  SparseBinaryMatrix c;  // n x n
  Eigen::VectorXd x;     // first row of A without the corner
  Eigen::VectorXd y;     // first column of A without the corner
  double a11 = 0.0;
};

inline DistanceInstance make_distance_instance(const SparseBinaryMatrix& a) {
  if (a.rows() != a.cols())
    throw parameter_error("distance instance requires a square matrix");
  if (a.rows() < 2)
    throw parameter_error("distance instance requires size at least 2");
  const int n = a.rows() - 1;
  DistanceInstance inst;
  inst.a = a;
  std::vector<std::pair<int, int>> centries;
  for (int r = 1; r < a.rows(); ++r)
    for (int col : a.row_support(r))
      if (col >= 1) centries.emplace_back(col - 1, r - 1);  // transposed block
  inst.c = SparseBinaryMatrix::from_entries(n, n, centries);
  inst.x = Eigen::VectorXd::Zero(n);
  for (int col : a.row_support(0))
    if (col >= 1) inst.x[col - 1] = 1.0;
  inst.y = Eigen::VectorXd::Zero(n);
  for (int r : a.col_support(0))
    if (r >= 1) inst.y[r - 1] = 1.0;
  inst.a11 = static_cast<double>(a.at(0, 0));
  return inst;
}

struct QuadFormDistance {
  double value = 0.0;
  bool exact = false;  // false: lower bound from the kernel branch
};

// Invertible branch: |<C^{-1}x, y> - a11| / sqrt(1 + |C^{-1}x|^2), an exact
// identity for the distance. Singular branch: the projection of y onto
// ker(C), a certified lower bound.
inline QuadFormDistance distance_via_quadratic_form(const DistanceInstance& inst) {
  QuadFormDistance out;
  const Certificate cert = certify_singularity(inst.c);
  const Eigen::MatrixXd cd = inst.c.to_dense();
  if (cert == Certificate::Invertible) {
    const Eigen::VectorXd w = Eigen::PartialPivLU<Eigen::MatrixXd>(cd).solve(inst.x);
    out.value = std::fabs(w.dot(inst.y) - inst.a11) / std::sqrt(1.0 + w.squaredNorm());
    out.exact = true;
    return out;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(cd);
  const Eigen::MatrixXd kernel = lu.kernel();  // full column rank basis
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(kernel);
  const Eigen::MatrixXd q =
      qr.householderQ() * Eigen::MatrixXd::Identity(kernel.rows(), kernel.cols());
  out.value = (q.transpose() * inst.y).norm();
  out.exact = false;
  return out;
}

}  // namespace rmtsharp
