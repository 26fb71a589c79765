#pragma once
// Vector taxonomy: rank rearrangement, sparse/compressible/dominated tests,
// an empirical small-ball concentration estimator, and the derived pair
// (ell0, rho) that parameterizes the sparse-vector thresholds.
//
// Ranks are assigned by non-increasing absolute value with ties broken by
// ascending index, so every slicing operation is deterministic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "rmtsharp/errors.hpp"

namespace rmtsharp {

// ---------------------------------------------------------------------------
// Rank rearrangement.

// order[r] is the coordinate holding rank r (0-based); rank[j] inverts it.
struct RankedVector {
  std::vector<double> x;
  std::vector<int> order;  // rank -> coordinate
  std::vector<int> rank;   // coordinate -> rank
};

inline RankedVector rank_vector(const std::vector<double>& x) {
  if (x.empty()) throw parameter_error("rank_vector requires a nonempty vector");
  RankedVector rv;
  rv.x = x;
  rv.order.resize(x.size());
  std::iota(rv.order.begin(), rv.order.end(), 0);
  std::stable_sort(rv.order.begin(), rv.order.end(), [&](int a, int b) {
    return std::fabs(x[static_cast<std::size_t>(a)]) >
           std::fabs(x[static_cast<std::size_t>(b)]);
  });
  rv.rank.resize(x.size());
  for (int r = 0; r < static_cast<int>(x.size()); ++r)
    rv.rank[static_cast<std::size_t>(rv.order[static_cast<std::size_t>(r)])] = r;
  return rv;
}

// Keeps the coordinates whose rank lies in [m1, m2] (1-based, inclusive) and
// zeroes the rest, so x == slice(x,1,m) + slice(x,m+1,n) coordinate-wise.
inline std::vector<double> slice_by_rank(const std::vector<double>& x, int m1, int m2) {
  const int n = static_cast<int>(x.size());
  if (m1 < 1 || m2 < m1 || m2 > n)
    throw parameter_error("slice_by_rank requires 1 <= m1 <= m2 <= n, got [" +
                          std::to_string(m1) + ", " + std::to_string(m2) + "] with n = " +
                          std::to_string(n));
  const RankedVector rv = rank_vector(x);
  std::vector<double> out(x.size(), 0.0);
  for (int r = m1 - 1; r < m2; ++r) {
    const int j = rv.order[static_cast<std::size_t>(r)];
    out[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j)];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms and the unit-sphere gate shared by the classification tests.

inline double euclidean_norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

namespace detail {

constexpr double kUnitNormTol = 1e-12;  // relative deviation allowed from 1

inline void require_unit(const std::vector<double>& x, const char* op) {
  const double norm = euclidean_norm(x);
  if (std::fabs(norm - 1.0) > kUnitNormTol)
    throw parameter_error(std::string(op) + " requires a unit vector; |x| = " +
                          std::to_string(norm));
}

// Euclidean norm and sup norm of the rank-tail x_{[m+1:n]} in one pass.
struct TailNorms {
  double two = 0.0;
  double sup = 0.0;
};

inline TailNorms tail_norms(const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size());
  if (m < 1 || m > n)
    throw parameter_error("sparsity level m must lie in [1, n], got " + std::to_string(m));
  TailNorms t;
  if (m == n) return t;  // empty tail
  const RankedVector rv = rank_vector(x);
  double sq = 0.0;
  for (int r = m; r < n; ++r) {
    const double v = x[static_cast<std::size_t>(rv.order[static_cast<std::size_t>(r)])];
    sq += v * v;
    t.sup = std::max(t.sup, std::fabs(v));
  }
  t.two = std::sqrt(sq);
  return t;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Classification.

// Distance from a unit vector to the set of m-sparse vectors: the best
// m-sparse approximation keeps the m largest coordinates, so the distance is
// the Euclidean norm of the rank-tail.
inline double distance_to_sparse(const std::vector<double>& x, int m) {
  detail::require_unit(x, "distance_to_sparse");
  return detail::tail_norms(x, m).two;
}

inline bool is_compressible(const std::vector<double>& x, int m, double delta) {
  if (!(delta > 0.0)) throw parameter_error("delta must be positive");
  detail::require_unit(x, "is_compressible");
  return detail::tail_norms(x, m).two <= delta;
}

inline bool is_incompressible(const std::vector<double>& x, int m, double delta) {
  return !is_compressible(x, m, delta);
}

// Dominated tail: |tail|_2 <= alpha * sqrt(m) * |tail|_inf. A zero tail
// passes for every (m, alpha), so m-sparse unit vectors are always dominated.
inline bool is_dominated(const std::vector<double>& x, int m, double alpha) {
  if (!(alpha > 0.0)) throw parameter_error("alpha must be positive");
  detail::require_unit(x, "is_dominated");
  const auto t = detail::tail_norms(x, m);
  return t.two <= alpha * std::sqrt(static_cast<double>(m)) * t.sup;
}

// ---------------------------------------------------------------------------
// Empirical small-ball concentration.

// Estimates sup_u P(|Z - u|_2 <= eps) from samples by maximizing the covered
// fraction over a finite candidate grid: every sample point, the sample mean,
// and any caller-supplied extra centers. This lower-bounds the true supremum
// and is exact for atomic empirical laws once eps separates the atoms.
inline double levy_concentration_estimate(
    const std::vector<std::vector<double>>& samples, double eps,
    const std::vector<std::vector<double>>& extra_centers = {}) {
  if (samples.empty())
    throw parameter_error("levy_concentration_estimate requires at least one sample");
  if (!(eps > 0.0)) throw parameter_error("eps must be positive");
  const std::size_t dim = samples.front().size();
  for (const auto& s : samples)
    if (s.size() != dim)
      throw parameter_error("all samples must share one dimension");
  for (const auto& c : extra_centers)
    if (c.size() != dim)
      throw parameter_error("extra centers must match the sample dimension");

  std::vector<double> mean(dim, 0.0);
  for (const auto& s : samples)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += s[d];
  for (double& v : mean) v /= static_cast<double>(samples.size());

  const double eps_sq = eps * eps;
  auto covered_fraction = [&](const std::vector<double>& u) {
    int hits = 0;
    for (const auto& s : samples) {
      double sq = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = s[d] - u[d];
        sq += diff * diff;
      }
      if (sq <= eps_sq) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(samples.size());
  };

  double best = covered_fraction(mean);
  for (const auto& s : samples) best = std::max(best, covered_fraction(s));
  for (const auto& c : extra_centers) best = std::max(best, covered_fraction(c));
  return best;
}

// ---------------------------------------------------------------------------
// Threshold parameters (ell0, rho).

struct VectorClassParams {
  int m = 1;
  double delta = 0.1;
  double alpha = 2.0;
  double K = 1.0;        // norm-event constant, >= 1
  double c_star = 1.0;   // numerator constant of the ell0 formula
  double c_tilde = 0.1;  // base constant of rho; must stay below K

  void validate() const {
    if (m < 1) throw parameter_error("m must be a positive integer");
    if (!(delta > 0.0)) throw parameter_error("delta must be positive");
    if (!(alpha > 0.0)) throw parameter_error("alpha must be positive");
    if (!(K >= 1.0)) throw parameter_error("K must be at least 1");
    if (!(c_star > 0.0)) throw parameter_error("c_star must be positive");
    if (!(c_tilde > 0.0)) throw parameter_error("c_tilde must be positive");
    if (!(c_tilde < K))
      throw parameter_error("c_tilde must be strictly below K (rho < 1 required)");
  }
};

struct RhoEll0 {
  int ell0 = 0;
  double rho = 0.0;
};

// ell0 = ceil( log(c*/p) / log sqrt(pn) ), rho = (c_tilde/K)^(2*ell0 + 1).
// The ratio is snapped to the nearest integer within 1e-12 before the
// ceiling, so grid points like sqrt(pn) = 10, c*/p = 100 stay at the exact
// integer instead of drifting one step up through floating-point residue.
inline RhoEll0 compute_rho_ell0(int n, double p, const VectorClassParams& params) {
  params.validate();
  if (n < 1) throw parameter_error("n must be positive");
  if (!(p > 0.0 && p < 1.0)) throw parameter_error("p must lie in (0,1)");
  if (!(static_cast<double>(n) * p > 1.0))
    throw parameter_error("compute_rho_ell0 requires np > 1");
  const double ratio =
      std::log(params.c_star / p) / std::log(std::sqrt(p * static_cast<double>(n)));
  const double nearest = std::nearbyint(ratio);
  const double snapped = (std::fabs(ratio - nearest) <= 1e-12) ? nearest : ratio;
  RhoEll0 out;
  out.ell0 = static_cast<int>(std::ceil(snapped));
  out.rho = std::pow(params.c_tilde / params.K,
                     2.0 * static_cast<double>(out.ell0) + 1.0);
  return out;
}

}  // namespace rmtsharp
