#pragma once
// Deterministic structural audits of a realized 0/1 matrix.
//
// Covers: zero rows/columns (the exact singularity event they force), the
// closed-form probability that an i.i.d. Bernoulli matrix has a zero column,
// light columns, the fold operator (difference of the top and bottom row
// blocks, which cancels the constant mean structure), the six
// typical-structure properties of sparse adjacency matrices, and the
// single-entry row scan used to locate rows that expose one designated
// column.
//
// All threshold comparisons (count vs delta0*n*p and friends) are exact
// rational comparisons via ExactReal: the count is an integer, the threshold
// a product of dyadic rationals, and no floating-point rounding can flip a
// boundary case.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "rmtsharp/errors.hpp"
#include "rmtsharp/exact.hpp"
#include "rmtsharp/matrix.hpp"
#include "rmtsharp/rng.hpp"

namespace rmtsharp {

// ---------------------------------------------------------------------------
// Zero rows / columns.

struct ZeroLines {
  std::vector<int> zero_rows;
  std::vector<int> zero_cols;
  bool omega0 = false;  // true iff a zero row or zero column exists
};

inline ZeroLines detect_zero_lines(const SparseBinaryMatrix& a) {
  ZeroLines z;
  for (int i = 0; i < a.rows(); ++i)
    if (a.row_support(i).empty()) z.zero_rows.push_back(i);
  for (int j = 0; j < a.cols(); ++j)
    if (a.col_support(j).empty()) z.zero_cols.push_back(j);
  z.omega0 = !z.zero_rows.empty() || !z.zero_cols.empty();
  return z;
}

// P(some column of an n x n i.i.d. Ber(p) matrix is zero)
//   = 1 - (1 - (1-p)^n)^n,
// evaluated through expm1/log1p so that tiny p and large n lose no digits.
inline double omega_col_probability(int n, double p) {
  if (n < 1) throw parameter_error("omega_col_probability requires n >= 1");
  if (!(p >= 0.0 && p <= 1.0))
    throw parameter_error("omega_col_probability requires p in [0,1]");
  const double log_q = static_cast<double>(n) * std::log1p(-p);  // log (1-p)^n
  const double q = std::exp(log_q);              // P(one column is zero)
  if (q == 0.0) return 0.0;                      // p = 1: no zero column possible
  if (q == 1.0) return 1.0;                      // p = 0: every column is zero
  return -std::expm1(static_cast<double>(n) * std::log1p(-q));
}

// ---------------------------------------------------------------------------
// Light columns.

struct StructureParams {
  double delta0 = 0.05;   // light-column threshold: |supp| <= delta0 * n * p
  double c_heavy = 10.0;  // no row/column support exceeds c_heavy * n * p
  int r0 = 20;            // max number of light columns meeting any column
  double c_ext = 0.1;     // extension property ranges over 2 <= |I| <= c_ext / p
  int n_sub = 200;        // sampled subsets per size class above the cutoff
  int exhaustive_n_max = 20;  // below this n the subset quantifier is exhaustive
  std::uint64_t subset_seed = 0;

  void validate() const {
    if (!(delta0 > 0.0 && delta0 < 0.1))
      throw parameter_error("delta0 must lie in (0, 1/10), got " + std::to_string(delta0));
    if (!(c_heavy > 0.0)) throw parameter_error("c_heavy must be positive");
    if (r0 < 1) throw parameter_error("r0 must be a positive integer");
    if (!(c_ext > 0.0)) throw parameter_error("c_ext must be positive");
    if (n_sub < 1) throw parameter_error("n_sub must be positive");
    if (exhaustive_n_max < 0 || exhaustive_n_max > 24)
      throw parameter_error("exhaustive_n_max must lie in [0, 24]");
  }
};

inline std::vector<int> light_columns(const SparseBinaryMatrix& a, double p,
                                      const StructureParams& params) {
  params.validate();
  if (!(p > 0.0 && p < 1.0)) throw parameter_error("light_columns requires p in (0,1)");
  std::vector<int> light;
  const long long n = a.rows();
  for (int j = 0; j < a.cols(); ++j) {
    const auto sz = static_cast<long long>(a.col_support(j).size());
    if (count_within(sz, params.delta0, p, n)) light.push_back(j);
  }
  return light;
}

// ---------------------------------------------------------------------------
// Folding.

// The fold of an r x c matrix has floor(r/2) rows; row i equals row i minus
// row i + floor(r/2) of the source, so entries lie in {-1, 0, +1} and any
// constant column structure cancels. For odd r the final row is unused.
class FoldedMatrix {
 public:
  FoldedMatrix(int frows, int cols)
      : frows_(frows), cols_(cols), row_entries_(frows), col_entries_(cols) {}

  int frows() const { return frows_; }
  int cols() const { return cols_; }

  const std::vector<std::pair<int, int>>& row_entries(int i) const {
    return row_entries_[static_cast<std::size_t>(i)];
  }
  const std::vector<std::pair<int, int>>& col_entries(int j) const {
    return col_entries_[static_cast<std::size_t>(j)];
  }
  int col_support_size(int j) const {
    return static_cast<int>(col_entries_[static_cast<std::size_t>(j)].size());
  }
  int value_at(int i, int j) const {
    for (const auto& [r, v] : col_entries_[static_cast<std::size_t>(j)])
      if (r == i) return v;
    return 0;
  }

  void add_entry(int i, int j, int v) {  // construction helper; ascending order
    row_entries_[static_cast<std::size_t>(i)].emplace_back(j, v);
    col_entries_[static_cast<std::size_t>(j)].emplace_back(i, v);
  }

 private:
  int frows_;
  int cols_;
  std::vector<std::vector<std::pair<int, int>>> row_entries_;  // (col, value)
  std::vector<std::vector<std::pair<int, int>>> col_entries_;  // (row, value)
};

inline FoldedMatrix fold_matrix(const SparseBinaryMatrix& a) {
  if (a.rows() < 2) throw parameter_error("fold requires at least 2 rows");
  const int half = a.rows() / 2;
  FoldedMatrix f(half, a.cols());
  // Columns are scanned in order and each support list is sorted, so entries
  // are appended in ascending (row, col) order -- but add_entry fills the row
  // view out of column order; rebuild per column, then rows stay sorted
  // because columns are visited in ascending order.
  for (int j = 0; j < a.cols(); ++j) {
    const auto& sup = a.col_support(j);
    std::size_t lo = 0;                       // scans indices < half
    std::size_t hi = 0;                       // scans indices in [half, 2*half)
    while (hi < sup.size() && sup[hi] < half) ++hi;
    std::size_t hi_end = hi;
    while (hi_end < sup.size() && sup[hi_end] < 2 * half) ++hi_end;
    // Merge the two sorted halves by folded row index.
    std::size_t b = hi;
    for (lo = 0; lo < sup.size() && sup[lo] < half;) {
      const int top_row = sup[lo];
      const int bot_row = (b < hi_end) ? sup[b] - half : half;  // sentinel
      if (top_row < bot_row) {
        f.add_entry(top_row, j, +1);
        ++lo;
      } else if (top_row > bot_row) {
        f.add_entry(bot_row, j, -1);
        ++b;
      } else {
        ++lo;  // both halves hit: 1 - 1 = 0, no entry
        ++b;
      }
    }
    for (; b < hi_end; ++b) f.add_entry(sup[b] - half, j, -1);
  }
  return f;
}

inline std::vector<double> fold_vector(const std::vector<double>& y) {
  if (y.size() < 2) throw parameter_error("fold requires a vector of length >= 2");
  const std::size_t half = y.size() / 2;
  std::vector<double> out(half);
  for (std::size_t i = 0; i < half; ++i) out[i] = y[i] - y[i + half];
  return out;
}

// ---------------------------------------------------------------------------
// Typical-structure audit.

// Property indices into StructuralReport::props (fixed order):
//   0  no heavy rows or columns          (all supports <= c_heavy * n * p)
//   1  light columns have disjoint supports
//   2  every column meets at most r0 light columns
//   3  each normal column's folded support meets the union of the light
//      columns' folded supports in at most (delta0/16) * n * p rows
//   4  extension property: for sampled I with 2 <= |I| <= c_ext/p, the union
//      of folded supports loses at most (delta0/16) * n * p * |I| to overlap
//   5  every column's support size matches its folded version within
//      (delta0/8) * n * p
struct StructuralReport {
  int n = 0;
  double p = 0.0;
  StructureParams params;
  ZeroLines zero;
  std::vector<int> light_cols;
  std::array<bool, 6> props{};
  // Each violation is one small index tuple; at most kMaxWitnesses are kept.
  std::array<std::vector<std::vector<int>>, 6> witnesses;

  static constexpr int kMaxWitnesses = 16;

  bool all_props() const {
    for (bool b : props)
      if (!b) return false;
    return true;
  }
};

namespace detail {

// Records a violation tuple, capped so reports stay small.
inline void add_witness(StructuralReport& rep, int prop, std::vector<int> tuple) {
  rep.props[static_cast<std::size_t>(prop)] = false;
  auto& w = rep.witnesses[static_cast<std::size_t>(prop)];
  if (static_cast<int>(w.size()) < StructuralReport::kMaxWitnesses)
    w.push_back(std::move(tuple));
}

inline bool sorted_intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (a[i] > b[j])
      ++j;
    else
      return true;
  }
  return false;
}

// Union size of the folded supports of the columns in `subset`, via an epoch
// mark array that avoids clearing between calls.
inline int folded_union_size(const FoldedMatrix& f, const std::vector<int>& subset,
                             std::vector<int>& mark, int& epoch) {
  ++epoch;
  int distinct = 0;
  for (int j : subset)
    for (const auto& [row, val] : f.col_entries(j)) {
      (void)val;
      if (mark[static_cast<std::size_t>(row)] != epoch) {
        mark[static_cast<std::size_t>(row)] = epoch;
        ++distinct;
      }
    }
  return distinct;
}

}  // namespace detail

// Evaluates the six properties exactly as stated, with configured constants.
// `subset_stream` isolates the subset sampling of property 5 so independent
// audits (e.g. per experiment trial) draw independent subsets while remaining
// reproducible.
inline StructuralReport check_typical_structure(const SparseBinaryMatrix& a, double p,
                                                const StructureParams& params,
                                                std::uint64_t subset_stream = 0) {
  params.validate();
  if (!(p > 0.0 && p < 1.0))
    throw parameter_error("check_typical_structure requires p in (0,1)");
  if (a.rows() != a.cols())
    throw parameter_error("structure audit requires a square matrix");
  const int n = a.rows();

  StructuralReport rep;
  rep.n = n;
  rep.p = p;
  rep.params = params;
  rep.zero = detect_zero_lines(a);
  rep.props.fill(true);
  rep.light_cols = light_columns(a, p, params);

  std::vector<char> is_light(static_cast<std::size_t>(n), 0);
  for (int j : rep.light_cols) is_light[static_cast<std::size_t>(j)] = 1;

  // (1) no heavy rows or columns.
  for (int i = 0; i < n; ++i)
    if (!count_within(static_cast<long long>(a.row_support(i).size()), params.c_heavy, p, n))
      detail::add_witness(rep, 0, {i, -1});  // {row, -1} marks a row witness
  for (int j = 0; j < n; ++j)
    if (!count_within(static_cast<long long>(a.col_support(j).size()), params.c_heavy, p, n))
      detail::add_witness(rep, 0, {-1, j});

  // (2) light columns have pairwise disjoint supports.
  for (std::size_t u = 0; u < rep.light_cols.size(); ++u)
    for (std::size_t v = u + 1; v < rep.light_cols.size(); ++v) {
      const int cu = rep.light_cols[u], cv = rep.light_cols[v];
      if (detail::sorted_intersect(a.col_support(cu), a.col_support(cv)))
        detail::add_witness(rep, 1, {cu, cv});
    }

  // (3) every column meets at most r0 light columns. A column "meets" a
  // light column when their supports share a row; the light column itself
  // counts when it qualifies.
  {
    std::vector<std::vector<int>> light_at_row(static_cast<std::size_t>(n));
    for (int j : rep.light_cols)
      for (int r : a.col_support(j)) light_at_row[static_cast<std::size_t>(r)].push_back(j);
    std::vector<int> seen(static_cast<std::size_t>(n), -1);
    for (int j = 0; j < n; ++j) {
      int hits = 0;
      for (int r : a.col_support(j))
        for (int lc : light_at_row[static_cast<std::size_t>(r)])
          if (seen[static_cast<std::size_t>(lc)] != j) {
            seen[static_cast<std::size_t>(lc)] = j;
            ++hits;
          }
      if (hits > params.r0) detail::add_witness(rep, 2, {j, hits});
    }
  }

  const FoldedMatrix f = fold_matrix(a);

  // (4) normal columns barely meet the light columns in the folded matrix.
  {
    std::vector<char> in_light_union(static_cast<std::size_t>(f.frows()), 0);
    for (int j : rep.light_cols)
      for (const auto& [row, val] : f.col_entries(j)) {
        (void)val;
        in_light_union[static_cast<std::size_t>(row)] = 1;
      }
    for (int j = 0; j < n; ++j) {
      if (is_light[static_cast<std::size_t>(j)]) continue;
      long long overlap = 0;
      for (const auto& [row, val] : f.col_entries(j)) {
        (void)val;
        overlap += in_light_union[static_cast<std::size_t>(row)];
      }
      if (!count_within_halved(overlap, params.delta0, p, n, 4))
        detail::add_witness(rep, 3, {j, static_cast<int>(overlap)});
    }
  }

  // (5) extension property over subsets I of columns, 2 <= |I| <= c_ext / p.
  {
    long long kmax = 0;
    while (kmax < n && scaled_int_below(kmax + 1, p, params.c_ext)) ++kmax;
    if (kmax >= 2) {
      std::vector<int> mark(static_cast<std::size_t>(f.frows()), 0);
      int epoch = 0;
      auto check_subset = [&](const std::vector<int>& subset) {
        long long total = 0;
        for (int j : subset) total += f.col_support_size(j);
        const long long uni = detail::folded_union_size(f, subset, mark, epoch);
        const long long deficiency = total - uni;
        const long long scale = static_cast<long long>(n) * static_cast<long long>(subset.size());
        if (!count_within_halved(deficiency, params.delta0, p, scale, 4)) {
          std::vector<int> witness = subset;
          witness.push_back(static_cast<int>(deficiency));
          detail::add_witness(rep, 4, std::move(witness));
        }
      };
      if (n <= params.exhaustive_n_max) {
        // Exhaustive quantifier: every subset with admissible size.
        const std::uint32_t limit = 1u << n;
        std::vector<int> subset;
        for (std::uint32_t mask = 0; mask < limit; ++mask) {
          const int popcnt = std::popcount(mask);
          if (popcnt < 2 || popcnt > kmax) continue;
          subset.clear();
          for (int j = 0; j < n; ++j)
            if (mask & (1u << j)) subset.push_back(j);
          check_subset(subset);
        }
      } else {
        // n_sub uniformly random subsets per size class.
        std::vector<int> pool(static_cast<std::size_t>(n));
        for (int k = 2; k <= kmax; ++k) {
          CounterStream cs(SeededRng{params.subset_seed, subset_stream}, rng_tag::kSubset,
                           static_cast<std::uint64_t>(k));
          for (int rep_i = 0; rep_i < params.n_sub; ++rep_i) {
            for (int t = 0; t < n; ++t) pool[static_cast<std::size_t>(t)] = t;
            std::vector<int> subset(static_cast<std::size_t>(k));
            for (int t = 0; t < k; ++t) {
              const auto pick = t + static_cast<int>(cs.next_below(
                                        static_cast<std::uint64_t>(n - t)));
              std::swap(pool[static_cast<std::size_t>(t)], pool[static_cast<std::size_t>(pick)]);
              subset[static_cast<std::size_t>(t)] = pool[static_cast<std::size_t>(t)];
            }
            check_subset(subset);
          }
        }
      }
    }
  }

  // (6) support sizes of each column and its folded version stay close.
  for (int j = 0; j < n; ++j) {
    const long long diff = std::llabs(static_cast<long long>(a.col_support(j).size()) -
                                      static_cast<long long>(f.col_support_size(j)));
    if (!count_within_halved(diff, params.delta0, p, n, 3))
      detail::add_witness(rep, 5, {j, static_cast<int>(diff)});
  }

  return rep;
}

// ---------------------------------------------------------------------------
// Single-entry row scan.
//
// Returns the rows of the folded matrix, outside the wrap-down of J and Jp,
// that carry exactly one nonzero among the columns of J, no nonzero in any
// other column of J or Jp, and whose full row support avoids the light
// columns. These are the rows that expose exactly one designated column.
inline std::vector<int> scan_single_entry_rows(const FoldedMatrix& f,
                                               const std::vector<int>& J,
                                               const std::vector<int>& Jp,
                                               const std::vector<int>& light_cols) {
  const int n = f.cols();
  const int half = f.frows();
  std::vector<char> in_j(static_cast<std::size_t>(n), 0);
  std::vector<char> in_jp(static_cast<std::size_t>(n), 0);
  std::vector<char> is_light(static_cast<std::size_t>(n), 0);
  auto check_range = [&](int c, const char* which) {
    if (c < 0 || c >= n)
      throw parameter_error(std::string("column index out of range in ") + which);
  };
  for (int c : J) {
    check_range(c, "J");
    in_j[static_cast<std::size_t>(c)] = 1;
  }
  for (int c : Jp) {
    check_range(c, "Jp");
    if (in_j[static_cast<std::size_t>(c)])
      throw parameter_error("J and Jp must be disjoint; both contain column " +
                            std::to_string(c));
    in_jp[static_cast<std::size_t>(c)] = 1;
  }
  for (int c : light_cols) {
    check_range(c, "light_cols");
    is_light[static_cast<std::size_t>(c)] = 1;
  }

  // Wrap-down: folded row i is excluded when column i or column i + half
  // belongs to J (or Jp) -- those rows carry the designated columns' own mass.
  std::vector<char> excluded(static_cast<std::size_t>(half), 0);
  auto exclude_from = [&](const std::vector<int>& cols) {
    for (int c : cols) {
      if (c < half) excluded[static_cast<std::size_t>(c)] = 1;
      const int wrapped = c - half;
      if (wrapped >= 0 && wrapped < half) excluded[static_cast<std::size_t>(wrapped)] = 1;
    }
  };
  exclude_from(J);
  exclude_from(Jp);

  std::vector<int> result;
  for (int i = 0; i < half; ++i) {
    if (excluded[static_cast<std::size_t>(i)]) continue;
    int hits_in_j = 0;
    bool rejected = false;
    for (const auto& [col, val] : f.row_entries(i)) {
      (void)val;
      if (is_light[static_cast<std::size_t>(col)]) {
        rejected = true;
        break;
      }
      if (in_j[static_cast<std::size_t>(col)]) {
        if (++hits_in_j > 1) {
          rejected = true;
          break;
        }
      } else if (in_jp[static_cast<std::size_t>(col)]) {
        rejected = true;
        break;
      }
    }
    if (!rejected && hits_in_j == 1) result.push_back(i);
  }
  return result;
}

}  // namespace rmtsharp
