#pragma once
// The three random-graph ensembles and their exact mean matrices.
//
//  * UndirectedER:  symmetric adjacency of G(n,p); zero diagonal; each
//    unordered pair {i,j} carries a mirrored edge with probability p.
//  * DirectedER:    adjacency of the directed Erdos-Renyi graph in its
//    pair-variable representation: for i<j draw d_up, d_dn ~ Ber(2p)
//    independently and a fair coin t; the entry above the diagonal is
//    d_up.t and the one below is d_dn.(1-t). Exactly one orientation can
//    survive, each with probability p, and no 2-cycles ever occur.
//  * BipartiteBlock: the n x n off-diagonal block of a bipartite adjacency,
//    fully i.i.d. Ber(p) including the diagonal.
//
// The mean matrix is kept symbolic (off-diagonal value, diagonal value), so
// centered operator products never materialize an O(n^2) object.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rmtsharp/errors.hpp"
#include "rmtsharp/matrix.hpp"
#include "rmtsharp/rng.hpp"

namespace rmtsharp {

enum class ModelKind { UndirectedER, DirectedER, BipartiteBlock };

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::UndirectedER: return "undirected";
    case ModelKind::DirectedER: return "directed";
    case ModelKind::BipartiteBlock: return "bipartite";
  }
  return "?";
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "undirected") return ModelKind::UndirectedER;
  if (s == "directed") return ModelKind::DirectedER;
  if (s == "bipartite") return ModelKind::BipartiteBlock;
  throw parameter_error("unknown model kind '" + s +
                        "' (expected undirected|directed|bipartite)");
}

struct GraphModel {
  ModelKind kind = ModelKind::UndirectedER;
  int n = 0;
  double p = 0.0;

  void validate() const {
    if (n < 1) throw parameter_error("model requires n >= 1, got " + std::to_string(n));
    if (!(p > 0.0 && p < 1.0))
      throw parameter_error("edge probability must lie strictly in (0,1), got " +
                            std::to_string(p));
    // The directed representation draws pair edges with probability 2p.
    if (kind == ModelKind::DirectedER && !(p < 0.5))
      throw parameter_error("directed model requires p < 1/2, got " + std::to_string(p));
  }
};

// Symbolic mean matrix: value off the diagonal and on it.
struct ExpectedMatrix {
  int n = 0;
  double off_diag = 0.0;
  double diag = 0.0;
};

inline ExpectedMatrix expected_matrix(const GraphModel& model) {
  model.validate();
  switch (model.kind) {
    case ModelKind::UndirectedER:
    case ModelKind::DirectedER:
      // Each off-diagonal entry is 1 with probability p (for the directed
      // representation: 2p for the pair edge times 1/2 for the orientation),
      // and the diagonal is identically zero: E A = p (J - I).
      return {model.n, model.p, 0.0};
    case ModelKind::BipartiteBlock:
      return {model.n, model.p, model.p};
  }
  throw parameter_error("unreachable model kind");
}

inline SparseBinaryMatrix sample_undirected(int n, double p, const SeededRng& rng) {
  GraphModel{ModelKind::UndirectedER, n, p}.validate();
  std::vector<std::pair<int, int>> entries;
  for (int i = 0; i < n; ++i) {
    CounterStream cs(rng, rng_tag::kUpper, static_cast<std::uint64_t>(i));
    bernoulli_hits(cs, i + 1, n, p, [&](long j) {
      entries.emplace_back(i, static_cast<int>(j));
      entries.emplace_back(static_cast<int>(j), i);
    });
  }
  return SparseBinaryMatrix::from_entries(n, n, std::move(entries));
}

inline SparseBinaryMatrix sample_directed(int n, double p, const SeededRng& rng) {
  GraphModel{ModelKind::DirectedER, n, p}.validate();
  const auto nn = static_cast<std::uint64_t>(n);
  // The orientation coin is keyed by the unordered pair so both triangular
  // scans observe the same value.
  auto theta = [&](int i, int j) {  // requires i < j
    return rng.at(rng_tag::kTheta,
                  static_cast<std::uint64_t>(i) * nn + static_cast<std::uint64_t>(j)) & 1u;
  };
  std::vector<std::pair<int, int>> entries;
  for (int i = 0; i < n; ++i) {
    CounterStream up(rng, rng_tag::kUpper, static_cast<std::uint64_t>(i));
    bernoulli_hits(up, i + 1, n, 2.0 * p, [&](long j) {
      if (theta(i, static_cast<int>(j)) == 1u) entries.emplace_back(i, static_cast<int>(j));
    });
    CounterStream dn(rng, rng_tag::kLower, static_cast<std::uint64_t>(i));
    bernoulli_hits(dn, 0, i, 2.0 * p, [&](long j) {
      if (theta(static_cast<int>(j), i) == 0u) entries.emplace_back(i, static_cast<int>(j));
    });
  }
  return SparseBinaryMatrix::from_entries(n, n, std::move(entries));
}

inline SparseBinaryMatrix sample_bipartite_block(int n, double p, const SeededRng& rng) {
  GraphModel{ModelKind::BipartiteBlock, n, p}.validate();
  std::vector<std::pair<int, int>> entries;
  for (int i = 0; i < n; ++i) {
    CounterStream cs(rng, rng_tag::kRow, static_cast<std::uint64_t>(i));
    bernoulli_hits(cs, 0, n, p, [&](long j) { entries.emplace_back(i, static_cast<int>(j)); });
  }
  return SparseBinaryMatrix::from_entries(n, n, std::move(entries));
}

inline SparseBinaryMatrix sample(const GraphModel& model, const SeededRng& rng) {
  switch (model.kind) {
    case ModelKind::UndirectedER: return sample_undirected(model.n, model.p, rng);
    case ModelKind::DirectedER: return sample_directed(model.n, model.p, rng);
    case ModelKind::BipartiteBlock: return sample_bipartite_block(model.n, model.p, rng);
  }
  throw parameter_error("unreachable model kind");
}

}  // namespace rmtsharp
