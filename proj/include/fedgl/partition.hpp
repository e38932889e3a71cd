#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fedgl/graph.hpp"
#include "fedgl/rng.hpp"

namespace fedgl {

struct SplitMode {
  enum class Kind { kFixed, kRandom };
  Kind kind = Kind::kFixed;
  std::size_t labels_per_class = 20;  // used by kRandom; kFixed pins 20
  std::size_t val_size = 500;
  std::size_t test_size = 1000;
};

struct PartitionPlan {
  std::vector<double> proportions;           // one sampling fraction per client, in (0,1]
  std::optional<double> overlap_ratio;       // pairwise overlap target; absent = natural overlap
  SplitMode split_mode;
  std::uint64_t seed = 0;
};

struct PartitionResult {
  std::vector<Graph> clients;
  GlobalRegistry registry;
};

// Induced subgraph on floor(proportion * N) uniformly sampled nodes, local
// rows ordered by ascending master id. Masks and labels restrict from the master.
Graph sample_client(const Graph& master, double proportion, Rng& rng);

// Build the federated dataset. Without an overlap target the clients are
// independent draws; with one each client takes (1-rho) of its budget from a
// private slice of the master and rho from a pool shared by all clients, so
// any two clients overlap in ~rho * min(N_i, N_j) nodes.
PartitionResult partition(const Graph& master, const PartitionPlan& plan);

struct SplitMasks {
  Mask train;
  Mask val;
  Mask test;
};

// Wrap externally built client graphs (e.g. from a frozen manifest) with a
// freshly derived registry.
PartitionResult make_partition_result(std::vector<Graph> clients);

// Per-class training selection plus validation/test draws from the remainder.
// Fixed mode keeps the masks the graph shipped with when present; otherwise
// both modes draw deterministically from the plan seed.
SplitMasks make_splits(const Graph& graph, const SplitMode& mode, std::uint64_t seed);

// Mean of |V_i ∩ V_j| / min(N_i, N_j) over client pairs; diagnostic for the
// overlap-controlled partition.
double mean_pairwise_overlap(const std::vector<Graph>& clients);

}  // namespace fedgl
