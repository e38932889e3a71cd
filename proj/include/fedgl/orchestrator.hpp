#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fedgl/fedclient.hpp"
#include "fedgl/fedserver.hpp"
#include "fedgl/gcn.hpp"
#include "fedgl/graph.hpp"
#include "fedgl/partition.hpp"

namespace fedgl {

enum class Mode {
  kCentralized,
  kLocal,
  kFederated,
  kFedgl,
  kFedglNoGpg,  // pseudo graph disabled
  kFedglNoGpl,  // pseudo labels disabled
};

std::string mode_name(Mode mode);
std::optional<Mode> mode_from_name(const std::string& name);

struct Hyper {
  double lambda = 0.5;       // pseudo-label confidence threshold
  double alpha = 0.2;        // self-supervision loss coefficient
  double beta = 1.0;         // pseudo-graph complement coefficient
  std::size_t neighbor_cap = 100;
  double dropout = 0.5;
  double learning_rate = 0.01;
  double weight_decay = 5e-4;
  std::size_t hidden = 16;
  std::size_t local_epochs = 10;
  std::size_t max_rounds = 300;
  std::size_t patience = 30;
  double participation_ratio = 1.0;
};

struct ExperimentConfig {
  Mode mode = Mode::kFedgl;
  std::string dataset;  // bundle directory
  PartitionPlan plan;
  Hyper hyper;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  bool fusion_renormalize = false;
  EmbeddingSource embedding_source = EmbeddingSource::kFinalLayer;
  bool disable_gpl = false;  // force the pseudo-label path off in fedgl mode
  bool disable_gpg = false;  // force the pseudo-graph path off in fedgl mode

  void validate() const;  // throws ValidationError before any training
};

struct RoundRecord {
  std::size_t round = 0;
  double global_val_acc = 0.0;
  double global_test_acc = 0.0;
  double mean_local_test_acc = 0.0;   // NaN when not applicable
  std::size_t pseudo_label_count = 0;  // artifacts in force during the round
  std::size_t pseudo_graph_nnz = 0;

  bool operator==(const RoundRecord&) const = default;
};

struct MetricsReport {
  std::vector<RoundRecord> rounds;
  double global_test_acc = 0.0;  // best-validation-round model; NaN for local mode
  std::vector<double> per_client_local_test_acc;
  std::size_t best_round = 0;
  double wall_time_seconds = 0.0;  // informational; never serialized
};

// Test/diagnostic taps into the run.
struct RunHooks {
  // Called with the aggregated global weights after every round (federated
  // modes) or with the model after every epoch (centralized mode).
  std::function<void(std::size_t, const ModelWeights&)> on_round_weights;
  // Called with each round's uploads, in client order (federated modes).
  std::function<void(std::size_t, const std::vector<RoundUpload>&)> on_round_uploads;
  // Called whenever the early-stopping monitor improves, with the weights the
  // final report will be based on if no later round improves.
  std::function<void(const ModelWeights&)> on_best_weights;
};

struct GoalAccuracies {
  double global_acc = 0.0;
  std::vector<double> local_accs;
};

// Global-goal accuracy on the merged test set, local-goal accuracy per client
// on its own (possibly complemented) adjacency.
GoalAccuracies evaluate_goals(const ModelWeights& weights,
                              const std::vector<const Graph*>& clients,
                              const std::vector<const SparseMatrix*>& client_adjacencies,
                              const Graph& merged, const SparseMatrix& merged_adjacency);

// Run one seed of the configured experiment on the given master graph:
// draws splits, partitions, then trains.
MetricsReport run_experiment(const Graph& master, const ExperimentConfig& config,
                             std::uint64_t seed, const RunHooks& hooks = {});

// Same, but on a pre-built (e.g. manifest-frozen) partition.
MetricsReport run_with_partition(PartitionResult partition, const ExperimentConfig& config,
                                 std::uint64_t seed, const RunHooks& hooks = {});

}  // namespace fedgl
