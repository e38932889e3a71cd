#include "fedgl/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "fedgl/errors.hpp"

namespace fedgl {

namespace {

constexpr std::uint64_t kInitTag = 0x696e6974ULL;          // "init"
constexpr std::uint64_t kClientTag = 0x636c69656e74ULL;    // "client"
constexpr std::uint64_t kParticipantTag = 0x70617274ULL;   // "part"

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// Run fn(i) for every index on its own thread; exceptions are re-thrown on
// the caller after all threads join, so results stay index-addressed.
void parallel_for_each(std::size_t count, const std::function<void(std::size_t)>& fn) {
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(count);
  threads.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    threads.emplace_back([&, i] {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (std::thread& t : threads) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double eval_accuracy(const SparseMatrix& adj, const Graph& g, const ModelWeights& w,
                     const Mask& mask) {
  const ForwardOutput out = forward(adj, g.features, w, 0.0, /*training=*/false, nullptr);
  return accuracy(out.probabilities, g.labels, mask);
}

struct EarlyStopper {
  double best_val = -1.0;
  std::size_t best_round = 0;

  // True when this round strictly improves the monitored accuracy.
  bool observe(std::size_t round, double val_acc) {
    if (val_acc > best_val) {
      best_val = val_acc;
      best_round = round;
      return true;
    }
    return false;
  }
  bool should_stop(std::size_t round, std::size_t patience) const {
    return round - best_round >= patience;
  }
};

MetricsReport run_federated_family(PartitionResult& part, const ExperimentConfig& config,
                                   std::uint64_t seed, const RunHooks& hooks);
MetricsReport run_centralized(PartitionResult& part, const ExperimentConfig& config,
                              std::uint64_t seed, const RunHooks& hooks);
MetricsReport run_local(PartitionResult& part, const ExperimentConfig& config,
                        std::uint64_t seed);

Graph master_with_splits(const Graph& master, const ExperimentConfig& config,
                         std::uint64_t seed) {
  Graph out = master;
  const SplitMasks masks = make_splits(master, config.plan.split_mode, seed);
  out.train_mask = masks.train;
  out.val_mask = masks.val;
  out.test_mask = masks.test;
  return out;
}

PartitionResult partition_for_seed(const Graph& master, const ExperimentConfig& config,
                                   std::uint64_t seed) {
  PartitionPlan plan = config.plan;
  plan.seed = seed;
  return partition(master, plan);
}

}  // namespace

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kCentralized: return "centralized";
    case Mode::kLocal: return "local";
    case Mode::kFederated: return "federated";
    case Mode::kFedgl: return "fedgl";
    case Mode::kFedglNoGpg: return "fedgl_no_gpg";
    case Mode::kFedglNoGpl: return "fedgl_no_gpl";
  }
  return "unknown";
}

std::optional<Mode> mode_from_name(const std::string& name) {
  if (name == "centralized") return Mode::kCentralized;
  if (name == "local") return Mode::kLocal;
  if (name == "federated") return Mode::kFederated;
  if (name == "fedgl") return Mode::kFedgl;
  if (name == "fedgl_no_gpg") return Mode::kFedglNoGpg;
  if (name == "fedgl_no_gpl") return Mode::kFedglNoGpl;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (plan.proportions.empty()) throw ValidationError("config: no client proportions");
  for (double p : plan.proportions) {
    if (p <= 0.0 || p > 1.0) throw ValidationError("config: proportion out of (0,1]");
  }
  if (hyper.lambda < 0.0 || hyper.lambda >= 1.0) throw ValidationError("config: lambda out of [0,1)");
  if (hyper.alpha < 0.0) throw ValidationError("config: alpha must be non-negative");
  if (hyper.beta < 0.0) throw ValidationError("config: beta must be non-negative");
  if (hyper.neighbor_cap == 0) throw ValidationError("config: neighbor cap must be >= 1");
  if (hyper.dropout < 0.0 || hyper.dropout >= 1.0) throw ValidationError("config: dropout out of [0,1)");
  if (hyper.learning_rate <= 0.0) throw ValidationError("config: learning rate must be positive");
  if (hyper.hidden == 0) throw ValidationError("config: hidden width must be >= 1");
  if (hyper.local_epochs == 0) throw ValidationError("config: local epochs must be >= 1");
  if (hyper.max_rounds == 0) throw ValidationError("config: max rounds must be >= 1");
  if (hyper.patience == 0 || hyper.patience > hyper.max_rounds) {
    throw ValidationError("config: patience must be in [1, max_rounds]");
  }
  if (hyper.participation_ratio <= 0.0 || hyper.participation_ratio > 1.0) {
    throw ValidationError("config: participation ratio out of (0,1]");
  }
  if (seeds.empty()) throw ValidationError("config: no seeds");
}

GoalAccuracies evaluate_goals(const ModelWeights& weights,
                              const std::vector<const Graph*>& clients,
                              const std::vector<const SparseMatrix*>& client_adjacencies,
                              const Graph& merged, const SparseMatrix& merged_adjacency) {
  if (clients.size() != client_adjacencies.size()) {
    throw ValidationError("evaluate_goals: client/adjacency count mismatch");
  }
  GoalAccuracies out;
  out.global_acc = eval_accuracy(merged_adjacency, merged, weights, merged.test_mask);
  out.local_accs.resize(clients.size());
  for (std::size_t k = 0; k < clients.size(); ++k) {
    out.local_accs[k] =
        eval_accuracy(*client_adjacencies[k], *clients[k], weights, clients[k]->test_mask);
  }
  return out;
}

namespace {

MetricsReport run_federated_family(PartitionResult& part, const ExperimentConfig& config,
                                   std::uint64_t seed, const RunHooks& hooks) {
  const bool wants_gpl =
      (config.mode == Mode::kFedgl || config.mode == Mode::kFedglNoGpg) && !config.disable_gpl;
  // beta = 0 makes the pseudo graph unusable on every client, so skip
  // building it; the lambda -> 1, beta = 0 boundary then reduces to the
  // plain federated baseline exactly, reports included.
  const bool wants_gpg = (config.mode == Mode::kFedgl || config.mode == Mode::kFedglNoGpl) &&
                         !config.disable_gpg && config.hyper.beta > 0.0;

  const std::size_t num_clients = part.clients.size();
  const GlobalRegistry& registry = part.registry;
  const std::size_t union_size = registry.union_size();

  const Graph merged = merge_graphs(part.clients);
  const NormalizedAdjacency merged_adj = normalize_adjacency(merged.adjacency);
  const std::size_t num_classes = merged.num_classes();

  // merged rows and registry rows agree: both are the sorted distinct union.
  std::vector<std::size_t> train_rows;
  for (std::size_t i = 0; i < merged.num_nodes; ++i) {
    if (merged.train_mask[i]) train_rows.push_back(i);
  }

  // Server state.
  Rng init_rng = Rng::derive(seed, kInitTag);
  GlobalArtifacts global;
  global.weights =
      init_weights(merged.feature_dim(), config.hyper.hidden, num_classes, init_rng);
  global.pseudo_labels = DenseMatrix(union_size, num_classes);
  global.pseudo_graph = SparseMatrix(union_size, union_size);

  // Client state.
  std::vector<ClientState> clients(num_clients);
  for (std::size_t k = 0; k < num_clients; ++k) {
    ClientState& c = clients[k];
    c.graph = std::move(part.clients[k]);
    c.norm_adj_base = normalize_adjacency(c.graph.adjacency);
    c.weights = global.weights;
    c.optimizer = make_optimizer(global.weights, config.hyper.learning_rate,
                                 config.hyper.weight_decay);
    c.rng = Rng::derive(seed, kClientTag, k);
    c.client_id = k;
    c.fusion_rows = registry.rows_of(c.graph.global_ids);
    c.pseudo_label_slice = DenseMatrix(c.graph.num_nodes, num_classes);
    c.pseudo_graph_slice = SparseMatrix(c.graph.num_nodes, c.graph.num_nodes);
  }

  TrainHyper train_hyper;
  train_hyper.epochs = config.hyper.local_epochs;
  train_hyper.alpha = config.hyper.alpha;
  train_hyper.beta = config.hyper.beta;
  train_hyper.dropout = config.hyper.dropout;
  train_hyper.embedding_source = config.embedding_source;

  const std::size_t participants_per_round = static_cast<std::size_t>(
      std::ceil(config.hyper.participation_ratio * static_cast<double>(num_clients)));

  MetricsReport report;
  EarlyStopper stopper;
  ModelWeights best_weights = global.weights;
  std::vector<DenseMatrix> best_label_slices(num_clients);
  std::vector<SparseMatrix> best_graph_slices(num_clients);
  for (std::size_t k = 0; k < num_clients; ++k) {
    best_label_slices[k] = clients[k].pseudo_label_slice;
    best_graph_slices[k] = clients[k].pseudo_graph_slice;
  }

  for (std::size_t round = 1; round <= config.hyper.max_rounds; ++round) {
    // Artifacts in force while the clients train this round.
    const std::size_t used_pseudo_labels = count_pseudo_labels(global.pseudo_labels);
    const std::size_t used_pseudo_graph_nnz = global.pseudo_graph.nnz();

    Rng participant_rng = Rng::derive(seed, kParticipantTag, round);
    std::vector<std::size_t> participants =
        participant_rng.sample_without_replacement(num_clients, participants_per_round);
    std::sort(participants.begin(), participants.end());

    // Distribute the global model and fresh artifact slices to participants.
    for (std::size_t k : participants) {
      ClientState& c = clients[k];
      c.weights = global.weights;
      if (wants_gpl) c.pseudo_label_slice = project_rows(global.pseudo_labels, c.fusion_rows);
      if (wants_gpg) c.pseudo_graph_slice = global.pseudo_graph.submatrix(c.fusion_rows);
    }

    std::vector<RoundUpload> uploads(participants.size());
    parallel_for_each(participants.size(), [&](std::size_t i) {
      uploads[i] = local_train(clients[participants[i]], train_hyper, round);
    });
    if (hooks.on_round_uploads) hooks.on_round_uploads(round, uploads);

    std::vector<WeightUpload> weight_uploads;
    weight_uploads.reserve(uploads.size());
    for (const RoundUpload& u : uploads) {
      weight_uploads.push_back({u.node_count, &u.weights});
    }
    global.weights = aggregate_weights(weight_uploads);
    global.round = round;
    if (hooks.on_round_weights) hooks.on_round_weights(round, global.weights);

    if (wants_gpl) {
      std::vector<MatrixUpload> prediction_uploads;
      prediction_uploads.reserve(uploads.size());
      for (const RoundUpload& u : uploads) {
        prediction_uploads.push_back({u.node_count, &u.predictions, &u.rows});
      }
      const DenseMatrix fused =
          fuse_client_matrices(prediction_uploads, union_size, config.fusion_renormalize);
      global.pseudo_labels = discover_pseudo_labels(fused, config.hyper.lambda, train_rows);
    }
    if (wants_gpg) {
      std::vector<MatrixUpload> embedding_uploads;
      embedding_uploads.reserve(uploads.size());
      for (const RoundUpload& u : uploads) {
        embedding_uploads.push_back({u.node_count, &u.embeddings, &u.rows});
      }
      const DenseMatrix fused =
          fuse_client_matrices(embedding_uploads, union_size, config.fusion_renormalize);
      global.pseudo_graph = build_pseudo_graph(fused, config.hyper.neighbor_cap);
    }

    RoundRecord record;
    record.round = round;
    record.global_val_acc =
        eval_accuracy(merged_adj.matrix, merged, global.weights, merged.val_mask);
    record.global_test_acc =
        eval_accuracy(merged_adj.matrix, merged, global.weights, merged.test_mask);
    double local_sum = 0.0;
    std::vector<double> local_accs(num_clients);
    parallel_for_each(num_clients, [&](std::size_t k) {
      const SparseMatrix adj = complement_adjacency(
          clients[k].norm_adj_base, clients[k].pseudo_graph_slice, train_hyper.beta);
      local_accs[k] =
          eval_accuracy(adj, clients[k].graph, global.weights, clients[k].graph.test_mask);
    });
    for (double a : local_accs) local_sum += a;
    record.mean_local_test_acc = local_sum / static_cast<double>(num_clients);
    record.pseudo_label_count = used_pseudo_labels;
    record.pseudo_graph_nnz = used_pseudo_graph_nnz;
    report.rounds.push_back(record);

    if (stopper.observe(round, record.global_val_acc)) {
      best_weights = global.weights;
      for (std::size_t k = 0; k < num_clients; ++k) {
        best_label_slices[k] = clients[k].pseudo_label_slice;
        best_graph_slices[k] = clients[k].pseudo_graph_slice;
      }
      if (hooks.on_best_weights) hooks.on_best_weights(best_weights);
    }
    if (stopper.should_stop(round, config.hyper.patience)) break;
  }

  // Final metrics come from the best-validation round.
  std::vector<const Graph*> client_graphs;
  std::vector<SparseMatrix> final_adjacencies;
  std::vector<const SparseMatrix*> adjacency_ptrs;
  final_adjacencies.reserve(num_clients);
  for (std::size_t k = 0; k < num_clients; ++k) {
    client_graphs.push_back(&clients[k].graph);
    final_adjacencies.push_back(complement_adjacency(clients[k].norm_adj_base,
                                                     best_graph_slices[k], train_hyper.beta));
  }
  for (const SparseMatrix& adj : final_adjacencies) adjacency_ptrs.push_back(&adj);
  const GoalAccuracies goals =
      evaluate_goals(best_weights, client_graphs, adjacency_ptrs, merged, merged_adj.matrix);
  report.global_test_acc = goals.global_acc;
  report.per_client_local_test_acc = goals.local_accs;
  report.best_round = stopper.best_round;
  return report;
}

MetricsReport run_centralized(PartitionResult& part, const ExperimentConfig& config,
                              std::uint64_t seed, const RunHooks& hooks) {
  const Graph merged = merge_graphs(part.clients);
  const NormalizedAdjacency adj = normalize_adjacency(merged.adjacency);

  Rng init_rng = Rng::derive(seed, kInitTag);
  ModelWeights weights =
      init_weights(merged.feature_dim(), config.hyper.hidden, merged.num_classes(), init_rng);
  OptimizerState optimizer =
      make_optimizer(weights, config.hyper.learning_rate, config.hyper.weight_decay);
  Rng dropout_rng = Rng::derive(seed, kClientTag, 0);

  MetricsReport report;
  EarlyStopper stopper;
  ModelWeights best_weights = weights;

  for (std::size_t epoch = 1; epoch <= config.hyper.max_rounds; ++epoch) {
    ForwardOutput out = forward(adj.matrix, merged.features, weights, config.hyper.dropout,
                                /*training=*/true, &dropout_rng);
    const double value = loss(out, merged.labels, merged.train_mask);
    if (!std::isfinite(value)) {
      throw NumericError("centralized: non-finite loss at epoch " + std::to_string(epoch));
    }
    const Mask no_ssl(merged.num_nodes, 0);
    const Gradients grads = gradients(adj.matrix, merged.features, weights, out, merged.labels,
                                      merged.train_mask, DenseMatrix(), no_ssl, 0.0);
    adam_step(weights, optimizer, grads);
    if (hooks.on_round_weights) hooks.on_round_weights(epoch, weights);

    RoundRecord record;
    record.round = epoch;
    record.global_val_acc = eval_accuracy(adj.matrix, merged, weights, merged.val_mask);
    record.global_test_acc = eval_accuracy(adj.matrix, merged, weights, merged.test_mask);
    record.mean_local_test_acc = nan_value();
    report.rounds.push_back(record);

    if (stopper.observe(epoch, record.global_val_acc)) {
      best_weights = weights;
      if (hooks.on_best_weights) hooks.on_best_weights(best_weights);
    }
    if (stopper.should_stop(epoch, config.hyper.patience)) break;
  }

  report.global_test_acc =
      eval_accuracy(adj.matrix, merged, best_weights, merged.test_mask);
  report.per_client_local_test_acc.clear();
  for (const Graph& client : part.clients) {
    const NormalizedAdjacency client_adj = normalize_adjacency(client.adjacency);
    report.per_client_local_test_acc.push_back(
        eval_accuracy(client_adj.matrix, client, best_weights, client.test_mask));
  }
  report.best_round = stopper.best_round;
  return report;
}

MetricsReport run_local(PartitionResult& part, const ExperimentConfig& config,
                        std::uint64_t seed) {
  const std::size_t num_clients = part.clients.size();

  for (std::size_t k = 0; k < num_clients; ++k) {
    const Graph& g = part.clients[k];
    std::size_t train = 0, val = 0, test = 0;
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
      train += g.train_mask[i];
      val += g.val_mask[i];
      test += g.test_mask[i];
    }
    if (train == 0 || val == 0 || test == 0) {
      throw ValidationError("local: client " + std::to_string(k) +
                            " is missing train, validation, or test nodes");
    }
  }

  MetricsReport report;
  report.per_client_local_test_acc.resize(num_clients);
  parallel_for_each(num_clients, [&](std::size_t k) {
    const Graph& g = part.clients[k];
    const NormalizedAdjacency adj = normalize_adjacency(g.adjacency);
    // Same stream family as the centralized trainer, so a single full-size
    // client degenerates to it exactly.
    Rng init_rng = Rng::derive(seed, kInitTag, k);
    ModelWeights weights =
        init_weights(g.feature_dim(), config.hyper.hidden, g.num_classes(), init_rng);
    OptimizerState optimizer =
        make_optimizer(weights, config.hyper.learning_rate, config.hyper.weight_decay);
    Rng dropout_rng = Rng::derive(seed, kClientTag, k);

    EarlyStopper stopper;
    ModelWeights best_weights = weights;
    const Mask no_ssl(g.num_nodes, 0);
    for (std::size_t epoch = 1; epoch <= config.hyper.max_rounds; ++epoch) {
      ForwardOutput out = forward(adj.matrix, g.features, weights, config.hyper.dropout,
                                  /*training=*/true, &dropout_rng);
      const double value = loss(out, g.labels, g.train_mask);
      if (!std::isfinite(value)) {
        throw NumericError("local client " + std::to_string(k) + ": non-finite loss at epoch " +
                           std::to_string(epoch));
      }
      const Gradients grads = gradients(adj.matrix, g.features, weights, out, g.labels,
                                        g.train_mask, DenseMatrix(), no_ssl, 0.0);
      adam_step(weights, optimizer, grads);
      if (stopper.observe(epoch, eval_accuracy(adj.matrix, g, weights, g.val_mask))) {
        best_weights = weights;
      }
      if (stopper.should_stop(epoch, config.hyper.patience)) break;
    }
    report.per_client_local_test_acc[k] =
        eval_accuracy(adj.matrix, g, best_weights, g.test_mask);
  });

  report.global_test_acc = nan_value();
  report.best_round = 0;
  return report;
}

}  // namespace

MetricsReport run_experiment(const Graph& master, const ExperimentConfig& config,
                             std::uint64_t seed, const RunHooks& hooks) {
  config.validate();
  const Graph split_master = master_with_splits(master, config, seed);
  return run_with_partition(partition_for_seed(split_master, config, seed), config, seed,
                            hooks);
}

MetricsReport run_with_partition(PartitionResult partition, const ExperimentConfig& config,
                                 std::uint64_t seed, const RunHooks& hooks) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  MetricsReport report;
  switch (config.mode) {
    case Mode::kCentralized:
      report = run_centralized(partition, config, seed, hooks);
      break;
    case Mode::kLocal:
      report = run_local(partition, config, seed);
      break;
    default:
      report = run_federated_family(partition, config, seed, hooks);
      break;
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace fedgl
