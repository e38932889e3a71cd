#include "fedgl/partition.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "fedgl/errors.hpp"

namespace fedgl {

namespace {

// Induced subgraph on the given master rows (must be sorted ascending).
Graph induced_subgraph(const Graph& master, const std::vector<std::size_t>& rows) {
  Graph g;
  g.num_nodes = rows.size();
  const std::size_t c = master.num_classes();

  std::unordered_map<std::size_t, std::size_t> local;
  local.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) local.emplace(rows[i], i);

  std::vector<SparseMatrix::Triplet> edges;
  std::vector<SparseMatrix::Triplet> feats;
  g.labels = DenseMatrix(rows.size(), c);
  g.train_mask.assign(rows.size(), 0);
  g.val_mask.assign(rows.size(), 0);
  g.test_mask.assign(rows.size(), 0);
  g.global_ids.resize(rows.size());

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t m = rows[i];
    g.global_ids[i] = master.global_ids[m];
    g.train_mask[i] = master.train_mask[m];
    g.val_mask[i] = master.val_mask[m];
    g.test_mask[i] = master.test_mask[m];
    for (std::size_t j = 0; j < c; ++j) g.labels.at(i, j) = master.labels.at(m, j);
    for (std::size_t k = master.features.row_ptr()[m]; k < master.features.row_ptr()[m + 1];
         ++k) {
      feats.push_back({i, master.features.col_idx()[k], master.features.values()[k]});
    }
    for (std::size_t k = master.adjacency.row_ptr()[m]; k < master.adjacency.row_ptr()[m + 1];
         ++k) {
      const auto it = local.find(master.adjacency.col_idx()[k]);
      if (it != local.end()) edges.push_back({i, it->second, master.adjacency.values()[k]});
    }
  }
  g.features = SparseMatrix::from_triplets(rows.size(), master.feature_dim(), std::move(feats));
  g.adjacency = SparseMatrix::from_triplets(rows.size(), rows.size(), std::move(edges));
  return g;
}

std::vector<std::size_t> sorted_sample(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> sample = rng.sample_without_replacement(n, k);
  std::sort(sample.begin(), sample.end());
  return sample;
}

}  // namespace

Graph sample_client(const Graph& master, double proportion, Rng& rng) {
  if (proportion <= 0.0 || proportion > 1.0) {
    throw ValidationError("sample_client: proportion must be in (0,1]");
  }
  const std::size_t budget =
      static_cast<std::size_t>(std::floor(proportion * static_cast<double>(master.num_nodes)));
  if (budget == 0) throw ValidationError("sample_client: proportion yields zero nodes");
  return induced_subgraph(master, sorted_sample(master.num_nodes, budget, rng));
}

PartitionResult partition(const Graph& master, const PartitionPlan& plan) {
  const std::size_t k = plan.proportions.size();
  if (k == 0) throw ValidationError("partition: plan has no clients");
  for (double p : plan.proportions) {
    if (p <= 0.0 || p > 1.0) throw ValidationError("partition: proportion out of (0,1]");
  }
  if (plan.overlap_ratio && (*plan.overlap_ratio < 0.0 || *plan.overlap_ratio >= 1.0)) {
    throw ValidationError("partition: overlap ratio out of [0,1)");
  }

  PartitionResult result;
  result.clients.reserve(k);

  if (!plan.overlap_ratio) {
    for (std::size_t i = 0; i < k; ++i) {
      Rng rng = Rng::derive(plan.seed, 0x636c69656e74ULL, i);  // per-client stream
      result.clients.push_back(sample_client(master, plan.proportions[i], rng));
    }
  } else {
    const double rho = *plan.overlap_ratio;
    std::vector<std::size_t> budgets(k), shared_counts(k), exclusive_counts(k);
    std::size_t max_shared = 0;
    std::size_t exclusive_total = 0;
    for (std::size_t i = 0; i < k; ++i) {
      budgets[i] = static_cast<std::size_t>(
          std::floor(plan.proportions[i] * static_cast<double>(master.num_nodes)));
      if (budgets[i] == 0) throw ValidationError("partition: proportion yields zero nodes");
      shared_counts[i] =
          static_cast<std::size_t>(std::llround(rho * static_cast<double>(budgets[i])));
      exclusive_counts[i] = budgets[i] - shared_counts[i];
      max_shared = std::max(max_shared, shared_counts[i]);
      exclusive_total += exclusive_counts[i];
    }
    if (exclusive_total + max_shared > master.num_nodes) {
      throw ValidationError(
          "partition: client budgets exceed master size under exclusivity constraints");
    }

    // One master shuffle carves the shared pool and the exclusive slices.
    Rng pool_rng = Rng::derive(plan.seed, 0x706f6f6cULL);
    std::vector<std::size_t> order(master.num_nodes);
    for (std::size_t i = 0; i < master.num_nodes; ++i) order[i] = i;
    pool_rng.shuffle(order);

    // A client's shared part is a prefix of the shared pool, so two clients
    // overlap in exactly min of their shared counts.
    const std::vector<std::size_t> shared_pool(order.begin(),
                                               order.begin() + static_cast<std::ptrdiff_t>(max_shared));
    std::size_t cursor = max_shared;
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<std::size_t> rows(shared_pool.begin(),
                                    shared_pool.begin() + static_cast<std::ptrdiff_t>(shared_counts[i]));
      rows.insert(rows.end(), order.begin() + static_cast<std::ptrdiff_t>(cursor),
                  order.begin() + static_cast<std::ptrdiff_t>(cursor + exclusive_counts[i]));
      cursor += exclusive_counts[i];
      std::sort(rows.begin(), rows.end());
      result.clients.push_back(induced_subgraph(master, rows));
    }
  }

  std::vector<std::vector<std::size_t>> id_lists;
  id_lists.reserve(k);
  for (const Graph& g : result.clients) id_lists.push_back(g.global_ids);
  result.registry = GlobalRegistry(id_lists);
  return result;
}

PartitionResult make_partition_result(std::vector<Graph> clients) {
  PartitionResult result;
  result.clients = std::move(clients);
  std::vector<std::vector<std::size_t>> id_lists;
  id_lists.reserve(result.clients.size());
  for (const Graph& g : result.clients) id_lists.push_back(g.global_ids);
  result.registry = GlobalRegistry(id_lists);
  return result;
}

SplitMasks make_splits(const Graph& graph, const SplitMode& mode, std::uint64_t seed) {
  const std::size_t n = graph.num_nodes;
  const std::size_t c = graph.num_classes();

  if (mode.kind == SplitMode::Kind::kFixed) {
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      any = any || graph.train_mask[i] || graph.val_mask[i] || graph.test_mask[i];
    }
    if (any) return SplitMasks{graph.train_mask, graph.val_mask, graph.test_mask};
  }

  const std::size_t per_class =
      mode.kind == SplitMode::Kind::kFixed ? 20 : mode.labels_per_class;

  // Class membership in node order; labeled rows only.
  std::vector<std::vector<std::size_t>> by_class(c);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      if (graph.labels.at(i, j) == 1.0) {
        by_class[j].push_back(i);
        break;
      }
    }
  }

  Rng rng = Rng::derive(seed, 0x73706c6974ULL);  // split stream
  SplitMasks masks;
  masks.train.assign(n, 0);
  masks.val.assign(n, 0);
  masks.test.assign(n, 0);

  std::vector<std::size_t> remainder;
  for (std::size_t j = 0; j < c; ++j) {
    if (by_class[j].size() < per_class) {
      throw ValidationError("make_splits: class " + std::to_string(j) + " has only " +
                            std::to_string(by_class[j].size()) + " labeled nodes, need " +
                            std::to_string(per_class));
    }
    std::vector<std::size_t> picks = rng.sample_without_replacement(by_class[j].size(), per_class);
    std::sort(picks.begin(), picks.end());
    std::unordered_set<std::size_t> chosen(picks.begin(), picks.end());
    for (std::size_t t = 0; t < by_class[j].size(); ++t) {
      if (chosen.count(t)) {
        masks.train[by_class[j][t]] = 1;
      } else {
        remainder.push_back(by_class[j][t]);
      }
    }
  }

  std::sort(remainder.begin(), remainder.end());
  if (remainder.size() < mode.val_size + mode.test_size) {
    throw ValidationError("make_splits: not enough unlabeled-for-training nodes for " +
                          std::to_string(mode.val_size) + " validation + " +
                          std::to_string(mode.test_size) + " test nodes");
  }
  std::vector<std::size_t> picks =
      rng.sample_without_replacement(remainder.size(), mode.val_size + mode.test_size);
  for (std::size_t t = 0; t < mode.val_size; ++t) masks.val[remainder[picks[t]]] = 1;
  for (std::size_t t = mode.val_size; t < picks.size(); ++t) masks.test[remainder[picks[t]]] = 1;
  return masks;
}

double mean_pairwise_overlap(const std::vector<Graph>& clients) {
  if (clients.size() < 2) return 0.0;
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < clients.size(); ++i) {
    std::unordered_set<std::size_t> ids(clients[i].global_ids.begin(),
                                        clients[i].global_ids.end());
    for (std::size_t j = i + 1; j < clients.size(); ++j) {
      std::size_t common = 0;
      for (std::size_t id : clients[j].global_ids) common += ids.count(id);
      const std::size_t denom = std::min(clients[i].num_nodes, clients[j].num_nodes);
      total += static_cast<double>(common) / static_cast<double>(denom);
      pairs += 1;
    }
  }
  return total / static_cast<double>(pairs);
}

}  // namespace fedgl
