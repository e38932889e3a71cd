#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fedgl/errors.hpp"
#include "fedgl/io.hpp"
#include "fedgl/orchestrator.hpp"
#include "fedgl/partition.hpp"

namespace {

using namespace fedgl;

struct CommonOptions {
  std::string config_path;
  std::string dataset_override;
  std::string mode_override;
  std::optional<std::uint64_t> seed_override;
};

ExperimentConfig load_config(const CommonOptions& opts) {
  ExperimentConfig config = parse_config(opts.config_path);
  if (!opts.dataset_override.empty()) config.dataset = opts.dataset_override;
  if (!opts.mode_override.empty()) {
    const auto mode = mode_from_name(opts.mode_override);
    if (!mode) throw ValidationError("unknown mode '" + opts.mode_override + "'");
    config.mode = *mode;
  }
  if (opts.seed_override) config.seeds = {*opts.seed_override};
  return config;
}

Graph load_master(const ExperimentConfig& config) {
  if (config.dataset.empty()) {
    throw ValidationError("no dataset configured; set 'dataset' or pass --dataset");
  }
  return load_dataset(config.dataset);
}

std::string seed_report_path(const std::string& prefix, std::uint64_t seed) {
  return prefix + "_seed" + std::to_string(seed);
}

double mean(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

// Runs every configured seed, writes one report pair per seed plus a mean
// summary when there is more than one seed. Returns the mean global test acc.
double run_all_seeds(const Graph& master, const ExperimentConfig& config,
                     const std::string& out_prefix, const PartitionManifest* manifest,
                     const std::string& save_weights_path) {
  std::vector<double> global_accs;
  std::vector<double> local_means;
  for (std::uint64_t seed : config.seeds) {
    ModelWeights best_weights;
    RunHooks hooks;
    if (!save_weights_path.empty()) {
      hooks.on_best_weights = [&](const ModelWeights& w) { best_weights = w; };
    }
    MetricsReport report;
    if (manifest != nullptr) {
      // Manifest roles carry the split, so the master's own masks are unused.
      report = run_with_partition(make_partition_result(apply_manifest(master, *manifest)),
                                  config, seed, hooks);
    } else {
      report = run_experiment(master, config, seed, hooks);
    }
    write_report(report, seed_report_path(out_prefix, seed));
    if (!save_weights_path.empty() && config.mode != Mode::kLocal) {
      write_weights(best_weights, save_weights_path + ".seed" + std::to_string(seed));
    }
    global_accs.push_back(report.global_test_acc);
    local_means.push_back(mean(report.per_client_local_test_acc));
    std::printf("seed %llu: mode=%s global_test_acc=%.4f mean_local_test_acc=%.4f "
                "best_round=%zu rounds=%zu wall=%.1fs\n",
                static_cast<unsigned long long>(seed), mode_name(config.mode).c_str(),
                report.global_test_acc, local_means.back(), report.best_round,
                report.rounds.size(), report.wall_time_seconds);
    std::fflush(stdout);
  }

  const double mean_global = mean(global_accs);
  if (config.seeds.size() > 1) {
    std::ofstream out(out_prefix + "_mean.summary.tsv");
    out << "fedgl-format v1\n";
    out << "type\tmean-summary\n";
    out << "seeds\t" << config.seeds.size() << "\n";
    out << "mean_global_test_acc\t" << format_double(mean_global) << "\n";
    out << "mean_local_test_acc\t" << format_double(mean(local_means)) << "\n";
    std::printf("mean over %zu seeds: global_test_acc=%.4f mean_local_test_acc=%.4f\n",
                config.seeds.size(), mean_global, mean(local_means));
  }
  return mean_global;
}

std::vector<double> parse_value_spec(const std::string& spec) {
  // "a..b" or "a..b..step" ranges, otherwise a comma list.
  const std::size_t dots = spec.find("..");
  if (dots != std::string::npos) {
    const std::string lo_text = spec.substr(0, dots);
    std::string rest = spec.substr(dots + 2);
    double step = 0.1;
    const std::size_t dots2 = rest.find("..");
    if (dots2 != std::string::npos) {
      step = parse_double(rest.substr(dots2 + 2));
      rest = rest.substr(0, dots2);
    }
    const double lo = parse_double(lo_text);
    const double hi = parse_double(rest);
    if (step <= 0.0 || hi < lo) throw ValidationError("bad value range '" + spec + "'");
    std::vector<double> values;
    for (int i = 0;; ++i) {
      const double v = lo + step * i;
      if (v > hi + 1e-12) break;
      values.push_back(v);
    }
    return values;
  }
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string part =
        comma == std::string::npos ? spec.substr(start) : spec.substr(start, comma - start);
    if (!part.empty()) values.push_back(parse_double(part));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.empty()) throw ValidationError("empty value list '" + spec + "'");
  return values;
}

void apply_grid_value(ExperimentConfig& config, const std::string& param, double value) {
  if (param == "lambda") config.hyper.lambda = value;
  else if (param == "alpha") config.hyper.alpha = value;
  else if (param == "beta") config.hyper.beta = value;
  else if (param == "s") config.hyper.neighbor_cap = static_cast<std::size_t>(value);
  else if (param == "participation_ratio") config.hyper.participation_ratio = value;
  else if (param == "overlap_ratio") config.plan.overlap_ratio = value;
  else throw ValidationError("unknown grid parameter '" + param + "'");
}

std::string value_token(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FedGL federated graph learning simulator"};
  app.require_subcommand(1);

  CommonOptions opts;

  auto* partition_cmd = app.add_subcommand(
      "partition", "Sample a client partition from a dataset and freeze it as a manifest");
  std::string partition_out;
  partition_cmd->add_option("--config", opts.config_path, "experiment config file")->required();
  partition_cmd->add_option("--dataset", opts.dataset_override, "dataset bundle directory");
  partition_cmd->add_option("--seed", opts.seed_override, "seed override");
  partition_cmd->add_option("--out", partition_out, "manifest output path")->required();

  auto* train_cmd = app.add_subcommand("train", "Run the configured experiment");
  std::string train_out = "report";
  std::string train_manifest;
  std::string save_weights;
  train_cmd->add_option("--config", opts.config_path, "experiment config file")->required();
  train_cmd->add_option("--dataset", opts.dataset_override, "dataset bundle directory");
  train_cmd->add_option("--mode", opts.mode_override,
                        "centralized|local|federated|fedgl|fedgl_no_gpg|fedgl_no_gpl");
  train_cmd->add_option("--seed", opts.seed_override, "run a single seed instead of the config list");
  train_cmd->add_option("--manifest", train_manifest, "frozen partition manifest to replay");
  train_cmd->add_option("--out", train_out, "report path prefix");
  train_cmd->add_option("--save-weights", save_weights, "write best-round weights per seed");

  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate saved weights on a dataset bundle");
  std::string eval_weights;
  std::string eval_dataset;
  std::uint64_t eval_seed = 1;
  bool eval_random_split = false;
  std::size_t eval_labels_per_class = 20;
  eval_cmd->add_option("--weights", eval_weights, "weights file")->required();
  eval_cmd->add_option("--dataset", eval_dataset, "dataset bundle directory")->required();
  eval_cmd->add_option("--seed", eval_seed, "split seed when the bundle has no split file");
  eval_cmd->add_flag("--random-split", eval_random_split, "use the random split mode");
  eval_cmd->add_option("--labels-per-class", eval_labels_per_class, "random split label budget");

  auto* export_cmd =
      app.add_subcommand("export-embeddings", "Train and export final node embeddings");
  std::string export_out;
  export_cmd->add_option("--config", opts.config_path, "experiment config file")->required();
  export_cmd->add_option("--dataset", opts.dataset_override, "dataset bundle directory");
  export_cmd->add_option("--mode", opts.mode_override, "mode override");
  export_cmd->add_option("--seed", opts.seed_override, "seed (default: first config seed)");
  export_cmd->add_option("--out", export_out, "embedding file path")->required();

  auto* grid_cmd = app.add_subcommand("grid", "Sweep one parameter, one report set per value");
  std::string grid_param;
  std::string grid_values;
  std::string grid_out = "grid";
  grid_cmd->add_option("--config", opts.config_path, "experiment config file")->required();
  grid_cmd->add_option("--dataset", opts.dataset_override, "dataset bundle directory");
  grid_cmd->add_option("--mode", opts.mode_override, "mode override");
  grid_cmd->add_option("--param", grid_param,
                       "lambda|alpha|beta|s|participation_ratio|overlap_ratio")->required();
  grid_cmd->add_option("--values", grid_values, "comma list or lo..hi[..step]")->required();
  grid_cmd->add_option("--out", grid_out, "output path prefix");

  CLI11_PARSE(app, argc, argv);

  try {
    if (partition_cmd->parsed()) {
      ExperimentConfig config = load_config(opts);
      config.validate();
      const std::uint64_t seed = opts.seed_override.value_or(config.seeds.front());
      Graph master = load_master(config);
      const SplitMasks masks = make_splits(master, config.plan.split_mode, seed);
      master.train_mask = masks.train;
      master.val_mask = masks.val;
      master.test_mask = masks.test;
      PartitionPlan plan = config.plan;
      plan.seed = seed;
      const PartitionResult result = partition(master, plan);
      write_manifest(manifest_from_clients(result.clients), partition_out);
      std::printf("wrote %zu-client manifest to %s (union %zu of %zu master nodes)\n",
                  result.clients.size(), partition_out.c_str(), result.registry.union_size(),
                  master.num_nodes);
      return 0;
    }

    if (train_cmd->parsed()) {
      const ExperimentConfig config = load_config(opts);
      config.validate();
      const Graph master = load_master(config);
      std::optional<PartitionManifest> manifest;
      if (!train_manifest.empty()) manifest = read_manifest(train_manifest);
      run_all_seeds(master, config, train_out, manifest ? &*manifest : nullptr, save_weights);
      return 0;
    }

    if (eval_cmd->parsed()) {
      const ModelWeights weights = read_weights(eval_weights);
      Graph graph = load_dataset(eval_dataset);
      SplitMode mode;
      mode.kind = eval_random_split ? SplitMode::Kind::kRandom : SplitMode::Kind::kFixed;
      mode.labels_per_class = eval_labels_per_class;
      const SplitMasks masks = make_splits(graph, mode, eval_seed);
      graph.train_mask = masks.train;
      graph.val_mask = masks.val;
      graph.test_mask = masks.test;
      const NormalizedAdjacency adj = normalize_adjacency(graph.adjacency);
      const ForwardOutput out = forward(adj.matrix, graph.features, weights, 0.0, false, nullptr);
      std::printf("train_acc\t%s\n",
                  format_double(accuracy(out.probabilities, graph.labels, graph.train_mask)).c_str());
      std::printf("val_acc\t%s\n",
                  format_double(accuracy(out.probabilities, graph.labels, graph.val_mask)).c_str());
      std::printf("test_acc\t%s\n",
                  format_double(accuracy(out.probabilities, graph.labels, graph.test_mask)).c_str());
      return 0;
    }

    if (export_cmd->parsed()) {
      const ExperimentConfig config = load_config(opts);
      config.validate();
      if (config.mode == Mode::kLocal) {
        throw ValidationError("export-embeddings: local mode has no global model");
      }
      const Graph master = load_master(config);
      const std::uint64_t seed = config.seeds.front();

      ModelWeights best_weights;
      RunHooks hooks;
      hooks.on_best_weights = [&](const ModelWeights& w) { best_weights = w; };
      ExperimentConfig single = config;
      single.seeds = {seed};
      run_experiment(master, single, seed, hooks);

      // Recreate the run's merged evaluation graph deterministically.
      Graph split_master = master;
      const SplitMasks masks = make_splits(master, config.plan.split_mode, seed);
      split_master.train_mask = masks.train;
      split_master.val_mask = masks.val;
      split_master.test_mask = masks.test;
      PartitionPlan plan = config.plan;
      plan.seed = seed;
      const PartitionResult part = partition(split_master, plan);
      const Graph merged = merge_graphs(part.clients);
      const NormalizedAdjacency adj = normalize_adjacency(merged.adjacency);
      const ForwardOutput out =
          forward(adj.matrix, merged.features, best_weights, 0.0, false, nullptr);
      const DenseMatrix& emb = config.embedding_source == EmbeddingSource::kFinalLayer
                                   ? out.embeddings
                                   : out.hidden;
      export_embeddings(emb, merged.global_ids, merged.labels, export_out);
      std::printf("wrote %zu x %zu embeddings to %s\n", emb.rows(), emb.cols(),
                  export_out.c_str());
      return 0;
    }

    if (grid_cmd->parsed()) {
      const ExperimentConfig base = load_config(opts);
      const Graph master = load_master(base);
      const std::vector<double> values = parse_value_spec(grid_values);
      std::ofstream table(grid_out + "_" + grid_param + ".summary.tsv");
      table << "fedgl-format v1\n" << grid_param << "\tmean_global_test_acc\n";
      for (double v : values) {
        ExperimentConfig config = base;
        apply_grid_value(config, grid_param, v);
        config.validate();
        const std::string cell =
            grid_out + "_" + grid_param + "_" + value_token(v);
        std::printf("grid %s=%s\n", grid_param.c_str(), value_token(v).c_str());
        const double mean_acc = run_all_seeds(master, config, cell, nullptr, "");
        table << value_token(v) << "\t" << format_double(mean_acc) << "\n";
      }
      std::printf("grid sweep of %s over %zu values done\n", grid_param.c_str(), values.size());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
