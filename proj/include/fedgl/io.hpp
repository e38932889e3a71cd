#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fedgl/gcn.hpp"
#include "fedgl/graph.hpp"
#include "fedgl/orchestrator.hpp"

namespace fedgl {

// All files are line-oriented text beginning with "fedgl-format v1" and use
// dot-decimal, locale-independent number formatting (17 significant digits
// for floating point, so doubles round-trip exactly).

// Bundle directory with edges.txt, features.txt, labels.txt and an optional
// split.txt carrying canonical train/val/test masks.
Graph load_dataset(const std::string& dir);

void write_report(const MetricsReport& report, const std::string& base_path);
MetricsReport read_report(const std::string& base_path);

void export_embeddings(const DenseMatrix& embeddings, const std::vector<std::size_t>& ids,
                       const DenseMatrix& labels, const std::string& path);
// Re-parse of an exported file; returns (ids, classes, matrix) flattened into
// the matrix plus id/class vectors.
struct EmbeddingFile {
  std::vector<std::size_t> ids;
  std::vector<std::size_t> classes;
  DenseMatrix embeddings;
};
EmbeddingFile read_embeddings(const std::string& path);

void write_weights(const ModelWeights& weights, const std::string& path);
ModelWeights read_weights(const std::string& path);

// Frozen partition: per-client global-id lists with their split roles, so one
// sampled partition can be replayed across methods.
struct PartitionManifest {
  struct Client {
    std::vector<std::size_t> ids;
    std::vector<std::uint8_t> roles;  // 0 none, 1 train, 2 val, 3 test
  };
  std::vector<Client> clients;
};

PartitionManifest manifest_from_clients(const std::vector<Graph>& clients);
void write_manifest(const PartitionManifest& manifest, const std::string& path);
PartitionManifest read_manifest(const std::string& path);
// Rebuild client graphs from a manifest by inducing subgraphs of the master.
std::vector<Graph> apply_manifest(const Graph& master, const PartitionManifest& manifest);

// Flat key-value experiment configuration; unknown keys are errors.
ExperimentConfig parse_config(const std::string& path);
void write_config(const ExperimentConfig& config, const std::string& path);

std::string format_double(double value);       // %.17g
double parse_double(const std::string& text);  // locale-independent, throws ParseError
std::int64_t parse_int(const std::string& text);

}  // namespace fedgl
