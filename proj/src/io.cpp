#include "fedgl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "fedgl/errors.hpp"
#include "fedgl/partition.hpp"

namespace fedgl {

namespace {

constexpr const char* kFormatHeader = "fedgl-format v1";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw ParseError(path, 0, "cannot open file");
    std::string header;
    if (!next(header) || header != kFormatHeader) {
      throw ParseError(path_, 1, "missing 'fedgl-format v1' header");
    }
  }

  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      line_number_ += 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      return true;
    }
    return false;
  }

  std::size_t line_number() const { return line_number_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path_, line_number_, what);
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::size_t line_number_ = 0;
};

class FileWriter {
 public:
  explicit FileWriter(const std::string& path) : path_(path), out_(path) {
    if (!out_) throw ParseError(path, 0, "cannot open file for writing");
    out_ << kFormatHeader << "\n";
  }
  template <typename T>
  FileWriter& operator<<(const T& value) {
    out_ << value;
    return *this;
  }
  void close() {
    out_.close();
    if (!out_) throw ParseError(path_, 0, "write failed");
  }

 private:
  std::string path_;
  std::ofstream out_;
};

std::size_t parse_index(const LineReader& reader, const std::string& text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    reader.fail("expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

double parse_field_double(const LineReader& reader, const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    reader.fail("expected a number, got '" + text + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("expected a number, got '" + text + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& text) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("expected an integer, got '" + text + "'");
  }
  return value;
}

Graph load_dataset(const std::string& dir) {
  Graph g;

  // labels.txt pins N and C.
  {
    LineReader reader(dir + "/labels.txt");
    std::string line;
    if (!reader.next(line)) reader.fail("missing '<N> <C>' dimension line");
    auto fields = split_fields(line);
    if (fields.size() != 2) reader.fail("expected '<N> <C>'");
    g.num_nodes = parse_index(reader, fields[0]);
    const std::size_t num_classes = parse_index(reader, fields[1]);
    if (g.num_nodes == 0 || num_classes == 0) reader.fail("empty dataset");
    g.labels = DenseMatrix(g.num_nodes, num_classes);
    std::vector<std::uint8_t> seen(g.num_nodes, 0);
    while (reader.next(line)) {
      fields = split_fields(line);
      if (fields.size() != 2) reader.fail("expected '<node> <class>'");
      const std::size_t node = parse_index(reader, fields[0]);
      const std::size_t cls = parse_index(reader, fields[1]);
      if (node >= g.num_nodes) reader.fail("node id out of range");
      if (cls >= num_classes) reader.fail("class index out of range");
      if (seen[node]) reader.fail("duplicate label row for node " + fields[0]);
      seen[node] = 1;
      g.labels.at(node, cls) = 1.0;
    }
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
      if (!seen[i]) {
        throw ParseError(dir + "/labels.txt", reader.line_number(),
                         "node " + std::to_string(i) + " has no label row");
      }
    }
  }

  // features.txt: '<N> <d> sparse|dense' then triplets or dense rows.
  {
    LineReader reader(dir + "/features.txt");
    std::string line;
    if (!reader.next(line)) reader.fail("missing '<N> <d> sparse|dense' dimension line");
    auto fields = split_fields(line);
    if (fields.size() != 3) reader.fail("expected '<N> <d> sparse|dense'");
    const std::size_t n = parse_index(reader, fields[0]);
    const std::size_t dim = parse_index(reader, fields[1]);
    if (n != g.num_nodes) reader.fail("feature node count disagrees with labels.txt");
    std::vector<SparseMatrix::Triplet> triplets;
    if (fields[2] == "sparse") {
      while (reader.next(line)) {
        fields = split_fields(line);
        if (fields.size() != 3) reader.fail("expected '<node> <column> <value>'");
        const std::size_t node = parse_index(reader, fields[0]);
        const std::size_t col = parse_index(reader, fields[1]);
        if (node >= n) reader.fail("node id out of range");
        if (col >= dim) reader.fail("feature column out of range");
        triplets.push_back({node, col, parse_field_double(reader, fields[2])});
      }
    } else if (fields[2] == "dense") {
      while (reader.next(line)) {
        fields = split_fields(line);
        if (fields.size() != dim + 1) reader.fail("expected '<node>' followed by d values");
        const std::size_t node = parse_index(reader, fields[0]);
        if (node >= n) reader.fail("node id out of range");
        for (std::size_t c = 0; c < dim; ++c) {
          const double v = parse_field_double(reader, fields[c + 1]);
          if (v != 0.0) triplets.push_back({node, c, v});
        }
      }
    } else {
      reader.fail("feature layout must be 'sparse' or 'dense'");
    }
    g.features = SparseMatrix::from_triplets(n, dim, std::move(triplets));
  }

  // edges.txt: symmetrized, duplicates dropped.
  {
    LineReader reader(dir + "/edges.txt");
    std::string line;
    std::vector<SparseMatrix::Triplet> triplets;
    while (reader.next(line)) {
      auto fields = split_fields(line);
      if (fields.size() != 2) reader.fail("expected '<u> <v>'");
      const std::size_t u = parse_index(reader, fields[0]);
      const std::size_t v = parse_index(reader, fields[1]);
      if (u >= g.num_nodes || v >= g.num_nodes) reader.fail("edge endpoint out of range");
      triplets.push_back({u, v, 1.0});
      if (u != v) triplets.push_back({v, u, 1.0});
    }
    g.adjacency = SparseMatrix::from_triplets(g.num_nodes, g.num_nodes, std::move(triplets));
  }

  g.train_mask.assign(g.num_nodes, 0);
  g.val_mask.assign(g.num_nodes, 0);
  g.test_mask.assign(g.num_nodes, 0);

  std::ifstream split_probe(dir + "/split.txt");
  if (split_probe.good()) {
    split_probe.close();
    LineReader reader(dir + "/split.txt");
    std::string line;
    while (reader.next(line)) {
      auto fields = split_fields(line);
      if (fields.size() != 2) reader.fail("expected '<node> train|val|test'");
      const std::size_t node = parse_index(reader, fields[0]);
      if (node >= g.num_nodes) reader.fail("node id out of range");
      if (fields[1] == "train") g.train_mask[node] = 1;
      else if (fields[1] == "val") g.val_mask[node] = 1;
      else if (fields[1] == "test") g.test_mask[node] = 1;
      else reader.fail("split role must be train, val, or test");
    }
  }

  g.global_ids.resize(g.num_nodes);
  for (std::size_t i = 0; i < g.num_nodes; ++i) g.global_ids[i] = i;
  g.validate();
  return g;
}

void write_report(const MetricsReport& report, const std::string& base_path) {
  {
    FileWriter out(base_path + ".rounds.tsv");
    out << "round\tglobal_val_acc\tglobal_test_acc\tmean_local_test_acc\t"
           "pseudo_label_count\tpseudo_graph_nnz\n";
    for (const RoundRecord& r : report.rounds) {
      out << r.round << "\t" << format_double(r.global_val_acc) << "\t"
          << format_double(r.global_test_acc) << "\t" << format_double(r.mean_local_test_acc)
          << "\t" << r.pseudo_label_count << "\t" << r.pseudo_graph_nnz << "\n";
    }
    out.close();
  }
  {
    FileWriter out(base_path + ".summary.tsv");
    out << "type\treport-summary\n";
    out << "global_test_acc\t" << format_double(report.global_test_acc) << "\n";
    out << "best_round\t" << report.best_round << "\n";
    out << "num_clients\t" << report.per_client_local_test_acc.size() << "\n";
    for (std::size_t k = 0; k < report.per_client_local_test_acc.size(); ++k) {
      out << "local_test_acc\t" << k << "\t"
          << format_double(report.per_client_local_test_acc[k]) << "\n";
    }
    out.close();
  }
}

MetricsReport read_report(const std::string& base_path) {
  MetricsReport report;
  {
    LineReader reader(base_path + ".rounds.tsv");
    std::string line;
    if (!reader.next(line)) reader.fail("missing column header");
    while (reader.next(line)) {
      auto fields = split_fields(line);
      if (fields.size() != 6) reader.fail("expected 6 columns");
      RoundRecord r;
      r.round = parse_index(reader, fields[0]);
      r.global_val_acc = parse_field_double(reader, fields[1]);
      r.global_test_acc = parse_field_double(reader, fields[2]);
      r.mean_local_test_acc = parse_field_double(reader, fields[3]);
      r.pseudo_label_count = parse_index(reader, fields[4]);
      r.pseudo_graph_nnz = parse_index(reader, fields[5]);
      report.rounds.push_back(r);
    }
  }
  {
    LineReader reader(base_path + ".summary.tsv");
    std::string line;
    while (reader.next(line)) {
      auto fields = split_fields(line);
      if (fields.empty()) continue;
      if (fields[0] == "type") continue;
      if (fields[0] == "global_test_acc" && fields.size() == 2) {
        report.global_test_acc = parse_field_double(reader, fields[1]);
      } else if (fields[0] == "best_round" && fields.size() == 2) {
        report.best_round = parse_index(reader, fields[1]);
      } else if (fields[0] == "num_clients" && fields.size() == 2) {
        report.per_client_local_test_acc.assign(parse_index(reader, fields[1]), 0.0);
      } else if (fields[0] == "local_test_acc" && fields.size() == 3) {
        const std::size_t k = parse_index(reader, fields[1]);
        if (k >= report.per_client_local_test_acc.size()) reader.fail("client index out of range");
        report.per_client_local_test_acc[k] = parse_field_double(reader, fields[2]);
      } else {
        reader.fail("unknown summary key '" + fields[0] + "'");
      }
    }
  }
  return report;
}

void export_embeddings(const DenseMatrix& embeddings, const std::vector<std::size_t>& ids,
                       const DenseMatrix& labels, const std::string& path) {
  if (ids.size() != embeddings.rows() || labels.rows() != embeddings.rows()) {
    throw ValidationError("export_embeddings: id/label count does not match embedding rows");
  }
  FileWriter out(path);
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    out << ids[i] << "\t" << argmax_row(labels.row(i), labels.cols());
    for (std::size_t j = 0; j < embeddings.cols(); ++j) {
      out << "\t" << format_double(embeddings.at(i, j));
    }
    out << "\n";
  }
  out.close();
}

EmbeddingFile read_embeddings(const std::string& path) {
  LineReader reader(path);
  EmbeddingFile file;
  std::vector<double> values;
  std::size_t cols = 0;
  std::string line;
  while (reader.next(line)) {
    auto fields = split_fields(line);
    if (fields.size() < 3) reader.fail("expected id, class, and at least one value");
    if (cols == 0) cols = fields.size() - 2;
    if (fields.size() - 2 != cols) reader.fail("inconsistent embedding width");
    file.ids.push_back(parse_index(reader, fields[0]));
    file.classes.push_back(parse_index(reader, fields[1]));
    for (std::size_t j = 2; j < fields.size(); ++j) {
      values.push_back(parse_field_double(reader, fields[j]));
    }
  }
  file.embeddings = DenseMatrix(file.ids.size(), cols, std::move(values));
  return file;
}

void write_weights(const ModelWeights& weights, const std::string& path) {
  FileWriter out(path);
  out << "weights\t" << weights.w0.rows() << "\t" << weights.w0.cols() << "\t"
      << weights.w1.cols() << "\n";
  const auto dump = [&](const DenseMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        out << (j == 0 ? "" : "\t") << format_double(m.at(i, j));
      }
      out << "\n";
    }
  };
  dump(weights.w0);
  dump(weights.w1);
  out.close();
}

ModelWeights read_weights(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) reader.fail("missing weights dimension line");
  auto fields = split_fields(line);
  if (fields.size() != 4 || fields[0] != "weights") {
    reader.fail("expected 'weights <d> <h> <C>'");
  }
  const std::size_t d = parse_index(reader, fields[1]);
  const std::size_t h = parse_index(reader, fields[2]);
  const std::size_t c = parse_index(reader, fields[3]);
  ModelWeights w;
  w.w0 = DenseMatrix(d, h);
  w.w1 = DenseMatrix(h, c);
  const auto load = [&](DenseMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (!reader.next(line)) reader.fail("truncated weight matrix");
      fields = split_fields(line);
      if (fields.size() != m.cols()) reader.fail("wrong number of weight columns");
      for (std::size_t j = 0; j < m.cols(); ++j) {
        m.at(i, j) = parse_field_double(reader, fields[j]);
      }
    }
  };
  load(w.w0);
  load(w.w1);
  return w;
}

PartitionManifest manifest_from_clients(const std::vector<Graph>& clients) {
  PartitionManifest manifest;
  manifest.clients.reserve(clients.size());
  for (const Graph& g : clients) {
    PartitionManifest::Client entry;
    entry.ids = g.global_ids;
    entry.roles.resize(g.num_nodes, 0);
    for (std::size_t i = 0; i < g.num_nodes; ++i) {
      if (g.train_mask[i]) entry.roles[i] = 1;
      else if (g.val_mask[i]) entry.roles[i] = 2;
      else if (g.test_mask[i]) entry.roles[i] = 3;
    }
    manifest.clients.push_back(std::move(entry));
  }
  return manifest;
}

void write_manifest(const PartitionManifest& manifest, const std::string& path) {
  static const char* kRoleNames[] = {"none", "train", "val", "test"};
  FileWriter out(path);
  out << "partition\t" << manifest.clients.size() << "\n";
  for (std::size_t k = 0; k < manifest.clients.size(); ++k) {
    const auto& entry = manifest.clients[k];
    out << "client\t" << k << "\t" << entry.ids.size() << "\n";
    for (std::size_t i = 0; i < entry.ids.size(); ++i) {
      out << entry.ids[i] << "\t" << kRoleNames[entry.roles[i]] << "\n";
    }
  }
  out.close();
}

PartitionManifest read_manifest(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line)) reader.fail("missing partition header");
  auto fields = split_fields(line);
  if (fields.size() != 2 || fields[0] != "partition") reader.fail("expected 'partition <K>'");
  const std::size_t k = parse_index(reader, fields[1]);
  PartitionManifest manifest;
  manifest.clients.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    if (!reader.next(line)) reader.fail("truncated manifest");
    fields = split_fields(line);
    if (fields.size() != 3 || fields[0] != "client") reader.fail("expected 'client <k> <N_k>'");
    if (parse_index(reader, fields[1]) != c) reader.fail("client blocks out of order");
    const std::size_t n = parse_index(reader, fields[2]);
    auto& entry = manifest.clients[c];
    entry.ids.resize(n);
    entry.roles.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!reader.next(line)) reader.fail("truncated client block");
      fields = split_fields(line);
      if (fields.size() != 2) reader.fail("expected '<gid> <role>'");
      entry.ids[i] = parse_index(reader, fields[0]);
      if (fields[1] == "none") entry.roles[i] = 0;
      else if (fields[1] == "train") entry.roles[i] = 1;
      else if (fields[1] == "val") entry.roles[i] = 2;
      else if (fields[1] == "test") entry.roles[i] = 3;
      else reader.fail("unknown role '" + fields[1] + "'");
    }
  }
  return manifest;
}

std::vector<Graph> apply_manifest(const Graph& master, const PartitionManifest& manifest) {
  std::unordered_map<std::size_t, std::size_t> master_row;
  master_row.reserve(master.num_nodes);
  for (std::size_t i = 0; i < master.num_nodes; ++i) master_row.emplace(master.global_ids[i], i);

  std::vector<Graph> clients;
  clients.reserve(manifest.clients.size());
  for (const auto& entry : manifest.clients) {
    std::vector<std::size_t> rows(entry.ids.size());
    for (std::size_t i = 0; i < entry.ids.size(); ++i) {
      const auto it = master_row.find(entry.ids[i]);
      if (it == master_row.end()) {
        throw ValidationError("manifest refers to unknown global id " +
                              std::to_string(entry.ids[i]));
      }
      rows[i] = it->second;
    }
    // A manifest stores ids sorted ascending (partition output order).
    std::vector<std::size_t> sorted = rows;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != rows) throw ValidationError("manifest client ids must be ascending");

    Graph g;
    {
      std::unordered_map<std::size_t, std::size_t> local;
      local.reserve(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) local.emplace(rows[i], i);
      g.num_nodes = rows.size();
      g.labels = DenseMatrix(rows.size(), master.num_classes());
      g.train_mask.assign(rows.size(), 0);
      g.val_mask.assign(rows.size(), 0);
      g.test_mask.assign(rows.size(), 0);
      g.global_ids.resize(rows.size());
      std::vector<SparseMatrix::Triplet> feats;
      std::vector<SparseMatrix::Triplet> edges;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t m = rows[i];
        g.global_ids[i] = master.global_ids[m];
        for (std::size_t j = 0; j < master.num_classes(); ++j) {
          g.labels.at(i, j) = master.labels.at(m, j);
        }
        for (std::size_t k = master.features.row_ptr()[m];
             k < master.features.row_ptr()[m + 1]; ++k) {
          feats.push_back({i, master.features.col_idx()[k], master.features.values()[k]});
        }
        for (std::size_t k = master.adjacency.row_ptr()[m];
             k < master.adjacency.row_ptr()[m + 1]; ++k) {
          const auto it = local.find(master.adjacency.col_idx()[k]);
          if (it != local.end()) edges.push_back({i, it->second, master.adjacency.values()[k]});
        }
        switch (entry.roles[i]) {
          case 1: g.train_mask[i] = 1; break;
          case 2: g.val_mask[i] = 1; break;
          case 3: g.test_mask[i] = 1; break;
          default: break;
        }
      }
      g.features =
          SparseMatrix::from_triplets(rows.size(), master.feature_dim(), std::move(feats));
      g.adjacency = SparseMatrix::from_triplets(rows.size(), rows.size(), std::move(edges));
    }
    clients.push_back(std::move(g));
  }
  return clients;
}

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, comma - start));
    start = comma + 1;
  }
  return parts;
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
  LineReader reader(path);
  ExperimentConfig config;
  config.seeds.clear();
  std::string line;
  while (reader.next(line)) {
    auto fields = split_fields(line);
    if (fields.size() < 2) reader.fail("expected '<key> <value>'");
    const std::string& key = fields[0];
    const std::string& value = fields[1];
    if (key == "mode") {
      const auto mode = mode_from_name(value);
      if (!mode) reader.fail("unknown mode '" + value + "'");
      config.mode = *mode;
    } else if (key == "dataset") {
      config.dataset = value;
    } else if (key == "proportions") {
      config.plan.proportions.clear();
      for (const std::string& p : split_commas(value)) {
        config.plan.proportions.push_back(parse_field_double(reader, p));
      }
    } else if (key == "overlap_ratio") {
      config.plan.overlap_ratio = parse_field_double(reader, value);
    } else if (key == "split") {
      if (value == "fixed") config.plan.split_mode.kind = SplitMode::Kind::kFixed;
      else if (value == "random") config.plan.split_mode.kind = SplitMode::Kind::kRandom;
      else reader.fail("split must be 'fixed' or 'random'");
    } else if (key == "labels_per_class") {
      config.plan.split_mode.labels_per_class = parse_index(reader, value);
    } else if (key == "val_size") {
      config.plan.split_mode.val_size = parse_index(reader, value);
    } else if (key == "test_size") {
      config.plan.split_mode.test_size = parse_index(reader, value);
    } else if (key == "seeds") {
      for (const std::string& s : split_commas(value)) {
        config.seeds.push_back(static_cast<std::uint64_t>(parse_index(reader, s)));
      }
    } else if (key == "lambda") {
      config.hyper.lambda = parse_field_double(reader, value);
    } else if (key == "alpha") {
      config.hyper.alpha = parse_field_double(reader, value);
    } else if (key == "beta") {
      config.hyper.beta = parse_field_double(reader, value);
    } else if (key == "s") {
      config.hyper.neighbor_cap = parse_index(reader, value);
    } else if (key == "dropout") {
      config.hyper.dropout = parse_field_double(reader, value);
    } else if (key == "lr") {
      config.hyper.learning_rate = parse_field_double(reader, value);
    } else if (key == "weight_decay") {
      config.hyper.weight_decay = parse_field_double(reader, value);
    } else if (key == "hidden") {
      config.hyper.hidden = parse_index(reader, value);
    } else if (key == "local_epochs") {
      config.hyper.local_epochs = parse_index(reader, value);
    } else if (key == "max_rounds") {
      config.hyper.max_rounds = parse_index(reader, value);
    } else if (key == "patience") {
      config.hyper.patience = parse_index(reader, value);
    } else if (key == "participation_ratio") {
      config.hyper.participation_ratio = parse_field_double(reader, value);
    } else if (key == "fusion_renormalize") {
      if (value != "true" && value != "false") reader.fail("expected true or false");
      config.fusion_renormalize = value == "true";
    } else if (key == "embedding_source") {
      if (value == "eq2" || value == "final") {
        config.embedding_source = EmbeddingSource::kFinalLayer;
      } else if (value == "hidden") {
        config.embedding_source = EmbeddingSource::kHiddenLayer;
      } else {
        reader.fail("embedding_source must be 'eq2' or 'hidden'");
      }
    } else if (key == "disable_gpl") {
      if (value != "true" && value != "false") reader.fail("expected true or false");
      config.disable_gpl = value == "true";
    } else if (key == "disable_gpg") {
      if (value != "true" && value != "false") reader.fail("expected true or false");
      config.disable_gpg = value == "true";
    } else {
      reader.fail("unknown configuration key '" + key + "'");
    }
  }
  if (config.seeds.empty()) config.seeds = {1, 2, 3, 4, 5};
  return config;
}

void write_config(const ExperimentConfig& config, const std::string& path) {
  FileWriter out(path);
  out << "mode\t" << mode_name(config.mode) << "\n";
  if (!config.dataset.empty()) out << "dataset\t" << config.dataset << "\n";
  out << "proportions\t";
  for (std::size_t i = 0; i < config.plan.proportions.size(); ++i) {
    out << (i == 0 ? "" : ",") << format_double(config.plan.proportions[i]);
  }
  out << "\n";
  if (config.plan.overlap_ratio) {
    out << "overlap_ratio\t" << format_double(*config.plan.overlap_ratio) << "\n";
  }
  out << "split\t"
      << (config.plan.split_mode.kind == SplitMode::Kind::kFixed ? "fixed" : "random") << "\n";
  out << "labels_per_class\t" << config.plan.split_mode.labels_per_class << "\n";
  out << "val_size\t" << config.plan.split_mode.val_size << "\n";
  out << "test_size\t" << config.plan.split_mode.test_size << "\n";
  out << "seeds\t";
  for (std::size_t i = 0; i < config.seeds.size(); ++i) {
    out << (i == 0 ? "" : ",") << config.seeds[i];
  }
  out << "\n";
  out << "lambda\t" << format_double(config.hyper.lambda) << "\n";
  out << "alpha\t" << format_double(config.hyper.alpha) << "\n";
  out << "beta\t" << format_double(config.hyper.beta) << "\n";
  out << "s\t" << config.hyper.neighbor_cap << "\n";
  out << "dropout\t" << format_double(config.hyper.dropout) << "\n";
  out << "lr\t" << format_double(config.hyper.learning_rate) << "\n";
  out << "weight_decay\t" << format_double(config.hyper.weight_decay) << "\n";
  out << "hidden\t" << config.hyper.hidden << "\n";
  out << "local_epochs\t" << config.hyper.local_epochs << "\n";
  out << "max_rounds\t" << config.hyper.max_rounds << "\n";
  out << "patience\t" << config.hyper.patience << "\n";
  out << "participation_ratio\t" << format_double(config.hyper.participation_ratio) << "\n";
  out << "fusion_renormalize\t" << (config.fusion_renormalize ? "true" : "false") << "\n";
  out << "embedding_source\t"
      << (config.embedding_source == EmbeddingSource::kFinalLayer ? "eq2" : "hidden") << "\n";
  out << "disable_gpl\t" << (config.disable_gpl ? "true" : "false") << "\n";
  out << "disable_gpg\t" << (config.disable_gpg ? "true" : "false") << "\n";
  out.close();
}

}  // namespace fedgl
