#pragma once

// Independent reference implementations used only by tests. Everything here
// works on plain nested vectors with straightforward loops, deliberately
// sharing no code with the library paths it checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace fedgl::oracle {

using Dense = std::vector<std::vector<double>>;

inline Dense zeros(std::size_t rows, std::size_t cols) {
  return Dense(rows, std::vector<double>(cols, 0.0));
}

inline Dense matmul(const Dense& a, const Dense& b) {
  Dense out = zeros(a.size(), b.front().size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.front().size(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < b.size(); ++k) s += a[i][k] * b[k][j];
      out[i][j] = s;
    }
  }
  return out;
}

// D^{-1/2} (A + I) D^{-1/2} evaluated densely.
inline Dense normalize_adjacency(Dense a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) a[i][i] += 1.0;
  std::vector<double> deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) deg[i] += a[i][j];
  }
  Dense out = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a[i][j] != 0.0) out[i][j] = a[i][j] / std::sqrt(deg[i] * deg[j]);
    }
  }
  return out;
}

inline Dense relu(Dense m) {
  for (auto& row : m) {
    for (double& v : row) v = std::max(v, 0.0);
  }
  return m;
}

inline Dense row_softmax(const Dense& m) {
  Dense out = zeros(m.size(), m.front().size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    double mx = m[i][0];
    for (double v : m[i]) mx = std::max(mx, v);
    double sum = 0.0;
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      out[i][j] = std::exp(m[i][j] - mx);
      sum += out[i][j];
    }
    for (double& v : out[i]) v /= sum;
  }
  return out;
}

// Full two-layer forward pass: softmax(A relu(A X W0) W1).
inline Dense forward_probabilities(const Dense& norm_adj, const Dense& x, const Dense& w0,
                                   const Dense& w1) {
  return row_softmax(matmul(norm_adj, matmul(relu(matmul(norm_adj, matmul(x, w0))), w1)));
}

// Central finite differences of a scalar function over a flat parameter
// vector accessed through get/set callbacks.
inline std::vector<double> finite_differences(std::size_t count,
                                              const std::function<double(std::size_t)>& get,
                                              const std::function<void(std::size_t, double)>& set,
                                              const std::function<double()>& eval,
                                              double epsilon) {
  std::vector<double> grad(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double saved = get(i);
    set(i, saved + epsilon);
    const double up = eval();
    set(i, saved - epsilon);
    const double down = eval();
    set(i, saved);
    grad[i] = (up - down) / (2.0 * epsilon);
  }
  return grad;
}

// One adaptive-moment update on a single scalar parameter.
struct ScalarAdam {
  double m = 0.0;
  double v = 0.0;
  std::size_t t = 0;

  double step(double w, double g, double lr) {
    t += 1;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mhat = m / (1.0 - std::pow(0.9, static_cast<double>(t)));
    const double vhat = v / (1.0 - std::pow(0.999, static_cast<double>(t)));
    return w - lr * mhat / (std::sqrt(vhat) + 1e-8);
  }
};

// Weighted client-matrix fusion over an id-aligned union space.
struct FusionClient {
  std::size_t node_count;
  Dense matrix;
  std::vector<std::size_t> rows;
};

inline Dense fuse(const std::vector<FusionClient>& clients, std::size_t union_size,
                  bool renormalize) {
  const std::size_t cols = clients.front().matrix.front().size();
  Dense out = zeros(union_size, cols);
  std::vector<double> weight_sum(union_size, 0.0);
  double total = 0.0;
  for (const auto& c : clients) total += static_cast<double>(c.node_count);
  for (const auto& c : clients) {
    const double w = static_cast<double>(c.node_count) / total;
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) out[c.rows[i]][j] += w * c.matrix[i][j];
      weight_sum[c.rows[i]] += w;
    }
  }
  if (renormalize) {
    for (std::size_t r = 0; r < union_size; ++r) {
      if (weight_sum[r] > 0.0) {
        for (double& v : out[r]) v /= weight_sum[r];
      }
    }
  }
  return out;
}

inline std::vector<Dense> aggregate(const std::vector<std::size_t>& node_counts,
                                    const std::vector<std::vector<Dense>>& weight_sets) {
  double total = 0.0;
  for (std::size_t n : node_counts) total += static_cast<double>(n);
  std::vector<Dense> out;
  for (std::size_t m = 0; m < weight_sets.front().size(); ++m) {
    Dense acc = zeros(weight_sets.front()[m].size(), weight_sets.front()[m].front().size());
    for (std::size_t k = 0; k < node_counts.size(); ++k) {
      const double w = static_cast<double>(node_counts[k]) / total;
      for (std::size_t i = 0; i < acc.size(); ++i) {
        for (std::size_t j = 0; j < acc[i].size(); ++j) {
          acc[i][j] += w * weight_sets[k][m][i][j];
        }
      }
    }
    out.push_back(std::move(acc));
  }
  return out;
}

// Pseudo-label selection: strict threshold on the row argmax, lowest index
// wins ties, training rows excluded.
inline Dense pseudo_labels(const Dense& fused, double lambda,
                           const std::vector<std::size_t>& train_rows) {
  Dense out = zeros(fused.size(), fused.front().size());
  for (std::size_t i = 0; i < fused.size(); ++i) {
    bool is_train = false;
    for (std::size_t r : train_rows) is_train = is_train || r == i;
    if (is_train) continue;
    std::size_t best = 0;
    for (std::size_t j = 1; j < fused[i].size(); ++j) {
      if (fused[i][j] > fused[i][best]) best = j;
    }
    if (fused[i][best] > lambda) out[i][best] = 1.0;
  }
  return out;
}

// Pseudo-graph construction by dense sort: relu(H H^T), zero diagonal, keep
// the s largest positive entries per row (ties to the lower column), then
// normalize each kept row to sum 1.
inline Dense pseudo_graph(const Dense& h, std::size_t s) {
  const std::size_t n = h.size();
  Dense sim = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double dot = 0.0;
      for (std::size_t k = 0; k < h[i].size(); ++k) dot += h[i][k] * h[j][k];
      sim[i][j] = std::max(dot, 0.0);
    }
  }
  Dense out = zeros(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> entries;
    for (std::size_t j = 0; j < n; ++j) {
      if (sim[i][j] > 0.0) entries.emplace_back(sim[i][j], j);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    if (entries.size() > s) entries.resize(s);
    double sum = 0.0;
    for (const auto& [v, j] : entries) sum += v;
    for (const auto& [v, j] : entries) out[i][j] = v / sum;
  }
  return out;
}

}  // namespace fedgl::oracle
