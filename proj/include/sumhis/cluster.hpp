#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sumhis/embed.hpp"
#include "sumhis/error.hpp"
#include "sumhis/random.hpp"
#include "sumhis/rank.hpp"

// Hidden-structure discovery. A K x n matrix C of cluster embeddings
// reconstructs an input q as o = sum_j p_j c_j with p = softmax(C q), and is
// trained to minimize the cosine distance between q and o. The cluster with
// the largest weight on the document vector is the leading cluster; ranked
// sentences whose weight on it is at most the threshold are filtered out.

namespace sumhis {

enum class ClusterInit { Random, KMeans };

inline std::string_view to_string(ClusterInit init) { return init == ClusterInit::Random ? "random" : "kmeans"; }

inline ClusterInit parse_cluster_init(std::string_view s) {
  if (s == "random") return ClusterInit::Random;
  if (s == "kmeans") return ClusterInit::KMeans;
  fail(ErrorKind::InvalidArgument, "unknown cluster init '" + std::string(s) + "'");
}

struct ClusterTrainConfig {
  std::size_t clusters = 8;
  std::size_t epochs = 2;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  ClusterInit init = ClusterInit::Random;
  double ortho_weight = 0.0;

  void validate() const {
    require(clusters >= 1, "cluster: K must be >= 1");
    require(epochs >= 1, "cluster: epochs must be >= 1");
    require(learning_rate > 0.0 && std::isfinite(learning_rate), "cluster: learning_rate must be > 0");
    require(ortho_weight >= 0.0 && std::isfinite(ortho_weight), "cluster: ortho_weight must be >= 0");
  }
};

struct FilterConfig {
  double threshold = 0.25;

  void validate() const { require(threshold >= 0.0 && threshold < 1.0, "filter: threshold must be in [0, 1)"); }
};

struct ClusterModel {
  Matrix C;  // K x n, row j is cluster embedding c_j
  std::vector<double> epoch_losses;
  std::size_t skipped_zero = 0;  // zero input vectors ignored during training

  std::size_t clusters() const { return static_cast<std::size_t>(C.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(C.cols()); }
};

inline Vector attention_weights(const ClusterModel& model, const Vector& q) {
  require(static_cast<std::size_t>(q.size()) == model.dim(), "attention_weights: dimension mismatch");
  Vector scores = model.C * q;
  scores.array() -= scores.maxCoeff();
  Vector p = scores.array().exp().matrix();
  return p / p.sum();
}

inline Vector reconstruct(const ClusterModel& model, const Vector& p) {
  require(static_cast<std::size_t>(p.size()) == model.clusters(), "reconstruct: weight vector has wrong length");
  require(std::abs(p.sum() - 1.0) <= 1e-9, "reconstruct: weights must sum to 1");
  return model.C.transpose() * p;
}

/// 1 - cos(q, o). A zero reconstruction counts as maximally dissimilar (1).
inline double cluster_loss(const ClusterModel& model, const Vector& q) {
  const double qn = q.norm();
  require(qn > 0.0, "cluster_loss: zero input vector");
  const Vector o = reconstruct(model, attention_weights(model, q));
  const double on = o.norm();
  if (on == 0.0) return 1.0;
  return 1.0 - q.dot(o) / (qn * on);
}

/// Gradient of cluster_loss with respect to C.
inline Matrix cluster_loss_grad(const ClusterModel& model, const Vector& q) {
  const double qn = q.norm();
  require(qn > 0.0, "cluster_loss_grad: zero input vector");
  const Vector p = attention_weights(model, q);
  const Vector o = model.C.transpose() * p;
  const double on = o.norm();
  if (on == 0.0) return Matrix::Zero(model.C.rows(), model.C.cols());
  // dL/do
  const Vector g_o = -(q / (qn * on) - (q.dot(o) / (qn * on * on * on)) * o);
  // through o = C^T p directly, and through p = softmax(C q)
  const Vector u = model.C * g_o;
  const Vector ds = p.cwiseProduct((u.array() - p.dot(u)).matrix());
  return p * g_o.transpose() + ds * q.transpose();
}

namespace detail {

inline Matrix normalized_rows(const Matrix& C) {
  Matrix out = C;
  for (Eigen::Index j = 0; j < C.rows(); ++j) {
    const double norm = C.row(j).norm();
    require(norm > 0.0, "ortho_reg: cluster row " + std::to_string(j) + " is zero");
    out.row(j) /= norm;
  }
  return out;
}

}  // namespace detail

/// Squared Frobenius norm of (Ĉ Ĉ^T - I), Ĉ being C with unit-length rows.
inline double ortho_reg(const ClusterModel& model) {
  const Matrix Cn = detail::normalized_rows(model.C);
  const Matrix R = Cn * Cn.transpose() - Matrix::Identity(Cn.rows(), Cn.rows());
  return R.squaredNorm();
}

inline Matrix ortho_reg_grad(const ClusterModel& model) {
  const Matrix Cn = detail::normalized_rows(model.C);
  const Matrix R = Cn * Cn.transpose() - Matrix::Identity(Cn.rows(), Cn.rows());
  const Matrix g_hat = 4.0 * R * Cn;
  Matrix grad(model.C.rows(), model.C.cols());
  for (Eigen::Index j = 0; j < model.C.rows(); ++j) {
    const double norm = model.C.row(j).norm();
    const double along = g_hat.row(j).dot(Cn.row(j));
    grad.row(j) = (g_hat.row(j) - along * Cn.row(j)) / norm;
  }
  return grad;
}

/// Lloyd's algorithm on `vectors`. Initial centers are K distinct inputs drawn
/// uniformly without replacement; at most 100 iterations, stopping early once
/// every center moves less than 1e-6 relative to its norm. An empty cluster is
/// re-seeded with the point farthest from its assigned center.
inline Matrix kmeans_init(std::span<const Vector> vectors, std::size_t k, std::uint64_t seed) {
  require(k >= 1, "kmeans: K must be >= 1");
  if (vectors.empty()) fail(ErrorKind::Data, "kmeans: no input vectors");
  const Eigen::Index n = vectors.front().size();
  for (const auto& v : vectors) require(v.size() == n, "kmeans: vector dimensions differ");

  // distinct vectors in first-occurrence order
  std::vector<std::size_t> distinct;
  {
    std::vector<std::size_t> order(vectors.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto lex_less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(vectors[a].begin(), vectors[a].end(), vectors[b].begin(), vectors[b].end());
    };
    std::stable_sort(order.begin(), order.end(), lex_less);
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i == 0 || vectors[order[i]] != vectors[order[i - 1]]) distinct.push_back(order[i]);
    }
    std::sort(distinct.begin(), distinct.end());
  }
  if (distinct.size() < k) {
    fail(ErrorKind::Data, "kmeans: need at least " + std::to_string(k) + " distinct vectors, got " +
                              std::to_string(distinct.size()));
  }

  Engine rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + uniform_index(rng, distinct.size() - i);
    std::swap(distinct[i], distinct[j]);
  }
  Matrix centers(static_cast<Eigen::Index>(k), n);
  for (std::size_t j = 0; j < k; ++j) centers.row(static_cast<Eigen::Index>(j)) = vectors[distinct[j]].transpose();

  std::vector<std::size_t> assign(vectors.size(), 0);
  std::vector<double> dist(vectors.size(), 0.0);
  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double d = (centers.row(static_cast<Eigen::Index>(j)).transpose() - vectors[i]).squaredNorm();
        if (d < best) {
          best = d;
          assign[i] = j;
        }
      }
      dist[i] = best;
    }
    Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(k), n);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      sums.row(static_cast<Eigen::Index>(assign[i])) += vectors[i].transpose();
      ++counts[assign[i]];
    }
    Matrix next = centers;
    std::vector<bool> taken(vectors.size(), false);
    for (std::size_t j = 0; j < k; ++j) {
      const auto row = static_cast<Eigen::Index>(j);
      if (counts[j] > 0) {
        next.row(row) = sums.row(row) / static_cast<double>(counts[j]);
        continue;
      }
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (!taken[i] && dist[i] > far_d) {
          far_d = dist[i];
          far = i;
        }
      }
      taken[far] = true;
      next.row(row) = vectors[far].transpose();
    }
    double movement = 0.0;
    for (Eigen::Index j = 0; j < next.rows(); ++j) {
      const double shift = (next.row(j) - centers.row(j)).norm();
      movement = std::max(movement, shift / std::max(centers.row(j).norm(), 1e-12));
    }
    centers = std::move(next);
    if (movement < 1e-6) break;
  }
  return centers;
}

inline ClusterModel init_cluster_model(std::span<const Vector> vectors, const ClusterTrainConfig& cfg) {
  const Eigen::Index n = vectors.front().size();
  const auto k = static_cast<Eigen::Index>(cfg.clusters);
  if (cfg.init == ClusterInit::KMeans) {
    return ClusterModel{kmeans_init(vectors, cfg.clusters, derive_seed(cfg.seed, "cluster.kmeans")), {}, 0};
  }
  ClusterModel model{Matrix(k, n), {}, 0};
  Engine rng(derive_seed(cfg.seed, "cluster.init"));
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) model.C(r, c) = uniform_real(rng, -0.1, 0.1);
  }
  return model;
}

/// Objective for one input: reconstruction loss plus the weighted
/// orthogonality penalty.
inline double cluster_objective(const ClusterModel& model, const Vector& q, double ortho_weight) {
  const double loss = cluster_loss(model, q);
  return ortho_weight > 0.0 ? loss + ortho_weight * ortho_reg(model) : loss;
}

/// SGD, one vector per step, order reshuffled every epoch. Zero vectors are
/// skipped and counted in `skipped_zero`.
inline ClusterModel train_cluster(std::span<const Vector> vectors, const ClusterTrainConfig& cfg) {
  cfg.validate();
  std::vector<Vector> data;
  std::size_t skipped = 0;
  for (const auto& v : vectors) {
    if (v.norm() > 0.0) {
      data.push_back(v);
    } else {
      ++skipped;
    }
  }
  if (data.empty()) fail(ErrorKind::Data, "train_cluster: no nonzero input vectors");
  const Eigen::Index n = data.front().size();
  for (const auto& v : data) require(v.size() == n, "train_cluster: vector dimensions differ");

  ClusterModel model = init_cluster_model(data, cfg);
  model.skipped_zero = skipped;
  Engine rng(derive_seed(cfg.seed, "cluster.shuffle"));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    double total = 0.0;
    for (std::size_t idx : order) {
      const double loss = cluster_objective(model, data[idx], cfg.ortho_weight);
      if (!std::isfinite(loss)) {
        fail(ErrorKind::Numeric, "train_cluster: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                     ", vector " + std::to_string(idx) + "; lower the learning rate");
      }
      total += loss;
      Matrix grad = cluster_loss_grad(model, data[idx]);
      if (cfg.ortho_weight > 0.0) grad += cfg.ortho_weight * ortho_reg_grad(model);
      model.C -= cfg.learning_rate * grad;
    }
    model.epoch_losses.push_back(total / static_cast<double>(data.size()));
  }
  if (!model.C.allFinite()) fail(ErrorKind::Numeric, "train_cluster: cluster matrix diverged");
  for (Eigen::Index j = 0; j < model.C.rows(); ++j) {
    if (model.C.row(j).norm() == 0.0) fail(ErrorKind::Numeric, "train_cluster: cluster row became zero");
  }
  return model;
}

inline std::size_t argmax_index(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < v.size(); ++j) {
    if (v[j] > v[best]) best = j;
  }
  return static_cast<std::size_t>(best);
}

/// Leading cluster of q: argmax of the attention weights, smallest index on ties.
inline std::size_t leading_cluster(const ClusterModel& model, const Vector& q) {
  return argmax_index(attention_weights(model, q));
}

inline double leading_weight(const ClusterModel& model, const Vector& q, std::size_t cluster) {
  require(cluster < model.clusters(), "leading_weight: cluster index out of range");
  return attention_weights(model, q)[static_cast<Eigen::Index>(cluster)];
}

/// True where the sentence's weight on `cluster` exceeds the threshold.
inline std::vector<bool> filter_keep_mask(const ClusterModel& model, const SentenceRanking& ranking,
                                          std::span<const Vector> sentence_vecs, std::size_t cluster,
                                          double threshold) {
  std::vector<bool> keep;
  keep.reserve(ranking.ordered.size());
  for (const auto& r : ranking.ordered) {
    require(r.index < sentence_vecs.size(), "filter: ranking index has no sentence vector");
    keep.push_back(leading_weight(model, sentence_vecs[r.index], cluster) > threshold);
  }
  return keep;
}

struct FilterResult {
  SentenceRanking ranking;
  bool fallback = false;  // everything was filtered; the top-ranked sentence was kept
  std::size_t cluster = 0;
};

/// Drops every ranked sentence whose weight on the document's leading cluster
/// is <= threshold, preserving order. Keeps the top-1 if nothing survives.
inline FilterResult filter_sentences(const ClusterModel& model, const SentenceRanking& ranking, const Vector& doc_vec,
                                     std::span<const Vector> sentence_vecs, const FilterConfig& cfg) {
  cfg.validate();
  FilterResult result{{ranking.doc_id, {}}, false, leading_cluster(model, doc_vec)};
  const auto keep = filter_keep_mask(model, ranking, sentence_vecs, result.cluster, cfg.threshold);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) result.ranking.ordered.push_back(ranking.ordered[i]);
  }
  if (result.ranking.ordered.empty() && !ranking.ordered.empty()) {
    result.ranking.ordered.push_back(ranking.ordered.front());
    result.fallback = true;
  }
  return result;
}

/// Top `top_m` vocabulary tokens per cluster by cosine similarity to the
/// cluster row; ties by token string.
inline std::vector<std::vector<std::string>> aspect_words(const ClusterModel& model,
                                                          std::span<const std::pair<std::string, Vector>> vocab,
                                                          std::size_t top_m) {
  if (vocab.empty()) fail(ErrorKind::Data, "aspect_words: empty vocabulary");
  for (const auto& [token, v] : vocab) {
    require(static_cast<std::size_t>(v.size()) == model.dim(), "aspect_words: vector for '" + token + "' has wrong dimension");
  }
  std::vector<std::vector<std::string>> out;
  out.reserve(model.clusters());
  for (Eigen::Index j = 0; j < model.C.rows(); ++j) {
    const Vector c = model.C.row(j).transpose();
    const double cn = c.norm();
    std::vector<std::pair<double, const std::string*>> scored;
    scored.reserve(vocab.size());
    for (const auto& [token, v] : vocab) {
      const double vn = v.norm();
      scored.emplace_back(cn > 0.0 && vn > 0.0 ? c.dot(v) / (cn * vn) : 0.0, &token);
    }
    const std::size_t m = std::min(top_m, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(m), scored.end(),
                      [](const auto& a, const auto& b) { return a.first != b.first ? a.first > b.first : *a.second < *b.second; });
    std::vector<std::string> words;
    for (std::size_t i = 0; i < m; ++i) words.push_back(*scored[i].second);
    out.push_back(std::move(words));
  }
  return out;
}

}  // namespace sumhis
