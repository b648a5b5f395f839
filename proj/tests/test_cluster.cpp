#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "sumhis/cluster.hpp"

using namespace sumhis;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

ClusterModel model_of(Matrix C) { return ClusterModel{std::move(C), {}, 0}; }

ClusterModel k2() {
  Matrix C(2, 2);
  C << 1, 0, 0, 1;
  return model_of(C);
}

SentenceRanking ranking_of(std::vector<std::size_t> order) {
  SentenceRanking r{"d", {}};
  double score = 10.0;
  for (std::size_t i : order) r.ordered.push_back({i, score--});
  return r;
}

std::vector<std::size_t> indices(const SentenceRanking& r) {
  std::vector<std::size_t> out;
  for (const auto& x : r.ordered) out.push_back(x.index);
  return out;
}

/// 300 vectors around three orthogonal unit directions in 16 dimensions.
std::pair<std::vector<Vector>, std::vector<int>> three_directions(std::uint64_t seed) {
  oracles::Rng rng(seed);
  std::vector<Vector> xs;
  std::vector<int> labels;
  for (int i = 0; i < 300; ++i) {
    Vector v = oracles::random_vector(rng, 16, 0.1);
    v[i % 3] += 1.0;
    xs.push_back(v);
    labels.push_back(i % 3);
  }
  return {xs, labels};
}

double purity(const ClusterModel& m, const std::vector<Vector>& xs, const std::vector<int>& labels) {
  std::map<std::pair<std::size_t, int>, int> counts;
  for (std::size_t i = 0; i < xs.size(); ++i) ++counts[{leading_cluster(m, xs[i]), labels[i]}];
  std::map<std::size_t, int> best;
  for (const auto& [key, c] : counts) best[key.first] = std::max(best[key.first], c);
  int total = 0;
  for (const auto& [k, c] : best) total += c;
  return static_cast<double>(total) / static_cast<double>(xs.size());
}

}  // namespace

TEST(Attention, Examples) {
  Matrix C(4, 2);
  C << 0, 1, 0, -1, 0, 2, 0, 3;
  const Vector p = attention_weights(model_of(C), vec({1, 0}));
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(p[j], 0.25, 1e-15);

  const Vector w = attention_weights(k2(), vec({1, 0}));
  EXPECT_NEAR(w[0], std::exp(1.0) / (std::exp(1.0) + 1.0), 1e-15);
  EXPECT_NEAR(w[0], 0.7311, 1e-4);
  EXPECT_NEAR(w[1], 0.2689, 1e-4);
  EXPECT_NEAR(leading_weight(k2(), vec({1, 0}), 0), 0.7311, 1e-4);
  EXPECT_THROW(leading_weight(k2(), vec({1, 0}), 2), Error);
}

TEST(Attention, NormalisedPositiveAndScaleInvariantArgmax) {
  oracles::Rng rng(61);
  for (int trial = 0; trial < 500; ++trial) {
    const auto k = static_cast<Eigen::Index>(1 + oracles::pick(rng, 6));
    const auto m = model_of(oracles::random_matrix(rng, k, 5, 3.0));
    const Vector q = oracles::random_vector(rng, 5, 3.0);
    const Vector p = attention_weights(m, q);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GT(p.minCoeff(), 0.0);
    const Vector sharp = attention_weights(m, 10.0 * q);
    EXPECT_EQ(argmax_index(sharp), argmax_index(p));
    EXPECT_GE(sharp.maxCoeff(), p.maxCoeff() - 1e-15);
  }
}

TEST(Attention, ExtremeScoresStayFinite) {
  Matrix C(2, 1);
  C << 1000, -1000;
  const Vector p = attention_weights(model_of(C), vec({5}));
  EXPECT_TRUE(p.allFinite());
  EXPECT_NEAR(p[0], 1.0, 1e-15);
}

TEST(Reconstruct, Examples) {
  Matrix one(1, 2);
  one << 3, 4;
  EXPECT_EQ(reconstruct(model_of(one), attention_weights(model_of(one), vec({-1, 7}))), vec({3, 4}));
  Matrix C(2, 2);
  C << 2, 0, 0, 2;
  EXPECT_EQ(reconstruct(model_of(C), vec({0, 1})), vec({0, 2}));
  EXPECT_EQ(reconstruct(model_of(C), vec({0.5, 0.5})), vec({1, 1}));
  EXPECT_THROW(reconstruct(model_of(C), vec({0.5, 0.6})), Error);
  EXPECT_THROW(reconstruct(model_of(C), vec({1})), Error);
}

TEST(Reconstruct, LiesInConvexHullOfRows) {
  oracles::Rng rng(62);
  for (int trial = 0; trial < 300; ++trial) {
    // three rows in 3-d are linearly independent with probability one, so the
    // barycentric coordinates of o are the unique solution of C^T l = o
    const auto m = model_of(oracles::random_matrix(rng, 3, 3, 2.0));
    const Vector o = reconstruct(m, attention_weights(m, oracles::random_vector(rng, 3, 2.0)));
    const Vector l = m.C.transpose().fullPivLu().solve(o);
    EXPECT_NEAR(l.sum(), 1.0, 1e-9);
    EXPECT_GT(l.minCoeff(), -1e-9);
  }
}

TEST(ClusterLoss, SpotValues) {
  Matrix one(1, 2);
  one << 2, 0;
  EXPECT_NEAR(cluster_loss(model_of(one), vec({3, 0})), 0.0, 1e-15);
  EXPECT_NEAR(cluster_loss(model_of(one), vec({0, 1})), 1.0, 1e-15);
  EXPECT_NEAR(cluster_loss(model_of(one), vec({-1, 0})), 2.0, 1e-15);
  Matrix zero = Matrix::Zero(2, 2);
  EXPECT_EQ(cluster_loss(model_of(zero), vec({1, 1})), 1.0);
  EXPECT_THROW(cluster_loss(model_of(one), vec({0, 0})), Error);
}

TEST(ClusterLoss, StaysInRange) {
  oracles::Rng rng(63);
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = model_of(oracles::random_matrix(rng, 4, 3, 2.0));
    const double l = cluster_loss(m, oracles::random_vector(rng, 3));
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, 2.0);
  }
}

TEST(Gradients, ClusterLossMatchesFiniteDifferences) {
  oracles::Rng rng(64);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto k = static_cast<Eigen::Index>(1 + oracles::pick(rng, 5));
    const auto n = static_cast<Eigen::Index>(2 + oracles::pick(rng, 5));
    const auto m = model_of(oracles::random_matrix(rng, k, n));
    const Vector q = oracles::random_vector(rng, n);
    const Matrix numeric =
        oracles::numeric_gradient([&](const Matrix& C) { return cluster_loss(model_of(C), q); }, m.C);
    worst = std::max(worst, oracles::relative_error(cluster_loss_grad(m, q), numeric));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Gradients, OrthoPenaltyMatchesFiniteDifferences) {
  oracles::Rng rng(65);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto k = static_cast<Eigen::Index>(2 + oracles::pick(rng, 4));
    const auto n = static_cast<Eigen::Index>(2 + oracles::pick(rng, 5));
    const auto m = model_of(oracles::random_matrix(rng, k, n));
    const Matrix numeric = oracles::numeric_gradient([&](const Matrix& C) { return ortho_reg(model_of(C)); }, m.C);
    worst = std::max(worst, oracles::relative_error(ortho_reg_grad(m), numeric));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(OrthoReg, SpotValues) {
  EXPECT_NEAR(ortho_reg(k2()), 0.0, 1e-15);
  Matrix same(2, 3);
  same << 0.6, 0.8, 0, 0.6, 0.8, 0;
  EXPECT_NEAR(ortho_reg(model_of(same)), 2.0, 1e-12);
  Matrix one(1, 2);
  one << 0, 5;
  EXPECT_NEAR(ortho_reg(model_of(one)), 0.0, 1e-15);
  Matrix zero_row(2, 2);
  zero_row << 1, 0, 0, 0;
  EXPECT_THROW(ortho_reg(model_of(zero_row)), Error);
}

TEST(KMeans, DistinctPointsAreFixedPoints) {
  const std::vector<Vector> pts{vec({0, 0}), vec({5, 1}), vec({-3, 4}), vec({5, 1})};
  const Matrix C = kmeans_init(pts, 3, 1);
  std::vector<std::vector<double>> rows, want{{-3, 4}, {0, 0}, {5, 1}};
  for (Eigen::Index j = 0; j < 3; ++j) rows.push_back({C(j, 0), C(j, 1)});
  std::sort(rows.begin(), rows.end());
  EXPECT_EQ(rows, want);
}

TEST(KMeans, SingleClusterIsMean) {
  const std::vector<Vector> pts{vec({0, 0}), vec({2, 0}), vec({1, 3})};
  const Matrix C = kmeans_init(pts, 1, 4);
  EXPECT_NEAR(C(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(C(0, 1), 1.0, 1e-12);
}

TEST(KMeans, RecoversTwoBlobs) {
  oracles::Rng rng(66);
  std::vector<Vector> pts;
  Vector mean_a = Vector::Zero(2), mean_b = Vector::Zero(2);
  for (int i = 0; i < 200; ++i) {
    const Vector p = (i % 2 ? vec({10, 0}) : vec({0, 10})) + oracles::random_vector(rng, 2, 1.0);
    (i % 2 ? mean_a : mean_b) += p / 100.0;
    pts.push_back(p);
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix C = kmeans_init(pts, 2, seed);
    const Eigen::Index a = C(0, 0) > C(1, 0) ? 0 : 1;
    EXPECT_LT((C.row(a).transpose() - mean_a).norm(), 0.1);
    EXPECT_LT((C.row(1 - a).transpose() - mean_b).norm(), 0.1);
  }
}

TEST(KMeans, TooFewDistinctVectors) {
  const std::vector<Vector> pts{vec({1, 1}), vec({1, 1}), vec({2, 2})};
  try {
    kmeans_init(pts, 3, 0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Data);
  }
}

TEST(TrainCluster, SingleDirectionConverges) {
  std::vector<Vector> xs(200, vec({0.6, 0.8, 0}));
  ClusterTrainConfig cfg;
  cfg.clusters = 1;
  const auto m = train_cluster(xs, cfg);
  EXPECT_LT(cluster_loss(m, xs.front()), 0.01);
}

TEST(TrainCluster, DeterministicAndSkipsZeros) {
  auto [xs, labels] = three_directions(67);
  xs.push_back(Vector::Zero(16));
  ClusterTrainConfig cfg;
  cfg.clusters = 3;
  cfg.seed = 5;
  const auto a = train_cluster(xs, cfg);
  const auto b = train_cluster(xs, cfg);
  EXPECT_EQ(a.C, b.C);
  EXPECT_EQ(a.epoch_losses, b.epoch_losses);
  EXPECT_EQ(a.skipped_zero, 1u);
  EXPECT_EQ(a.epoch_losses.size(), 2u);
  EXPECT_THROW(train_cluster(std::vector<Vector>{Vector::Zero(3)}, cfg), Error);
}

TEST(TrainCluster, RecoversThreeDirections) {
  auto [xs, labels] = three_directions(68);
  ClusterTrainConfig cfg;
  cfg.clusters = 3;
  const auto m = train_cluster(xs, cfg);
  double loss = 0.0;
  for (const auto& x : xs) loss += cluster_loss(m, x);
  EXPECT_GE(purity(m, xs, labels), 0.9);
  EXPECT_LT(loss / 300.0, 0.15);
}

TEST(TrainCluster, KMeansInitAndOrthoPenalty) {
  auto [xs, labels] = three_directions(69);
  ClusterTrainConfig cfg;
  cfg.clusters = 3;
  cfg.init = ClusterInit::KMeans;
  const double free_drift = ortho_reg(train_cluster(xs, cfg));
  cfg.ortho_weight = 0.1;
  const auto m = train_cluster(xs, cfg);
  EXPECT_GE(purity(m, xs, labels), 0.9);
  EXPECT_LT(ortho_reg(m), 0.5 * free_drift);
  cfg.ortho_weight = 1.0;
  EXPECT_LT(ortho_reg(train_cluster(xs, cfg)), 0.01);
  cfg.clusters = 400;
  EXPECT_THROW(train_cluster(xs, cfg), Error);
}

TEST(Filter, WorkedModel) {
  // document leads on cluster 0; sentence 0 has p0 = 0.7311, sentence 1 has
  // 0.1192 and sentence 2 has 0.2689, just above the threshold
  const std::vector<Vector> sv{vec({1, 0}), vec({0, 2}), vec({0, 1})};
  const auto r = filter_sentences(k2(), ranking_of({2, 1, 0}), vec({2, 0}), sv, {0.25});
  EXPECT_EQ(indices(r.ranking), (std::vector<std::size_t>{2, 0}));
  EXPECT_EQ(r.cluster, 0u);
  EXPECT_FALSE(r.fallback);
}

TEST(Filter, ThresholdExtremes) {
  oracles::Rng rng(70);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = model_of(oracles::random_matrix(rng, 2 + oracles::pick(rng, 5), 4, 2.0));
    std::vector<Vector> sv;
    for (int i = 0; i < 6; ++i) sv.push_back(oracles::random_vector(rng, 4));
    const auto ranking = ranking_of({3, 0, 5, 1});
    const Vector doc = oracles::random_vector(rng, 4);
    const auto none = filter_sentences(m, ranking, doc, sv, {0.0});
    EXPECT_EQ(indices(none.ranking), indices(ranking));
    const auto all = filter_sentences(m, ranking, doc, sv, {0.999});
    EXPECT_TRUE(all.fallback);
    EXPECT_EQ(indices(all.ranking), (std::vector<std::size_t>{3}));
  }
  EXPECT_THROW(filter_sentences(k2(), ranking_of({0}), vec({1, 0}), std::vector<Vector>{vec({1, 0})}, {1.0}), Error);
}

TEST(Filter, SubsequenceAndNested) {
  oracles::Rng rng(71);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = model_of(oracles::random_matrix(rng, 3, 4, 2.0));
    std::vector<Vector> sv;
    for (int i = 0; i < 8; ++i) sv.push_back(oracles::random_vector(rng, 4));
    const auto ranking = ranking_of({7, 2, 4, 0, 6, 1});
    std::vector<bool> prev(ranking.ordered.size(), true);
    for (double t = 0.0; t < 1.0; t += 0.05) {
      const auto mask = filter_keep_mask(m, ranking, sv, 1, t);
      for (std::size_t i = 0; i < mask.size(); ++i) EXPECT_TRUE(!mask[i] || prev[i]);
      prev = mask;
      const auto kept = indices(filter_sentences(m, ranking, sv[0], sv, {t}).ranking);
      std::size_t j = 0;
      for (std::size_t x : indices(ranking)) j += j < kept.size() && kept[j] == x;
      EXPECT_EQ(j, kept.size());
    }
  }
}

TEST(AspectWords, Examples) {
  Matrix C(2, 2);
  C << 1, 0, 0, 1;
  const std::vector<std::pair<std::string, Vector>> vocab{
      {"east", vec({1, 0})}, {"north", vec({0, 2})}, {"ne", vec({1, 1})}, {"big", vec({5, 0})}};
  const auto w = aspect_words(model_of(C), vocab, 2);
  EXPECT_EQ(w[0], (std::vector<std::string>{"big", "east"}));
  EXPECT_EQ(w[1], (std::vector<std::string>{"north", "ne"}));
  const auto all = aspect_words(model_of(C), vocab, 10);
  EXPECT_EQ(all[0], (std::vector<std::string>{"big", "east", "ne", "north"}));
  EXPECT_THROW(aspect_words(model_of(C), std::vector<std::pair<std::string, Vector>>{}, 3), Error);
}

TEST(AspectWords, TrainedModelSeparatesGroups) {
  auto [xs, labels] = three_directions(72);
  ClusterTrainConfig cfg;
  cfg.clusters = 3;
  cfg.init = ClusterInit::KMeans;
  const auto m = train_cluster(xs, cfg);
  oracles::Rng rng(73);
  std::vector<std::pair<std::string, Vector>> vocab;
  for (int g = 0; g < 3; ++g) {
    for (int i = 0; i < 10; ++i) {
      Vector v = oracles::random_vector(rng, 16, 0.1);
      v[g] += 1.0;
      vocab.emplace_back("g" + std::to_string(g) + "_" + std::to_string(i), v);
    }
  }
  for (const auto& words : aspect_words(m, vocab, 5)) {
    for (const auto& w : words) EXPECT_EQ(w.substr(0, 2), words.front().substr(0, 2));
  }
}
