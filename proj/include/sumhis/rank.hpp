#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sumhis/embed.hpp"
#include "sumhis/error.hpp"
#include "sumhis/oracle.hpp"
#include "sumhis/random.hpp"

// Sentence ranking over frozen embeddings. A learned projection W maps
// vectors into a scoring space where sim(a, b) = (Wa).(Wb); W is trained on
// (text, positive sentence, negative sentence) triplets with the softmax
// negative log-likelihood of the positive, or with binary cross-entropy.

namespace sumhis {

enum class RankLoss { TripletNll, BinaryCe };

inline std::string_view to_string(RankLoss loss) {
  return loss == RankLoss::TripletNll ? "triplet_nll" : "binary_ce";
}

inline RankLoss parse_rank_loss(std::string_view s) {
  if (s == "triplet_nll") return RankLoss::TripletNll;
  if (s == "binary_ce") return RankLoss::BinaryCe;
  fail(ErrorKind::InvalidArgument, "unknown rank loss '" + std::string(s) + "'");
}

struct RankTrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 5;
  std::uint64_t seed = 0;
  RankLoss loss_kind = RankLoss::TripletNll;
  double init_scale = 0.1;
  std::size_t projection_dim = 0;  // 0 means d = n

  void validate() const {
    require(learning_rate > 0.0 && std::isfinite(learning_rate), "rank: learning_rate must be > 0");
    require(epochs >= 1, "rank: epochs must be >= 1");
    require(init_scale > 0.0 && std::isfinite(init_scale), "rank: init_scale must be > 0");
  }
};

struct RankModel {
  Matrix W;  // d x n
  RankTrainConfig config;
  std::vector<double> epoch_losses;

  std::size_t input_dim() const { return static_cast<std::size_t>(W.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(W.rows()); }

  Vector project(const Vector& v) const {
    require(static_cast<std::size_t>(v.size()) == input_dim(), "rank model: vector dimension mismatch");
    return W * v;
  }
};

/// One training instance. `pos_first` records the slot the positive occupied
/// when the record was built; the dot-product scorer is symmetric in the slots.
struct Triplet {
  Vector text_vec;
  Vector pos_vec;
  Vector neg_vec;
  bool pos_first = true;
};

struct RankedSentence {
  std::size_t index = 0;
  double score = 0.0;

  bool operator==(const RankedSentence&) const = default;
};

struct SentenceRanking {
  std::string doc_id;
  std::vector<RankedSentence> ordered;  // descending score, ties by index
};

namespace detail {

inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

struct TripletSims {
  Vector wt, wp, wn;
  double pos = 0.0;
  double neg = 0.0;
};

inline TripletSims triplet_sims(const RankModel& model, const Triplet& t) {
  TripletSims s{model.project(t.text_vec), model.project(t.pos_vec), model.project(t.neg_vec)};
  s.pos = s.wt.dot(s.wp);
  s.neg = s.wt.dot(s.wn);
  return s;
}

// d(a.W^T W b)/dW = (Wa) b^T + (Wb) a^T
inline Matrix sim_grad(const Vector& wa, const Vector& a, const Vector& wb, const Vector& b) {
  return wa * b.transpose() + wb * a.transpose();
}

}  // namespace detail

inline double sim(const RankModel& model, const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "sim: dimension mismatch");
  return model.project(a).dot(model.project(b));
}

/// -log(e^{s+} / (e^{s+} + e^{s-})) = log(1 + e^{s- - s+}).
inline double rank_loss(const RankModel& model, const Triplet& t) {
  const auto s = detail::triplet_sims(model, t);
  return detail::softplus(s.neg - s.pos);
}

inline Matrix rank_loss_grad(const RankModel& model, const Triplet& t) {
  const auto s = detail::triplet_sims(model, t);
  const double sigma = detail::logistic(s.neg - s.pos);
  return sigma * (detail::sim_grad(s.wt, t.text_vec, s.wn, t.neg_vec) -
                  detail::sim_grad(s.wt, t.text_vec, s.wp, t.pos_vec));
}

/// Binary cross-entropy with logistic(sim): label 1 for the positive pair,
/// label 0 for the negative pair.
inline double binary_loss(const RankModel& model, const Triplet& t) {
  const auto s = detail::triplet_sims(model, t);
  return detail::softplus(-s.pos) + detail::softplus(s.neg);
}

inline Matrix binary_loss_grad(const RankModel& model, const Triplet& t) {
  const auto s = detail::triplet_sims(model, t);
  return -detail::logistic(-s.pos) * detail::sim_grad(s.wt, t.text_vec, s.wp, t.pos_vec) +
         detail::logistic(s.neg) * detail::sim_grad(s.wt, t.text_vec, s.wn, t.neg_vec);
}

inline double triplet_loss(const RankModel& model, const Triplet& t, RankLoss kind) {
  return kind == RankLoss::TripletNll ? rank_loss(model, t) : binary_loss(model, t);
}

inline Matrix triplet_loss_grad(const RankModel& model, const Triplet& t, RankLoss kind) {
  return kind == RankLoss::TripletNll ? rank_loss_grad(model, t) : binary_loss_grad(model, t);
}

inline constexpr std::size_t kTripletsPerDocument = 16;

/// Pairs every selected sentence with every unselected one, keeping a seeded
/// uniform sample of 16 pairs when there are more. Returns an empty list when
/// the document has no positive or no negative sentence.
inline std::vector<Triplet> make_triplets(const Document& doc, const OracleLabel& label,
                                          const EmbeddingProvider& provider, std::uint64_t seed) {
  std::vector<bool> is_pos(doc.sentences.size(), false);
  for (std::size_t i : label.selected) {
    if (i >= doc.sentences.size()) {
      fail(ErrorKind::Data, "label for '" + doc.id + "' selects sentence " + std::to_string(i) + " but the document has " +
                                std::to_string(doc.sentences.size()));
    }
    is_pos[i] = true;
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) (is_pos[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) return {};

  std::vector<std::size_t> pairs(pos.size() * neg.size());
  std::iota(pairs.begin(), pairs.end(), std::size_t{0});
  Engine rng(seed);
  if (pairs.size() > kTripletsPerDocument) {
    for (std::size_t i = 0; i < kTripletsPerDocument; ++i) {
      std::size_t j = i + uniform_index(rng, pairs.size() - i);
      std::swap(pairs[i], pairs[j]);
    }
    pairs.resize(kTripletsPerDocument);
    std::sort(pairs.begin(), pairs.end());
  }

  const Vector text_vec = embed_document(provider, doc);
  std::vector<Triplet> out;
  out.reserve(pairs.size());
  for (std::size_t k : pairs) {
    const Sentence& p = doc.sentences[pos[k / neg.size()]];
    const Sentence& n = doc.sentences[neg[k % neg.size()]];
    out.push_back(Triplet{text_vec, embed_sentence(provider, p), embed_sentence(provider, n), (rng() & 1u) == 0});
  }
  return out;
}

/// Initial projection: init_scale * I (d x n) plus uniform noise in
/// [-init_scale/10, init_scale/10].
inline RankModel init_rank_model(std::size_t input_dim, const RankTrainConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.projection_dim == 0 ? input_dim : cfg.projection_dim;
  require(d >= 1 && d <= input_dim, "rank: projection_dim must be in [1, n]");
  RankModel model{Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(input_dim)), cfg, {}};
  Engine rng(derive_seed(cfg.seed, "rank.init"));
  const double noise = cfg.init_scale / 10.0;
  for (Eigen::Index r = 0; r < model.W.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.W.cols(); ++c) {
      model.W(r, c) = (r == c ? cfg.init_scale : 0.0) + uniform_real(rng, -noise, noise);
    }
  }
  return model;
}

inline double mean_loss(const RankModel& model, std::span<const Triplet> triplets, RankLoss kind) {
  double total = 0.0;
  for (const auto& t : triplets) total += triplet_loss(model, t, kind);
  return triplets.empty() ? 0.0 : total / static_cast<double>(triplets.size());
}

/// Plain SGD, one triplet per step, order reshuffled every epoch. The loss
/// recorded for an epoch is the mean of the per-step losses before each update.
inline RankModel train_rank(std::span<const Triplet> triplets, const RankTrainConfig& cfg) {
  cfg.validate();
  if (triplets.empty()) fail(ErrorKind::Data, "train_rank: no training triplets");
  const std::size_t n = static_cast<std::size_t>(triplets.front().text_vec.size());
  for (const auto& t : triplets) {
    if (static_cast<std::size_t>(t.text_vec.size()) != n || static_cast<std::size_t>(t.pos_vec.size()) != n ||
        static_cast<std::size_t>(t.neg_vec.size()) != n) {
      fail(ErrorKind::InvalidArgument, "train_rank: triplet dimensions differ");
    }
  }
  RankModel model = init_rank_model(n, cfg);
  Engine rng(derive_seed(cfg.seed, "rank.shuffle"));
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    double total = 0.0;
    for (std::size_t idx : order) {
      const Triplet& t = triplets[idx];
      const double loss = triplet_loss(model, t, cfg.loss_kind);
      if (!std::isfinite(loss)) {
        fail(ErrorKind::Numeric, "train_rank: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                     ", triplet " + std::to_string(idx) + "; lower the learning rate");
      }
      total += loss;
      model.W -= cfg.learning_rate * triplet_loss_grad(model, t, cfg.loss_kind);
    }
    model.epoch_losses.push_back(total / static_cast<double>(triplets.size()));
  }
  if (!model.W.allFinite()) fail(ErrorKind::Numeric, "train_rank: projection diverged");
  return model;
}

/// Scores each sentence by sim(document, sentence); descending, ties by index.
inline SentenceRanking rank_sentences(const RankModel& model, const Document& doc, const EmbeddingProvider& provider) {
  if (doc.sentences.empty()) fail(ErrorKind::Data, "document '" + doc.id + "' has no sentences");
  const Vector doc_proj = model.project(embed_document(provider, doc));
  SentenceRanking ranking{doc.id, {}};
  ranking.ordered.reserve(doc.sentences.size());
  for (const auto& s : doc.sentences) {
    ranking.ordered.push_back({s.index, doc_proj.dot(model.project(embed_sentence(provider, s)))});
  }
  std::stable_sort(ranking.ordered.begin(), ranking.ordered.end(),
                   [](const RankedSentence& a, const RankedSentence& b) { return a.score > b.score; });
  return ranking;
}

}  // namespace sumhis
