#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sumhis/cluster.hpp"
#include "sumhis/embed.hpp"
#include "sumhis/error.hpp"
#include "sumhis/formats.hpp"
#include "sumhis/oracle.hpp"
#include "sumhis/random.hpp"
#include "sumhis/rank.hpp"
#include "sumhis/rouge.hpp"
#include "sumhis/textproc.hpp"

// Batch pipeline behind the command-line tool. Each run_* function reads its
// inputs from files, writes its outputs to files and returns what it did.

namespace sumhis {

/// Space the cluster model operates in: the rank model's scoring space
/// (W * embedding) or the raw embedding space.
enum class ClusterSpace { Projected, Raw };

inline std::string_view to_string(ClusterSpace s) { return s == ClusterSpace::Projected ? "projected" : "raw"; }

inline ClusterSpace parse_cluster_space(std::string_view s) {
  if (s == "projected") return ClusterSpace::Projected;
  if (s == "raw") return ClusterSpace::Raw;
  fail(ErrorKind::InvalidArgument, "unknown cluster space '" + std::string(s) + "'");
}

inline constexpr double kDistanceKernelCenter = 0.45;
inline constexpr std::size_t kHistogramBins = 50;
inline constexpr std::size_t kDefaultAspectWords = 7;

struct PipelineConfig {
  std::size_t top_k = 3;
  double threshold = 0.25;
  std::vector<RougeVariant> variants = {RougeVariant::rouge_n(1), RougeVariant::rouge_n(2), RougeVariant::rouge_l()};
  std::uint64_t seed = 0;

  std::string embed = "hashed";  // "hashed" or "lookup"
  std::size_t embed_dim = 64;
  std::string vectors_path;      // WORDVEC file for the lookup provider

  RankTrainConfig rank;
  ClusterTrainConfig cluster;
  ClusterSpace cluster_space = ClusterSpace::Projected;
  OracleConfig oracle;

  void validate() const {
    require(top_k >= 1, "top_k must be >= 1");
    FilterConfig{threshold}.validate();
    require(!variants.empty(), "at least one ROUGE variant is required");
    require(embed == "hashed" || embed == "lookup", "embed must be 'hashed' or 'lookup'");
    if (embed == "lookup") require(!vectors_path.empty(), "lookup embeddings need a vectors file");
    if (embed == "hashed") require(embed_dim >= 2, "embed_dim must be >= 2");
    rank.validate();
    cluster.validate();
    oracle.validate();
  }

  // Every random stream is derived from `seed` under a fixed name.
  RankTrainConfig rank_config() const {
    RankTrainConfig c = rank;
    c.seed = derive_seed(seed, "rank");
    return c;
  }
  ClusterTrainConfig cluster_config() const {
    ClusterTrainConfig c = cluster;
    c.seed = derive_seed(seed, "cluster");
    return c;
  }
  std::uint64_t triplet_seed(const std::string& doc_id) const {
    return derive_seed(derive_seed(seed, "triplets"), doc_id);
  }
  std::uint64_t embed_seed() const { return derive_seed(seed, "embed"); }
};

inline EmbeddingProvider make_provider(const PipelineConfig& cfg) {
  if (cfg.embed == "lookup") return load_vectors(cfg.vectors_path);
  return EmbeddingProvider::hashed(cfg.embed_dim, cfg.embed_seed());
}

/// Messages for the caller to print; processing continued past each one.
using Diagnostics = std::vector<std::string>;

inline void report_ingest(const Dataset& ds, const std::string& path, Diagnostics& diag) {
  for (const auto& e : ds.errors) diag.push_back(path + ":" + std::to_string(e.line) + ": skipped: " + e.message);
}

// ---------------------------------------------------------------------------
// oracle

struct OracleRun {
  std::size_t labels = 0;
  std::size_t skipped = 0;
  std::size_t fallbacks = 0;
  Diagnostics diagnostics;
};

inline OracleRun run_oracle(const std::string& in_path, const std::string& out_path, const PipelineConfig& cfg) {
  cfg.oracle.validate();
  const Dataset ds = ingest(in_path);
  OracleRun run;
  report_ingest(ds, in_path, run.diagnostics);
  ConversionResult result = convert_dataset(ds.docs, cfg.oracle);
  for (const auto& e : result.errors) run.diagnostics.push_back("document '" + e.id + "': " + e.message);
  run.labels = result.labels.size();
  run.skipped = result.skipped;
  for (const auto& l : result.labels) run.fallbacks += l.fallback ? 1 : 0;
  save_jsonl(out_path, result.labels);
  return run;
}

// ---------------------------------------------------------------------------
// shared helpers

namespace detail {

inline std::map<std::string, const OracleLabel*> index_labels(const std::vector<OracleLabel>& labels) {
  std::map<std::string, const OracleLabel*> by_id;
  for (const auto& l : labels) {
    if (!by_id.emplace(l.doc_id, &l).second) fail(ErrorKind::Data, "duplicate label id '" + l.doc_id + "'");
  }
  return by_id;
}

/// Labels must refer to corpus documents, and every document with a gold
/// summary must have a label.
inline void check_label_coverage(const std::vector<Document>& docs, const std::map<std::string, const OracleLabel*>& labels) {
  std::map<std::string, const Document*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id, &d);
  std::string unknown, missing;
  for (const auto& [id, label] : labels) {
    if (!by_id.count(id)) unknown += (unknown.empty() ? "" : ", ") + id;
  }
  for (const auto& d : docs) {
    if (!labels.count(d.id) && !tokenize(d.gold_summary).empty()) missing += (missing.empty() ? "" : ", ") + d.id;
  }
  if (!unknown.empty()) fail(ErrorKind::Data, "labels for unknown document ids: " + unknown);
  if (!missing.empty()) fail(ErrorKind::Data, "documents without labels: " + missing);
}

inline void check_rank_dims(const RankModel& model, const EmbeddingProvider& provider) {
  if (model.input_dim() != provider.dim()) {
    fail(ErrorKind::InvalidArgument, "rank model expects " + std::to_string(model.input_dim()) +
                                         "-dimensional embeddings, provider has " + std::to_string(provider.dim()));
  }
}

/// Vectors the cluster model sees for each sentence of `doc`.
struct ClusterView {
  Vector doc_vec;
  std::vector<Vector> sentence_vecs;
};

inline ClusterView cluster_view(const Document& doc, const EmbeddingProvider& provider, const RankModel* rank,
                                ClusterSpace space) {
  auto map = [&](Vector v) { return space == ClusterSpace::Projected ? rank->project(v) : v; };
  ClusterView view{map(embed_document(provider, doc)), {}};
  for (const auto& s : doc.sentences) view.sentence_vecs.push_back(map(embed_sentence(provider, s)));
  return view;
}

inline std::size_t cluster_input_dim(const EmbeddingProvider& provider, const RankModel* rank, ClusterSpace space) {
  return space == ClusterSpace::Projected ? rank->output_dim() : provider.dim();
}

inline void check_cluster_dims(const ClusterModel& model, std::size_t expected) {
  if (model.dim() != expected) {
    fail(ErrorKind::InvalidArgument, "cluster model expects " + std::to_string(model.dim()) +
                                         "-dimensional vectors, pipeline produces " + std::to_string(expected));
  }
}

inline SentenceRanking top_k(SentenceRanking ranking, std::size_t k) {
  if (ranking.ordered.size() > k) ranking.ordered.resize(k);
  return ranking;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// train-rank

struct RankRun {
  RankModel model;
  std::size_t triplets = 0;
  std::size_t documents_used = 0;
  std::size_t documents_skipped = 0;  // no positive or no negative sentence
  Diagnostics diagnostics;
};

inline std::vector<Triplet> collect_triplets(const std::vector<Document>& docs, const std::vector<OracleLabel>& labels,
                                             const EmbeddingProvider& provider, const PipelineConfig& cfg,
                                             std::size_t* used = nullptr, std::size_t* skipped = nullptr) {
  const auto by_id = detail::index_labels(labels);
  std::vector<Triplet> triplets;
  for (const auto& doc : docs) {
    auto it = by_id.find(doc.id);
    if (it == by_id.end()) continue;
    auto batch = make_triplets(doc, *it->second, provider, cfg.triplet_seed(doc.id));
    if (batch.empty()) {
      if (skipped) ++*skipped;
      continue;
    }
    if (used) ++*used;
    for (auto& t : batch) triplets.push_back(std::move(t));
  }
  return triplets;
}

inline RankRun run_train_rank(const std::string& in_path, const std::string& labels_path, const std::string& model_out,
                              const PipelineConfig& cfg) {
  cfg.validate();
  const Dataset ds = ingest(in_path);
  const auto labels = load_labels(labels_path);
  detail::check_label_coverage(ds.docs, detail::index_labels(labels));
  const EmbeddingProvider provider = make_provider(cfg);

  RankRun run;
  report_ingest(ds, in_path, run.diagnostics);
  const auto triplets = collect_triplets(ds.docs, labels, provider, cfg, &run.documents_used, &run.documents_skipped);
  if (run.documents_skipped > 0) {
    run.diagnostics.push_back(std::to_string(run.documents_skipped) +
                              " document(s) had no positive or no negative sentence and were skipped");
  }
  run.triplets = triplets.size();
  run.model = train_rank(triplets, cfg.rank_config());
  save_rank_model(model_out, run.model);
  return run;
}

// ---------------------------------------------------------------------------
// train-cluster

struct ClusterRun {
  ClusterModel model;
  std::size_t vectors = 0;
  Diagnostics diagnostics;
};

inline ClusterRun run_train_cluster(const std::string& in_path, const std::optional<std::string>& rank_model_path,
                                    const std::string& model_out, const PipelineConfig& cfg) {
  cfg.validate();
  std::optional<RankModel> rank;
  if (cfg.cluster_space == ClusterSpace::Projected) {
    if (!rank_model_path) fail(ErrorKind::InvalidArgument, "cluster space 'projected' needs a rank model");
    rank = load_rank_model(*rank_model_path);
  }
  const Dataset ds = ingest(in_path);
  const EmbeddingProvider provider = make_provider(cfg);
  if (rank) detail::check_rank_dims(*rank, provider);

  ClusterRun run;
  report_ingest(ds, in_path, run.diagnostics);
  std::vector<Vector> vectors;
  for (const auto& doc : ds.docs) {
    for (const auto& s : doc.sentences) {
      Vector v = embed_sentence(provider, s);
      vectors.push_back(rank ? rank->project(v) : v);
    }
  }
  if (vectors.empty()) fail(ErrorKind::Data, in_path + ": corpus has no sentences");
  run.vectors = vectors.size();
  run.model = train_cluster(vectors, cfg.cluster_config());
  if (run.model.skipped_zero > 0) {
    run.diagnostics.push_back(std::to_string(run.model.skipped_zero) + " zero sentence vector(s) skipped");
  }
  save_cluster_model(model_out, run.model);
  return run;
}

// ---------------------------------------------------------------------------
// summarize

struct Summarizer {
  const RankModel& rank;
  const ClusterModel* cluster;
  const EmbeddingProvider& provider;
  const PipelineConfig& cfg;

  Summarizer(const RankModel& r, const ClusterModel* c, const EmbeddingProvider& p, const PipelineConfig& config)
      : rank(r), cluster(c), provider(p), cfg(config) {
    detail::check_rank_dims(rank, provider);
    if (cluster) detail::check_cluster_dims(*cluster, detail::cluster_input_dim(provider, &rank, cfg.cluster_space));
  }

  /// top_k ranked sentences, filtered when a cluster model is present, then
  /// restored to document order.
  SummaryRecord summarize(const Document& doc) const {
    SummaryRecord rec{doc.id, {}, {}, false};
    if (doc.sentences.empty()) return rec;
    SentenceRanking chosen = detail::top_k(rank_sentences(rank, doc, provider), cfg.top_k);
    if (cluster) {
      const auto view = detail::cluster_view(doc, provider, &rank, cfg.cluster_space);
      FilterResult filtered = filter_sentences(*cluster, chosen, view.doc_vec, view.sentence_vecs, {cfg.threshold});
      chosen = std::move(filtered.ranking);
      rec.fallback = filtered.fallback;
    }
    for (const auto& r : chosen.ordered) rec.indices.push_back(r.index);
    std::sort(rec.indices.begin(), rec.indices.end());
    for (std::size_t i : rec.indices) {
      if (!rec.summary.empty()) rec.summary += ' ';
      rec.summary += doc.sentences[i].text;
    }
    return rec;
  }
};

struct SummarizeRun {
  std::size_t documents = 0;
  std::size_t fallbacks = 0;
  Diagnostics diagnostics;
};

inline SummarizeRun run_summarize(const std::string& in_path, const std::string& rank_model_path,
                                  const std::optional<std::string>& cluster_model_path, const std::string& out_path,
                                  const PipelineConfig& cfg) {
  cfg.validate();
  const RankModel rank = load_rank_model(rank_model_path);
  std::optional<ClusterModel> cluster;
  if (cluster_model_path) cluster = load_cluster_model(*cluster_model_path);
  const EmbeddingProvider provider = make_provider(cfg);
  const Summarizer summarizer(rank, cluster ? &*cluster : nullptr, provider, cfg);

  const Dataset ds = ingest(in_path);
  SummarizeRun run;
  report_ingest(ds, in_path, run.diagnostics);
  std::vector<SummaryRecord> out;
  for (const auto& doc : ds.docs) {
    out.push_back(summarizer.summarize(doc));
    if (out.back().fallback) ++run.fallbacks;
    if (doc.sentences.empty()) run.diagnostics.push_back("document '" + doc.id + "' has no sentences");
  }
  run.documents = out.size();
  save_jsonl(out_path, out);
  return run;
}

// ---------------------------------------------------------------------------
// evaluate

struct VariantMean {
  RougeVariant variant;
  RougeScore mean;
};

struct EvalReport {
  std::vector<VariantMean> scores;
  std::size_t documents = 0;
  std::size_t skipped = 0;
  Diagnostics diagnostics;

  /// Header and value rows in the R-1-p ... R-L-f layout, values in percent.
  std::string table() const {
    std::ostringstream head, row;
    row << std::fixed << std::setprecision(2);
    for (const auto& s : scores) {
      const std::string name = "R-" + s.variant.name();
      head << (head.tellp() > 0 ? " " : "") << name + "-p " << name + "-r " << name + "-f";
      if (row.tellp() > 0) row << ' ';
      row << 100.0 * s.mean.precision << ' ' << 100.0 * s.mean.recall << ' ' << 100.0 * s.mean.f1;
    }
    return head.str() + "\n" + row.str() + "\n";
  }

  std::string to_json() const {
    OrderedJson j;
    j["documents"] = documents;
    j["skipped"] = skipped;
    OrderedJson per = OrderedJson::object();
    for (const auto& s : scores) {
      per[s.variant.name()] = {{"precision", s.mean.precision}, {"recall", s.mean.recall}, {"f1", s.mean.f1}};
    }
    j["scores"] = per;
    OrderedJson names = OrderedJson::array();
    for (const auto& s : scores) names.push_back(s.variant.name());
    j["config"] = {{"variants", names}};
    return dump_line(j);
  }
};

/// Corpus-mean ROUGE of summaries against gold documents, matched by id.
/// Gold documents with an empty summary or without a candidate are skipped.
inline EvalReport evaluate(const std::vector<SummaryRecord>& summaries, const std::vector<Document>& gold,
                           const std::vector<RougeVariant>& variants) {
  require(!variants.empty(), "evaluate: no ROUGE variants");
  std::map<std::string, const SummaryRecord*> by_id;
  for (const auto& s : summaries) by_id.emplace(s.id, &s);
  std::map<std::string, bool> gold_ids;
  EvalReport report;
  std::vector<RougeScore> sums(variants.size());
  for (const auto& doc : gold) {
    gold_ids[doc.id] = true;
    const TokenList reference = tokenize(doc.gold_summary);
    auto it = by_id.find(doc.id);
    if (it == by_id.end()) {
      report.diagnostics.push_back("no summary for document '" + doc.id + "'");
      ++report.skipped;
      continue;
    }
    if (reference.empty()) {
      ++report.skipped;
      continue;
    }
    const TokenList candidate = tokenize(it->second->summary);
    for (std::size_t v = 0; v < variants.size(); ++v) {
      const RougeScore s = rouge(variants[v], candidate, reference);
      sums[v].precision += s.precision;
      sums[v].recall += s.recall;
      sums[v].f1 += s.f1;
    }
    ++report.documents;
  }
  for (const auto& s : summaries) {
    if (!gold_ids.count(s.id)) report.diagnostics.push_back("summary for unknown document '" + s.id + "'");
  }
  const double n = report.documents > 0 ? static_cast<double>(report.documents) : 1.0;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    report.scores.push_back({variants[v], {sums[v].precision / n, sums[v].recall / n, sums[v].f1 / n}});
  }
  return report;
}

inline EvalReport run_evaluate(const std::string& summaries_path, const std::string& gold_path,
                               const std::vector<RougeVariant>& variants,
                               const std::optional<std::string>& report_out = std::nullopt) {
  const auto summaries = load_summaries(summaries_path);
  const Dataset gold = ingest(gold_path);
  EvalReport report = evaluate(summaries, gold.docs, variants);
  report_ingest(gold, gold_path, report.diagnostics);
  if (report_out) {
    auto out = open_output(*report_out);
    out << report.to_json() << '\n';
  }
  return report;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

inline std::vector<double> default_sweep_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 20; ++i) t.push_back(i / 20.0);
  return t;
}

/// Per document, the sentences kept by top_k and the filter classifier at
/// each threshold, without the top-1 fallback. Sentence indices per threshold.
struct KeepSets {
  std::string doc_id;
  std::vector<std::vector<bool>> kept;  // [threshold][sentence]
};

inline KeepSets keep_sets(const Document& doc, const RankModel& rank, const ClusterModel& cluster,
                          const EmbeddingProvider& provider, const PipelineConfig& cfg,
                          const std::vector<double>& thresholds) {
  KeepSets ks{doc.id, {}};
  const SentenceRanking chosen = detail::top_k(rank_sentences(rank, doc, provider), cfg.top_k);
  const auto view = detail::cluster_view(doc, provider, &rank, cfg.cluster_space);
  const std::size_t lead = leading_cluster(cluster, view.doc_vec);
  for (double t : thresholds) {
    std::vector<bool> kept(doc.sentences.size(), false);
    const auto mask = filter_keep_mask(cluster, chosen, view.sentence_vecs, lead, t);
    for (std::size_t i = 0; i < mask.size(); ++i) kept[chosen.ordered[i].index] = mask[i];
    ks.kept.push_back(std::move(kept));
  }
  return ks;
}

struct SweepRun {
  std::vector<SweepRow> rows;
  Diagnostics diagnostics;
};

/// ROC points of the filtering classifier: a sentence is predicted positive
/// when it survives top_k and the threshold filter; oracle membership is truth.
inline SweepRun sweep_thresholds(const std::vector<Document>& docs, const std::vector<OracleLabel>& labels,
                                 const RankModel& rank, const ClusterModel& cluster, const EmbeddingProvider& provider,
                                 const PipelineConfig& cfg, const std::vector<double>& thresholds) {
  for (double t : thresholds) FilterConfig{t}.validate();
  detail::check_rank_dims(rank, provider);
  detail::check_cluster_dims(cluster, detail::cluster_input_dim(provider, &rank, cfg.cluster_space));
  const auto by_id = detail::index_labels(labels);
  SweepRun run;
  run.rows.resize(thresholds.size());
  for (std::size_t t = 0; t < thresholds.size(); ++t) run.rows[t].threshold = thresholds[t];
  std::size_t positives = 0, negatives = 0;
  for (const auto& doc : docs) {
    auto it = by_id.find(doc.id);
    if (it == by_id.end() || doc.sentences.empty()) {
      run.diagnostics.push_back("document '" + doc.id + "' has no label or no sentences; skipped");
      continue;
    }
    std::vector<bool> truth(doc.sentences.size(), false);
    for (std::size_t i : it->second->selected) {
      if (i >= truth.size()) fail(ErrorKind::Data, "label for '" + doc.id + "' selects a missing sentence");
      truth[i] = true;
    }
    for (bool b : truth) (b ? positives : negatives) += 1;
    const KeepSets ks = keep_sets(doc, rank, cluster, provider, cfg, thresholds);
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      SweepRow& row = run.rows[t];
      for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool pred = ks.kept[t][i];
        if (truth[i]) {
          (pred ? row.tp : row.fn) += 1;
        } else {
          (pred ? row.fp : row.tn) += 1;
        }
      }
    }
  }
  if (positives == 0) fail(ErrorKind::Data, "sweep: corpus has no positive (oracle-selected) sentences");
  if (negatives == 0) fail(ErrorKind::Data, "sweep: corpus has no negative (unselected) sentences");
  for (auto& row : run.rows) {
    row.tpr = static_cast<double>(row.tp) / static_cast<double>(row.tp + row.fn);
    row.fpr = static_cast<double>(row.fp) / static_cast<double>(row.fp + row.tn);
  }
  return run;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "threshold,tpr,fpr,tp,fp,tn,fn\n";
  for (const auto& r : rows) {
    out << format_double(r.threshold) << ',' << format_double(r.tpr) << ',' << format_double(r.fpr) << ',' << r.tp
        << ',' << r.fp << ',' << r.tn << ',' << r.fn << '\n';
  }
}

inline SweepRun run_sweep(const std::string& in_path, const std::string& labels_path, const std::string& rank_model_path,
                          const std::string& cluster_model_path, const std::vector<double>& thresholds,
                          const std::string& out_path, const PipelineConfig& cfg) {
  cfg.validate();
  const Dataset ds = ingest(in_path);
  const auto labels = load_labels(labels_path);
  const RankModel rank = load_rank_model(rank_model_path);
  const ClusterModel cluster = load_cluster_model(cluster_model_path);
  const EmbeddingProvider provider = make_provider(cfg);
  SweepRun run = sweep_thresholds(ds.docs, labels, rank, cluster, provider, cfg, thresholds);
  report_ingest(ds, in_path, run.diagnostics);
  auto out = open_output(out_path);
  write_sweep_csv(out, run.rows);
  return run;
}

// ---------------------------------------------------------------------------
// analyze

struct HistogramRow {
  std::string series;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

/// 50 equal bins over [0, max(values)]; the maximum lands in the last bin.
inline std::vector<HistogramRow> histogram(const std::string& series, const std::vector<double>& values) {
  double top = 0.0;
  for (double v : values) top = std::max(top, v);
  if (top <= 0.0) top = 1.0;
  const double width = top / static_cast<double>(kHistogramBins);
  std::vector<HistogramRow> rows(kHistogramBins);
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    rows[b] = {series, width * static_cast<double>(b), b + 1 == kHistogramBins ? top : width * static_cast<double>(b + 1), 0};
  }
  for (double v : values) {
    auto b = static_cast<std::size_t>(std::max(0.0, v) / width);
    ++rows[std::min(b, kHistogramBins - 1)].count;
  }
  return rows;
}

inline double distance_kernel(double x) { return (x - kDistanceKernelCenter) * (x - kDistanceKernelCenter); }

/// 1 - cosine similarity of the projected vectors (1 if either is zero).
inline double scoring_distance(const RankModel& model, const Vector& a, const Vector& b) {
  const Vector pa = model.project(a);
  const Vector pb = model.project(b);
  const double den = pa.norm() * pb.norm();
  return den > 0.0 ? 1.0 - pa.dot(pb) / den : 1.0;
}

struct DistanceAnalysis {
  std::vector<double> pos_raw, neg_raw, pos_kernel, neg_kernel;
  std::vector<HistogramRow> rows;
  double pos_mean = 0.0;
  double neg_mean = 0.0;
};

inline DistanceAnalysis analyze_distances(const std::vector<Triplet>& triplets, const RankModel& rank) {
  DistanceAnalysis a;
  for (const auto& t : triplets) {
    a.pos_raw.push_back(scoring_distance(rank, t.text_vec, t.pos_vec));
    a.neg_raw.push_back(scoring_distance(rank, t.text_vec, t.neg_vec));
    a.pos_kernel.push_back(distance_kernel(a.pos_raw.back()));
    a.neg_kernel.push_back(distance_kernel(a.neg_raw.back()));
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
  };
  a.pos_mean = mean(a.pos_raw);
  a.neg_mean = mean(a.neg_raw);
  for (const auto* series : {&a.pos_raw, &a.neg_raw, &a.pos_kernel, &a.neg_kernel}) {
    const char* name = series == &a.pos_raw ? "pos_raw"
                       : series == &a.neg_raw ? "neg_raw"
                       : series == &a.pos_kernel ? "pos_kernel"
                                                 : "neg_kernel";
    auto rows = histogram(name, *series);
    a.rows.insert(a.rows.end(), rows.begin(), rows.end());
  }
  return a;
}

inline void write_histogram_csv(std::ostream& out, const std::vector<HistogramRow>& rows) {
  out << "series,bin_lo,bin_hi,count\n";
  for (const auto& r : rows) out << r.series << ',' << format_double(r.lo) << ',' << format_double(r.hi) << ',' << r.count << '\n';
}

inline DistanceAnalysis run_analyze(const std::string& in_path, const std::string& labels_path,
                                    const std::string& rank_model_path, const std::string& out_path,
                                    const PipelineConfig& cfg) {
  cfg.validate();
  const Dataset ds = ingest(in_path);
  const auto labels = load_labels(labels_path);
  const RankModel rank = load_rank_model(rank_model_path);
  const EmbeddingProvider provider = make_provider(cfg);
  detail::check_rank_dims(rank, provider);
  const auto triplets = collect_triplets(ds.docs, labels, provider, cfg);
  DistanceAnalysis a = analyze_distances(triplets, rank);
  auto out = open_output(out_path);
  write_histogram_csv(out, a.rows);
  return a;
}

// ---------------------------------------------------------------------------
// aspects

/// One line per cluster: "<id>: w1, w2, ...". The vocabulary is every entry
/// of the word-vector file, mapped into the cluster space when a rank model
/// is given.
inline std::vector<std::string> run_aspects(const std::string& cluster_model_path, const std::string& vectors_path,
                                            std::size_t top_m, const std::optional<std::string>& rank_model_path = std::nullopt) {
  require(top_m >= 1, "top_m must be >= 1");
  const ClusterModel cluster = load_cluster_model(cluster_model_path);
  const EmbeddingProvider provider = load_vectors(vectors_path);
  std::optional<RankModel> rank;
  if (rank_model_path) {
    rank = load_rank_model(*rank_model_path);
    detail::check_rank_dims(*rank, provider);
  }
  detail::check_cluster_dims(cluster, rank ? rank->output_dim() : provider.dim());

  // re-read the file to keep vocabulary order independent of hash-map layout
  auto in = open_input(vectors_path);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<std::string, Vector>> vocab;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string token;
    if (!(row >> token)) continue;
    Vector v = provider.token_vector(token);
    vocab.emplace_back(token, rank ? rank->project(v) : v);
  }
  const auto words = aspect_words(cluster, vocab, top_m);
  std::vector<std::string> lines;
  for (std::size_t j = 0; j < words.size(); ++j) {
    std::string l = std::to_string(j) + ":";
    for (std::size_t i = 0; i < words[j].size(); ++i) l += (i ? ", " : " ") + words[j][i];
    lines.push_back(std::move(l));
  }
  return lines;
}

}  // namespace sumhis
