// sumhis: batch command-line front end for the extractive summarization
// pipeline (oracle labels, ranking and cluster training, summaries,
// evaluation and analysis).

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sumhis/sumhis.hpp"

namespace {

using sumhis::PipelineConfig;

int exit_code(sumhis::ErrorKind kind) {
  switch (kind) {
    case sumhis::ErrorKind::InvalidArgument: return 2;
    case sumhis::ErrorKind::Format: return 3;
    case sumhis::ErrorKind::Io: return 4;
    case sumhis::ErrorKind::Data: return 5;
    case sumhis::ErrorKind::Numeric: return 6;
  }
  return 1;
}

void print_diagnostics(const sumhis::Diagnostics& diag) {
  for (const auto& d : diag) std::cerr << "warning: " << d << '\n';
}

std::optional<std::string> opt_path(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

// Raw option values; converted into PipelineConfig after parsing.
struct Options {
  std::size_t top_k = 3;
  double threshold = 0.25;
  std::vector<std::string> variants = {"1", "2", "L"};
  std::uint64_t seed = 0;
  std::string embed = "hashed";
  std::size_t embed_dim = 64;
  std::string vectors;

  double rank_lr = 0.01;
  std::size_t rank_epochs = 5;
  std::string rank_loss = "triplet_nll";
  double rank_init_scale = 0.1;
  std::size_t rank_dim = 0;

  std::size_t cluster_k = 8;
  std::size_t cluster_epochs = 2;
  double cluster_lr = 0.05;
  std::string cluster_init = "random";
  double ortho_weight = 0.0;
  std::string cluster_space = "projected";

  std::size_t oracle_n = 2;
  double length_factor = 2.0;
  std::string oracle_mode = "auto";
  std::size_t auto_cutoff = 12;

  PipelineConfig build() const {
    PipelineConfig c;
    c.top_k = top_k;
    c.threshold = threshold;
    c.variants.clear();
    for (const auto& v : variants) c.variants.push_back(sumhis::RougeVariant::parse(v));
    c.seed = seed;
    c.embed = embed;
    c.embed_dim = embed_dim;
    c.vectors_path = vectors;
    c.rank.learning_rate = rank_lr;
    c.rank.epochs = rank_epochs;
    c.rank.loss_kind = sumhis::parse_rank_loss(rank_loss);
    c.rank.init_scale = rank_init_scale;
    c.rank.projection_dim = rank_dim;
    c.cluster.clusters = cluster_k;
    c.cluster.epochs = cluster_epochs;
    c.cluster.learning_rate = cluster_lr;
    c.cluster.init = sumhis::parse_cluster_init(cluster_init);
    c.cluster.ortho_weight = ortho_weight;
    c.cluster_space = sumhis::parse_cluster_space(cluster_space);
    c.oracle.n = oracle_n;
    c.oracle.length_factor = length_factor;
    c.oracle.mode = sumhis::parse_oracle_mode(oracle_mode);
    c.oracle.auto_cutoff = auto_cutoff;
    c.validate();
    return c;
  }
};

void add_pipeline_options(CLI::App& app, Options& o) {
  app.add_option("--top_k", o.top_k, "Sentences taken from the ranking before filtering")->capture_default_str();
  app.add_option("--threshold", o.threshold, "Leading-cluster weight a sentence must exceed")->capture_default_str();
  app.add_option("--variants", o.variants, "ROUGE variants to report (1, 2, ..., L)")->capture_default_str();
  app.add_option("--seed", o.seed, "Base seed for every random stream")->capture_default_str();
  app.add_option("--embed", o.embed, "Embedding provider: hashed or lookup")->capture_default_str();
  app.add_option("--embed_dim", o.embed_dim, "Dimension of hashed embeddings")->capture_default_str();
  app.add_option("--vectors", o.vectors, "WORDVEC file for the lookup provider");
  app.add_option("--rank_lr", o.rank_lr, "Rank model learning rate")->capture_default_str();
  app.add_option("--rank_epochs", o.rank_epochs, "Rank model epochs")->capture_default_str();
  app.add_option("--rank_loss", o.rank_loss, "triplet_nll or binary_ce")->capture_default_str();
  app.add_option("--rank_init_scale", o.rank_init_scale, "Scale of the initial projection")->capture_default_str();
  app.add_option("--rank_dim", o.rank_dim, "Scoring-space dimension (0 = embedding dimension)")->capture_default_str();
  app.add_option("--cluster_k", o.cluster_k, "Number of clusters K")->capture_default_str();
  app.add_option("--cluster_epochs", o.cluster_epochs, "Cluster model epochs")->capture_default_str();
  app.add_option("--cluster_lr", o.cluster_lr, "Cluster model learning rate")->capture_default_str();
  app.add_option("--cluster_init", o.cluster_init, "random or kmeans")->capture_default_str();
  app.add_option("--ortho_weight", o.ortho_weight, "Weight of the orthonormality penalty")->capture_default_str();
  app.add_option("--cluster_space", o.cluster_space, "projected or raw")->capture_default_str();
  app.add_option("--oracle_n", o.oracle_n, "ROUGE-N order of the oracle objective")->capture_default_str();
  app.add_option("--length_factor", o.length_factor, "Oracle word budget as a multiple of the gold length")
      ->capture_default_str();
  app.add_option("--oracle_mode", o.oracle_mode, "exhaustive, greedy or auto")->capture_default_str();
  app.add_option("--auto_cutoff", o.auto_cutoff, "Max sentences for exhaustive search in auto mode")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extractive summarization with sentence ranking and hidden-structure filtering"};
  app.set_config("--config", "", "File of 'key = value' lines setting option defaults");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  add_pipeline_options(app, o);

  std::string input, output, labels, model, rank_model, cluster_model, summaries, gold, report, vectors_file;
  std::vector<double> thresholds = sumhis::default_sweep_thresholds();
  std::size_t top_m = sumhis::kDefaultAspectWords;

  auto* oracle = app.add_subcommand("oracle", "Write extractive oracle labels for a dataset");
  oracle->add_option("--input", input, "Dataset (JSONL)")->required();
  oracle->add_option("--output", output, "Label file to write")->required();

  auto* train_rank = app.add_subcommand("train-rank", "Train the sentence ranking model");
  train_rank->add_option("--input", input, "Dataset (JSONL)")->required();
  train_rank->add_option("--labels", labels, "Oracle label file")->required();
  train_rank->add_option("--model", model, "Rank model file to write")->required();

  auto* train_cluster = app.add_subcommand("train-cluster", "Train the hidden-structure cluster model");
  train_cluster->add_option("--input", input, "Dataset (JSONL)")->required();
  train_cluster->add_option("--rank-model", rank_model, "Rank model (needed for the projected space)");
  train_cluster->add_option("--model", model, "Cluster model file to write")->required();

  auto* summarize = app.add_subcommand("summarize", "Write extractive summaries");
  summarize->add_option("--input", input, "Dataset (JSONL)")->required();
  summarize->add_option("--rank-model", rank_model, "Rank model")->required();
  summarize->add_option("--cluster-model", cluster_model, "Cluster model; omit for unfiltered summaries");
  summarize->add_option("--output", output, "Summary file to write")->required();

  auto* evaluate = app.add_subcommand("evaluate", "ROUGE of summaries against gold summaries");
  evaluate->add_option("--summaries", summaries, "Summary file")->required();
  evaluate->add_option("--gold", gold, "Dataset with gold summaries")->required();
  evaluate->add_option("--report", report, "Also write the report as a JSON record");

  auto* sweep = app.add_subcommand("sweep", "TPR/FPR of the filter over thresholds (CSV)");
  sweep->add_option("--input", input, "Dataset (JSONL)")->required();
  sweep->add_option("--labels", labels, "Oracle label file")->required();
  sweep->add_option("--rank-model", rank_model, "Rank model")->required();
  sweep->add_option("--cluster-model", cluster_model, "Cluster model")->required();
  sweep->add_option("--thresholds", thresholds, "Thresholds to evaluate")->capture_default_str();
  sweep->add_option("--output", output, "CSV file to write")->required();

  auto* analyze = app.add_subcommand("analyze", "Histograms of text-sentence distances (CSV)");
  analyze->add_option("--input", input, "Dataset (JSONL)")->required();
  analyze->add_option("--labels", labels, "Oracle label file")->required();
  analyze->add_option("--rank-model", rank_model, "Rank model")->required();
  analyze->add_option("--output", output, "CSV file to write")->required();

  auto* aspects = app.add_subcommand("aspects", "Nearest vocabulary words of each cluster");
  aspects->add_option("--cluster-model", cluster_model, "Cluster model")->required();
  aspects->add_option("--vectors-file", vectors_file, "WORDVEC vocabulary")->required();
  aspects->add_option("--rank-model", rank_model, "Rank model mapping words into a projected cluster space");
  aspects->add_option("--top-m", top_m, "Words per cluster")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    // keep parse failures on the same one-line "error: <category>: ..." contract
    const bool io = dynamic_cast<const CLI::FileError*>(&e) != nullptr;
    const auto kind = io ? sumhis::ErrorKind::Io : sumhis::ErrorKind::InvalidArgument;
    std::cerr << "error: " << sumhis::error_category(kind) << ": " << e.what() << '\n';
    return exit_code(kind);
  }

  try {
    const PipelineConfig cfg = o.build();
    if (oracle->parsed()) {
      auto run = sumhis::run_oracle(input, output, cfg);
      print_diagnostics(run.diagnostics);
      std::cerr << "labels: " << run.labels << ", skipped (empty summary): " << run.skipped
                << ", budget fallbacks: " << run.fallbacks << '\n';
    } else if (train_rank->parsed()) {
      auto run = sumhis::run_train_rank(input, labels, model, cfg);
      print_diagnostics(run.diagnostics);
      std::cerr << "triplets: " << run.triplets << " from " << run.documents_used << " documents\n";
      for (std::size_t e = 0; e < run.model.epoch_losses.size(); ++e) {
        std::cout << "epoch " << e + 1 << " mean loss " << sumhis::format_double(run.model.epoch_losses[e]) << '\n';
      }
    } else if (train_cluster->parsed()) {
      auto run = sumhis::run_train_cluster(input, opt_path(rank_model), model, cfg);
      print_diagnostics(run.diagnostics);
      std::cerr << "sentence vectors: " << run.vectors << '\n';
      for (std::size_t e = 0; e < run.model.epoch_losses.size(); ++e) {
        std::cout << "epoch " << e + 1 << " mean loss " << sumhis::format_double(run.model.epoch_losses[e]) << '\n';
      }
    } else if (summarize->parsed()) {
      auto run = sumhis::run_summarize(input, rank_model, opt_path(cluster_model), output, cfg);
      print_diagnostics(run.diagnostics);
      std::cerr << "summaries: " << run.documents << ", filter fallbacks: " << run.fallbacks << '\n';
    } else if (evaluate->parsed()) {
      auto rep = sumhis::run_evaluate(summaries, gold, cfg.variants, opt_path(report));
      print_diagnostics(rep.diagnostics);
      std::cout << rep.table();
      std::cerr << "documents: " << rep.documents << ", skipped: " << rep.skipped << '\n';
    } else if (sweep->parsed()) {
      auto run = sumhis::run_sweep(input, labels, rank_model, cluster_model, thresholds, output, cfg);
      print_diagnostics(run.diagnostics);
      sumhis::write_sweep_csv(std::cout, run.rows);
    } else if (analyze->parsed()) {
      auto a = sumhis::run_analyze(input, labels, rank_model, output, cfg);
      std::cout << "pairs " << a.pos_raw.size() << " pos_mean " << sumhis::format_double(a.pos_mean) << " neg_mean "
                << sumhis::format_double(a.neg_mean) << '\n';
    } else if (aspects->parsed()) {
      for (const auto& line : sumhis::run_aspects(cluster_model, vectors_file, top_m, opt_path(rank_model))) {
        std::cout << line << '\n';
      }
    }
  } catch (const sumhis::Error& e) {
    std::cerr << "error: " << e.category() << ": " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
