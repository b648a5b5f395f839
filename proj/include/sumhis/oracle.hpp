#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <ranges>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sumhis/error.hpp"
#include "sumhis/rouge.hpp"
#include "sumhis/textproc.hpp"

// Extractive oracle: choose the subset of document sentences whose
// concatenation (in document order) maximizes ROUGE-N F1 against the gold
// summary, subject to a word budget of length_factor * words(gold).

namespace sumhis {

enum class OracleMode { Exhaustive, Greedy, Auto };

inline std::string_view to_string(OracleMode mode) {
  switch (mode) {
    case OracleMode::Exhaustive: return "exhaustive";
    case OracleMode::Greedy: return "greedy";
    case OracleMode::Auto: return "auto";
  }
  return "auto";
}

inline OracleMode parse_oracle_mode(std::string_view s) {
  if (s == "exhaustive") return OracleMode::Exhaustive;
  if (s == "greedy") return OracleMode::Greedy;
  if (s == "auto") return OracleMode::Auto;
  fail(ErrorKind::InvalidArgument, "unknown oracle mode '" + std::string(s) + "'");
}

inline constexpr std::size_t kExhaustiveSentenceCap = 25;

struct OracleConfig {
  std::size_t n = 2;
  double length_factor = 2.0;
  OracleMode mode = OracleMode::Auto;
  std::size_t auto_cutoff = 12;

  void validate() const {
    require(n >= 1, "oracle: n must be >= 1");
    require(length_factor > 0.0, "oracle: length_factor must be > 0");
    require(auto_cutoff >= 1, "oracle: auto_cutoff must be >= 1");
  }
};

struct OracleLabel {
  std::string doc_id;
  std::vector<std::size_t> selected;  // sorted ascending
  double score = 0.0;                 // ROUGE-N F1 against the gold summary
  OracleMode mode_used = OracleMode::Exhaustive;
  bool fallback = false;              // no single sentence fit the budget

  bool operator==(const OracleLabel&) const = default;
};

namespace detail {

struct OracleProblem {
  const Document& doc;
  TokenList gold;
  RougeN scorer;
  double budget;

  OracleProblem(const Document& d, const OracleConfig& cfg)
      : doc(d), gold(tokenize(d.gold_summary)), scorer(std::span<const TokenList>(&gold, 1), cfg.n),
        budget(cfg.length_factor * static_cast<double>(gold.size())) {}

  RougeCounts counts(const std::vector<std::size_t>& selected) const {
    return scorer.counts(concat_tokens(doc, selected));
  }
  double score(const std::vector<std::size_t>& selected) const { return counts(selected).score().f1; }
  bool fits(std::size_t words) const { return static_cast<double>(words) <= budget; }
};

inline void check_oracle_input(const Document& doc, const OracleConfig& cfg) {
  cfg.validate();
  if (doc.sentences.empty()) fail(ErrorKind::Data, "document '" + doc.id + "' has no sentences");
  if (tokenize(doc.gold_summary).empty()) fail(ErrorKind::Data, "document '" + doc.id + "' has an empty gold summary");
}

// Best single sentence when none fits the budget.
inline OracleLabel fallback_label(const OracleProblem& problem, OracleMode mode) {
  std::size_t best = 0;
  RougeCounts best_counts = problem.counts({0});
  for (std::size_t i = 1; i < problem.doc.sentences.size(); ++i) {
    const RougeCounts c = problem.counts({i});
    if (best_counts.f1_less(c)) {
      best = i;
      best_counts = c;
    }
  }
  return OracleLabel{problem.doc.id, {best}, best_counts.score().f1, mode, true};
}

inline bool any_single_fits(const OracleProblem& problem) {
  return std::ranges::any_of(problem.doc.sentences, [&](const Sentence& s) { return problem.fits(s.tokens.size()); });
}

}  // namespace detail

/// Exact argmax over all subsets. Scores are compared as exact fractions;
/// ties go to fewer sentences, then to the lexicographically smallest index
/// tuple.
inline OracleLabel exhaustive_oracle(const Document& doc, const OracleConfig& cfg) {
  detail::check_oracle_input(doc, cfg);
  const std::size_t m = doc.sentences.size();
  if (m > kExhaustiveSentenceCap) {
    fail(ErrorKind::InvalidArgument, "document '" + doc.id + "' has " + std::to_string(m) +
                                         " sentences; exhaustive oracle is capped at " +
                                         std::to_string(kExhaustiveSentenceCap) + ", use greedy mode");
  }
  detail::OracleProblem problem(doc, cfg);
  if (!detail::any_single_fits(problem)) return detail::fallback_label(problem, OracleMode::Exhaustive);

  // the empty subset (score 0) is the starting incumbent and wins 0-score ties
  OracleLabel best{doc.id, {}, 0.0, OracleMode::Exhaustive, false};
  RougeCounts best_counts;
  std::vector<std::size_t> subset;
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    std::size_t words = 0;
    subset.clear();
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (std::uint64_t{1} << i)) {
        subset.push_back(i);
        words += doc.sentences[i].tokens.size();
      }
    }
    if (!problem.fits(words)) continue;
    const RougeCounts c = problem.counts(subset);
    const bool better = best_counts.f1_less(c) ||
                        (c.f1_equal(best_counts) && (subset.size() < best.selected.size() ||
                                                     (subset.size() == best.selected.size() && subset < best.selected)));
    if (better) {
      best_counts = c;
      best.selected = subset;
    }
  }
  best.score = best_counts.score().f1;
  return best;
}

/// Forward selection: repeatedly add the sentence with the largest strict
/// gain that keeps the budget, smallest index on ties.
inline OracleLabel greedy_oracle(const Document& doc, const OracleConfig& cfg) {
  detail::check_oracle_input(doc, cfg);
  detail::OracleProblem problem(doc, cfg);
  if (!detail::any_single_fits(problem)) return detail::fallback_label(problem, OracleMode::Greedy);

  OracleLabel label{doc.id, {}, 0.0, OracleMode::Greedy, false};
  std::vector<bool> used(doc.sentences.size(), false);
  std::size_t words = 0;
  RougeCounts current;
  while (true) {
    std::size_t best_index = doc.sentences.size();
    RougeCounts best_counts = current;
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
      if (used[i] || !problem.fits(words + doc.sentences[i].tokens.size())) continue;
      std::vector<std::size_t> trial = label.selected;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), i), i);
      const RougeCounts c = problem.counts(trial);
      if (best_counts.f1_less(c)) {
        best_counts = c;
        best_index = i;
      }
    }
    if (best_index == doc.sentences.size()) break;
    used[best_index] = true;
    words += doc.sentences[best_index].tokens.size();
    label.selected.insert(std::upper_bound(label.selected.begin(), label.selected.end(), best_index), best_index);
    current = best_counts;
  }
  label.score = current.score().f1;
  return label;
}

inline OracleLabel oracle_label(const Document& doc, const OracleConfig& cfg) {
  switch (cfg.mode) {
    case OracleMode::Exhaustive: return exhaustive_oracle(doc, cfg);
    case OracleMode::Greedy: return greedy_oracle(doc, cfg);
    case OracleMode::Auto:
      return doc.sentences.size() <= cfg.auto_cutoff ? exhaustive_oracle(doc, cfg) : greedy_oracle(doc, cfg);
  }
  return greedy_oracle(doc, cfg);
}

struct RecordError {
  std::string id;
  std::string message;
};

struct ConversionResult {
  std::vector<OracleLabel> labels;
  std::size_t skipped = 0;  // documents with an empty gold summary
  std::vector<RecordError> errors;
};

/// Labels every document of `docs` in input order. Empty-summary documents
/// are skipped and counted; documents that fail are reported and passed over.
template <std::ranges::input_range Docs>
  requires std::same_as<std::remove_cvref_t<std::ranges::range_reference_t<Docs>>, Document>
ConversionResult convert_dataset(Docs&& docs, const OracleConfig& cfg) {
  cfg.validate();
  ConversionResult result;
  for (const Document& doc : docs) {
    if (tokenize(doc.gold_summary).empty()) {
      ++result.skipped;
      continue;
    }
    try {
      result.labels.push_back(oracle_label(doc, cfg));
    } catch (const Error& e) {
      result.errors.push_back({doc.id, e.what()});
    }
  }
  return result;
}

}  // namespace sumhis
