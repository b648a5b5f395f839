#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sumhis/error.hpp"
#include "sumhis/textproc.hpp"

namespace sumhis {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static RougeScore from_pr(double p, double r) {
    return RougeScore{p, r, (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0};
  }

  bool operator==(const RougeScore&) const = default;
};

struct RougeVariant {
  enum class Kind { N, L };
  Kind kind = Kind::N;
  std::size_t n = 1;

  static RougeVariant rouge_n(std::size_t n) {
    require(n >= 1, "ROUGE-N requires n >= 1");
    return {Kind::N, n};
  }
  static RougeVariant rouge_l() { return {Kind::L, 0}; }

  /// "1", "2", ..., or "L".
  std::string name() const { return kind == Kind::L ? std::string("L") : std::to_string(n); }

  static RougeVariant parse(const std::string& s) {
    if (s == "L" || s == "l") return rouge_l();
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &used);
    } catch (const std::exception&) {
      fail(ErrorKind::InvalidArgument, "unknown ROUGE variant '" + s + "'");
    }
    if (used != s.size()) fail(ErrorKind::InvalidArgument, "unknown ROUGE variant '" + s + "'");
    return rouge_n(v);
  }

  bool operator==(const RougeVariant&) const = default;
};

/// Integer counts behind a ROUGE-N score. F1 equals
/// 2 * matches / (cand_total * refs + ref_total), so two scores can be
/// compared exactly by cross-multiplication.
struct RougeCounts {
  std::size_t matches = 0;
  std::size_t cand_total = 0;
  std::size_t ref_total = 0;
  std::size_t refs = 1;

  std::size_t f1_denominator() const { return cand_total * refs + ref_total; }

  /// Exact F1 comparison; any zero-match score counts as 0.
  bool f1_less(const RougeCounts& o) const {
    if (o.matches == 0) return false;
    if (matches == 0) return true;
    return matches * o.f1_denominator() < o.matches * f1_denominator();
  }
  bool f1_equal(const RougeCounts& o) const { return !f1_less(o) && !o.f1_less(*this); }

  RougeScore score() const {
    const double p_den = static_cast<double>(cand_total) * static_cast<double>(refs);
    const double p = p_den > 0 ? static_cast<double>(matches) / p_den : 0.0;
    const double r = ref_total > 0 ? static_cast<double>(matches) / static_cast<double>(ref_total) : 0.0;
    return RougeScore::from_pr(p, r);
  }
};

/// ROUGE-N against a fixed reference set, reusable across many candidates.
/// Matches are clipped per reference and summed over the set; recall divides
/// by the total reference n-gram count and precision by the candidate n-gram
/// count times the number of references.
class RougeN {
 public:
  RougeN(std::span<const TokenList> references, std::size_t n) : n_(n) {
    require(n >= 1, "rouge_n: n must be >= 1");
    require(!references.empty(), "rouge_n: reference list is empty");
    refs_.reserve(references.size());
    for (const auto& ref : references) {
      refs_.push_back(ngrams(ref, n));
      ref_total_ += ref.size() >= n ? ref.size() - n + 1 : 0;
    }
  }

  RougeCounts counts(const TokenList& candidate) const {
    const NGramCounts cand = ngrams(candidate, n_);
    RougeCounts c;
    c.cand_total = candidate.size() >= n_ ? candidate.size() - n_ + 1 : 0;
    c.ref_total = ref_total_;
    c.refs = refs_.size();
    for (const auto& ref : refs_) {
      for (const auto& [gram, count] : ref) {
        auto it = cand.find(gram);
        if (it != cand.end()) c.matches += std::min(count, it->second);
      }
    }
    return c;
  }

  RougeScore score(const TokenList& candidate) const { return counts(candidate).score(); }

  std::size_t n() const { return n_; }

 private:
  std::size_t n_;
  std::vector<NGramCounts> refs_;
  std::size_t ref_total_ = 0;
};

inline RougeScore rouge_n(const TokenList& candidate, std::span<const TokenList> references, std::size_t n) {
  return RougeN(references, n).score(candidate);
}

inline RougeScore rouge_n(const TokenList& candidate, const TokenList& reference, std::size_t n) {
  return rouge_n(candidate, std::span<const TokenList>(&reference, 1), n);
}

inline std::size_t lcs_length(const TokenList& a, const TokenList& b) {
  if (a.empty() || b.empty()) return 0;
  // two-row DP over b
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline RougeScore rouge_l(const TokenList& candidate, const TokenList& reference) {
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  const double p = candidate.empty() ? 0.0 : lcs / static_cast<double>(candidate.size());
  const double r = reference.empty() ? 0.0 : lcs / static_cast<double>(reference.size());
  return RougeScore::from_pr(p, r);
}

inline RougeScore rouge(const RougeVariant& variant, const TokenList& candidate, const TokenList& reference) {
  return variant.kind == RougeVariant::Kind::L ? rouge_l(candidate, reference)
                                               : rouge_n(candidate, reference, variant.n);
}

}  // namespace sumhis
