#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>

#include <Eigen/Dense>

#include "sumhis/error.hpp"
#include "sumhis/random.hpp"
#include "sumhis/textproc.hpp"

// Frozen token embeddings and the averaging that turns them into sentence
// and document vectors.

namespace sumhis {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Deterministic unit-norm token vector. The token surface is hashed with
/// FNV-1a (basis mixed with the seed), the hash seeds a SplitMix64 stream, and
/// each draw is mapped to [-1, 1] from its top 53 bits.
inline Vector hashed_embed(std::string_view token, std::size_t dim, std::uint64_t seed) {
  require(dim >= 2, "hashed_embed: dim must be >= 2");
  const std::uint64_t h = fnv1a64(token, 0xCBF29CE484222325ull ^ splitmix64(seed));
  Vector v(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) {
    const std::uint64_t z = splitmix64(h + i * 0x9E3779B97F4A7C15ull);
    v[static_cast<Eigen::Index>(i)] = 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
  }
  double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / norm;
}

class EmbeddingProvider {
 public:
  enum class Kind { Lookup, Hashed };

  static EmbeddingProvider hashed(std::size_t dim, std::uint64_t seed) {
    require(dim >= 2, "embedding dimension must be >= 2");
    EmbeddingProvider p;
    p.kind_ = Kind::Hashed;
    p.dim_ = dim;
    p.seed_ = seed;
    return p;
  }

  static EmbeddingProvider lookup(std::size_t dim, std::unordered_map<std::string, Vector> table) {
    require(dim >= 2, "embedding dimension must be >= 2");
    for (const auto& [token, v] : table) {
      require(static_cast<std::size_t>(v.size()) == dim, "vector for '" + token + "' has wrong dimension");
    }
    EmbeddingProvider p;
    p.kind_ = Kind::Lookup;
    p.dim_ = dim;
    p.table_ = std::make_shared<const std::unordered_map<std::string, Vector>>(std::move(table));
    return p;
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t table_size() const { return table_ ? table_->size() : 0; }

  /// Token vector, or nullptr on a lookup miss (callers treat that as zero).
  const Vector* find(const Token& token, Vector& scratch) const {
    if (kind_ == Kind::Hashed) {
      scratch = hashed_embed(token, dim_, seed_);
      return &scratch;
    }
    auto it = table_->find(token);
    return it == table_->end() ? nullptr : &it->second;
  }

  Vector token_vector(const Token& token) const {
    Vector scratch;
    const Vector* v = find(token, scratch);
    return v ? *v : Vector::Zero(static_cast<Eigen::Index>(dim_));
  }

  /// Sum of token vectors plus the number of misses.
  std::pair<Vector, std::size_t> sum(const TokenList& tokens) const {
    Vector total = Vector::Zero(static_cast<Eigen::Index>(dim_));
    Vector scratch;
    std::size_t misses = 0;
    for (const auto& t : tokens) {
      if (const Vector* v = find(t, scratch)) {
        total += *v;
      } else {
        ++misses;
      }
    }
    return {std::move(total), misses};
  }

 private:
  Kind kind_ = Kind::Hashed;
  std::size_t dim_ = 0;
  std::uint64_t seed_ = 0;
  std::shared_ptr<const std::unordered_map<std::string, Vector>> table_;
};

/// Mean of the sentence's token vectors; misses count as zero vectors.
inline Vector embed_sentence(const EmbeddingProvider& provider, const Sentence& sentence) {
  require(!sentence.tokens.empty(), "embed_sentence: sentence has no tokens");
  auto [total, misses] = provider.sum(sentence.tokens);
  return total / static_cast<double>(sentence.tokens.size());
}

/// Mean over every token of the document (not a mean of sentence means).
inline Vector embed_document(const EmbeddingProvider& provider, const Document& doc) {
  Vector total = Vector::Zero(static_cast<Eigen::Index>(provider.dim()));
  std::size_t count = 0;
  for (const auto& s : doc.sentences) {
    total += provider.sum(s.tokens).first;
    count += s.tokens.size();
  }
  if (count == 0) fail(ErrorKind::Data, "document '" + doc.id + "' has no tokens");
  return total / static_cast<double>(count);
}

/// Parses the `WORDVEC v1 <n>` text format.
inline EmbeddingProvider read_vectors(std::istream& in, const std::string& source = "<stream>") {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Format, source + ":1: missing WORDVEC header");
  std::istringstream header(line);
  std::string magic, version;
  long long dim = 0;
  if (!(header >> magic >> version >> dim) || magic != "WORDVEC" || version != "v1" || dim < 2) {
    fail(ErrorKind::Format, source + ":1: expected 'WORDVEC v1 <n>' with n >= 2");
  }
  std::string rest;
  if (header >> rest) fail(ErrorKind::Format, source + ":1: trailing text after header");

  std::unordered_map<std::string, Vector> table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string token;
    row >> token;
    Vector v(dim);
    long long count = 0;
    std::string field;
    while (row >> field) {
      if (count < dim) {
        double x = 0.0;
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
        if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(x)) {
          fail(ErrorKind::Format, source + ":" + std::to_string(line_no) + ": bad number '" + field + "'");
        }
        v[count] = x;
      }
      ++count;
    }
    if (count != dim) {
      fail(ErrorKind::Format, source + ":" + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                                  " values, found " + std::to_string(count));
    }
    if (!table.emplace(token, std::move(v)).second) {
      fail(ErrorKind::Format, source + ":" + std::to_string(line_no) + ": duplicate token '" + token + "'");
    }
  }
  return EmbeddingProvider::lookup(static_cast<std::size_t>(dim), std::move(table));
}

inline EmbeddingProvider load_vectors(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open word-vector file '" + path + "'");
  return read_vectors(in, path);
}

}  // namespace sumhis
