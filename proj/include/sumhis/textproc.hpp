#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sumhis/error.hpp"

// Deterministic text substrate: tokenizer, sentence splitter and n-gram
// counting. Every module that counts words or n-grams goes through here, so
// changing a rule below changes ROUGE and oracle output everywhere.

namespace sumhis {

using Token = std::string;
using TokenList = std::vector<Token>;

struct Sentence {
  std::size_t index = 0;
  std::string text;
  TokenList tokens;

  bool operator==(const Sentence&) const = default;
};

struct Document {
  std::string id;
  std::string text;
  std::string gold_summary;
  std::vector<Sentence> sentences;

  std::size_t token_count() const {
    std::size_t total = 0;
    for (const auto& s : sentences) total += s.tokens.size();
    return total;
  }
};

using NGram = std::vector<std::string>;
using NGramCounts = std::map<NGram, std::size_t>;

namespace detail {

struct CodePoint {
  char32_t value = 0;
  std::size_t length = 1;  // bytes consumed
  bool valid = true;
};

inline CodePoint decode_utf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1, true};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {b0, 1, false};
  }
  if (pos + len > s.size()) return {b0, 1, false};
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return {b0, 1, false};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len, true};
}

inline void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool is_space(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\v': case U'\f': case U'\r':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Non-ASCII code points count as word characters unless they fall in the
// common punctuation and symbol blocks.
inline bool is_alnum(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z');
  }
  if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return false;
  if (cp >= 0x2000 && cp <= 0x2BFF) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  if (cp >= 0xFF01 && cp <= 0xFF0F) return false;
  return true;
}

// Simple one-to-one lowercase for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic capitals. Anything else is returned unchanged.
inline char32_t to_lower(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return cp + 0x20;
  if (cp < 0xC0) return cp;
  if (cp <= 0xDE) return cp == 0xD7 ? cp : cp + 0x20;
  if (cp >= 0x100 && cp <= 0x137) return cp | 1;
  if (cp >= 0x139 && cp <= 0x148) return (cp & 1) ? cp + 1 : cp;
  if (cp >= 0x14A && cp <= 0x177) return cp | 1;
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x179 && cp <= 0x17E) return (cp & 1) ? cp + 1 : cp;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  return cp;
}

inline std::string lowercase(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t pos = 0; pos < s.size();) {
    CodePoint cp = decode_utf8(s, pos);
    if (cp.valid) {
      encode_utf8(to_lower(cp.value), out);
    } else {
      out.push_back(s[pos]);
    }
    pos += cp.length;
  }
  return out;
}

// Invalid bytes are kept as opaque word characters.
inline bool is_word_char_at(std::string_view s, std::size_t pos, std::size_t& len) {
  CodePoint cp = decode_utf8(s, pos);
  len = cp.length;
  return !cp.valid || is_alnum(cp.value);
}

inline bool is_space_at(std::string_view s, std::size_t pos, std::size_t& len) {
  CodePoint cp = decode_utf8(s, pos);
  len = cp.length;
  return cp.valid && is_space(cp.value);
}

/// Strips leading and trailing non-word characters from one whitespace-free chunk.
inline std::string_view strip_punct(std::string_view word) {
  std::size_t begin = 0;
  std::size_t len = 0;
  while (begin < word.size() && !is_word_char_at(word, begin, len)) begin += len;
  std::size_t end = begin;
  std::size_t last_word_end = begin;
  while (end < word.size()) {
    bool w = is_word_char_at(word, end, len);
    end += len;
    if (w) last_word_end = end;
  }
  return word.substr(begin, last_word_end - begin);
}

inline constexpr std::array<std::string_view, 11> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "st", "vs", "e.g", "i.e", "etc", "u.s", "u.k"};

}  // namespace detail

/// Lowercased whitespace-separated words with surrounding punctuation removed.
/// Internal punctuation ("u.s.-based", "don't") is kept.
inline TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::size_t pos = 0;
  std::size_t len = 0;
  while (pos < text.size()) {
    while (pos < text.size() && detail::is_space_at(text, pos, len)) pos += len;
    std::size_t start = pos;
    while (pos < text.size() && !detail::is_space_at(text, pos, len)) pos += len;
    if (pos > start) {
      std::string_view core = detail::strip_punct(text.substr(start, pos - start));
      if (!core.empty()) tokens.push_back(detail::lowercase(core));
    }
  }
  return tokens;
}

inline std::size_t word_count(std::string_view text) { return tokenize(text).size(); }

/// Splits at '.', '!' or '?' followed by whitespace or end of text. A '.' that
/// closes a known abbreviation ("Dr.", "e.g.", "U.S.") does not end a sentence.
/// Segments without tokens are dropped; indices are assigned after dropping.
inline std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> sentences;
  auto emit = [&](std::size_t begin, std::size_t end) {
    std::string_view seg = text.substr(begin, end - begin);
    std::size_t len = 0;
    std::size_t b = 0;
    while (b < seg.size() && detail::is_space_at(seg, b, len)) b += len;
    std::size_t e = b;
    for (std::size_t i = b; i < seg.size();) {
      bool space = detail::is_space_at(seg, i, len);
      i += len;
      if (!space) e = i;
    }
    seg = seg.substr(b, e - b);
    TokenList tokens = tokenize(seg);
    if (tokens.empty()) return;
    sentences.push_back(Sentence{sentences.size(), std::string(seg), std::move(tokens)});
  };

  std::size_t start = 0;
  std::size_t word_start = 0;
  std::size_t pos = 0;
  std::size_t len = 0;
  while (pos < text.size()) {
    if (detail::is_space_at(text, pos, len)) {
      pos += len;
      word_start = pos;
      continue;
    }
    const char c = text[pos];
    const std::size_t next = pos + 1;
    if (c == '.' || c == '!' || c == '?') {
      bool at_boundary = next == text.size() || detail::is_space_at(text, next, len);
      if (at_boundary && c == '.') {
        std::string_view word = text.substr(word_start, pos - word_start);
        std::size_t b = 0;
        while (b < word.size() && !detail::is_word_char_at(word, b, len)) b += len;
        std::string lowered = detail::lowercase(word.substr(b));
        at_boundary = std::find(detail::kAbbreviations.begin(), detail::kAbbreviations.end(), lowered) ==
                      detail::kAbbreviations.end();
      }
      if (at_boundary) {
        emit(start, next);
        start = next;
      }
      pos = next;
      continue;
    }
    pos += detail::decode_utf8(text, pos).length;
  }
  if (start < text.size()) emit(start, text.size());
  return sentences;
}

/// All contiguous n-grams with multiplicity.
inline NGramCounts ngrams(const TokenList& tokens, std::size_t n) {
  require(n >= 1, "ngrams: n must be >= 1");
  NGramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[NGram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                   tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

inline Document make_document(std::string id, std::string text, std::string gold_summary) {
  Document doc{std::move(id), std::move(text), std::move(gold_summary), {}};
  doc.sentences = split_sentences(doc.text);
  return doc;
}

/// Concatenated tokens of the given sentences, in the order given.
inline TokenList concat_tokens(const Document& doc, const std::vector<std::size_t>& indices) {
  TokenList out;
  for (std::size_t i : indices) {
    const auto& t = doc.sentences.at(i).tokens;
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

}  // namespace sumhis
