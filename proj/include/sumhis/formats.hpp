#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>
#include <string>
#include <vector>

#include <json.hpp>

#include "sumhis/cluster.hpp"
#include "sumhis/error.hpp"
#include "sumhis/oracle.hpp"
#include "sumhis/rank.hpp"
#include "sumhis/textproc.hpp"

// File formats: line-delimited JSON records (dataset, labels, summaries) and
// the text model files. Writers produce one canonical byte form, so reading a
// file and writing it back reproduces it exactly.

namespace sumhis {

using OrderedJson = nlohmann::ordered_json;

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) fail(ErrorKind::Format, "cannot format number");
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(x)) {
    fail(ErrorKind::Format, where + ": bad number '" + std::string(s) + "'");
  }
  return x;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  return out;
}

inline std::string dump_line(const OrderedJson& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

// ---------------------------------------------------------------------------
// Matrix model files

namespace detail {

inline void write_matrix_file(std::ostream& out, std::string_view magic, const Matrix& m) {
  out << magic << " v1 " << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

inline Matrix read_matrix_file(std::istream& in, std::string_view magic, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Format, source + ":1: missing header");
  std::istringstream header(line);
  std::string got_magic, version, extra;
  long long rows = 0, cols = 0;
  if (!(header >> got_magic >> version >> rows >> cols) || got_magic != magic || version != "v1" || rows < 1 ||
      cols < 1 || (header >> extra)) {
    fail(ErrorKind::Format, source + ":1: expected '" + std::string(magic) + " v1 <rows> <cols>'");
  }
  Matrix m(rows, cols);
  for (long long r = 0; r < rows; ++r) {
    const std::string where = source + ":" + std::to_string(r + 2);
    if (!std::getline(in, line)) fail(ErrorKind::Format, where + ": missing row");
    std::istringstream row(line);
    std::string field;
    long long c = 0;
    while (row >> field) {
      if (c >= cols) fail(ErrorKind::Format, where + ": too many values");
      m(r, c++) = parse_double(field, where);
    }
    if (c != cols) fail(ErrorKind::Format, where + ": expected " + std::to_string(cols) + " values");
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) fail(ErrorKind::Format, source + ": trailing data");
  }
  return m;
}

}  // namespace detail

inline void write_rank_model(std::ostream& out, const RankModel& model) {
  detail::write_matrix_file(out, "SUMHIS-RANK", model.W);
}

inline RankModel read_rank_model(std::istream& in, const std::string& source = "<stream>") {
  return RankModel{detail::read_matrix_file(in, "SUMHIS-RANK", source), {}, {}};
}

inline void save_rank_model(const std::string& path, const RankModel& model) {
  auto out = open_output(path);
  write_rank_model(out, model);
}

inline RankModel load_rank_model(const std::string& path) {
  auto in = open_input(path);
  return read_rank_model(in, path);
}

inline void write_cluster_model(std::ostream& out, const ClusterModel& model) {
  detail::write_matrix_file(out, "SUMHIS-CLUST", model.C);
}

inline ClusterModel read_cluster_model(std::istream& in, const std::string& source = "<stream>") {
  return ClusterModel{detail::read_matrix_file(in, "SUMHIS-CLUST", source), {}, 0};
}

inline void save_cluster_model(const std::string& path, const ClusterModel& model) {
  auto out = open_output(path);
  write_cluster_model(out, model);
}

inline ClusterModel load_cluster_model(const std::string& path) {
  auto in = open_input(path);
  return read_cluster_model(in, path);
}

// ---------------------------------------------------------------------------
// Dataset records: {"id": str, "text": str, "summary": str}

struct LineError {
  std::size_t line = 0;
  std::string message;
};

/// Reads dataset records one line at a time. Malformed lines are recorded in
/// errors() and skipped.
class DatasetReader {
 public:
  explicit DatasetReader(std::istream& in) : in_(in) {}

  std::optional<Document> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ++records_;
      try {
        const auto j = nlohmann::json::parse(line);
        if (!j.is_object()) throw std::runtime_error("record is not an object");
        if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
          throw std::runtime_error("missing or empty string field 'id'");
        }
        if (!j.contains("text") || !j["text"].is_string()) throw std::runtime_error("missing string field 'text'");
        std::string summary;
        if (j.contains("summary")) {
          if (!j["summary"].is_string()) throw std::runtime_error("field 'summary' is not a string");
          summary = j["summary"].get<std::string>();
        }
        return make_document(j["id"].get<std::string>(), j["text"].get<std::string>(), std::move(summary));
      } catch (const std::exception& e) {
        errors_.push_back({line_no_, e.what()});
      }
    }
    return std::nullopt;
  }

  const std::vector<LineError>& errors() const { return errors_; }
  std::size_t records_seen() const { return records_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
  std::size_t records_ = 0;
  std::vector<LineError> errors_;
};

struct Dataset {
  std::vector<Document> docs;
  std::vector<LineError> errors;
};

/// Whole-file ingest. A file with records but none valid, or with duplicate
/// ids, is rejected. A file without any record yields an empty dataset.
inline Dataset read_dataset(std::istream& in, const std::string& source = "<stream>") {
  DatasetReader reader(in);
  Dataset ds;
  std::map<std::string, std::size_t> seen;
  std::set<std::string> duplicates;
  while (auto doc = reader.next()) {
    if (seen[doc->id]++ > 0) duplicates.insert(doc->id);
    ds.docs.push_back(std::move(*doc));
  }
  ds.errors = reader.errors();
  if (!duplicates.empty()) {
    std::string ids;
    for (const auto& id : duplicates) ids += (ids.empty() ? "" : ", ") + id;
    fail(ErrorKind::Data, source + ": duplicate document ids: " + ids);
  }
  if (reader.records_seen() > 0 && ds.docs.empty()) fail(ErrorKind::Data, source + ": no valid records");
  return ds;
}

inline Dataset ingest(const std::string& path) {
  auto in = open_input(path);
  return read_dataset(in, path);
}

inline std::string to_jsonl(const Document& doc) {
  OrderedJson j;
  j["id"] = doc.id;
  j["text"] = doc.text;
  j["summary"] = doc.gold_summary;
  return dump_line(j);
}

// ---------------------------------------------------------------------------
// Labels: {"id", "selected", "score", "mode"} (+ "fallback": true when flagged)

inline std::string to_jsonl(const OracleLabel& label) {
  OrderedJson j;
  j["id"] = label.doc_id;
  j["selected"] = label.selected;
  j["score"] = label.score;
  j["mode"] = std::string(to_string(label.mode_used));
  if (label.fallback) j["fallback"] = true;
  return dump_line(j);
}

namespace detail {

template <class F>
auto parse_records(std::istream& in, const std::string& source, F parse_one) {
  std::vector<decltype(parse_one(std::declval<const nlohmann::json&>()))> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_one(nlohmann::json::parse(line)));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(ErrorKind::Format, source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<OracleLabel> read_labels(std::istream& in, const std::string& source = "<stream>") {
  return detail::parse_records(in, source, [](const nlohmann::json& j) {
    OracleLabel label;
    label.doc_id = j.at("id").get<std::string>();
    label.selected = j.at("selected").get<std::vector<std::size_t>>();
    label.score = j.at("score").get<double>();
    const auto mode = parse_oracle_mode(j.at("mode").get<std::string>());
    if (mode == OracleMode::Auto) throw std::runtime_error("label mode must be exhaustive or greedy");
    label.mode_used = mode;
    label.fallback = j.contains("fallback") && j.at("fallback").get<bool>();
    if (!std::is_sorted(label.selected.begin(), label.selected.end())) throw std::runtime_error("'selected' is not sorted");
    return label;
  });
}

inline std::vector<OracleLabel> load_labels(const std::string& path) {
  auto in = open_input(path);
  return read_labels(in, path);
}

// ---------------------------------------------------------------------------
// Summaries: {"id", "summary", "indices"} (+ "fallback": true when flagged)

struct SummaryRecord {
  std::string id;
  std::string summary;
  std::vector<std::size_t> indices;
  bool fallback = false;

  bool operator==(const SummaryRecord&) const = default;
};

inline std::string to_jsonl(const SummaryRecord& rec) {
  OrderedJson j;
  j["id"] = rec.id;
  j["summary"] = rec.summary;
  j["indices"] = rec.indices;
  if (rec.fallback) j["fallback"] = true;
  return dump_line(j);
}

inline std::vector<SummaryRecord> read_summaries(std::istream& in, const std::string& source = "<stream>") {
  return detail::parse_records(in, source, [](const nlohmann::json& j) {
    SummaryRecord rec;
    rec.id = j.at("id").get<std::string>();
    rec.summary = j.at("summary").get<std::string>();
    rec.indices = j.at("indices").get<std::vector<std::size_t>>();
    rec.fallback = j.contains("fallback") && j.at("fallback").get<bool>();
    return rec;
  });
}

inline std::vector<SummaryRecord> load_summaries(const std::string& path) {
  auto in = open_input(path);
  return read_summaries(in, path);
}

template <class Record>
void write_jsonl(std::ostream& out, const std::vector<Record>& records) {
  for (const auto& r : records) out << to_jsonl(r) << '\n';
}

template <class Record>
void save_jsonl(const std::string& path, const std::vector<Record>& records) {
  auto out = open_output(path);
  write_jsonl(out, records);
}

}  // namespace sumhis
