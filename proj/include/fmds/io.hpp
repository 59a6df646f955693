#pragma once

// File formats. Matrices: first line "rows,cols", then one comma-separated
// row per line with 17 significant digits and "inf" for infinities. Point
// clouds: header x1..xn[,w1..wn]. Graphs: "source,target,weight" edge lists.
// All writes go through a temporary file and a rename.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "fmds/dissimilarity.hpp"
#include "fmds/error.hpp"
#include "fmds/linalg.hpp"
#include "json.hpp"

namespace fmds::io {

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || std::isnan(v)) {
    throw IoError(where + ": cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

inline long long parse_integer(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw IoError(where + ": cannot parse integer '" + std::string(text) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes to "<path>.tmp" and renames over path, so readers never see a
/// partial file.
inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw IoError("write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
  }
}

inline std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

// ---- matrices ----

inline std::string format_matrix(const Matrix& m) {
  std::string s = std::to_string(m.rows()) + "," + std::to_string(m.cols()) + "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) s += ',';
      s += format_double(m(i, j));
    }
    s += '\n';
  }
  return s;
}

inline Matrix parse_matrix(const std::string& text, const std::string& name = "matrix") {
  const auto lines = lines_of(text);
  if (lines.empty()) throw IoError(name + ": empty file");
  const auto dims = split_fields(lines[0]);
  if (dims.size() != 2) throw IoError(name + ":1: expected 'rows,cols'");
  const long long rows = parse_integer(dims[0], name + ":1"), cols = parse_integer(dims[1], name + ":1");
  if (rows < 0 || cols < 0) throw IoError(name + ":1: negative dimension");
  if (static_cast<long long>(lines.size()) != rows + 1) {
    throw IoError(name + ": expected " + std::to_string(rows) + " data rows, found " +
                  std::to_string(lines.size() - 1));
  }
  Matrix m(rows, cols);
  for (long long i = 0; i < rows; ++i) {
    const std::string where = name + ":" + std::to_string(i + 2);
    const auto fields = split_fields(lines[static_cast<std::size_t>(i + 1)]);
    if (static_cast<long long>(fields.size()) != cols) {
      throw IoError(where + ": expected " + std::to_string(cols) + " values, found " + std::to_string(fields.size()));
    }
    for (long long j = 0; j < cols; ++j) m(i, j) = parse_double(fields[static_cast<std::size_t>(j)], where);
  }
  return m;
}

inline void write_matrix(const std::filesystem::path& path, const Matrix& m) {
  write_text_atomic(path, format_matrix(m));
}

inline Matrix read_matrix(const std::filesystem::path& path) { return parse_matrix(read_text(path), path.string()); }

// ---- point clouds ----

inline std::string format_points(const PointCloudWithField& cloud) {
  const Index dim = cloud.ambient_dim();
  std::string s;
  for (Index c = 0; c < dim; ++c) s += (c ? ",x" : "x") + std::to_string(c + 1);
  for (Index c = 0; c < dim; ++c) s += ",w" + std::to_string(c + 1);
  s += '\n';
  for (Index i = 0; i < cloud.size(); ++i) {
    for (Index c = 0; c < dim; ++c) s += (c ? "," : "") + format_double(cloud.points()(i, c));
    for (Index c = 0; c < dim; ++c) s += "," + format_double(cloud.drift()(i, c));
    s += '\n';
  }
  return s;
}

/// Parses a point file. Drift columns are optional (zero drift if absent).
inline PointCloudWithField parse_points(const std::string& text, double alpha_tilde,
                                        const std::string& name = "points") {
  const auto lines = lines_of(text);
  if (lines.empty()) throw IoError(name + ": empty file");
  const auto header = split_fields(lines[0]);
  Index dim = 0, drift_dim = 0;
  for (const auto& h : header) {
    if (h == "x" + std::to_string(dim + 1) && drift_dim == 0) {
      ++dim;
    } else if (h == "w" + std::to_string(drift_dim + 1)) {
      ++drift_dim;
    } else {
      throw IoError(name + ":1: unexpected column '" + std::string(h) + "'");
    }
  }
  if (dim == 0) throw IoError(name + ":1: no coordinate columns");
  if (drift_dim != 0 && drift_dim != dim) throw IoError(name + ":1: drift columns must match coordinate columns");
  const Index n = static_cast<Index>(lines.size()) - 1;
  Matrix points(n, dim), drift = Matrix::Zero(n, dim);
  for (Index i = 0; i < n; ++i) {
    const std::string where = name + ":" + std::to_string(i + 2);
    const auto fields = split_fields(lines[static_cast<std::size_t>(i + 1)]);
    if (static_cast<Index>(fields.size()) != dim + drift_dim) throw IoError(where + ": wrong number of columns");
    for (Index c = 0; c < dim; ++c) points(i, c) = parse_double(fields[c], where);
    for (Index c = 0; c < drift_dim; ++c) drift(i, c) = parse_double(fields[dim + c], where);
  }
  try {
    return PointCloudWithField(std::move(points), std::move(drift), alpha_tilde);
  } catch (const std::invalid_argument& e) {
    throw IoError(name + ": " + e.what());
  }
}

inline PointCloudWithField read_points(const std::filesystem::path& path, double alpha_tilde) {
  return parse_points(read_text(path), alpha_tilde, path.string());
}

// ---- graphs ----

/// Header "source,target,weight" preceded by "# nodes=<n>" so isolated
/// nodes survive a round trip.
inline std::string format_edges(const DirectedWeightedGraph& graph) {
  std::string s = "# nodes=" + std::to_string(graph.size()) + "\nsource,target,weight\n";
  for (const Edge& e : graph.edges()) {
    s += std::to_string(e.source) + "," + std::to_string(e.target) + "," + format_double(e.weight) + "\n";
  }
  return s;
}

inline DirectedWeightedGraph parse_edges(const std::string& text, const std::string& name = "edges") {
  const auto lines = lines_of(text);
  if (lines.size() < 2 || lines[0].rfind("# nodes=", 0) != 0) throw IoError(name + ":1: expected '# nodes=<n>'");
  const long long n = parse_integer(std::string_view(lines[0]).substr(8), name + ":1");
  if (n < 0) throw IoError(name + ":1: negative node count");
  if (lines[1] != "source,target,weight") throw IoError(name + ":2: expected header 'source,target,weight'");
  DirectedWeightedGraph graph(n);
  for (std::size_t i = 2; i < lines.size(); ++i) {
    const std::string where = name + ":" + std::to_string(i + 1);
    const auto fields = split_fields(lines[i]);
    if (fields.size() != 3) throw IoError(where + ": expected 3 columns");
    const long long s = parse_integer(fields[0], where), t = parse_integer(fields[1], where);
    const double w = parse_double(fields[2], where);
    try {
      graph.add_edge(s, t, w);
    } catch (const std::invalid_argument& e) {
      throw IoError(where + ": " + e.what());
    }
  }
  return graph;
}

inline void write_edges(const std::filesystem::path& path, const DirectedWeightedGraph& graph) {
  write_text_atomic(path, format_edges(graph));
}

inline DirectedWeightedGraph read_edges(const std::filesystem::path& path) {
  return parse_edges(read_text(path), path.string());
}

inline std::string format_node_depths(const std::vector<int>& depth) {
  std::string s = "node,depth\n";
  for (std::size_t i = 0; i < depth.size(); ++i) s += std::to_string(i) + "," + std::to_string(depth[i]) + "\n";
  return s;
}

// ---- JSON ----

inline Json vector_to_json(const std::vector<double>& values) {
  Json a = Json::array();
  for (double v : values) a.push_back(std::isfinite(v) ? Json(v) : Json(format_double(v)));
  return a;
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

inline Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

// ---- flat key=value config ----

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

/// One "key = value" per line; blank lines and lines starting with '#' are
/// ignored. Syntax errors throw std::invalid_argument naming the line.
inline std::vector<ConfigEntry> parse_config(const std::string& text, const std::string& name = "config") {
  std::vector<ConfigEntry> entries;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(name + ":" + std::to_string(number) + ": expected 'key = value', got '" + t + "'");
    }
    ConfigEntry e{trim(t.substr(0, eq)), trim(t.substr(eq + 1)), number};
    if (e.key.empty()) throw std::invalid_argument(name + ":" + std::to_string(number) + ": empty key");
    entries.push_back(std::move(e));
  }
  return entries;
}

}  // namespace fmds::io
