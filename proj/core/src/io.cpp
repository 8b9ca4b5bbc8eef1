#include "dictid/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "dictid/errors.hpp"

namespace dictid::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out;
  out.reserve(static_cast<size_t>(m.size()) * 8 + 32);
  out += std::to_string(m.rows());
  out += ',';
  out += std::to_string(m.cols());
  out += '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

namespace {

double parse_double(const std::string& tok) {
  if (tok == "inf") return HUGE_VAL;
  if (tok == "-inf") return -HUGE_VAL;
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str()) fail(errc::kIoError, "bad numeric token '" + tok + "'");
  return v;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Eigen::MatrixXd matrix_from_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  long rows = -1, cols = -1;
  Eigen::MatrixXd m;
  long r = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto toks = split_commas(line);
    if (rows < 0) {
      if (toks.size() != 2) fail(errc::kIoError, "expected 'rows,cols' header");
      rows = std::strtol(toks[0].c_str(), nullptr, 10);
      cols = std::strtol(toks[1].c_str(), nullptr, 10);
      if (rows < 0 || cols < 0) fail(errc::kIoError, "negative dimensions");
      m.resize(rows, cols);
      continue;
    }
    if (r >= rows) fail(errc::kIoError, "more data rows than declared");
    if (static_cast<long>(toks.size()) != cols)
      fail(errc::kIoError, "row " + std::to_string(r) + " has " +
                               std::to_string(toks.size()) + " entries, expected " +
                               std::to_string(cols));
    for (long c = 0; c < cols; ++c) m(r, c) = parse_double(toks[c]);
    ++r;
  }
  if (rows < 0) fail(errc::kIoError, "empty matrix CSV");
  if (r != rows) fail(errc::kIoError, "fewer data rows than declared");
  return m;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  return matrix_from_csv_text(read_text_file(path));
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::string& meta_json) {
  std::string payload = matrix_to_csv(m);
  if (!meta_json.empty()) {
    payload += "# meta ";
    payload += meta_json;
    payload += '\n';
  }
  write_text_file(path, payload);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::kIoError, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(errc::kIoError, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) fail(errc::kIoError, "short write to '" + path + "'");
}

}  // namespace dictid::io
