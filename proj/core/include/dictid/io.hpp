#pragma once

#include <Eigen/Core>
#include <string>

namespace dictid::io {

/// Matrix CSV format: first line "rows,cols", then one comma-separated line
/// per row, entries printed with 17 significant digits (value-preserving for
/// doubles). Lines starting with '#' are metadata comments and are ignored
/// by the reader; writers append one trailing "# meta {...}" line carrying
/// {tool_version, config, seed}.
std::string matrix_to_csv(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_csv_text(const std::string& text);

Eigen::MatrixXd read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m,
                      const std::string& meta_json = "");

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Full-precision decimal rendering of a double ("%.17g"); "inf"/"-inf"/"nan"
/// for non-finite values.
std::string format_double(double v);

}  // namespace dictid::io
