#pragma once

#include <string>
#include <vector>

#include "wabc/point_cloud.hpp"
#include "wabc/series.hpp"
#include "wabc/types.hpp"

namespace wabc {

// All writers emit a header row and numbers with 17 significant digits, so a
// write/read round trip reproduces every double bit-exactly.

std::string format_double(double v);

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header);
Matrix read_matrix_csv(const std::string& path,
                       std::vector<std::string>* header = nullptr);

// Point cloud files use columns x1..xd.
void write_cloud_csv(const std::string& path, const PointCloud& c);
PointCloud read_cloud_csv(const std::string& path);

// Series files use columns t,y1..yd with t = 1..T.
void write_series_csv(const std::string& path, const Series& s);
Series read_series_csv(const std::string& path);

}  // namespace wabc
