#include "wabc/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wabc {

namespace {

// strtod rather than std::stod: stod throws out_of_range whenever strtod
// flags ERANGE, which glibc also does for subnormal results even though they
// are representable.  Only true overflow is rejected here.
double parse_double_cell(const std::string& cell, const std::string& path) {
  const char* s = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s, &end);
  const bool fully_parsed =
      end != s && static_cast<size_t>(end - s) == cell.size();
  const bool overflowed = errno == ERANGE && std::fabs(v) == HUGE_VAL;
  if (!fully_parsed || overflowed)
    throw std::runtime_error("csv parse error in " + path + ": '" + cell + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  if (static_cast<Eigen::Index>(header.size()) != m.cols())
    throw std::invalid_argument("write_matrix_csv: header width mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (size_t j = 0; j < header.size(); ++j) {
    if (j) out << ',';
    out << header[j];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix read_matrix_csv(const std::string& path, std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty csv file: " + path);
  std::vector<std::string> head;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) head.push_back(cell);
  }
  if (head.empty()) throw std::runtime_error("csv header has no columns: " + path);
  if (header) *header = head;
  std::vector<double> data;
  Eigen::Index rows = 0;
  const Eigen::Index cols = static_cast<Eigen::Index>(head.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index c = 0;
    while (std::getline(ss, cell, ',')) {
      data.push_back(parse_double_cell(cell, path));
      ++c;
    }
    if (c != cols)
      throw std::runtime_error("csv row width mismatch in " + path);
    ++rows;
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = data[i * cols + j];
  return m;
}

void write_cloud_csv(const std::string& path, const PointCloud& c) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < c.dim(); ++j)
    header.push_back("x" + std::to_string(j + 1));
  write_matrix_csv(path, c.points, header);
}

PointCloud read_cloud_csv(const std::string& path) {
  std::vector<std::string> header;
  Matrix m = read_matrix_csv(path, &header);
  if (header.empty() || header[0] != "x1")
    throw std::runtime_error("not a point cloud csv (expected x1.. header): " + path);
  return PointCloud(std::move(m));
}

void write_series_csv(const std::string& path, const Series& s) {
  Matrix m(s.length(), s.ydim() + 1);
  for (Eigen::Index t = 0; t < s.length(); ++t) {
    m(t, 0) = static_cast<double>(t + 1);
    m.row(t).tail(s.ydim()) = s.values.row(t);
  }
  std::vector<std::string> header{"t"};
  for (Eigen::Index j = 0; j < s.ydim(); ++j)
    header.push_back("y" + std::to_string(j + 1));
  write_matrix_csv(path, m, header);
}

Series read_series_csv(const std::string& path) {
  std::vector<std::string> header;
  Matrix m = read_matrix_csv(path, &header);
  if (header.size() < 2 || header[0] != "t" || header[1] != "y1")
    throw std::runtime_error("not a series csv (expected t,y1.. header): " + path);
  Series s;
  s.values = m.rightCols(m.cols() - 1);
  return s;
}

}  // namespace wabc
