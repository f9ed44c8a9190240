#include "nhdyn/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nhdyn/errors.hpp"

namespace nhdyn {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_csv(const CsvTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
  }
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c) out << ',';
    out << table.header[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw IoError("'" + path.string() + "': row width does not match header");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << format_double(row[c]);
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path.string() + "': missing header");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      row.push_back(std::strtod(cell.c_str(), &end));
      if (end == cell.c_str()) throw IoError("'" + path.string() + "': bad number '" + cell + "'");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  throw ValidationError(where + ": expected a number or an [re, im] pair");
}

ComplexVector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected a non-empty array");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ValidationError(where + ": expected an array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) throw ValidationError(where + "[0]: expected a row array");
  const std::size_t cols = j[0].size();
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ValidationError(row_where + ": rows must all have " + std::to_string(cols) + " entries");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          complex_from_json(j[r][c], row_where + "[" + std::to_string(c) + "]");
    }
  }
  if (!all_finite(m)) throw ValidationError(where + ": entries must be finite");
  return m;
}

}  // namespace nhdyn
