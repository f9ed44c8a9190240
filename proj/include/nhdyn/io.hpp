#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nhdyn/linalg.hpp"

namespace nhdyn {

using Json = nlohmann::ordered_json;

// Plain numeric table written as UTF-8 CSV: header row, '.' decimal point,
// 17 significant digits, one row per grid point.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

void emit_csv(const CsvTable& table, const std::filesystem::path& path);
CsvTable read_csv(const std::filesystem::path& path);
std::string format_double(double v);

// Complex numbers serialize as [re, im]; matrices as row-major arrays of rows.
Json to_json(Complex z);
Json to_json(const ComplexVector& v);
Json to_json(const ComplexMatrix& m);

// Accepts [re, im] pairs or bare real numbers. `where` names the field in
// error messages.
Complex complex_from_json(const Json& j, const std::string& where);
ComplexVector vector_from_json(const Json& j, const std::string& where);
ComplexMatrix matrix_from_json(const Json& j, const std::string& where);

}  // namespace nhdyn
