#pragma once

#include "seqcpd/result.hpp"
#include "seqcpd/series.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace seqcpd {

struct CsvTable {
  std::vector<std::string> header;
  Matrix values;
};

/// Comma-separated numeric table. A first row with any non-numeric cell is
/// taken as the header. Errors name the 1-based file line and column.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

SeriesData ingest_csv(const std::string& path, DataRole role);

void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& header = {});

enum class OutputFormat { json, text, svg };
OutputFormat parse_format(std::string_view name);

/// {"change_points", "cost_values", "parameters", "residuals"} in that order;
/// non-finite numbers become null and doubles use the shortest round-trip form.
std::string emit_json(const DetectionResult& result);
/// Summary blocks "Change points:", "Cost values:" and "Parameters:".
std::string emit_text(const DetectionResult& result);
/// Series panel with one vertical rule per change point, plus a residual
/// panel when residuals are present. Change points are on the row axis of `values`.
std::string emit_svg(const DetectionResult& result, const Matrix& values);

std::string emit(const DetectionResult& result, OutputFormat format, const Matrix& values);

}  // namespace seqcpd
