#include "seqcpd/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace seqcpd {

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(strip(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

enum class CellKind { number, blank, nonfinite, text };

CellKind parse_cell(std::string_view cell, double& out) {
  if (cell.empty()) return CellKind::blank;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  if (res.ec == std::errc::result_out_of_range) return CellKind::nonfinite;
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) return CellKind::text;
  return std::isfinite(out) ? CellKind::number : CellKind::nonfinite;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::string short_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "NaN" : (v > 0 ? "Inf" : "-Inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  Index lineno = 0;
  std::size_t width = 0;
  Index pending_blank = 0;
  bool seen_first = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (strip(line).empty()) {
      if (!pending_blank) pending_blank = lineno;
      continue;
    }
    if (pending_blank && seen_first)
      throw ParseError("blank row at line " + std::to_string(pending_blank));
    pending_blank = 0;
    const auto cells = split(line);
    if (!seen_first) {
      seen_first = true;
      width = cells.size();
      bool header = false;
      for (auto c : cells) {
        double v = 0.0;
        if (parse_cell(c, v) == CellKind::text) header = true;
      }
      if (header) {
        for (auto c : cells) table.header.push_back(unquote(c));
        continue;
      }
    }
    if (cells.size() != width)
      throw RaggedRows("row " + std::to_string(lineno) + " has " + std::to_string(cells.size()) + " fields, expected " +
                       std::to_string(width));
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      const std::string where = "row " + std::to_string(lineno) + ", column " + std::to_string(c + 1);
      switch (parse_cell(cells[c], row[c])) {
        case CellKind::number:
          break;
        case CellKind::blank:
          throw ParseError("blank cell at " + where);
        case CellKind::nonfinite:
          throw ParseError("non-finite value '" + std::string(cells[c]) + "' at " + where);
        case CellKind::text:
          throw ParseError("non-numeric value '" + std::string(cells[c]) + "' at " + where);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw EmptyFile("no data rows");
  table.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) table.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return parse_csv(in);
  } catch (const EmptyFile& e) {
    throw EmptyFile(path + ": " + e.what());
  } catch (const RaggedRows& e) {
    throw RaggedRows(path + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

SeriesData ingest_csv(const std::string& path, DataRole role) { return SeriesData(read_csv(path).values, role); }

void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
    out << '\n';
  }
  char buf[32];
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      const auto res = std::to_chars(buf, buf + sizeof buf, values(r, c));
      if (c) out << ',';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

OutputFormat parse_format(std::string_view name) {
  if (name == "json") return OutputFormat::json;
  if (name == "text") return OutputFormat::text;
  if (name == "svg") return OutputFormat::svg;
  throw InvalidConfig("--format must be json, text or svg, got '" + std::string(name) + "'");
}

std::string emit_json(const DetectionResult& result) {
  using nlohmann::ordered_json;
  auto num = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  ordered_json j;
  j["change_points"] = ordered_json::array();
  for (Index c : result.cp_set) j["change_points"].push_back(c);
  j["cost_values"] = ordered_json::array();
  for (double c : result.cost_values) j["cost_values"].push_back(num(c));
  j["parameters"] = ordered_json::array();
  for (const Vector& th : result.thetas) {
    ordered_json row = ordered_json::array();
    for (Index k = 0; k < th.size(); ++k) row.push_back(num(th(k)));
    j["parameters"].push_back(std::move(row));
  }
  j["residuals"] = ordered_json::array();
  if (result.residuals)
    for (Index k = 0; k < result.residuals->size(); ++k) j["residuals"].push_back(num((*result.residuals)(k)));
  return j.dump() + "\n";
}

std::string emit_text(const DetectionResult& result) {
  std::ostringstream out;
  out << "Change points:\n";
  for (std::size_t k = 0; k < result.cp_set.size(); ++k) out << (k ? " " : "") << result.cp_set[k];
  out << "\n\nCost values:\n";
  for (std::size_t k = 0; k < result.cost_values.size(); ++k) out << (k ? " " : "") << short_number(result.cost_values[k]);
  out << "\n";
  if (!result.thetas.empty() && result.thetas.front().size() > 0) {
    out << "\nParameters:\n";
    for (std::size_t s = 0; s < result.thetas.size(); ++s) out << (s ? " " : "  ") << "segment " << s + 1;
    out << "\n";
    const Index d = result.thetas.front().size();
    for (Index k = 0; k < d; ++k) {
      out << k + 1;
      for (const Vector& th : result.thetas) out << " " << (k < th.size() ? short_number(th(k)) : "NA");
      out << "\n";
    }
  }
  return out.str();
}

std::string emit_svg(const DetectionResult& result, const Matrix& values) {
  const double width = 900.0;
  const double margin = 40.0;
  const bool has_res = result.residuals && result.residuals->size() > 0;
  const double panel = 220.0;
  const double height = has_res ? 2.0 * panel + 3.0 * margin : panel + 2.0 * margin;
  const Index T = values.rows();
  const double plot_w = width - 2.0 * margin;
  auto x_of = [&](double t) { return margin + (T > 1 ? t / static_cast<double>(T - 1) : 0.0) * plot_w; };
  auto polyline = [&](const Vector& y, double top, Index shift, const char* color) {
    double lo = y.size() ? y.minCoeff() : 0.0;
    double hi = y.size() ? y.maxCoeff() : 1.0;
    if (!(hi > lo)) {
      lo -= 1.0;
      hi += 1.0;
    }
    std::string pts;
    for (Index i = 0; i < y.size(); ++i) {
      const double px = x_of(static_cast<double>(i + shift));
      const double py = top + panel - (y(i) - lo) / (hi - lo) * panel;
      pts += (i ? " " : "") + svg_number(px) + "," + svg_number(py);
    }
    return std::string("<polyline fill=\"none\" stroke=\"") + color + "\" stroke-width=\"1\" points=\"" + pts + "\"/>\n";
  };
  static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<g class=\"series\">\n";
  for (Index c = 0; c < values.cols(); ++c) out << polyline(values.col(c), margin, 0, colors[c % 6]);
  out << "</g>\n<g class=\"change-points\">\n";
  for (Index cp : result.cp_set) {
    const double px = x_of(static_cast<double>(cp));
    out << "<line class=\"cp\" x1=\"" << svg_number(px) << "\" x2=\"" << svg_number(px) << "\" y1=\"" << margin
        << "\" y2=\"" << height - margin << "\" stroke=\"grey\" stroke-dasharray=\"4,3\"/>\n";
  }
  out << "</g>\n";
  if (has_res) {
    const Vector& r = *result.residuals;
    const double top = 2.0 * margin + panel;
    out << "<g class=\"residuals\">\n"
        << "<text x=\"" << margin << "\" y=\"" << top - 6.0 << "\" font-size=\"12\">Residuals</text>\n"
        << polyline(r, top, std::max<Index>(0, T - r.size()), "#444444") << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string emit(const DetectionResult& result, OutputFormat format, const Matrix& values) {
  switch (format) {
    case OutputFormat::json:
      return emit_json(result);
    case OutputFormat::text:
      return emit_text(result);
    case OutputFormat::svg:
      return emit_svg(result, values);
  }
  return {};
}

}  // namespace seqcpd
