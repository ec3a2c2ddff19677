#include "oddforge/ingestion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oddforge/errors.hpp"
#include "oddforge/numeric_text.hpp"

namespace oddforge {

void ColumnMapping::validate() const {
  if (dimension_columns.empty()) {
    fail(errc::invalid_argument, "mapping needs at least one dimension column");
  }
  std::set<std::string> seen(dimension_columns.begin(), dimension_columns.end());
  if (seen.size() != dimension_columns.size()) {
    fail(errc::invalid_argument, "mapping has duplicate dimension columns");
  }
  if (label_column && seen.count(*label_column)) {
    fail(errc::invalid_argument, "label column also appears as a dimension column");
  }
  if (id_label == ood_label) {
    fail(errc::invalid_argument, "id and ood label values must differ");
  }
}

namespace {

// Splits one CSV record; `pos` starts at the record and ends past its
// terminator. Quoted fields may contain commas, quotes ("" escape) and
// newlines.
std::vector<std::string> read_record(const std::string& text, std::size_t& pos,
                                     std::size_t line_for_errors) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool done = false;
  while (!done) {
    if (pos >= text.size()) {
      if (in_quotes) {
        fail(errc::parse, "row " + std::to_string(line_for_errors) +
                              ": unterminated quoted field");
      }
      break;
    }
    const char c = text[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
        } else {
          in_quotes = false;
          ++pos;
        }
      } else {
        field.push_back(c);
        ++pos;
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        ++pos;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        ++pos;
        break;
      case '\r':
        if (pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
        [[fallthrough]];
      case '\n':
        ++pos;
        done = true;
        break;
      default:
        field.push_back(c);
        ++pos;
        break;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

Dataset parse_csv_text(const std::string& text, const ColumnMapping& mapping) {
  mapping.validate();
  std::string body = text;
  if (body.size() >= 3 && body.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    body.erase(0, 3);
  }
  if (body.empty()) fail(errc::parse, "empty CSV input; a header row is required");

  std::size_t pos = 0;
  std::size_t line = 1;
  const std::vector<std::string> header = read_record(body, pos, line);

  std::vector<std::size_t> dim_index(mapping.dimension_columns.size());
  for (std::size_t d = 0; d < mapping.dimension_columns.size(); ++d) {
    const std::string& name = mapping.dimension_columns[d];
    std::size_t found = header.size();
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == name) {
        if (found != header.size()) {
          fail(errc::parse, "mapped column '" + name + "' appears twice in the header");
        }
        found = h;
      }
    }
    if (found == header.size()) {
      fail(errc::parse, "mapped column '" + name + "' is missing from the header");
    }
    dim_index[d] = found;
  }
  std::size_t label_index = header.size();
  if (mapping.label_column) {
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == *mapping.label_column) {
        if (label_index != header.size()) {
          fail(errc::parse,
               "label column '" + *mapping.label_column + "' appears twice in the header");
        }
        label_index = h;
      }
    }
    if (label_index == header.size()) {
      fail(errc::parse,
           "label column '" + *mapping.label_column + "' is missing from the header");
    }
  }

  Dataset ds;
  ds.dimension = mapping.dimension_columns.size();
  ds.dimension_names = mapping.dimension_columns;
  while (pos < body.size()) {
    ++line;
    const std::size_t record_line = line;
    const std::vector<std::string> fields = read_record(body, pos, record_line);
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    if (fields.size() != header.size()) {
      fail(errc::parse, "row " + std::to_string(record_line) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    Point p(ds.dimension);
    for (std::size_t d = 0; d < ds.dimension; ++d) {
      const std::string& cell = fields[dim_index[d]];
      if (!parse_real(cell, p[d])) {
        fail(errc::parse, "row " + std::to_string(record_line) + ", column '" +
                              mapping.dimension_columns[d] +
                              "': not a finite number: '" + cell + "'");
      }
    }
    bool ood = false;
    if (label_index != header.size()) {
      const std::string& label = fields[label_index];
      if (label == mapping.ood_label) {
        ood = true;
      } else if (label != mapping.id_label) {
        fail(errc::parse, "row " + std::to_string(record_line) + ", column '" +
                              *mapping.label_column + "': unknown label '" + label +
                              "' (expected '" + mapping.id_label + "' or '" +
                              mapping.ood_label + "')");
      }
    }
    (ood ? ds.ood_samples : ds.id_samples).push_back(std::move(p));
  }
  ds.validate();
  return ds;
}

Dataset parse_csv(const std::string& path, const ColumnMapping& mapping) {
  return parse_csv_text(read_file(path), mapping);
}

namespace {

using json = nlohmann::json;

}  // namespace

Dataset parse_openlabel_text(const std::string& text, const ColumnMapping& mapping,
                             OpenLabelMode mode, OpenLabelStats* stats) {
  mapping.validate();
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(errc::parse, std::string("OpenLABEL: ") + e.what());
  }
  if (!root.is_object() || !root.contains("openlabel") ||
      !root["openlabel"].is_object() || !root["openlabel"].contains("frames") ||
      !root["openlabel"]["frames"].is_object()) {
    fail(errc::parse, "OpenLABEL: expected a top-level 'openlabel.frames' object");
  }

  Dataset ds;
  ds.dimension = mapping.dimension_columns.size();
  ds.dimension_names = mapping.dimension_columns;
  OpenLabelStats local;

  for (const auto& [frame_id, frame] : root["openlabel"]["frames"].items()) {
    ++local.frames_total;
    if (!frame.is_object()) {
      fail(errc::parse, "OpenLABEL frame '" + frame_id + "' is not an object");
    }
    // gather name -> val across the frame's objects
    std::map<std::string, double> values;
    if (frame.contains("objects")) {
      if (!frame["objects"].is_object()) {
        fail(errc::parse, "OpenLABEL frame '" + frame_id + "': 'objects' must be an object");
      }
      for (const auto& [object_id, object] : frame["objects"].items()) {
        if (!object.is_object() || !object.contains("object_data")) continue;
        const auto& od = object["object_data"];
        if (!od.is_object() || !od.contains("num")) continue;
        if (!od["num"].is_array()) {
          fail(errc::parse, "OpenLABEL frame '" + frame_id + "', object '" + object_id +
                                "': 'num' must be an array");
        }
        for (const auto& entry : od["num"]) {
          if (!entry.is_object() || !entry.contains("name") || !entry.contains("val") ||
              !entry["name"].is_string() || !entry["val"].is_number()) {
            fail(errc::parse, "OpenLABEL frame '" + frame_id +
                                  "': each num entry needs a string 'name' and numeric 'val'");
          }
          const std::string name = entry["name"].get<std::string>();
          const double val = entry["val"].get<double>();
          if (!std::isfinite(val)) {
            fail(errc::parse, "OpenLABEL frame '" + frame_id + "': attribute '" + name +
                                  "' is not finite");
          }
          if (!values.emplace(name, val).second) {
            fail(errc::parse, "OpenLABEL frame '" + frame_id +
                                  "': duplicate attribute name '" + name + "'");
          }
        }
      }
    }

    Point p(ds.dimension);
    bool complete = true;
    for (std::size_t d = 0; d < ds.dimension; ++d) {
      auto it = values.find(mapping.dimension_columns[d]);
      if (it == values.end()) {
        if (mode == OpenLabelMode::Strict) {
          fail(errc::parse, "OpenLABEL frame '" + frame_id + "': missing attribute '" +
                                mapping.dimension_columns[d] + "'");
        }
        complete = false;
        break;
      }
      p[d] = it->second;
    }
    if (!complete) {
      ++local.frames_skipped;
      continue;
    }

    bool ood = false;
    if (frame.contains("frame_properties") && frame["frame_properties"].is_object() &&
        frame["frame_properties"].contains("ood")) {
      const auto& flag = frame["frame_properties"]["ood"];
      if (!flag.is_boolean()) {
        fail(errc::parse,
             "OpenLABEL frame '" + frame_id + "': 'ood' property must be a boolean");
      }
      ood = flag.get<bool>();
    }
    (ood ? ds.ood_samples : ds.id_samples).push_back(std::move(p));
    ++local.frames_used;
  }

  if (stats) *stats = local;
  ds.validate();
  return ds;
}

Dataset parse_openlabel(const std::string& path, const ColumnMapping& mapping,
                        OpenLabelMode mode, OpenLabelStats* stats) {
  return parse_openlabel_text(read_file(path), mapping, mode, stats);
}

namespace {

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_cell(std::string& out, const Cell& cell) {
  if (std::holds_alternative<double>(cell)) {
    out += format_real(std::get<double>(cell));
    return;
  }
  if (std::holds_alternative<long long>(cell)) {
    out += format_int(std::get<long long>(cell));
    return;
  }
  const std::string& s = std::get<std::string>(cell);
  if (!needs_quoting(s)) {
    out += s;
    return;
  }
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

}  // namespace

void write_table(const std::string& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<Cell>>& rows) {
  if (columns.empty()) fail(errc::invalid_argument, "table needs at least one column");
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out.push_back(',');
    write_cell(out, Cell(columns[c]));
  }
  out.push_back('\n');
  for (const auto& row : rows) {
    if (row.size() != columns.size()) {
      fail(errc::invalid_argument, "table row width does not match column count");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(',');
      write_cell(out, row[c]);
    }
    out.push_back('\n');
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(errc::io, "cannot open file for writing: " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  file.flush();
  if (!file) fail(errc::io, "failed writing file: " + path);
}

void write_dataset_csv(const Dataset& ds, const std::string& path,
                       const std::string& label_column) {
  ds.validate();
  std::vector<std::string> columns;
  if (!ds.dimension_names.empty()) {
    columns = ds.dimension_names;
  } else {
    for (std::size_t k = 0; k < ds.dimension; ++k) {
      columns.push_back("x" + std::to_string(k));
    }
  }
  columns.push_back(label_column);
  std::vector<std::vector<Cell>> rows;
  rows.reserve(ds.id_samples.size() + ds.ood_samples.size());
  auto emit = [&](const std::vector<Point>& pts, const char* label) {
    for (const auto& p : pts) {
      std::vector<Cell> row;
      row.reserve(ds.dimension + 1);
      for (double v : p) row.emplace_back(v);
      row.emplace_back(std::string(label));
      rows.push_back(std::move(row));
    }
  };
  emit(ds.id_samples, "id");
  emit(ds.ood_samples, "ood");
  write_table(path, columns, rows);
}

}  // namespace oddforge
