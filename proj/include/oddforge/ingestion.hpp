#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oddforge/kernel.hpp"

namespace oddforge {

struct ColumnMapping {
  std::vector<std::string> dimension_columns;
  std::optional<std::string> label_column;
  std::string id_label = "id";
  std::string ood_label = "ood";

  void validate() const;
};

// RFC-4180-style CSV with a header row. Mapped dimension cells must parse
// as finite reals; the optional label column routes rows to ID or OOD
// (no label column means every row is ID). Errors carry the file row and
// column name. Unmapped columns are ignored.
Dataset parse_csv(const std::string& path, const ColumnMapping& mapping);
Dataset parse_csv_text(const std::string& text, const ColumnMapping& mapping);

enum class OpenLabelMode { Strict, Lenient };

struct OpenLabelStats {
  std::size_t frames_total = 0;
  std::size_t frames_used = 0;
  std::size_t frames_skipped = 0;
};

// Pragmatic ASAM-OpenLABEL subset: each frame yields one point. Mapped
// values are read from `objects.*.object_data.num` name/val entries
// searched across the frame's objects; the frame-level boolean
// `frame_properties.ood` routes the point (absent means ID). Frames
// missing a mapped name are an error in Strict mode and a counted skip in
// Lenient mode.
Dataset parse_openlabel(const std::string& path, const ColumnMapping& mapping,
                        OpenLabelMode mode, OpenLabelStats* stats = nullptr);
Dataset parse_openlabel_text(const std::string& text, const ColumnMapping& mapping,
                             OpenLabelMode mode, OpenLabelStats* stats = nullptr);

using Cell = std::variant<std::string, double, long long>;

// CSV writer used for every emitted table: LF line endings, reals in
// shortest round-trip form, quoting only where RFC 4180 requires it.
// Output bytes depend only on the given rows.
void write_table(const std::string& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<Cell>>& rows);

void write_dataset_csv(const Dataset& ds, const std::string& path,
                       const std::string& label_column = "label");

}  // namespace oddforge
