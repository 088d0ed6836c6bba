#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipfit/grid.hpp"

namespace lipfit {

enum class FieldFormat { Csv, Json };

// 17-significant-digit decimal rendering; parses back to the same double.
std::string format_double(double value);

// 1D fields as `x,value` CSV. A non-empty provenance string is written as a
// leading `# provenance: <json>` comment line, which the reader skips.
void write_csv(std::ostream& os, const ScalarField& field, const std::string& provenance = {});
ScalarField read_csv(std::istream& is);

// Grid + values as a JSON object: {dim, extent, n, h, stencil, mask, values}
// with row-major lattice arrays and null outside the mask.
nlohmann::json field_to_json(const ScalarField& field);
ScalarField field_from_json(const nlohmann::json& doc);

// Dispatch on format; JSON output gets `provenance` (parsed) and any extra
// top-level members merged in.
void save_field(const std::filesystem::path& path, const ScalarField& field, FieldFormat format,
                const std::string& provenance = {},
                const nlohmann::json& extra = nlohmann::json::object());
ScalarField load_field(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lipfit
