#include "lipfit/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lipfit/error.hpp"

namespace lipfit {

using nlohmann::json;

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(std::ostream& os, const ScalarField& field, const std::string& provenance) {
  const Grid& g = field.grid();
  if (g.dim() != 1) fail(ErrorCode::InvalidArgument, "CSV output is for 1D fields");
  if (!provenance.empty()) os << "# provenance: " << provenance << '\n';
  os << "x,value\n";
  for (NodeId v = 0; v < field.size(); ++v)
    os << format_double(g.coord(v).x) << ',' << format_double(field[v]) << '\n';
}

namespace {

double parse_double(const std::string& text, std::size_t line) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    fail(ErrorCode::Parse, "bad number '" + text + "' on line " + std::to_string(line));
  return v;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t k = 0;
  while (k < s.size() && s[k] == ' ') ++k;
  return s.substr(k);
}

}  // namespace

ScalarField read_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<double> xs, vs;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "x,value") fail(ErrorCode::Parse, "expected header 'x,value'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorCode::Parse, "missing comma on line " + std::to_string(lineno));
    xs.push_back(parse_double(trim(line.substr(0, comma)), lineno));
    vs.push_back(parse_double(trim(line.substr(comma + 1)), lineno));
  }
  if (!header) fail(ErrorCode::Parse, "empty CSV");
  if (xs.size() < 3) fail(ErrorCode::Parse, "need at least 3 rows");
  auto grid = Grid::line(xs.front(), xs.back(), static_cast<int>(xs.size()));
  const double tol = 1e-9 * grid->spacing(0);
  for (NodeId v = 0; v < xs.size(); ++v)
    if (std::abs(grid->coord(v).x - xs[v]) > tol)
      fail(ErrorCode::Parse, "x column is not a uniform grid");
  return ScalarField(std::move(grid), std::move(vs));
}

json field_to_json(const ScalarField& field) {
  const Grid& g = field.grid();
  json doc;
  doc["dim"] = g.dim();
  json extent = json::array();
  json n = json::array();
  json h = json::array();
  for (int a = 0; a < g.dim(); ++a) {
    extent.push_back({g.extent(a).lo, g.extent(a).hi});
    n.push_back(g.count(a));
    h.push_back(g.spacing(a));
  }
  doc["extent"] = extent;
  doc["n"] = n;
  doc["h"] = h;
  if (g.dim() == 2) doc["stencil"] = static_cast<int>(g.stencil());
  json mask = json::array();
  json values = json::array();
  for (std::size_t k = 0; k < g.lattice_size(); ++k) {
    mask.push_back(static_cast<int>(g.lattice_mask()[k]));
    const long i = static_cast<long>(k % g.count(0));
    const long j = static_cast<long>(k / g.count(0));
    const long v = g.node_at(i, j);
    if (v < 0)
      values.push_back(nullptr);
    else
      values.push_back(field[static_cast<std::size_t>(v)]);
  }
  doc["mask"] = std::move(mask);
  doc["values"] = std::move(values);
  return doc;
}

ScalarField field_from_json(const json& doc) {
  try {
    const int dim = doc.at("dim").get<int>();
    const auto& extent = doc.at("extent");
    const auto& n = doc.at("n");
    GridPtr grid;
    if (dim == 1) {
      grid = Grid::line(extent.at(0).at(0).get<double>(), extent.at(0).at(1).get<double>(),
                        n.at(0).get<int>());
    } else if (dim == 2) {
      std::vector<std::uint8_t> bits;
      for (const auto& b : doc.at("mask")) bits.push_back(b.get<int>() ? 1 : 0);
      const auto stencil = doc.value("stencil", 8) == 16 ? Stencil::Sixteen : Stencil::Eight;
      grid = Grid::plane({extent.at(0).at(0).get<double>(), extent.at(0).at(1).get<double>()},
                         {extent.at(1).at(0).get<double>(), extent.at(1).at(1).get<double>()},
                         n.at(0).get<int>(), n.at(1).get<int>(), MaskSpec::from_bitmap(std::move(bits)),
                         stencil);
    } else {
      fail(ErrorCode::Parse, "dim must be 1 or 2");
    }
    const auto& values = doc.at("values");
    if (values.size() != grid->lattice_size())
      fail(ErrorCode::Parse, "values array does not cover the lattice");
    std::vector<double> out(grid->node_count());
    for (NodeId v = 0; v < out.size(); ++v) {
      const auto& item = values.at(grid->lattice_index(v));
      if (!item.is_number()) fail(ErrorCode::Parse, "masked node without a numeric value");
      out[v] = item.get<double>();
    }
    return ScalarField(std::move(grid), std::move(out));
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  os << text;
  if (!os) fail(ErrorCode::Io, "write failed for " + path.string());
}

void save_field(const std::filesystem::path& path, const ScalarField& field, FieldFormat format,
                const std::string& provenance, const json& extra) {
  std::ostringstream os;
  if (format == FieldFormat::Csv) {
    write_csv(os, field, provenance);
  } else {
    json doc = field_to_json(field);
    if (!provenance.empty()) doc["provenance"] = json::parse(provenance);
    for (auto it = extra.begin(); it != extra.end(); ++it) doc[it.key()] = it.value();
    os << doc.dump() << '\n';
  }
  write_text_file(path, os.str());
}

ScalarField load_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::Io, "cannot open " + path.string());
  if (path.extension() == ".json") {
    try {
      return field_from_json(json::parse(is));
    } catch (const json::exception& e) {
      fail(ErrorCode::Parse, e.what());
    }
  }
  return read_csv(is);
}

}  // namespace lipfit
