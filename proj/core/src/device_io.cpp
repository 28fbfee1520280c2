#include "incompat/device_io.hpp"

#include <fstream>
#include <sstream>

#include "incompat/errors.hpp"

namespace incompat {

namespace {

using nlohmann::json;

const json& field(const json& j, const char* key) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::size_t dimension_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() <= 0) {
    throw ParseError(std::string("field \"") + key + "\" must be a positive integer");
  }
  return v.get<std::size_t>();
}

CMatrix sized_matrix(const json& j, std::size_t dim, const char* what) {
  CMatrix m = matrix_from_json(j);
  if (m.dim() != dim) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(dim) + "x" + std::to_string(dim) +
                         " matrix, got dimension " + std::to_string(m.dim()));
  }
  return m;
}

}  // namespace

nlohmann::json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < m.dim(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ParseError("matrix must be a nonempty array of rows");
  const std::size_t n = j.size();
  std::vector<Complex> entries;
  entries.reserve(n * n);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != n) throw ParseError("matrix must be square");
    for (const auto& z : row) {
      if (z.is_number()) {
        entries.emplace_back(z.get<double>(), 0.0);
      } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
        entries.emplace_back(z[0].get<double>(), z[1].get<double>());
      } else {
        throw ParseError("matrix entries must be [re, im] pairs");
      }
    }
  }
  return CMatrix(n, std::move(entries));
}

nlohmann::json to_json(const Povm& m) {
  json effects = json::array();
  for (const auto& e : m.effects()) effects.push_back(matrix_to_json(e));
  return {{"dim", m.dim()}, {"effects", effects}};
}

nlohmann::json to_json(const ChannelChoi& e) {
  return {{"din", e.din()}, {"dout", e.dout()}, {"choi", matrix_to_json(e.choi())}};
}

nlohmann::json to_json(const Instrument& g) {
  json blocks = json::array();
  for (const auto& b : g.blocks()) blocks.push_back(matrix_to_json(b));
  return {{"din", g.din()}, {"dout", g.dout()}, {"blocks", blocks}};
}

nlohmann::json to_json(const JointObservable& g) {
  json grid = json::array();
  for (std::size_t j = 0; j < g.rows(); ++j) {
    json row = json::array();
    for (std::size_t k = 0; k < g.cols(); ++k) row.push_back(matrix_to_json(g(j, k)));
    grid.push_back(std::move(row));
  }
  return {{"dim", g.dim()}, {"grid", grid}};
}

Povm povm_from_json(const nlohmann::json& j) {
  const std::size_t dim = dimension_field(j, "dim");
  const json& arr = field(j, "effects");
  if (!arr.is_array() || arr.empty()) throw ParseError("\"effects\" must be a nonempty array");
  std::vector<CMatrix> effects;
  for (const auto& e : arr) effects.push_back(sized_matrix(e, dim, "effect"));
  return Povm(dim, std::move(effects));
}

ChannelChoi channel_from_json(const nlohmann::json& j) {
  const std::size_t din = dimension_field(j, "din");
  const std::size_t dout = dimension_field(j, "dout");
  return ChannelChoi(din, dout, sized_matrix(field(j, "choi"), din * dout, "choi"));
}

Instrument instrument_from_json(const nlohmann::json& j) {
  const std::size_t din = dimension_field(j, "din");
  const std::size_t dout = dimension_field(j, "dout");
  const json& arr = field(j, "blocks");
  if (!arr.is_array() || arr.empty()) throw ParseError("\"blocks\" must be a nonempty array");
  std::vector<CMatrix> blocks;
  for (const auto& b : arr) blocks.push_back(sized_matrix(b, din * dout, "block"));
  return Instrument(din, dout, std::move(blocks));
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace incompat
