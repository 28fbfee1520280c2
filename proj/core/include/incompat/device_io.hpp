#pragma once

// JSON encoding of devices. Complex numbers are [re, im] pairs and matrices
// are row-major arrays of rows:
//   observable  {"dim": d, "effects": [M_0, M_1, ...]}
//   channel     {"din": d, "dout": d', "choi": J}
//   instrument  {"din": d, "dout": d', "blocks": [J_0, J_1, ...]}
// Malformed documents raise ParseError; well-formed but invalid devices raise
// the usual validation errors.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "incompat/devices.hpp"

namespace incompat {

nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Povm& m);
nlohmann::json to_json(const ChannelChoi& e);
nlohmann::json to_json(const Instrument& g);
nlohmann::json to_json(const JointObservable& g);

Povm povm_from_json(const nlohmann::json& j);
ChannelChoi channel_from_json(const nlohmann::json& j);
Instrument instrument_from_json(const nlohmann::json& j);

/// Parses a file into JSON; ParseError on I/O or syntax failure.
nlohmann::json read_json_file(const std::filesystem::path& path);
/// Writes `j` with two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace incompat
