#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "agrieval/errors.hpp"

namespace agrieval::detail {

using nlohmann::json;

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path,
                            std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

// Parses JSON text, reporting the line of any syntax error. NaN/Infinity are
// not valid JSON and are rejected by the parser.
inline json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line =
        1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw FormatError(std::string(what) + ": line " + std::to_string(line) +
                      ": " + e.what());
  }
}

inline const json& require(const json& obj, const char* key,
                           const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError(where + ": missing field '" + key + "'");
  }
  return *it;
}

inline std::string get_string(const json& obj, const char* key,
                              const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_string()) {
    throw FormatError(where + "." + key + ": expected a string");
  }
  return v.get<std::string>();
}

inline double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw FormatError(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw FormatError(where + ": number is not finite");
  return d;
}

inline std::uint64_t as_uint(const json& v, const std::string& where,
                             std::uint64_t max) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() &&
                                 v.get<std::int64_t>() < 0)) {
    throw FormatError(where + ": expected a non-negative integer");
  }
  const auto u = v.get<std::uint64_t>();
  if (u > max) throw FormatError(where + ": value " + std::to_string(u) + " too large");
  return u;
}

inline const json& get_array(const json& obj, const char* key,
                             const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_array()) throw FormatError(where + "." + key + ": expected an array");
  return v;
}

inline void check_version(const json& root, const std::string& what) {
  const json& v = require(root, "version", what);
  if (!v.is_number_integer() || v.get<std::int64_t>() != 1) {
    throw FormatError(what + ": unsupported version " + v.dump());
  }
}

}  // namespace agrieval::detail
