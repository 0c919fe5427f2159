#pragma once
// Field export/import: <prefix>.bin holds little-endian float64 values in cell
// index order, <prefix>.json describes the grid and carries free-form extras.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hha/field.hpp"

namespace hha {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline nlohmann::json point_to_json(const Point1& p) { return {p.x[0], p.x[1], p.t}; }

inline Point1 point_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw DimensionError("a point in H^1 needs three coordinates");
  return make_point1(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

inline nlohmann::json ball_to_json(const Ball1& b) {
  return {{"center", point_to_json(b.center)}, {"radius", b.radius}};
}

inline Ball1 ball_from_json(const nlohmann::json& j) {
  return Ball1(point_from_json(j.at("center")), j.at("radius").get<double>());
}

inline nlohmann::json gridspec_to_json(const GridSpec& s) {
  return {{"Lx", s.Lx}, {"Lt", s.Lt}, {"hx", s.hx}, {"ht", s.ht}, {"offset", point_to_json(s.offset)}};
}

inline GridSpec gridspec_from_json(const nlohmann::json& j) {
  GridSpec s;
  s.Lx = j.at("Lx").get<double>();
  s.Lt = j.at("Lt").get<double>();
  s.hx = j.at("hx").get<double>();
  s.ht = j.at("ht").get<double>();
  if (j.contains("offset")) s.offset = point_from_json(j.at("offset"));
  s.validate();
  return s;
}

namespace detail {

inline std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int k = 0; k < 8; ++k) r |= ((v >> (8 * k)) & 0xffu) << (8 * (7 - k));
    return r;
  }
}

}  // namespace detail

inline void write_field(const Field& f, const std::filesystem::path& prefix, const nlohmann::json& extra = {}) {
  const auto bin = std::filesystem::path(prefix.string() + ".bin");
  const auto meta = std::filesystem::path(prefix.string() + ".json");
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw IoError("cannot write " + bin.string());
  for (double v : f.values()) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    u = detail::to_little(u);
    out.write(reinterpret_cast<const char*>(&u), 8);
  }
  if (!out) throw IoError("short write to " + bin.string());

  const auto shape = f.grid().shape();
  nlohmann::json j = {{"format", "hha-field"},
                      {"version", 1},
                      {"dtype", "float64"},
                      {"endianness", "little"},
                      {"shape", {shape[0], shape[1], shape[2]}},
                      {"order", "x1,x2,t (t fastest)"},
                      {"grid", gridspec_to_json(f.spec())},
                      {"values_file", bin.filename().string()}};
  j["support_hint"] = f.support_hint() ? ball_to_json(*f.support_hint()) : nlohmann::json(nullptr);
  if (!extra.is_null()) j["extra"] = extra;
  std::ofstream m(meta);
  if (!m) throw IoError("cannot write " + meta.string());
  m << j.dump(2) << '\n';
}

struct LoadedField {
  Field field;
  nlohmann::json extra;
};

inline LoadedField read_field(const std::filesystem::path& prefix) {
  const auto meta = std::filesystem::path(prefix.string() + ".json");
  std::ifstream m(meta);
  if (!m) throw IoError("cannot read " + meta.string());
  const auto j = nlohmann::json::parse(m);
  if (j.value("format", "") != "hha-field" || j.value("dtype", "") != "float64" ||
      j.value("endianness", "") != "little")
    throw IoError(meta.string() + " is not a little-endian float64 field sidecar");
  const Grid grid(gridspec_from_json(j.at("grid")));
  const auto shape = j.at("shape").get<std::array<int, 3>>();
  if (shape != grid.shape()) throw DimensionError("sidecar shape does not match its grid");

  const auto bin = std::filesystem::path(prefix.string() + ".bin");
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw IoError("cannot read " + bin.string());
  std::vector<double> v(grid.size());
  for (double& x : v) {
    std::uint64_t u = 0;
    in.read(reinterpret_cast<char*>(&u), 8);
    if (!in) throw IoError(bin.string() + " is shorter than its declared shape");
    u = detail::to_little(u);
    std::memcpy(&x, &u, 8);
  }
  std::optional<Ball1> hint;
  if (j.contains("support_hint") && !j["support_hint"].is_null()) hint = ball_from_json(j["support_hint"]);
  return {Field(grid, std::move(v), hint), j.value("extra", nlohmann::json{})};
}

}  // namespace hha
