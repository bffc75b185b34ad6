#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>

#include "rgeom/fields.hpp"

namespace rgeom::io {

// Binary MetricField dump, all integers and floats little-endian:
//   char[8]  magic "RGEOMMF1"
//   u32 n, u32 m
//   u64 radial_seed, u64 angular_seed (0 when absent), u32 flags (bit 0: angular present)
//   u32 L, then L bytes of descriptor text "radial=<sched>;angular=<sched>;basis=<id>"
//   per node in row-major grid order (last axis fastest):
//     n f64 b(x), n*n f64 k(x) row-major, n(n+1)/2 f64 upper triangle of g1(x) row-major
inline constexpr char kMetricMagic[8] = {'R', 'G', 'E', 'O', 'M', 'M', 'F', '1'};

void write_metric_dump(const std::filesystem::path& path, const fields::MetricField& field);

struct MetricDump {
  int n = 0;
  int m = 0;
  std::uint64_t radial_seed = 0;
  std::uint64_t angular_seed = 0;
  bool has_angular = false;
  std::string descriptor;
  fields::Matrix b;                     // nodes x n
  std::vector<fields::Matrix> rotation;
  std::vector<fields::Matrix> metric;
};

[[nodiscard]] MetricDump read_metric_dump(const std::filesystem::path& path);

/// Per-field summary used next to binary dumps.
[[nodiscard]] nlohmann::json summarize(const fields::MetricField& field);

/// Lowercase hex SHA-256 of a file's bytes.
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace rgeom::io
