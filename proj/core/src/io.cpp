#include "rgeom/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <memory>

#include "rgeom/distances.hpp"
#include "rgeom/errors.hpp"

namespace rgeom::io {
namespace {

template <typename T>
void put(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  std::array<char, sizeof(T)> bytes;
  if (!in.read(bytes.data(), sizeof(T))) throw Error(ErrorCode::IoError, "truncated metric dump");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

std::string descriptor_of(const fields::MetricField& f) {
  return "radial=" + f.provenance.radial_schedule + ";angular=" +
         (f.provenance.angular_seed ? f.provenance.angular_schedule : std::string("none")) +
         ";basis=" + f.provenance.basis_id;
}

}  // namespace

void write_metric_dump(const std::filesystem::path& path, const fields::MetricField& field) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  const int n = field.grid.dim();
  out.write(kMetricMagic, sizeof kMetricMagic);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid.per_axis()));
  put<std::uint64_t>(out, field.provenance.radial_seed);
  put<std::uint64_t>(out, field.provenance.angular_seed.value_or(0));
  put<std::uint32_t>(out, field.provenance.angular_seed ? 1U : 0U);
  const std::string desc = descriptor_of(field);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(desc.size()));
  out.write(desc.data(), static_cast<std::streamsize>(desc.size()));
  for (std::size_t p = 0; p < field.g1.size(); ++p) {
    const auto row = static_cast<Eigen::Index>(p);
    for (int i = 0; i < n; ++i) put<double>(out, field.b(row, i));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) put<double>(out, field.rotation[p](i, j));
    }
    const auto& g = field.g1[p].matrix();
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) put<double>(out, g(i, j));
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

MetricDump read_metric_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMetricMagic, sizeof magic) != 0) {
    throw Error(ErrorCode::IoError, "not an rgeom metric dump: " + path.string());
  }
  MetricDump d;
  d.n = static_cast<int>(get<std::uint32_t>(in));
  d.m = static_cast<int>(get<std::uint32_t>(in));
  d.radial_seed = get<std::uint64_t>(in);
  d.angular_seed = get<std::uint64_t>(in);
  d.has_angular = (get<std::uint32_t>(in) & 1U) != 0;
  const auto len = get<std::uint32_t>(in);
  d.descriptor.resize(len);
  if (!in.read(d.descriptor.data(), len)) throw Error(ErrorCode::IoError, "truncated descriptor");
  const fields::GridSpec grid(d.n, d.m);
  const int n = d.n;
  d.b.resize(static_cast<Eigen::Index>(grid.node_count()), n);
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    for (int i = 0; i < n; ++i) d.b(static_cast<Eigen::Index>(p), i) = get<double>(in);
    fields::Matrix k(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) k(i, j) = get<double>(in);
    }
    fields::Matrix g(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) g(i, j) = g(j, i) = get<double>(in);
    }
    d.rotation.push_back(std::move(k));
    d.metric.push_back(std::move(g));
  }
  return d;
}

nlohmann::json summarize(const fields::MetricField& field) {
  double max_det_err = 0.0;
  for (const auto& g : field.g1) max_det_err = std::max(max_det_err, std::abs(g.matrix().determinant() - 1.0));
  nlohmann::json j = {
      {"n", field.grid.dim()},
      {"m", field.grid.per_axis()},
      {"radial_seed", field.provenance.radial_seed},
      {"radial_schedule", field.provenance.radial_schedule},
      {"basis", field.provenance.basis_id},
      {"grid", field.provenance.grid_id},
      {"omega2_sq", field.b.squaredNorm() * field.grid.weight()},
      {"rho_hat", distances::lipschitz_rho_values(field.b)},
      {"max_abs_b", field.b.cwiseAbs().maxCoeff()},
      {"max_det_error", max_det_err},
  };
  if (field.provenance.angular_seed) {
    j["angular_seed"] = *field.provenance.angular_seed;
    j["angular_schedule"] = field.provenance.angular_schedule;
  }
  return j;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xF]);
  }
  return hex;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

}  // namespace rgeom::io
