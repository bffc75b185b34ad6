#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "rgeom/errors.hpp"
#include "rgeom/io.hpp"

using namespace rgeom;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rgeom-test-io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Sha256, KnownVectors) {
  const auto empty = scratch("empty.txt");
  io::write_text(empty, "");
  EXPECT_EQ(io::sha256_file(empty), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const auto abc = scratch("abc.txt");
  io::write_text(abc, "abc");
  EXPECT_EQ(io::sha256_file(abc), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(MetricDump, RoundTrip) {
  const auto basis = spectrum::torus_basis_through(3, 4);
  const fields::GridSpec grid(3, 10);
  const auto sched = spectrum::DecaySchedule::power_law(2.0);
  const auto r = fields::sample_radial(basis, sched, grid, 31);
  const auto a = fields::sample_angular(basis, sched, grid, 32);
  const auto m = fields::assemble_metric(r, &a);
  const auto path = scratch("metric.bin");
  io::write_metric_dump(path, m);

  std::ifstream in(path, std::ios::binary);
  char magic[8];
  in.read(magic, 8);
  EXPECT_EQ(std::string(magic, 8), "RGEOMMF1");

  const auto d = io::read_metric_dump(path);
  EXPECT_EQ(d.n, 3);
  EXPECT_EQ(d.m, 10);
  EXPECT_EQ(d.radial_seed, 31u);
  EXPECT_EQ(d.angular_seed, 32u);
  EXPECT_TRUE(d.has_angular);
  EXPECT_NE(d.descriptor.find("power:s=2"), std::string::npos);
  EXPECT_TRUE(d.b == m.b);
  ASSERT_EQ(d.metric.size(), grid.node_count());
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    EXPECT_TRUE(d.metric[p] == m.g1[p].matrix());
    EXPECT_TRUE(d.rotation[p] == m.rotation[p]);
  }
}

TEST(MetricDump, RejectsGarbage) {
  const auto path = scratch("garbage.bin");
  io::write_text(path, "not a metric dump");
  try {
    (void)io::read_metric_dump(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(Summary, Fields) {
  const auto basis = spectrum::torus_basis_through(3, 2);
  const fields::GridSpec grid(3, 8);
  const auto r = fields::sample_radial(basis, spectrum::DecaySchedule::heat_kernel(0.5), grid, 2);
  const auto s = io::summarize(fields::assemble_metric(r));
  EXPECT_TRUE(s.contains("omega2_sq"));
  EXPECT_TRUE(s.contains("rho_hat"));
  EXPECT_LE(s["max_det_error"].get<double>(), 1e-9);
}
