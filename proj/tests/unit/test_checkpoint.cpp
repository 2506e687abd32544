#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "gdp/checkpoint.hpp"
#include "gdp/netgdp.hpp"
#include "support.hpp"

using namespace gdp;

namespace {

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gdp_ckpt_" + name);
}

}  // namespace

TEST_CASE("checkpoint round trip is bit exact") {
  auto net = netgdp::init_network(10, harmonics::SphereDim(4), 0.7, 0xfedcba9876543210ULL);
  net.w(3, 1) = -0.0;
  net.w_aug << 1e-300, -2.5, 3.0, 0.0, 1.0 / 3.0, 7.0, -1e300, 0.125, 9.0, 10.0;
  net.step = 42;
  const auto path = scratch("roundtrip.bin");
  checkpoint::save(net, path);
  const auto back = checkpoint::load(path);
  CHECK(back.m() == 10);
  CHECK(back.d() == 4);
  CHECK(back.kappa == 0.7);
  CHECK(back.seed == 0xfedcba9876543210ULL);
  CHECK(back.step == 42);
  CHECK(std::memcmp(back.w.data(), net.w.data(), sizeof(double) * net.w.size()) == 0);
  CHECK(back.w_aug == net.w_aug);
  CHECK(back.a == net.a);
  CHECK(back.w0 == net.w0);
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint layout: magic and little-endian header length") {
  const auto net = netgdp::init_network(2, harmonics::SphereDim(3), 1.0, 1);
  const auto path = scratch("layout.bin");
  checkpoint::save(net, path);
  std::ifstream is(path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(is)), {});
  REQUIRE(bytes.size() > 16);
  CHECK(bytes.substr(0, 8) == std::string("GDPCKPT\0", 8));
  std::uint64_t h = 0;
  for (int i = 0; i < 8; ++i) h |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
  CHECK(bytes[16] == '{');
  CHECK(bytes.size() == 16 + h + 8 * (2 * 3 + 2 + 2 + 2 * 3));
  std::filesystem::remove(path);
}

TEST_CASE("malformed checkpoints raise Io") {
  const auto net = netgdp::init_network(4, harmonics::SphereDim(3), 1.0, 1);
  const auto good = scratch("good.bin");
  checkpoint::save(net, good);
  std::ifstream is(good, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(is)), {});

  const auto bad = scratch("bad.bin");
  auto write_bytes = [&](const std::string& b) {
    std::ofstream os(bad, std::ios::binary | std::ios::trunc);
    os.write(b.data(), static_cast<std::streamsize>(b.size()));
  };
  write_bytes("NOTACKPT" + bytes.substr(8));
  CHECK(test::code_of([&] { checkpoint::load(bad); }) == Errc::Io);
  write_bytes(bytes.substr(0, bytes.size() - 5));
  CHECK(test::code_of([&] { checkpoint::load(bad); }) == Errc::Io);
  write_bytes(bytes.substr(0, 12));
  CHECK(test::code_of([&] { checkpoint::load(bad); }) == Errc::Io);
  std::string broken = bytes;
  broken[16] = 'x';
  write_bytes(broken);
  CHECK(test::code_of([&] { checkpoint::load(bad); }) == Errc::Io);

  CHECK(test::code_of([&] { checkpoint::load(scratch("missing.bin")); }) == Errc::Io);
  CHECK(test::code_of([&] { checkpoint::save(net, "/nonexistent-dir/x.bin"); }) == Errc::Io);
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}
