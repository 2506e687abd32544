#include "gdp/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "gdp/error.hpp"

namespace gdp::checkpoint {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'D', 'P', 'C', 'K', 'P', 'T', '\0'};

void write_u64(std::ostream& os, std::uint64_t v) {
  std::array<unsigned char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

std::uint64_t read_u64(std::istream& is) {
  std::array<unsigned char, 8> bytes{};
  is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

void write_doubles(std::ostream& os, const double* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) write_u64(os, std::bit_cast<std::uint64_t>(data[i]));
}

void read_doubles(std::istream& is, double* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) data[i] = std::bit_cast<double>(read_u64(is));
}

// Eigen matrices are column-major; the file stores row-major.
void write_matrix(std::ostream& os, const Matrix& m) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  write_doubles(os, rm.data(), static_cast<std::size_t>(rm.size()));
}

Matrix read_matrix(std::istream& is, int rows, int cols) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  read_doubles(is, rm.data(), static_cast<std::size_t>(rm.size()));
  return rm;
}

}  // namespace

void save(const netgdp::NetworkState& net, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(Errc::Io, "cannot open " + path.string() + " for writing");
  const nlohmann::json header = {{"m", net.m()},         {"d", net.d()},
                                 {"kappa", net.kappa},   {"seed", net.seed},
                                 {"step", net.step}};
  const std::string text = header.dump();
  os.write(kMagic.data(), kMagic.size());
  write_u64(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  write_matrix(os, net.w);
  write_doubles(os, net.w_aug.data(), static_cast<std::size_t>(net.w_aug.size()));
  write_doubles(os, net.a.data(), static_cast<std::size_t>(net.a.size()));
  write_matrix(os, net.w0);
  if (!os) throw Error(Errc::Io, "write to " + path.string() + " failed");
}

netgdp::NetworkState load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::Io, "cannot open " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw Error(Errc::Io, path.string() + " is not a checkpoint");
  const std::uint64_t len = read_u64(is);
  if (!is || len > (1u << 20)) throw Error(Errc::Io, path.string() + ": bad header length");
  std::string text(len, '\0');
  is.read(text.data(), static_cast<std::streamsize>(len));

  netgdp::NetworkState net;
  int m = 0, d = 0;
  try {
    const auto header = nlohmann::json::parse(text);
    m = header.at("m").get<int>();
    d = header.at("d").get<int>();
    net.kappa = header.at("kappa").get<double>();
    net.seed = header.at("seed").get<std::uint64_t>();
    net.step = header.at("step").get<std::int64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Io, path.string() + ": malformed header (" + e.what() + ")");
  }
  if (m < 2 || d < 1) throw Error(Errc::Io, path.string() + ": bad shape in header");
  net.w = read_matrix(is, m, d);
  net.w_aug.resize(m);
  read_doubles(is, net.w_aug.data(), static_cast<std::size_t>(m));
  net.a.resize(m);
  read_doubles(is, net.a.data(), static_cast<std::size_t>(m));
  net.w0 = read_matrix(is, m, d);
  if (!is) throw Error(Errc::Io, path.string() + ": truncated payload");
  return net;
}

}  // namespace gdp::checkpoint
