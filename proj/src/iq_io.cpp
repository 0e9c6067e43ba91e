// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/iq_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace cyclosense {

static_assert(std::endian::native == std::endian::little,
              "IQ frame files are little-endian; big-endian hosts are unsupported");

namespace {
constexpr char kMagic[4] = {'I', 'Q', 'F', '1'};
}

void write_iqframe(const std::filesystem::path& path, const IQFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());

  out.write(kMagic, 4);
  const std::uint32_t m = static_cast<std::uint32_t>(frame.num_antennas);
  const std::uint64_t n = frame.num_samples;
  out.write(reinterpret_cast<const char*>(&m), sizeof m);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&frame.sample_rate_hz), sizeof(double));
  // interleaved (re, im) f64, antenna-major; std::complex<double> already
  // has exactly that layout
  out.write(reinterpret_cast<const char*>(frame.samples.data()),
            static_cast<std::streamsize>(frame.samples.size() * sizeof(std::complex<double>)));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

IQFrame read_iqframe(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not an IQF1 file: " + path.string());

  std::uint32_t m = 0;
  std::uint64_t n = 0;
  double fs = 0.0;
  in.read(reinterpret_cast<char*>(&m), sizeof m);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&fs), sizeof fs);
  if (!in || m == 0 || n == 0) throw std::runtime_error("corrupt IQF1 header: " + path.string());

  IQFrame frame(static_cast<int>(m), static_cast<std::size_t>(n), fs);
  in.read(reinterpret_cast<char*>(frame.samples.data()),
          static_cast<std::streamsize>(frame.samples.size() * sizeof(std::complex<double>)));
  if (!in) throw std::runtime_error("truncated IQF1 payload: " + path.string());
  return frame;
}

}  // namespace cyclosense
