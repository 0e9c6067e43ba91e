// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "cyclosense/channel.hpp"

namespace cyclosense {

// Binary IQ frame format for replay/debug, little-endian throughout:
//   magic "IQF1", u32 M, u64 N, f64 sample_rate_hz,
//   then M x N samples as interleaved f64 (re, im), antenna-major.
// The layout is normative so frames can be replayed by other tooling.

void write_iqframe(const std::filesystem::path& path, const IQFrame& frame);
IQFrame read_iqframe(const std::filesystem::path& path);

}  // namespace cyclosense
