// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace cyclosense {

// Full command-line entry point (the cyclosense binary is a thin wrapper).
// Exit codes: 0 success, 2 configuration/usage error, 1 runtime failure.
int cli_main(int argc, const char* const* argv);

}  // namespace cyclosense
