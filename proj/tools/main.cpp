// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/cli.hpp"

int main(int argc, char** argv) { return cyclosense::cli_main(argc, argv); }
