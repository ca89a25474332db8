// SPDX-License-Identifier: Apache-2.0
#include "repoforge/cli.hpp"

int main(int argc, char** argv) { return repoforge::cli_main(argc, argv); }
