// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace repoforge {

/// Entry point behind main(). Exit codes: 0 success, 1 operation failed,
/// 2 usage / configuration error.
int cli_main(int argc, char** argv);

}  // namespace repoforge
