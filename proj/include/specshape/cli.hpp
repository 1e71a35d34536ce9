#pragma once

#include <ostream>

namespace specshape::cli {

/// Subcommands: psd, allocate, ber, capacity, selftest. Writes a JSON summary to out and, on
/// failure, an error object to err. Returns 0 on success, 1 for invalid input or configuration,
/// 2 for numerical failures (including a failed selftest).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Output root when --out is absent: $SPECSHAPE_OUT_DIR, else "out".
const char* default_out_dir();

}  // namespace specshape::cli
