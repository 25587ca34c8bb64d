#pragma once

namespace satira::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 1 usage error, 2 data error.
int run(int argc, const char* const* argv);

}  // namespace satira::cli
