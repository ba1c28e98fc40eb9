#pragma once

// Command-line entry point, exposed as a function for tests.
// Exit codes: 0 Verified, 1 Refuted, 2 Unknown, 64 usage/parse error,
// 70 internal error.

namespace pwv {

int run(int argc, const char* const* argv);

}  // namespace pwv
