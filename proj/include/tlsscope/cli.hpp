#pragma once

#include <string>
#include <vector>

namespace tlsscope {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

// argv[0] is the program name. Returns the process exit code.
int run_command(const std::vector<std::string>& argv);
int run_command(int argc, const char* const* argv);

}  // namespace tlsscope
