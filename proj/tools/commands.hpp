#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace iol::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitEmpty = 2;

// Runs `iol <subcommand> ...`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace iol::cli
