#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

namespace mpst::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

enum Exit : int { Holds = 0, Refuted = 1, InputError = 2, BudgetExceeded = 3 };

/// Runs one `mpst` invocation; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, used for the input hashes in reports.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace mpst::cli
