#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ftm::cli {

inline constexpr const char* kToolVersion = "1.0.0";

// Exit codes: 0 success, 1 domain/feasibility/numeric/parse failure,
// 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ftm::cli
