#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seasoned::cli
{
inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_invariant = 3;

/// Entry point shared by the executable and the tests. Results go to `out`.
int run(const std::vector<std::string>& args, std::ostream& out);

}  // namespace seasoned::cli
