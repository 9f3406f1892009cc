#ifndef PXG_CLI_HPP
#define PXG_CLI_HPP

#include <string>
#include <vector>

namespace pxg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point shared by the binary and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args);

} // namespace pxg::cli

#endif
