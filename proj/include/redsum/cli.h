#ifndef REDSUM_CLI_H_
#define REDSUM_CLI_H_

#include <string>
#include <vector>

namespace redsum::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

/// Runs one subcommand. Returns 0 on success, 1 on usage errors and 2 on
/// data errors (bad input files, incompatible checkpoints).
int run(int argc, char** argv);

/// Same as above; `args` excludes the program name.
int run(const std::vector<std::string>& args);

}  // namespace redsum::cli

#endif  // REDSUM_CLI_H_
