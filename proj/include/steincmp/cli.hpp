#pragma once

namespace steincmp {

/// Entry point of the `steincmp` tool. Returns 0 on success, 2 on a configuration
/// error and 1 on any other failure.
int cli_main(int argc, char** argv);

}  // namespace steincmp
