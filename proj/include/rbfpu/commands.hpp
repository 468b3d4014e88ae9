#pragma once

namespace rbfpu::cli {

/// Entry point of the `rbfpu` tool. Exit codes: 0 success, 1 usage or parse
/// error, 2 numerical or covering failure.
int run(int argc, char** argv);

}  // namespace rbfpu::cli
