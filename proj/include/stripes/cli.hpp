#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace stripes {

struct CliConfig {
    std::string command;
    std::string input;
    std::int64_t window = 3;
    std::size_t max_word_length = 8;
    std::string format = "text";
    std::string dot_path;
    bool color = true;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;  // invalid atlas, failed verification or certificate
inline constexpr int input = 2;    // usage, IO or parse error
}  // namespace exit_code

/// Runs an already parsed command line.
int run(const CliConfig& config, std::ostream& out, std::ostream& err);

/// Parses `args` (program name first) and runs the command. Color is off
/// when STRIPES_NO_COLOR is set.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stripes
