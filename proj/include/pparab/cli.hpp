#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "pparab/params.hpp"

namespace pparab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed invocation. Config values are already merged under explicit flags.
struct Command {
    std::string name;
    Params params;
    bool s_given = false;
    nlohmann::json config = nlohmann::json::object();
    std::string out;
    std::optional<int> nx;
    double r = 0.125;
    double eta = 0.05;
    std::uint64_t seed = 0;
    long samples = 100000;
    std::string help;  ///< non-empty when --help was requested
};

/// Throws UsageError on bad flags, IoError on an unreadable config.
Command parse(const std::vector<std::string>& argv);

int run(const Command& cmd, std::ostream& out, std::ostream& err);

/// parse + run with exit-code mapping; argv[0] is the program name.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace pparab::cli
