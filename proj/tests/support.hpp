#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pellsha/cli.hpp"
#include "pellsha/pellsha.hpp"

namespace pellsha::testing {

inline std::mt19937_64& rng() {
    static std::mt19937_64 engine(20240229);
    return engine;
}

inline Int uniform(Int lo, Int hi) { return std::uniform_int_distribution<Int>(lo, hi)(rng()); }

inline std::vector<Int> fundamentals(Int lo, Int hi) {
    std::vector<Int> out;
    for (Int d = lo; d <= hi; ++d) {
        if (is_fundamental(d)) out.push_back(d);
    }
    return out;
}

inline std::vector<Int> fundamentals_abs(Int bound) { return fundamentals(-bound, bound); }

/// Squarefree integer in the same square class as n (n != 0).
inline Int squarefree_part(Int n) {
    Int s = n < 0 ? -1 : 1;
    for (const auto& pp : factorize(n)) {
        if (pp.e % 2 == 1) s *= pp.p;
    }
    return s;
}

struct Captured {
    int code;
    std::string out;
    std::string err;
};

/// Runs the CLI entry point in-process.
inline Captured run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"pellsha"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

/// Runs the installed binary through the shell and captures stdout.
inline Captured run_binary(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + std::string(PELLSHA_BINARY) + " " + args + " 2>/dev/null";
    Captured c{0, {}, {}};
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, {}, {}};
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) c.out.append(buf, n);
    int status = pclose(pipe);
    c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return c;
}

}  // namespace pellsha::testing
