// Acceptance suite: one PASS/FAIL line per criterion, exit 0 iff all pass.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <sys/wait.h>

#include "hilbert2/checks.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    int status = -1;
    std::string out;
};

Outcome run_command(const std::string& cmd) {
    Outcome r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace hilbert2::checks;
    std::uint64_t seed = 1;
    if (argc > 1) seed = std::stoull(argv[1]);

    bool all = true;
    int index = 0;
    for (const auto& check : acceptance_suite()) {
        ++index;
        const auto t0 = Clock::now();
        CheckResult r = check(Level::full, seed);
        const double dt = seconds_since(t0);
        // Criterion 1 carries its own time budget.
        if (index == 1 && dt >= 60.0) {
            ++r.failures;
            if (r.first_failure.empty()) r.first_failure = "runtime over 60 s";
        }
        all = all && r.passed();
        std::printf("%2d %s  (%.1f s)\n", index, format_row(r).c_str(), dt);
        std::fflush(stdout);
    }

    ++index;
    const std::string cmd = std::string("\"") + HILBERT2_CLI + "\" selfcheck --level full --seed 1 2>&1";
    const auto t0 = Clock::now();
    const Outcome run = run_command(cmd);
    const double dt = seconds_since(t0);
    const bool ok = run.status == 0 && dt < 300.0;
    all = all && ok;
    std::printf("%2d %s  C14      full selfcheck end to end  [exit %d, %.1f s of 300 s]\n", index, ok ? "PASS" : "FAIL",
                run.status, dt);
    if (!ok) std::cout << run.out;

    std::printf("%s\n", all ? "acceptance: all criteria passed" : "acceptance: FAILURES");
    return all ? 0 : 1;
}
