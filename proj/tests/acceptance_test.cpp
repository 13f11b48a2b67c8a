// End-to-end acceptance suite: runs every verification check at its full
// budget, one test per criterion, and prints a PASS/FAIL line with wall time
// for each. Criterion 14 exercises the installed CLI for byte-for-byte
// reproducibility across parallelism settings.

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "corrline/verify.hpp"

namespace verify = corrline::verify;

namespace {

verify::VerifyConfig acceptance_config() {
    verify::VerifyConfig cfg;
    cfg.seed = 42;
    cfg.parallelism = std::min(8u, std::max(1u, std::thread::hardware_concurrency()));
    cfg.trials_cap = 0;  // full budgets
    return cfg;
}

void report(const verify::CheckResult& result, double elapsed_s, double budget_s) {
    std::printf("[criterion %2d] %s %s (%.2fs)\n", result.id,
                result.pass ? "PASS" : "FAIL", result.name.c_str(), elapsed_s);
    std::fflush(stdout);
    EXPECT_TRUE(result.pass) << result.name << ": " << result.note;
    if (budget_s > 0.0) EXPECT_LE(elapsed_s, budget_s) << result.name << " over budget";
}

template <typename Check>
void run_criterion(Check check, double budget_s) {
    const auto start = std::chrono::steady_clock::now();
    const verify::CheckResult result = check(acceptance_config());
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(result, elapsed, budget_s);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Acceptance, Criterion01ExactTailVsOracle) {
    run_criterion(verify::check_exact_tail_vs_dp, 10.0);
}

TEST(Acceptance, Criterion02TailBoundDominates) {
    run_criterion(verify::check_mgf_tail_bound, 5.0);
}

TEST(Acceptance, Criterion03Moments) { run_criterion(verify::check_moments, 60.0); }

TEST(Acceptance, Criterion04Mgf) { run_criterion(verify::check_mgf, 5.0); }

TEST(Acceptance, Criterion05ParityIdentity) { run_criterion(verify::check_parity, 5.0); }

TEST(Acceptance, Criterion06LerchRatio) { run_criterion(verify::check_lerch_ratio, 5.0); }

TEST(Acceptance, Criterion07IntervalOracleEquivalence) {
    run_criterion(verify::check_interval_summary, 30.0);
}

TEST(Acceptance, Criterion08PhantomPhaseTransition) {
    run_criterion(verify::check_phase_transition, 600.0);
}

TEST(Acceptance, Criterion09PhantomBounds) {
    run_criterion(verify::check_phantom_bounds, 600.0);
}

TEST(Acceptance, Criterion10ErmWalkIdentity) {
    run_criterion(verify::check_erm_walk_identity, 120.0);
}

TEST(Acceptance, Criterion11ThresholdSuccess) {
    run_criterion(verify::check_threshold_success, 120.0);
}

TEST(Acceptance, Criterion12PacUniform) { run_criterion(verify::check_pac_uniform, 120.0); }

TEST(Acceptance, Criterion13RegressionIdentity) {
    run_criterion(verify::check_regression_identity, 60.0);
}

TEST(Acceptance, Criterion14VerifyDeterminism) {
    // `verify all --seed 42` must emit byte-identical records on repeat runs
    // and across parallelism 1 vs 8. Determinism is structural (fixed
    // chunking, ordered reduction), so a reduced trial cap keeps this fast
    // without weakening the property under test.
    const auto start = std::chrono::steady_clock::now();
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "corrline_accept14";
    fs::create_directories(dir);
    const std::string cli = CORRLINE_CLI_PATH;
    struct Run {
        const char* file;
        const char* parallelism;
    };
    const Run runs[] = {{"a.jsonl", "1"}, {"b.jsonl", "1"}, {"c.jsonl", "8"}};
    for (const Run& run : runs) {
        const std::string cmd = "\"" + cli + "\" verify all --seed 42 --trials 1500 --parallelism " +
                                run.parallelism + " --out \"" + (dir / run.file).string() +
                                "\" 2>/dev/null";
        const int status = std::system(cmd.c_str());
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        // individual checks may fail at the reduced cap (exit 3); the
        // determinism claim is about the emitted bytes
        ASSERT_TRUE(code == 0 || code == 3) << cmd << " -> " << code;
    }
    const std::string a = read_file(dir / "a.jsonl");
    const std::string b = read_file(dir / "b.jsonl");
    const std::string c = read_file(dir / "c.jsonl");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b) << "repeat run differs";
    EXPECT_EQ(a, c) << "parallelism changes output";
    fs::remove_all(dir);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[criterion 14] %s verify_determinism (%.2fs)\n",
                (a == b && a == c && !a.empty()) ? "PASS" : "FAIL", elapsed);
    std::fflush(stdout);
}
