// Command-line front end: run / study / check over key=value configs.

#include "elastiform/bva.hpp"
#include "elastiform/checks.hpp"
#include "elastiform/config.hpp"
#include "elastiform/study.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCheckFailed = 4;

void usage() {
    std::cerr << "usage: elastiform <run|study|check> <config>\n"
              << "  run    execute the Boundary Variation Algorithm per the config\n"
              << "  study  gradient-error convergence study (CSV + fitted slopes)\n"
              << "  check  FD-oracle, equivalence, patch and transform checks\n"
              << "environment: ELASTIFORM_OUT overrides out.dir\n";
}

ef::Setup load_setup(const std::string& path) {
    ef::Setup setup = ef::build_setup(ef::RunConfig::parse_file(path));
    if (const char* env = std::getenv("ELASTIFORM_OUT")) {
        setup.out_dir = env;
        setup.bva.out_dir = env;
    }
    std::filesystem::create_directories(setup.out_dir);
    return setup;
}

int cmd_run(const std::string& cfg_path) {
    const ef::Setup setup = load_setup(cfg_path);
    const ef::Mesh mesh = ef::build_mesh(setup);
    const ef::BvaResult result = ef::run(setup.bva, mesh, setup.material, setup.loads);
    const std::string csv = setup.out_dir + "/history_" + setup.tag + ".csv";
    ef::write_history_csv(result, setup.seed, csv);
    if (!result.completed) {
        std::cerr << "run aborted: " << result.failure << "\n";
        return kExitSolver;
    }
    std::printf("final J = %.8g\n", result.final_J);
    std::printf("final V = %.8g\n", result.final_V);
    std::printf("final L = %.8g (initial %.8g)\n", result.final_L, result.initial_L);
    std::printf("history: %s\n", csv.c_str());
    return 0;
}

int cmd_study(const std::string& cfg_path) {
    const ef::Setup setup = load_setup(cfg_path);
    const ef::Mesh base = ef::build_mesh(setup);
    const ef::StudyResult result = ef::gradient_error_study(
        base, setup.study_levels, setup.study_extra_refine, setup.material, setup.loads);
    const std::string csv = setup.out_dir + "/study_" + setup.tag + ".csv";
    ef::write_study_csv(result, csv);
    std::printf("%-6s %-8s %-14s %-14s %-14s\n", "level", "ndof", "err_surface", "err_vol_disp",
                "err_vol_mixed");
    for (const auto& r : result.rows)
        std::printf("%-6d %-8d %-14.6e %-14.6e %-14.6e\n", r.level, r.ndof, r.err_surface,
                    r.err_vol_disp, r.err_vol_mixed);
    std::printf("slopes vs ndof: surface %.3f, vol_disp %.3f, vol_mixed %.3f\n",
                result.slope_surface, result.slope_vol_disp, result.slope_vol_mixed);
    std::printf("study: %s\n", csv.c_str());
    return 0;
}

int cmd_check(const std::string& cfg_path) {
    const ef::Setup setup = load_setup(cfg_path);
    const auto results = ef::run_check_battery(setup);
    bool all_pass = true;
    for (const auto& r : results) {
        std::printf("%-32s %s  (%.3e <= %.3e)\n", r.name.c_str(), r.pass ? "PASS" : "FAIL",
                    r.value, r.bound);
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : kExitCheckFailed;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        usage();
        return kExitConfig;
    }
    const std::string cmd = argv[1];
    const std::string cfg = argv[2];
    try {
        if (cmd == "run")
            return cmd_run(cfg);
        if (cmd == "study")
            return cmd_study(cfg);
        if (cmd == "check")
            return cmd_check(cfg);
        usage();
        return kExitConfig;
    } catch (const ef::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ef::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ef::SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    }
}
