// Command-line front end. All computation happens behind the shared
// library's C API; this binary only parses arguments, reads the config file
// and maps status codes to exit codes (0 ok, 1 validation, 2 numerical).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sgsde/sgsde.h"

namespace {

int map_exit_code(sgsde_status status) {
    switch (status) {
        case SGSDE_OK: return 0;
        case SGSDE_ERROR_NUMERIC: return 2;
        default: return 1;  // validation, io, argument
    }
}

void print_error_json(const std::string& command, sgsde_status status) {
    const char* kind = status == SGSDE_ERROR_NUMERIC ? "numerical" : "validation";
    std::string msg = sgsde_last_error();
    std::string escaped;
    for (char c : msg) {
        if (c == '"' || c == '\\') escaped += '\\';
        if (c == '\n') {
            escaped += "\\n";
            continue;
        }
        escaped += c;
    }
    std::cerr << "{\"error\":{\"kind\":\"" << kind << "\",\"command\":\"" << command
              << "\",\"message\":\"" << escaped << "\"}}" << std::endl;
}

std::string read_file(const std::string& path, bool& ok) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        ok = false;
        return {};
    }
    std::ostringstream os;
    os << in.rdbuf();
    ok = true;
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"small-gain analysis of additive-noise SDE systems"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool have_seed = false;
    int threads = 0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* copt = sub->add_option("--config", config_path, "run configuration (JSON)");
        if (needs_config) copt->required();
        sub->add_option("--out", out_dir, "output directory for artifacts");
        sub->add_option("--seed", seed, "override the base seed")
            ->each([&](const std::string&) { have_seed = true; });
        sub->add_option("--threads", threads, "worker threads for Monte Carlo (0 = all cores)");
    };

    const char* commands[] = {"check", "simulate", "pullback", "equilibrium", "stationary"};
    for (const char* cmd : commands) {
        add_common(app.add_subcommand(cmd), true);
    }

    std::string example_id;
    auto* example = app.add_subcommand("example", "run a built-in example preset");
    example->add_option("id", example_id, "preset id: 5.1, 5.2, 5.3 or 6.1")->required();
    add_common(example, false);

    std::string preset_for_config;
    auto* preset_cfg = app.add_subcommand("preset-config", "print a preset's config JSON");
    preset_cfg->add_option("id", preset_for_config, "preset id")->required();

    CLI11_PARSE(app, argc, argv);

    sgsde_run_options opts{};
    opts.has_seed = have_seed ? 1 : 0;
    opts.seed = seed;
    opts.threads = threads;

    if (preset_cfg->parsed()) {
        char* json = nullptr;
        const sgsde_status st = sgsde_preset_config_json(preset_for_config.c_str(), &json);
        if (st != SGSDE_OK) {
            print_error_json("preset-config", st);
            return map_exit_code(st);
        }
        std::cout << json;
        sgsde_string_free(json);
        return 0;
    }

    if (example->parsed()) {
        const sgsde_status st = sgsde_run_example(example_id.c_str(), out_dir.c_str(), &opts);
        if (st != SGSDE_OK) {
            print_error_json("example", st);
            return map_exit_code(st);
        }
        std::cout << "example " << example_id << ": artifacts written to " << out_dir
                  << std::endl;
        return 0;
    }

    for (const char* cmd : commands) {
        CLI::App* sub = app.get_subcommand(cmd);
        if (!sub->parsed()) continue;
        bool ok = false;
        const std::string config = read_file(config_path, ok);
        if (!ok) {
            std::cerr << "{\"error\":{\"kind\":\"validation\",\"message\":\"cannot read config '"
                      << config_path << "'\"}}" << std::endl;
            return 1;
        }
        const sgsde_status st = sgsde_run_command(cmd, config.c_str(), out_dir.c_str(), &opts);
        if (st != SGSDE_OK) {
            print_error_json(cmd, st);
            return map_exit_code(st);
        }
        std::cout << cmd << ": artifacts written to " << out_dir << std::endl;
        return 0;
    }
    return 1;
}
