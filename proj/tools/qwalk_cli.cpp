#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qwalk/experiment.hpp"
#include "qwalk/version.hpp"

namespace {

std::vector<double> parse_value_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::runtime_error("bad numeric value '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum walk decoherence experiments"};
    app.set_version_flag("--version", std::string("qwalk ") + qwalk::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir, param, values_csv, dir_a, dir_b;
    double tol = 0.0;

    auto* cmd_run = app.add_subcommand("run", "execute one experiment config");
    cmd_run->add_option("--config", config_path, "JSON config file")->required();
    cmd_run->add_option("--out", out_dir, "output directory (overrides config)");

    auto* cmd_sweep = app.add_subcommand("sweep", "run a config once per parameter value");
    cmd_sweep->add_option("--config", config_path, "JSON config file")->required();
    cmd_sweep->add_option("--param", param, "numeric config path, e.g. decoherence.gamma")->required();
    cmd_sweep->add_option("--values", values_csv, "comma-separated values")->required();
    cmd_sweep->add_option("--out", out_dir, "output directory");

    auto* cmd_compare = app.add_subcommand("compare", "compare two finished run directories");
    cmd_compare->add_option("dirA", dir_a, "first run directory")->required();
    cmd_compare->add_option("dirB", dir_b, "second run directory")->required();
    cmd_compare->add_option("--tol", tol, "max absolute deviation treated as equal");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            std::optional<std::filesystem::path> out;
            if (!out_dir.empty()) out = out_dir;
            auto res = qwalk::experiment::run_file(config_path, out);
            std::cout << "wrote " << res.outputs.size() << " files to " << res.dir.string() << "\n";
            return 0;
        }
        if (cmd_sweep->parsed()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot open config file " + config_path);
            nlohmann::json base;
            in >> base;
            auto values = parse_value_list(values_csv);
            std::filesystem::path out =
                out_dir.empty() ? std::filesystem::path("qwalk_sweep") : std::filesystem::path(out_dir);
            auto res = qwalk::experiment::sweep(base, param, values, out);
            bool all_ok = true;
            for (const auto& r : res.runs) {
                if (r.ok) {
                    std::cout << r.dir_name << ": ok\n";
                } else {
                    all_ok = false;
                    std::cerr << r.dir_name << ": FAILED: " << r.error << "\n";
                }
            }
            for (const auto& f : res.combined_files) std::cout << "combined: " << f << "\n";
            return all_ok ? 0 : 1;
        }
        if (cmd_compare->parsed()) {
            auto rep = qwalk::experiment::compare(dir_a, dir_b);
            std::cout << qwalk::experiment::format_report(rep);
            std::printf("max deviation %.6g (tol %.6g)\n", rep.max_abs_dev, tol);
            return rep.max_abs_dev <= tol ? 0 : 1;
        }
    } catch (const qwalk::experiment::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
