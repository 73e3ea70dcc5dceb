// odolab: a batch laboratory for odometers and their odomutant distortions.
// Runs exactly one JSON-configured command and emits machine-readable
// reports (JSON / CSV / DOT). See README.md for the config schema.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "odo/config.hpp"
#include "odo/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"odolab: odometer / odomutant laboratory"};
    std::string config_path;
    std::string output_dir;
    std::string prefix;
    long precision = -1;
    long threads = -1;
    long seed = -1;
    app.add_option("-c,--config", config_path, "run config (JSON)")->required();
    app.add_option("--output-dir", output_dir, "override output.dir");
    app.add_option("--prefix", prefix, "override output.prefix");
    app.add_option("--precision", precision, "override precision_bits");
    app.add_option("--threads", threads, "override threads");
    app.add_option("--seed", seed, "override params.seed");
    CLI11_PARSE(app, argc, argv);

    nlohmann::json cfg;
    try {
        std::ifstream in(config_path);
        if (!in) throw odo::ConfigError("cannot open config " + config_path);
        cfg = nlohmann::json::parse(in);
        if (!output_dir.empty()) cfg["output"]["dir"] = output_dir;
        if (!prefix.empty()) cfg["output"]["prefix"] = prefix;
        if (precision >= 0) cfg["precision_bits"] = precision;
        if (threads >= 0) cfg["threads"] = threads;
        if (seed >= 0) cfg["params"]["seed"] = seed;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return 2;
    } catch (const odo::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        auto res = odo::run_config(cfg);
        for (const auto& f : res.files) std::cout << "wrote " << f << "\n";
        std::cout << res.summary << "\n";
        return 0;
    } catch (const odo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const odo::UndeterminedError& e) {
        std::cerr << "undetermined: " << e.what() << "\n";
        return 3;
    } catch (const odo::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const odo::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const odo::ResourceError& e) {
        std::cerr << "resource budget: " << e.what() << "\n";
        return 4;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
}
