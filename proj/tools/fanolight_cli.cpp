// Command-line driver: deterministic data emission for the spectra,
// dispersion, memory-protocol and condition-check analyses.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fanolight/scenario.hpp"

namespace {

fanolight::ScenarioConfig resolve_config(const std::string& preset, const std::string& config_path) {
    if (preset == "custom") {
        if (config_path.empty())
            throw fanolight::validation_error("--preset custom requires --config <path>");
        return fanolight::load_config(config_path);
    }
    if (!config_path.empty())
        throw fanolight::validation_error("give either a built-in --preset or --config, not both");
    return fanolight::preset_config(preset);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fanolight: exciton-Fano medium response, polariton dispersion and photon storage"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string preset = "custom";
    app.add_option("--config", config_path, "configuration file (JSON)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--preset", preset, "fig3 | ideal | custom")
        ->check(CLI::IsMember({"fig3", "ideal", "custom"}));

    auto* spectra = app.add_subcommand("spectra", "emit response functions over the x grid");
    auto* dispersion = app.add_subcommand("dispersion", "emit the two-branch dispersion over a k sweep");
    auto* simulate = app.add_subcommand("simulate", "run the storage/retrieval protocol");
    auto* check = app.add_subcommand("check", "emit the validity-condition report");
    for (auto* sub : {spectra, dispersion, simulate, check}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const fanolight::ScenarioConfig cfg = resolve_config(preset, config_path);
        std::vector<std::filesystem::path> files;
        if (spectra->parsed()) files = fanolight::cmd_spectra(cfg, out_dir);
        if (dispersion->parsed()) files = fanolight::cmd_dispersion(cfg, out_dir);
        if (simulate->parsed()) files = fanolight::cmd_simulate(cfg, out_dir);
        if (check->parsed()) files = fanolight::cmd_check(cfg, out_dir);
        for (const auto& f : files) std::cout << f.string() << "\n";
        return 0;
    } catch (const fanolight::validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    } catch (const fanolight::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
