// Command line workbench: runs the homogenization stages (transform checks,
// cell problems, boundary layers, effective model, microscale validation)
// from a JSON config, with cached stage outputs under --out.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "slipflow/config.hpp"
#include "slipflow/errors.hpp"
#include "slipflow/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

int run_stages(const std::string& config_path, const slipflow::PipelineOptions& opt,
               std::vector<std::string> stages) {
    slipflow::WorkbenchConfig cfg = config_path.empty()
                                        ? slipflow::WorkbenchConfig{}
                                        : slipflow::WorkbenchConfig::load(config_path);
    const auto results = slipflow::run_pipeline(cfg, opt, std::move(stages));
    for (const auto& r : results) {
        std::printf("stage %-10s %s:", r.name.c_str(),
                    r.cached ? "cached" : "done  ");
        for (const auto& o : r.outputs) std::printf(" %s", o.c_str());
        std::printf("\n");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slipflow: Stokes/Darcy interface-law workbench"};
    app.require_subcommand(1);

    std::string config_path;
    slipflow::PipelineOptions opt;
    app.add_option("--config", config_path, "JSON config file (defaults used if absent)");
    app.add_option("--out", opt.out_dir, "artifact directory")->capture_default_str();
    app.add_option("--jobs", opt.jobs, "worker threads for independent solves")
        ->capture_default_str();
    app.add_flag("--deep-strip", opt.deep_strip, "double the strip truncation depth");
    app.add_flag("--fine", opt.fine, "halve all mesh sizes");

    std::map<std::string, std::vector<std::string>> verbs = {
        {"verify-transform", {"transform"}},
        {"cell", {"cell"}},
        {"bl", {"bl"}},
        {"effective", {"effective"}},
        {"dns", {"dns"}},
        {"sweep", {"sweep"}},
        {"pipeline", {}},
    };
    for (const auto& [name, stages] : verbs)
        app.add_subcommand(name, "run the '" + name + "' stage");
    auto* plots = app.add_subcommand("export-plots", "emit plot data series");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plots->parsed()) {
            for (const auto& f : slipflow::export_plots(opt.out_dir))
                std::printf("wrote %s\n", f.c_str());
            return kExitOk;
        }
        for (const auto& [name, stages] : verbs)
            if (app.get_subcommand(name)->parsed())
                return run_stages(config_path, opt, stages);
        std::fprintf(stderr, "no subcommand\n");
        return kExitUsage;
    } catch (const slipflow::ConfigError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return kExitValidation;
    } catch (const slipflow::NumericalError& e) {
        std::fprintf(stderr, "numerical-quality error: %s\n", e.what());
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }
}
