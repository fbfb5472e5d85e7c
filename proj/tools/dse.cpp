// dse: deterministic desk-scale simulator for decentralized optimization
// with local updates (DSE-MVR / DSE-SGD and the DSGD / DLSGD baselines).
//
// Subcommands: run, sweep, validate, plot. Exit codes: 0 ok, 2 config
// error, 3 divergence, 4 I/O error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "dse/errors.hpp"
#include "dse/harness.hpp"
#include "dse/plot.hpp"
#include "dse/problems.hpp"

namespace {

int dispatch(int argc, char** argv) {
    CLI::App app{"dse: decentralized local-update optimization simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    bool timing = false;
    std::string export_data;
    auto* run_cmd = app.add_subcommand("run", "execute one configured run");
    run_cmd->add_option("config", config_path, "run config file")->required();
    run_cmd->add_option("--out", out_dir, "artifact directory (default: out)");
    run_cmd->add_flag("--timing", timing,
                      "record wall time per row (breaks byte-reproducibility)");
    run_cmd->add_option("--export-data", export_data,
                        "also write the generated dataset as CSV");

    std::string sweep_path, sweep_out = "out";
    int threads = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a config grid");
    sweep_cmd->add_option("spec", sweep_path, "sweep spec file")->required();
    sweep_cmd->add_option("--out", sweep_out, "artifact directory (default: out)");
    sweep_cmd->add_option("--threads", threads,
                          "worker threads (default: DSE_THREADS or hardware)");

    std::string validate_path, export_w;
    auto* validate_cmd =
        app.add_subcommand("validate", "print theory bounds and contract checks");
    validate_cmd->add_option("config", validate_path, "run config file")->required();
    validate_cmd->add_option("--export-w", export_w, "write the mixing matrix as CSV");

    std::vector<std::string> plot_inputs;
    std::string metric = "loss", plot_out = "plot.svg";
    bool log_scale = false;
    auto* plot_cmd = app.add_subcommand("plot", "render metric CSVs as an SVG chart");
    plot_cmd->add_option("csv", plot_inputs, "metrics CSV files")->required();
    plot_cmd->add_option("--metric", metric, "column to plot (default: loss)");
    plot_cmd->add_option("--out", plot_out, "output SVG path (default: plot.svg)");
    plot_cmd->add_flag("--log", log_scale, "log-scale value axis");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) {
        const dse::harness::RunConfig config =
            dse::harness::parse_config_file(config_path);
        if (!export_data.empty()) {
            const auto prepared = dse::harness::prepare(config);
            dse::problems::write_samples_csv(prepared.dataset.samples, export_data);
        }
        const auto artifacts = dse::harness::run_to_dir(config, out_dir, timing);
        for (const std::string& warning : artifacts.warnings)
            std::cerr << "warning: " << warning << "\n";
        std::cout << artifacts.csv_path.string() << "\n"
                  << artifacts.checkpoint_path.string() << "\n";
        return 0;
    }
    if (sweep_cmd->parsed()) {
        const auto spec = dse::harness::parse_sweep_file(sweep_path);
        const auto result = dse::harness::sweep(spec, sweep_out, threads);
        int failures = 0;
        for (const auto& row : result.rows)
            if (row.status != "ok") ++failures;
        std::cout << result.summary_path.string() << "\n";
        if (failures > 0)
            std::cerr << "warning: " << failures << " of " << result.rows.size()
                      << " runs failed (see summary status column)\n";
        return 0;
    }
    if (validate_cmd->parsed()) {
        const dse::harness::RunConfig config =
            dse::harness::parse_config_file(validate_path);
        const auto report = dse::harness::validate_config(config);
        std::cout << report.to_text();
        if (!export_w.empty()) dse::harness::export_mixing_csv(config, export_w);
        return 0;
    }
    if (plot_cmd->parsed()) {
        std::vector<std::filesystem::path> paths(plot_inputs.begin(),
                                                 plot_inputs.end());
        dse::plot::plot_csvs(paths, metric, plot_out, log_scale);
        std::cout << plot_out << "\n";
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const dse::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dse::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return 3;
    } catch (const dse::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const dse::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
