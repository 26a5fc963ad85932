// SPDX-License-Identifier: Apache-2.0
//
// lqw command line: run sweeps, emit figure data, compare runs, compile
// walk transfer matrices to MZI mesh programs.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error.

#include "lqw/harness.hpp"
#include "lqw/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

struct CommonOptions {
    std::string out_dir;
    std::string format;
    std::string parity;
    bool serial = false;
};

void apply_overrides(lqw::ExperimentSpec& spec, const CommonOptions& opts) {
    if (!opts.out_dir.empty()) spec.out_dir = opts.out_dir;
    if (!opts.format.empty()) {
        if (opts.format == "csv") spec.formats = {lqw::OutputFormat::Csv};
        else if (opts.format == "json") spec.formats = {lqw::OutputFormat::Json};
        else throw lqw::SpecError("formats", "--format must be csv or json");
    }
    if (!opts.parity.empty()) {
        if (opts.parity == "full") spec.base.first_layer = lqw::LayerParity::Full;
        else if (opts.parity == "offset") spec.base.first_layer = lqw::LayerParity::Offset;
        else throw lqw::SpecError("first_layer", "--parity must be full or offset");
    }
}

int cmd_run(const std::string& spec_path, const CommonOptions& opts) {
    lqw::ExperimentSpec spec = lqw::parse_spec(spec_path);
    apply_overrides(spec, opts);
    const auto artifacts = lqw::run_sweep(spec, !opts.serial);
    auto written = lqw::write_artifacts(spec, artifacts);
    // a figure id in the spec also emits the panel CSVs
    const auto panels = lqw::emit_figure_data(spec.figure, artifacts, spec.out_dir);
    written.insert(written.end(), panels.begin(), panels.end());
    for (const auto& path : written) std::cout << path.string() << "\n";
    return 0;
}

int cmd_figure(const std::string& figure_name, const std::string& spec_path,
               const CommonOptions& opts) {
    lqw::ExperimentSpec spec = lqw::parse_spec(spec_path);
    apply_overrides(spec, opts);
    const auto figure = lqw::figure_from_string(figure_name);
    if (!figure)
        throw lqw::SpecError("figure", "unknown figure id \"" + figure_name +
                                           "\" (expected fig3..fig7 or figA)");
    const auto artifacts = lqw::run_sweep(spec, !opts.serial);
    const auto written = lqw::emit_figure_data(figure, artifacts, spec.out_dir);
    for (const auto& path : written) std::cout << path.string() << "\n";
    return 0;
}

int cmd_compare(const std::string& a_path, const std::string& b_path) {
    const auto a = lqw::read_artifact_csv(a_path);
    const auto b = lqw::read_artifact_csv(b_path);
    std::cout << lqw::compare_report_text(lqw::compare_runs(a, b));
    return 0;
}

int cmd_compile(const std::string& spec_path, const CommonOptions& opts) {
    lqw::ExperimentSpec spec = lqw::parse_spec(spec_path);
    apply_overrides(spec, opts);

    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);
    // the mesh depends on (r^2, horizon) only; the input axis is irrelevant
    for (double r : spec.leak_values) {
        for (int n : spec.step_horizons) {
            if (n < 1)
                throw lqw::SpecError("steps", "compile requires step horizons >= 1");
            lqw::WalkConfig<double> cfg = spec.base;
            cfg.leak_transmissivity = r;
            cfg.steps = n;
            const auto program = lqw::compile_walk(cfg, n);
            const std::filesystem::path path =
                spec.out_dir / ("meshprog_r" + lqw::format_double(r) + "_N" + std::to_string(n) +
                                ".json");
            std::ofstream out(path, std::ios::binary);
            if (!out) throw lqw::IoError("cannot write mesh program: " + path.string());
            out << lqw::mesh_program_json(program).dump(2) << "\n";
            if (!out) throw lqw::IoError("cannot write mesh program: " + path.string());
            std::cout << path.string() << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete-time quantum walk simulator with a leaky boundary"};
    app.set_version_flag("--version", std::string(lqw::kVersion));
    app.require_subcommand(1);

    CommonOptions opts;
    std::string spec_path, figure_name, a_path, b_path;

    auto add_common = [&](CLI::App* cmd, bool with_format, bool with_serial) {
        cmd->add_option("--out", opts.out_dir, "output directory (overrides spec)");
        if (with_format) cmd->add_option("--format", opts.format, "csv|json (overrides spec)");
        cmd->add_option("--parity", opts.parity, "first layer pairing: full|offset");
        if (with_serial) cmd->add_flag("--serial", opts.serial, "disable concurrent sweep execution");
    };

    auto* run = app.add_subcommand("run", "run a sweep and write per-run artifacts");
    run->add_option("spec", spec_path, "experiment spec (JSON)")->required();
    add_common(run, true, true);

    auto* figure = app.add_subcommand("figure", "run a sweep and write figure panel CSVs");
    figure->add_option("figure_id", figure_name, "fig3|fig4|fig5|fig6|fig7|figA")->required();
    figure->add_option("spec", spec_path, "experiment spec (JSON)")->required();
    add_common(figure, false, true);

    auto* compare = app.add_subcommand("compare", "per-step differences of two artifact CSVs");
    compare->add_option("a", a_path, "first artifact CSV")->required();
    compare->add_option("b", b_path, "second artifact CSV")->required();

    auto* compile = app.add_subcommand("compile", "lower sweep transfer matrices to MZI programs");
    compile->add_option("spec", spec_path, "experiment spec (JSON)")->required();
    add_common(compile, false, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(spec_path, opts);
        if (figure->parsed()) return cmd_figure(figure_name, spec_path, opts);
        if (compare->parsed()) return cmd_compare(a_path, b_path);
        if (compile->parsed()) return cmd_compile(spec_path, opts);
    } catch (const lqw::IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const lqw::SpecError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::domain_error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
