// SPDX-License-Identifier: Apache-2.0
//
// Experiment front end: JSON experiment specs, parameter sweeps, CSV/JSON
// run artifacts, figure panel data and run comparison. All emitted files are
// byte-deterministic (fixed %.12g formatting, '.' decimal separator, '\n'
// line endings).

#ifndef LQW_HARNESS_HPP
#define LQW_HARNESS_HPP

#include "lqw/dynamics.hpp"
#include "lqw/mesh.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lqw {

/// Schema or invariant violation in an experiment spec; `key` names the
/// offending field.
class SpecError : public std::runtime_error {
  public:
    SpecError(std::string key, const std::string& message)
        : std::runtime_error(message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

  private:
    std::string key_;
};

/// File-system failure while writing or reading artifacts.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };
enum class FigureId { Fig3, Fig4, Fig5, Fig6, Fig7, FigA };

struct ExperimentSpec {
    WalkConfig<double> base;              // shared lattice/boundary settings
    std::vector<double> leak_values;      // r^2 sweep axis
    std::vector<int> input_modes;         // injection sweep axis
    std::vector<int> step_horizons;       // N sweep axis
    std::filesystem::path out_dir = ".";
    std::vector<OutputFormat> formats{OutputFormat::Csv};
    std::optional<FigureId> figure;
};

struct RunArtifact {
    WalkConfig<double> config;
    std::string version;

    struct Row {
        int step = 0;
        double survival = 0;
        std::optional<double> mean;
        std::optional<double> variance;
        Eigen::VectorXd probabilities;
    };
    std::vector<Row> rows;                // N + 1 rows
};

struct CompareReport {
    std::vector<double> mean_diff;        // |a.mean - b.mean| per step
    std::vector<double> variance_diff;
    double max_mean_diff = 0;
    double max_variance_diff = 0;
};

std::string to_string(FigureId id);
std::optional<FigureId> figure_from_string(const std::string& name);
std::string to_string(LeakEdge edge);
std::string to_string(LayerParity parity);

/// Parses and validates an experiment spec; scalar entries for the sweep keys
/// are promoted to one-element axes. Defaults: M=4, leak_edge=top,
/// first_layer=full, renormalize=true, formats=[csv].
ExperimentSpec parse_spec(const std::filesystem::path& path);
ExperimentSpec parse_spec_json(const nlohmann::json& doc);

RunArtifact make_artifact(const Trajectory<double>& trajectory);

/// One artifact per sweep point, ordered r^2 outer, input inner, horizon
/// innermost. `parallel` fans runs out over std::async; ordering (and bytes)
/// are identical either way.
std::vector<RunArtifact> run_sweep(const ExperimentSpec& spec, bool parallel = false);

std::string artifact_csv(const RunArtifact& artifact);
nlohmann::ordered_json artifact_json(const RunArtifact& artifact);
std::string artifact_basename(const WalkConfig<double>& config);

/// Writes every artifact in the requested formats under spec.out_dir.
/// I/O failures are collected per artifact (and reported at the end) without
/// aborting the remaining writes.
std::vector<std::filesystem::path> write_artifacts(const ExperimentSpec& spec,
                                                   const std::vector<RunArtifact>& artifacts);

/// Plot-ready wide-form CSVs for one figure. Returns the written paths;
/// an absent figure id is a no-op. Missing (r^2, input) series raise a
/// SpecError listing every missing pair.
std::vector<std::filesystem::path> emit_figure_data(std::optional<FigureId> figure,
                                                    const std::vector<RunArtifact>& artifacts,
                                                    const std::filesystem::path& out_dir);

/// In-memory variant: (filename, contents) pairs.
std::vector<std::pair<std::string, std::string>> figure_csvs(
    FigureId figure, const std::vector<RunArtifact>& artifacts);

CompareReport compare_runs(const RunArtifact& a, const RunArtifact& b);
std::string compare_report_text(const CompareReport& report);

/// Reads a long-form artifact CSV back (as written by artifact_csv).
RunArtifact read_artifact_csv(const std::filesystem::path& path);

/// MeshProgram JSON: {"dimension": d, "mzis": [{"i": <1-based first mode>,
/// "theta": .., "phi": ..}, ...], "output_phases": [..]}, radians as doubles.
nlohmann::ordered_json mesh_program_json(const MeshProgram<double>& program);
MeshProgram<double> mesh_program_from_json(const nlohmann::json& doc);

/// Deterministic %.12g rendering used in every emitted file.
std::string format_double(double value);

}  // namespace lqw

#endif  // LQW_HARNESS_HPP
