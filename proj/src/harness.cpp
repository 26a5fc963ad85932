// SPDX-License-Identifier: Apache-2.0

#include "lqw/harness.hpp"

#include "lqw/version.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <type_traits>

namespace lqw {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

std::string to_string(FigureId id) {
    switch (id) {
        case FigureId::Fig3: return "fig3";
        case FigureId::Fig4: return "fig4";
        case FigureId::Fig5: return "fig5";
        case FigureId::Fig6: return "fig6";
        case FigureId::Fig7: return "fig7";
        case FigureId::FigA: return "figA";
    }
    return "?";
}

std::optional<FigureId> figure_from_string(const std::string& name) {
    if (name == "fig3") return FigureId::Fig3;
    if (name == "fig4") return FigureId::Fig4;
    if (name == "fig5") return FigureId::Fig5;
    if (name == "fig6") return FigureId::Fig6;
    if (name == "fig7") return FigureId::Fig7;
    if (name == "figA" || name == "figa") return FigureId::FigA;
    return std::nullopt;
}

std::string to_string(LeakEdge edge) { return edge == LeakEdge::Top ? "top" : "bottom"; }
std::string to_string(LayerParity parity) { return parity == LayerParity::Full ? "full" : "offset"; }

namespace {

constexpr int kMaxHorizon = 10000;

int require_integer(const json& doc, const char* key, int value_min, int value_max) {
    const auto& v = doc.at(key);
    if (!v.is_number_integer())
        throw SpecError(key, std::string("spec key \"") + key + "\" must be a whole number");
    const int x = v.get<int>();
    if (x < value_min || x > value_max)
        throw SpecError(key, std::string("spec key \"") + key + "\" out of range [" +
                                 std::to_string(value_min) + ", " + std::to_string(value_max) +
                                 "]: " + std::to_string(x));
    return x;
}

std::string require_string(const json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_string())
        throw SpecError(key, std::string("spec key \"") + key + "\" must be a string");
    return v.get<std::string>();
}

template <typename T>
std::vector<T> scalar_or_array(const json& doc, const char* key, T fallback) {
    constexpr bool integral = std::is_integral_v<T>;
    const auto accepts = [](const json& e) {
        return integral ? e.is_number_integer() : e.is_number();
    };
    if (!doc.contains(key)) return {fallback};
    const auto& v = doc.at(key);
    std::vector<T> out;
    if (v.is_array()) {
        for (const auto& e : v) {
            if (!accepts(e))
                throw SpecError(key, std::string("spec key \"") + key + "\" has an entry of the wrong type");
            out.push_back(e.get<T>());
        }
    } else if (accepts(v)) {
        out.push_back(v.get<T>());
    } else {
        throw SpecError(key, std::string("spec key \"") + key + "\" must be a " +
                                 (integral ? "whole number" : "number") + " or array");
    }
    if (out.empty())
        throw SpecError(key, std::string("spec key \"") + key + "\" must not be an empty axis");
    return out;
}

}  // namespace

ExperimentSpec parse_spec_json(const json& doc) {
    if (!doc.is_object()) throw SpecError("", "spec must be a JSON object");

    ExperimentSpec spec;
    if (doc.contains("M")) {
        spec.base.half_width = require_integer(doc, "M", 2, 1 << 16);
    }
    if (doc.contains("leak_edge")) {
        const std::string edge = require_string(doc, "leak_edge");
        if (edge == "top") spec.base.leak_edge = LeakEdge::Top;
        else if (edge == "bottom") spec.base.leak_edge = LeakEdge::Bottom;
        else throw SpecError("leak_edge", "spec key \"leak_edge\" must be \"top\" or \"bottom\"");
    }
    if (doc.contains("first_layer")) {
        const std::string layer = require_string(doc, "first_layer");
        if (layer == "full") spec.base.first_layer = LayerParity::Full;
        else if (layer == "offset") spec.base.first_layer = LayerParity::Offset;
        else throw SpecError("first_layer", "spec key \"first_layer\" must be \"full\" or \"offset\"");
    }
    if (doc.contains("renormalize")) {
        if (!doc.at("renormalize").is_boolean())
            throw SpecError("renormalize", "spec key \"renormalize\" must be a boolean");
        spec.base.renormalize = doc.at("renormalize").get<bool>();
    }

    spec.leak_values = scalar_or_array<double>(doc, "r_sq", 0.0);
    for (double r : spec.leak_values)
        if (!(r >= 0.0 && r <= 1.0))
            throw SpecError("r_sq", "spec key \"r_sq\" must lie in [0, 1], got " + format_double(r));

    spec.input_modes = scalar_or_array<int>(doc, "input", 2);
    for (int m : spec.input_modes)
        if (m < 1 || m > 2 * spec.base.half_width)
            throw SpecError("input", "spec key \"input\" must lie in [1, " +
                                         std::to_string(2 * spec.base.half_width) + "], got " +
                                         std::to_string(m));

    spec.step_horizons = scalar_or_array<int>(doc, "steps", 100);
    for (int n : spec.step_horizons)
        if (n < 0 || n > kMaxHorizon)
            throw SpecError("steps", "spec key \"steps\" must lie in [0, " +
                                         std::to_string(kMaxHorizon) + "], got " + std::to_string(n));

    if (doc.contains("out_dir")) spec.out_dir = require_string(doc, "out_dir");
    if (doc.contains("formats")) {
        if (!doc.at("formats").is_array())
            throw SpecError("formats", "spec key \"formats\" must be an array");
        spec.formats.clear();
        for (const auto& f : doc.at("formats")) {
            if (!f.is_string())
                throw SpecError("formats", "spec key \"formats\" entries must be strings");
            const std::string name = f.get<std::string>();
            if (name == "csv") spec.formats.push_back(OutputFormat::Csv);
            else if (name == "json") spec.formats.push_back(OutputFormat::Json);
            else throw SpecError("formats", "spec key \"formats\" entries must be \"csv\" or \"json\"");
        }
        if (spec.formats.empty())
            throw SpecError("formats", "spec key \"formats\" must not be empty");
    }
    if (doc.contains("figure")) {
        spec.figure = figure_from_string(require_string(doc, "figure"));
        if (!spec.figure)
            throw SpecError("figure", "spec key \"figure\" must be one of fig3..fig7, figA");
    }

    spec.base.leak_transmissivity = spec.leak_values.front();
    spec.base.input_mode = spec.input_modes.front();
    spec.base.steps = spec.step_horizons.front();
    spec.base.validate();
    return spec;
}

ExperimentSpec parse_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("", "cannot open spec file: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& err) {
        throw SpecError("", "spec file " + path.string() + " is not valid JSON: " + err.what());
    }
    return parse_spec_json(doc);
}

RunArtifact make_artifact(const Trajectory<double>& trajectory) {
    RunArtifact artifact;
    artifact.config = trajectory.config;
    artifact.version = kVersion;
    artifact.rows.reserve(trajectory.records.size());
    for (const auto& rec : trajectory.records) {
        RunArtifact::Row row;
        row.step = rec.step;
        row.survival = rec.survival;
        row.mean = rec.mean;
        row.variance = rec.variance;
        row.probabilities = rec.distribution.probabilities;
        artifact.rows.push_back(std::move(row));
    }
    return artifact;
}

std::vector<RunArtifact> run_sweep(const ExperimentSpec& spec, bool parallel) {
    if (spec.leak_values.empty() || spec.input_modes.empty() || spec.step_horizons.empty())
        throw SpecError("r_sq", "sweep axes must not be empty");

    std::vector<WalkConfig<double>> points;
    for (double r : spec.leak_values)
        for (int m : spec.input_modes)
            for (int n : spec.step_horizons) {
                WalkConfig<double> cfg = spec.base;
                cfg.leak_transmissivity = r;
                cfg.input_mode = m;
                cfg.steps = n;
                cfg.validate();
                points.push_back(cfg);
            }

    std::vector<RunArtifact> artifacts(points.size());
    if (parallel) {
        std::vector<std::future<RunArtifact>> futures;
        futures.reserve(points.size());
        for (const auto& cfg : points)
            futures.push_back(std::async(std::launch::async,
                                         [cfg] { return make_artifact(run_walk(cfg)); }));
        for (std::size_t i = 0; i < futures.size(); ++i) artifacts[i] = futures[i].get();
    } else {
        for (std::size_t i = 0; i < points.size(); ++i)
            artifacts[i] = make_artifact(run_walk(points[i]));
    }
    return artifacts;
}

namespace {

void validate_row(const RunArtifact& artifact, const RunArtifact::Row& row) {
    if (row.probabilities.minCoeff() < 0.0)
        throw std::logic_error("artifact row " + std::to_string(row.step) +
                               " has a negative probability");
    if (artifact.config.renormalize && row.survival > 0.0 &&
        std::abs(row.probabilities.sum() - 1.0) > 1e-9)
        throw std::logic_error("artifact row " + std::to_string(row.step) +
                               " probabilities do not sum to 1");
    if (row.variance && (*row.variance < 0.0 ||
                         *row.variance > std::pow(artifact.config.half_width - 0.5, 2) + 1e-9))
        throw std::logic_error("artifact row " + std::to_string(row.step) +
                               " variance outside [0, x_max^2]");
}

std::string optional_field(const std::optional<double>& v) {
    return v ? format_double(*v) : "nan";
}

}  // namespace

std::string artifact_csv(const RunArtifact& artifact) {
    const int d = artifact.config.modes();
    std::string out;
    out += "# lqw_version=" + artifact.version + "\n";
    out += "# M=" + std::to_string(artifact.config.half_width) +
           " steps=" + std::to_string(artifact.config.steps) +
           " input=" + std::to_string(artifact.config.input_mode) +
           " r_sq=" + format_double(artifact.config.leak_transmissivity) +
           " leak_edge=" + to_string(artifact.config.leak_edge) +
           " first_layer=" + to_string(artifact.config.first_layer) +
           " renormalize=" + (artifact.config.renormalize ? "true" : "false") + "\n";
    out += "step,survival,mean,variance";
    for (int i = 1; i <= d; ++i) out += ",p" + std::to_string(i);
    out += "\n";
    for (const auto& row : artifact.rows) {
        validate_row(artifact, row);
        out += std::to_string(row.step);
        out += ",";
        out += format_double(row.survival);
        out += ",";
        out += optional_field(row.mean);
        out += ",";
        out += optional_field(row.variance);
        for (int i = 0; i < d; ++i) {
            out += ",";
            out += format_double(row.probabilities[i]);
        }
        out += "\n";
    }
    return out;
}

ordered_json artifact_json(const RunArtifact& artifact) {
    ordered_json doc;
    doc["version"] = artifact.version;
    doc["config"] = {{"M", artifact.config.half_width},
                     {"steps", artifact.config.steps},
                     {"input", artifact.config.input_mode},
                     {"r_sq", artifact.config.leak_transmissivity},
                     {"leak_edge", to_string(artifact.config.leak_edge)},
                     {"first_layer", to_string(artifact.config.first_layer)},
                     {"renormalize", artifact.config.renormalize}};
    ordered_json rows = ordered_json::array();
    for (const auto& row : artifact.rows) {
        validate_row(artifact, row);
        ordered_json r;
        r["step"] = row.step;
        r["survival"] = row.survival;
        if (row.mean) r["mean"] = *row.mean; else r["mean"] = nullptr;
        if (row.variance) r["variance"] = *row.variance; else r["variance"] = nullptr;
        std::vector<double> p(row.probabilities.data(),
                              row.probabilities.data() + row.probabilities.size());
        r["p"] = p;
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc;
}

std::string artifact_basename(const WalkConfig<double>& config) {
    return "walk_r" + format_double(config.leak_transmissivity) + "_m" +
           std::to_string(config.input_mode) + "_N" + std::to_string(config.steps);
}

std::vector<std::filesystem::path> write_artifacts(const ExperimentSpec& spec,
                                                   const std::vector<RunArtifact>& artifacts) {
    std::error_code ec;
    std::filesystem::create_directories(spec.out_dir, ec);

    std::vector<std::filesystem::path> written;
    std::vector<std::string> failures;
    for (const auto& artifact : artifacts) {
        for (OutputFormat format : spec.formats) {
            const std::string name = artifact_basename(artifact.config) +
                                     (format == OutputFormat::Csv ? ".csv" : ".json");
            const std::filesystem::path path = spec.out_dir / name;
            std::ofstream out(path, std::ios::binary);
            if (out) {
                if (format == OutputFormat::Csv)
                    out << artifact_csv(artifact);
                else
                    out << artifact_json(artifact).dump(2) << "\n";
            }
            if (!out) {
                failures.push_back(path.string());
                continue;
            }
            written.push_back(path);
        }
    }
    if (!failures.empty()) {
        std::string msg = "failed to write " + std::to_string(failures.size()) + " artifact(s):";
        for (const auto& f : failures) msg += " " + f;
        throw IoError(msg);
    }
    return written;
}

namespace {

struct SeriesKey {
    double r_sq;
    int input;
    bool operator<(const SeriesKey& other) const {
        if (r_sq != other.r_sq) return r_sq < other.r_sq;
        return input < other.input;
    }
};

// longest-horizon artifact per (r^2, input)
std::map<SeriesKey, const RunArtifact*> index_artifacts(const std::vector<RunArtifact>& artifacts) {
    std::map<SeriesKey, const RunArtifact*> index;
    for (const auto& a : artifacts) {
        const SeriesKey key{a.config.leak_transmissivity, a.config.input_mode};
        auto it = index.find(key);
        if (it == index.end() || a.config.steps > it->second->config.steps) index[key] = &a;
    }
    return index;
}

std::string r_label(double r_sq) { return "r" + format_double(r_sq); }

struct PanelSpec {
    std::string filename;                 // without .csv
    std::vector<SeriesKey> series;
    std::vector<std::string> labels;
};

std::vector<PanelSpec> figure_panels(FigureId figure) {
    const std::vector<int> all_inputs{2, 3, 6, 7};
    const auto input_series = [&](double r) {
        PanelSpec p;
        for (int m : all_inputs) {
            p.series.push_back({r, m});
            p.labels.push_back("m" + std::to_string(m));
        }
        return p;
    };
    const auto regime_series = [&](int m, std::vector<double> rs) {
        PanelSpec p;
        for (double r : rs) {
            p.series.push_back({r, m});
            p.labels.push_back(r_label(r));
        }
        return p;
    };

    std::vector<PanelSpec> panels;
    const char* metrics[2] = {"mean", "variance"};
    switch (figure) {
        case FigureId::Fig3:
            for (double r : {0.2, 0.8})
                for (const char* metric : metrics) {
                    PanelSpec p = input_series(r);
                    p.filename = std::string("fig3_") + metric + "_" + r_label(r);
                    panels.push_back(std::move(p));
                }
            break;
        case FigureId::Fig4:
            for (const char* metric : metrics) {
                PanelSpec p = input_series(0.8);
                p.filename = std::string("fig4_") + metric;
                panels.push_back(std::move(p));
            }
            break;
        case FigureId::Fig5:
            for (const char* metric : metrics) {
                PanelSpec p;
                p.series = {{0.2, 2}, {0.2, 6}};
                p.labels = {"m2", "m6"};
                p.filename = std::string("fig5_") + metric;
                panels.push_back(std::move(p));
            }
            break;
        case FigureId::Fig6:
            for (const char* metric : metrics) {
                PanelSpec p = regime_series(2, {0.0, 0.2, 0.8});
                p.filename = std::string("fig6_") + metric;
                panels.push_back(std::move(p));
            }
            break;
        case FigureId::Fig7:
            for (const char* metric : metrics) {
                PanelSpec p = regime_series(6, {0.0, 0.2, 0.8});
                p.filename = std::string("fig7_") + metric;
                panels.push_back(std::move(p));
            }
            break;
        case FigureId::FigA:
            for (int m : all_inputs)
                for (const char* metric : metrics) {
                    PanelSpec p = regime_series(m, {0.0, 0.2, 0.8, 1.0});
                    p.filename = "figA_m" + std::to_string(m) + "_" + metric;
                    panels.push_back(std::move(p));
                }
            break;
    }
    return panels;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> figure_csvs(
    FigureId figure, const std::vector<RunArtifact>& artifacts) {
    const auto index = index_artifacts(artifacts);
    const auto panels = figure_panels(figure);

    // every series must exist; report all gaps at once
    std::vector<SeriesKey> missing;
    for (const auto& panel : panels)
        for (const auto& key : panel.series)
            if (index.find(key) == index.end()) missing.push_back(key);
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end(),
                                  [](const SeriesKey& a, const SeriesKey& b) {
                                      return a.r_sq == b.r_sq && a.input == b.input;
                                  }),
                      missing.end());
        std::string msg = "figure " + to_string(figure) + " is missing series:";
        for (const auto& key : missing)
            msg += " (r_sq=" + format_double(key.r_sq) + ", input=" + std::to_string(key.input) + ")";
        throw SpecError("figure", msg);
    }

    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& panel : panels) {
        const bool mean_metric = panel.filename.find("mean") != std::string::npos;
        int horizon = kMaxHorizon;
        for (const auto& key : panel.series)
            horizon = std::min(horizon, index.at(key)->config.steps);

        std::string csv = "step";
        for (const auto& label : panel.labels) csv += "," + label;
        csv += "\n";
        for (int n = 0; n <= horizon; ++n) {
            csv += std::to_string(n);
            for (const auto& key : panel.series) {
                const auto& row = index.at(key)->rows[static_cast<std::size_t>(n)];
                csv += "," + optional_field(mean_metric ? row.mean : row.variance);
            }
            csv += "\n";
        }
        files.emplace_back(panel.filename + ".csv", std::move(csv));
    }
    return files;
}

std::vector<std::filesystem::path> emit_figure_data(std::optional<FigureId> figure,
                                                    const std::vector<RunArtifact>& artifacts,
                                                    const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    if (!figure) return written;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    for (const auto& [name, contents] : figure_csvs(*figure, artifacts)) {
        const std::filesystem::path path = out_dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write figure file: " + path.string());
        out << contents;
        if (!out) throw IoError("cannot write figure file: " + path.string());
        written.push_back(path);
    }
    return written;
}

CompareReport compare_runs(const RunArtifact& a, const RunArtifact& b) {
    if (a.rows.size() != b.rows.size())
        throw std::domain_error("compare_runs: step horizons differ (" +
                                std::to_string(a.rows.size() - 1) + " vs " +
                                std::to_string(b.rows.size() - 1) + ")");
    CompareReport report;
    report.mean_diff.reserve(a.rows.size());
    report.variance_diff.reserve(a.rows.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& ra = a.rows[i];
        const auto& rb = b.rows[i];
        const double dm = (ra.mean && rb.mean) ? std::abs(*ra.mean - *rb.mean) : nan;
        const double dv =
            (ra.variance && rb.variance) ? std::abs(*ra.variance - *rb.variance) : nan;
        report.mean_diff.push_back(dm);
        report.variance_diff.push_back(dv);
        if (!std::isnan(dm)) report.max_mean_diff = std::max(report.max_mean_diff, dm);
        if (!std::isnan(dv)) report.max_variance_diff = std::max(report.max_variance_diff, dv);
    }
    return report;
}

std::string compare_report_text(const CompareReport& report) {
    std::string out = "step,d_mean,d_variance\n";
    for (std::size_t i = 0; i < report.mean_diff.size(); ++i) {
        out += std::to_string(i);
        out += "," + format_double(report.mean_diff[i]);
        out += "," + format_double(report.variance_diff[i]);
        out += "\n";
    }
    out += "# max_d_mean=" + format_double(report.max_mean_diff) +
           " max_d_variance=" + format_double(report.max_variance_diff) + "\n";
    return out;
}

RunArtifact read_artifact_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open artifact: " + path.string());

    RunArtifact artifact;
    artifact.version = kVersion;
    std::string line;
    bool header_seen = false;
    int columns = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!header_seen) {
            if (fields.size() < 5 || fields[0] != "step")
                throw IoError("unrecognized artifact header in " + path.string());
            columns = static_cast<int>(fields.size());
            header_seen = true;
            continue;
        }
        if (static_cast<int>(fields.size()) != columns)
            throw IoError("ragged artifact row in " + path.string());
        RunArtifact::Row row;
        row.step = std::stoi(fields[0]);
        row.survival = std::stod(fields[1]);
        const auto opt = [](const std::string& s) -> std::optional<double> {
            if (s == "nan") return std::nullopt;
            return std::stod(s);
        };
        row.mean = opt(fields[2]);
        row.variance = opt(fields[3]);
        row.probabilities.resize(columns - 4);
        for (int i = 0; i + 4 < columns; ++i) row.probabilities[i] = std::stod(fields[i + 4]);
        artifact.rows.push_back(std::move(row));
    }
    if (!header_seen) throw IoError("artifact " + path.string() + " has no header row");
    artifact.config.half_width = static_cast<int>(artifact.rows.front().probabilities.size()) / 2;
    artifact.config.steps = static_cast<int>(artifact.rows.size()) - 1;
    return artifact;
}

ordered_json mesh_program_json(const MeshProgram<double>& program) {
    ordered_json doc;
    doc["dimension"] = program.dimension;
    ordered_json mzis = ordered_json::array();
    for (const auto& s : program.mzis) {
        ordered_json m;
        m["i"] = s.mode + 1;   // 1-based first mode of the pair
        m["theta"] = s.theta;
        m["phi"] = s.phi;
        mzis.push_back(std::move(m));
    }
    doc["mzis"] = std::move(mzis);
    std::vector<double> phases(program.output_phases.data(),
                               program.output_phases.data() + program.output_phases.size());
    doc["output_phases"] = phases;
    return doc;
}

MeshProgram<double> mesh_program_from_json(const nlohmann::json& doc) {
    MeshProgram<double> program;
    program.dimension = doc.at("dimension").get<int>();
    for (const auto& m : doc.at("mzis")) {
        MziSetting<double> s;
        s.mode = m.at("i").get<int>() - 1;
        s.theta = m.at("theta").get<double>();
        s.phi = m.at("phi").get<double>();
        program.mzis.push_back(s);
    }
    const auto phases = doc.at("output_phases").get<std::vector<double>>();
    program.output_phases.resize(static_cast<Eigen::Index>(phases.size()));
    for (std::size_t i = 0; i < phases.size(); ++i)
        program.output_phases[static_cast<Eigen::Index>(i)] = phases[i];
    return program;
}

}  // namespace lqw
