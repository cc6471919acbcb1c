// Experiment harness: scenario specs, the algorithm x topology x app matrix,
// chart data for the execution-time and cloud-energy figures, and the
// per-device-kind placement table.

#pragma once

#include "fogsim/application.hpp"
#include "fogsim/errors.hpp"
#include "fogsim/io.hpp"
#include "fogsim/placement.hpp"
#include "fogsim/runtime.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/topology.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace fogsim {

inline constexpr std::uint64_t kExponentialReplications = 10;

struct ScenarioSpec {
    std::string algorithm = "cloud-only";
    std::string topology = "top1"; // preset name or JSON file path
    std::string app = "app1";      // preset name or JSON file path
    std::int64_t duration_ms = 10'000;
    std::uint64_t seed = 42;
    std::string arrival = "periodic";
    bool include_placement_time = false;
    bool ancestor_instance_lookup = false;
};

inline std::optional<Topology> preset_topology(const std::string& name) {
    if (name == "top1") return build_top1();
    if (name == "top2") return build_top2();
    if (name == "top3") return build_top3();
    return std::nullopt;
}

inline std::optional<Application> preset_app(const std::string& name) {
    if (name == "app1") return make_app(AppPreset::App1);
    if (name == "app2") return make_app(AppPreset::App2);
    if (name == "app3") return make_app(AppPreset::App3);
    return std::nullopt;
}

inline Topology resolve_topology(const std::string& ref) {
    if (auto t = preset_topology(ref)) return *t;
    return load_topology(ref);
}

inline Application resolve_app(const std::string& ref) {
    if (auto a = preset_app(ref)) return *a;
    return load_application(ref);
}

// Throws UsageError on the first invalid field. Names that are neither a
// preset nor an existing file are rejected here; file contents are checked
// when the cell runs.
inline void validate_spec(const ScenarioSpec& s) {
    if (!parse_algorithm(s.algorithm)) throw UsageError("unknown algorithm '" + s.algorithm + "'");
    if (!parse_arrival_mode(s.arrival)) throw UsageError("unknown arrival mode '" + s.arrival + "'");
    if (s.duration_ms <= 0) throw UsageError("duration must be positive");
    if (!preset_topology(s.topology) && !std::filesystem::is_regular_file(s.topology))
        throw UsageError("unknown topology '" + s.topology + "'");
    if (!preset_app(s.app) && !std::filesystem::is_regular_file(s.app))
        throw UsageError("unknown application '" + s.app + "'");
}

inline void validate_specs(const std::vector<ScenarioSpec>& specs) {
    for (const auto& s : specs) validate_spec(s);
}

// Device-kind view of a placement, enough to rebuild the placement table.
struct PlacementSummary {
    std::string algorithm;
    std::string topology;
    std::string app;
    struct Row {
        std::string instance;
        std::string module;
        std::string device;
        DeviceKind kind = DeviceKind::Cloud;
        bool operator==(const Row&) const = default;
    };
    std::vector<Row> rows;
    bool operator==(const PlacementSummary&) const = default;
};

struct RunResult {
    ScenarioSpec spec;
    std::optional<MetricsReport> report;
    std::optional<PlacementSummary> placement;
    json placement_detail; // full placement map, for the JSON output
    std::string error;     // set when the cell failed

    [[nodiscard]] bool ok() const { return report.has_value(); }
};

inline PlacementSummary summarize_placement(const PlacementMap& pm, const Topology& topo, const Application& app,
                                            const std::vector<AppInstance>& instances) {
    PlacementSummary s{std::string(to_string(pm.algorithm)), topo.name(), app.id(), {}};
    for (const auto& [key, dev] : pm.assignments) {
        const auto& d = topo.device(dev);
        s.rows.push_back({instances.at(key.instance).label, key.module, d.name, d.kind});
    }
    return s;
}

namespace detail {

inline void mean_and_stddev(const std::vector<double>& xs, double& mean, double& sd) {
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

} // namespace detail

// Runs one cell. Deterministic unless `include_placement_time` is set.
inline RunResult run_one(const ScenarioSpec& spec) {
    RunResult out{spec, std::nullopt, std::nullopt, json(), {}};
    try {
        validate_spec(spec);
        const Topology topo = resolve_topology(spec.topology);
        const Application app = resolve_app(spec.app);
        const auto instances = assemble_instances(topo, app);
        const auto algo = *parse_algorithm(spec.algorithm);

        const auto t0 = std::chrono::steady_clock::now();
        const PlacementMap pm = place(algo, topo, app, instances, EdgewardOptions{spec.ancestor_instance_lookup, false});
        const double placement_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

        RunOptions opts;
        opts.duration = SimTime::from_ms(static_cast<double>(spec.duration_ms));
        opts.arrival = *parse_arrival_mode(spec.arrival);
        opts.extra_execution_ms = spec.include_placement_time ? placement_ms : 0.0;

        const std::uint64_t reps = opts.arrival == ArrivalMode::Exponential ? kExponentialReplications : 1;
        std::vector<MetricsReport> runs;
        for (std::uint64_t r = 0; r < reps; ++r) {
            opts.seed = spec.seed + r;
            runs.push_back(run_scenario(topo, app, instances, pm, opts));
        }

        MetricsReport rep = runs.front();
        if (reps > 1) {
            auto collect = [&](auto field) {
                std::vector<double> xs;
                for (const auto& r : runs) xs.push_back(static_cast<double>(r.*field));
                return xs;
            };
            double sd = 0.0;
            detail::mean_and_stddev(collect(&MetricsReport::execution_time_s), rep.execution_time_s,
                                    rep.execution_time_stddev_s);
            detail::mean_and_stddev(collect(&MetricsReport::cloud_energy_j), rep.cloud_energy_j,
                                    rep.cloud_energy_stddev_j);
            detail::mean_and_stddev(collect(&MetricsReport::total_energy_j), rep.total_energy_j, sd);
            detail::mean_and_stddev(collect(&MetricsReport::mean_loop_ms), rep.mean_loop_ms, sd);
            detail::mean_and_stddev(collect(&MetricsReport::max_loop_ms), rep.max_loop_ms, sd);
            double loops = 0.0;
            detail::mean_and_stddev(collect(&MetricsReport::loops_completed), loops, sd);
            rep.loops_completed = static_cast<std::uint64_t>(std::llround(loops));
            rep.replications = reps;
        }
        rep.placement_wallclock_ms = placement_ms;
        out.report = std::move(rep);
        out.placement = summarize_placement(pm, topo, app, instances);
        out.placement_detail = placement_to_json(pm, topo, instances);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

inline bool row_less(const RunResult& a, const RunResult& b) {
    auto key = [](const RunResult& r) {
        const std::string app = r.report ? r.report->app : r.spec.app;
        const std::string topo = r.report ? r.report->topology : r.spec.topology;
        const auto algo = parse_algorithm(r.spec.algorithm);
        return std::make_tuple(app, topo, algo ? static_cast<int>(*algo) : 99, r.spec.algorithm);
    };
    return key(a) < key(b);
}

// Validates every spec up front (UsageError), then runs the cells on up to
// `jobs` threads. Failed cells carry their error; the rest still run. Rows
// come back sorted by (app, topology, algorithm).
inline std::vector<RunResult> run_matrix(const std::vector<ScenarioSpec>& specs, unsigned jobs = 1) {
    validate_specs(specs);
    std::vector<RunResult> rows(specs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < specs.size(); i = next++) rows[i] = run_one(specs[i]);
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(specs.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::stable_sort(rows.begin(), rows.end(), row_less);
    return rows;
}

inline std::vector<ScenarioSpec> default_matrix_specs(std::int64_t duration_ms = 10'000, std::uint64_t seed = 42) {
    std::vector<ScenarioSpec> out;
    for (const char* app : {"app1", "app2", "app3"})
        for (const char* topo : {"top1", "top2", "top3"})
            for (auto algo : kAllAlgorithms) {
                ScenarioSpec s;
                s.algorithm = std::string(to_string(algo));
                s.topology = topo;
                s.app = app;
                s.duration_ms = duration_ms;
                s.seed = seed;
                out.push_back(s);
            }
    return out;
}

inline std::vector<MetricsReport> reports_of(const std::vector<RunResult>& rows) {
    std::vector<MetricsReport> out;
    for (const auto& r : rows)
        if (r.report) out.push_back(*r.report);
    return out;
}

inline std::string results_csv(const std::vector<MetricsReport>& reports) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : reports) out += to_csv_row(r) + '\n';
    return out;
}

inline std::vector<MetricsReport> parse_results_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw ConfigError("csv", "missing or unexpected header");
    std::vector<MetricsReport> out;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(from_csv_row(line));
    return out;
}

// ---- chart data ---------------------------------------------------------------

enum class Figure { Fig5, Fig6, Fig7, Fig8 };

inline std::optional<Figure> parse_figure(std::string_view s) {
    if (s == "fig5") return Figure::Fig5;
    if (s == "fig6") return Figure::Fig6;
    if (s == "fig7") return Figure::Fig7;
    if (s == "fig8") return Figure::Fig8;
    return std::nullopt;
}

inline std::string_view to_string(Figure f) {
    switch (f) {
    case Figure::Fig5: return "fig5";
    case Figure::Fig6: return "fig6";
    case Figure::Fig7: return "fig7";
    case Figure::Fig8: return "fig8";
    }
    return "?";
}

// Grouped-bar table. fig5/6/7: rows are topologies, columns algorithms,
// values execution_time_s of app1/2/3. fig8: rows are algorithms, columns
// apps, values cloud_energy_j averaged over the three topologies.
struct ChartData {
    std::string figure;
    std::string metric;
    std::string row_label;
    std::vector<std::string> columns;
    std::vector<std::string> rows;
    std::vector<std::vector<double>> values; // [row][column]

    [[nodiscard]] double at(const std::string& row, const std::string& col) const {
        const auto r = std::find(rows.begin(), rows.end(), row) - rows.begin();
        const auto c = std::find(columns.begin(), columns.end(), col) - columns.begin();
        return values.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
    }

    bool operator==(const ChartData&) const = default;
};

inline const std::vector<std::string>& preset_topologies() {
    static const std::vector<std::string> v{"top1", "top2", "top3"};
    return v;
}
inline const std::vector<std::string>& preset_apps() {
    static const std::vector<std::string> v{"app1", "app2", "app3"};
    return v;
}
inline std::vector<std::string> algorithm_names() {
    std::vector<std::string> v;
    for (auto a : kAllAlgorithms) v.emplace_back(to_string(a));
    return v;
}

inline ChartData emit_chart_data(const std::vector<MetricsReport>& matrix, Figure fig) {
    std::map<std::tuple<std::string, std::string, std::string>, const MetricsReport*> cells;
    for (const auto& r : matrix) cells[{r.algorithm, r.topology, r.app}] = &r;

    std::vector<std::string> missing;
    auto cell = [&](const std::string& algo, const std::string& topo, const std::string& app) -> const MetricsReport* {
        auto it = cells.find({algo, topo, app});
        if (it != cells.end()) return it->second;
        missing.push_back("(" + algo + ", " + topo + ", " + app + ")");
        return nullptr;
    };

    ChartData cd;
    cd.figure = std::string(to_string(fig));
    if (fig == Figure::Fig8) {
        cd.metric = "cloud_energy_j";
        cd.row_label = "algorithm";
        cd.rows = algorithm_names();
        cd.columns = preset_apps();
        for (const auto& algo : cd.rows) {
            std::vector<double> line;
            for (const auto& app : cd.columns) {
                double sum = 0.0;
                for (const auto& topo : preset_topologies())
                    if (const auto* r = cell(algo, topo, app)) sum += r->cloud_energy_j;
                line.push_back(sum / static_cast<double>(preset_topologies().size()));
            }
            cd.values.push_back(std::move(line));
        }
    } else {
        const std::string app = fig == Figure::Fig5 ? "app1" : fig == Figure::Fig6 ? "app2" : "app3";
        cd.metric = "execution_time_s:" + app;
        cd.row_label = "topology";
        cd.rows = preset_topologies();
        cd.columns = algorithm_names();
        for (const auto& topo : cd.rows) {
            std::vector<double> line;
            for (const auto& algo : cd.columns) {
                const auto* r = cell(algo, topo, app);
                line.push_back(r ? r->execution_time_s : 0.0);
            }
            cd.values.push_back(std::move(line));
        }
    }
    if (!missing.empty()) {
        std::string msg = "missing cells:";
        for (const auto& m : missing) msg += " " + m;
        throw MissingCell(msg);
    }
    return cd;
}

// .dat layout:
//   # <figure> <metric>
//   <row_label> <col1> <col2> ...
//   <row> <v1> <v2> ...
inline std::string write_dat(const ChartData& cd) {
    std::ostringstream os;
    os << "# " << cd.figure << ' ' << cd.metric << '\n' << cd.row_label;
    for (const auto& c : cd.columns) os << ' ' << c;
    os << '\n';
    for (std::size_t i = 0; i < cd.rows.size(); ++i) {
        os << cd.rows[i];
        for (double v : cd.values[i]) os << ' ' << format_number(v);
        os << '\n';
    }
    return os.str();
}

inline ChartData parse_dat(const std::string& text) {
    std::istringstream in(text);
    ChartData cd;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw ConfigError("dat", "missing '# figure metric' line");
    {
        std::istringstream hs(line.substr(2));
        if (!(hs >> cd.figure >> cd.metric)) throw ConfigError("dat", "malformed title line");
    }
    if (!std::getline(in, line)) throw ConfigError("dat", "missing column header");
    {
        std::istringstream hs(line);
        hs >> cd.row_label;
        for (std::string c; hs >> c;) cd.columns.push_back(c);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string row;
        ls >> row;
        std::vector<double> vals;
        for (std::string tok; ls >> tok;) vals.push_back(parse_number(tok, "dat." + row));
        if (vals.size() != cd.columns.size()) throw ConfigError("dat." + row, "column count mismatch");
        cd.rows.push_back(row);
        cd.values.push_back(std::move(vals));
    }
    return cd;
}

// ---- placement table ------------------------------------------------------------

struct PlacementCount {
    std::string app;
    std::string topology;
    std::string algorithm;
    std::string module;
    std::map<DeviceKind, std::size_t> counts;
};

inline std::vector<PlacementCount> emit_placement_table(const std::vector<PlacementSummary>& placements) {
    std::map<std::tuple<std::string, std::string, int, std::string>, PlacementCount> table;
    for (const auto& p : placements) {
        const auto algo = parse_algorithm(p.algorithm);
        for (const auto& row : p.rows) {
            auto& c = table[{p.app, p.topology, algo ? static_cast<int>(*algo) : 99, row.module}];
            c.app = p.app;
            c.topology = p.topology;
            c.algorithm = p.algorithm;
            c.module = row.module;
            ++c.counts[row.kind];
        }
    }
    std::vector<PlacementCount> out;
    for (auto& [_, c] : table) out.push_back(std::move(c));
    return out;
}

inline std::string format_placement_table(const std::vector<PlacementCount>& table) {
    std::ostringstream os;
    os << "app,topology,algorithm,module";
    for (auto k : kAllDeviceKinds)
        if (!is_field_device(k)) os << ',' << to_string(k);
    os << '\n';
    for (const auto& c : table) {
        os << c.app << ',' << c.topology << ',' << c.algorithm << ',' << c.module;
        for (auto k : kAllDeviceKinds) {
            if (is_field_device(k)) continue;
            auto it = c.counts.find(k);
            os << ',' << (it == c.counts.end() ? 0 : it->second);
        }
        os << '\n';
    }
    return os.str();
}

inline json placements_to_json(const std::vector<RunResult>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        if (!r.placement) continue;
        json entry{{"algorithm", r.placement->algorithm},
                   {"topology", r.placement->topology},
                   {"app", r.placement->app},
                   {"placement", r.placement_detail}};
        arr.push_back(std::move(entry));
    }
    return arr;
}

inline std::vector<PlacementSummary> placements_from_json(const json& arr) {
    if (!arr.is_array()) throw ConfigError("placements", "expected an array");
    std::vector<PlacementSummary> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& e = arr[i];
        const std::string field = "placements[" + std::to_string(i) + "]";
        PlacementSummary s;
        s.algorithm = detail::required_string(e, "algorithm", field);
        s.topology = detail::required_string(e, "topology", field);
        s.app = detail::required_string(e, "app", field);
        for (const auto& row : e.at("placement").at("assignments")) {
            auto kind = parse_device_kind(row.at("device_kind").get<std::string>());
            if (!kind) throw ConfigError(field + ".placement", "unknown device kind");
            s.rows.push_back({row.at("instance").get<std::string>(), row.at("module").get<std::string>(),
                              row.at("device").get<std::string>(), *kind});
        }
        out.push_back(std::move(s));
    }
    return out;
}

// Writes results.csv, runs/<algorithm>_<topology>_<app>.json and
// placements.json under `dir`.
inline void write_outputs(const std::filesystem::path& dir, const std::vector<RunResult>& rows) {
    std::filesystem::create_directories(dir / "runs");
    {
        std::ofstream csv(dir / "results.csv", std::ios::binary);
        csv << results_csv(reports_of(rows));
    }
    for (const auto& r : rows) {
        if (!r.report) continue;
        std::ofstream js(dir / "runs" / (r.report->algorithm + "_" + r.report->topology + "_" + r.report->app + ".json"));
        js << report_to_json(*r.report).dump(2) << '\n';
    }
    std::ofstream pj(dir / "placements.json");
    pj << placements_to_json(rows).dump(2) << '\n';
}

} // namespace fogsim
