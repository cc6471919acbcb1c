// fogsim command-line front end.
//
//   fogsim run --algorithm A --topology T --app P [--duration-ms D] [--seed S] [--out DIR]
//   fogsim matrix [--out DIR] [--jobs N]
//   fogsim chart --figure figN [--in DIR] --out FILE
//   fogsim placements [--in DIR]
//
// DIR defaults to $FOGSIM_OUT, then ./fogsim-out.

#include "fogsim/fogsim.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

std::string default_dir() {
    const char* env = std::getenv("FOGSIM_OUT");
    return env && *env ? env : "fogsim-out";
}

int report_rows(const std::vector<fogsim::RunResult>& rows) {
    int failed = 0;
    for (const auto& r : rows) {
        if (r.ok()) continue;
        ++failed;
        std::cerr << "error: " << r.spec.algorithm << '/' << r.spec.topology << '/' << r.spec.app << ": " << r.error
                  << '\n';
    }
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Fog computing placement simulator"};
    cli.require_subcommand(1);

    fogsim::ScenarioSpec spec;
    std::string out_dir = default_dir();
    std::string trace_path;
    auto* run = cli.add_subcommand("run", "Run one scenario");
    run->add_option("--algorithm", spec.algorithm, "cloud-only | mapping | edge-ward")->required();
    run->add_option("--topology", spec.topology, "top1 | top2 | top3 | path to JSON")->required();
    run->add_option("--app", spec.app, "app1 | app2 | app3 | path to JSON")->required();
    run->add_option("--duration-ms", spec.duration_ms, "Simulated duration")->capture_default_str();
    run->add_option("--seed", spec.seed, "Random seed")->capture_default_str();
    run->add_option("--arrival", spec.arrival, "periodic | exponential")->capture_default_str();
    run->add_flag("--include-placement-time", spec.include_placement_time,
                  "Add placement wall-clock to execution time");
    run->add_flag("--ancestor-lookup", spec.ancestor_instance_lookup,
                  "Edge-ward: merge into an instance already hosted further north");
    run->add_option("--trace", trace_path, "Write the event trace to this file");
    run->add_option("--out", out_dir, "Output directory");

    unsigned jobs = 1;
    std::int64_t matrix_duration = 10'000;
    std::uint64_t matrix_seed = 42;
    auto* matrix = cli.add_subcommand("matrix", "Run all 27 algorithm/topology/app cells");
    matrix->add_option("--out", out_dir, "Output directory");
    matrix->add_option("--jobs", jobs, "Parallel cells")->capture_default_str();
    matrix->add_option("--duration-ms", matrix_duration, "Simulated duration")->capture_default_str();
    matrix->add_option("--seed", matrix_seed, "Random seed")->capture_default_str();

    std::string figure;
    std::string in_dir = default_dir();
    std::string chart_out;
    auto* chart = cli.add_subcommand("chart", "Write grouped-bar data for one figure");
    chart->add_option("--figure", figure, "fig5 | fig6 | fig7 | fig8")->required();
    chart->add_option("--in", in_dir, "Directory holding results.csv");
    chart->add_option("--out", chart_out, "Output .dat file")->required();

    auto* placements = cli.add_subcommand("placements", "Print module counts per device kind");
    placements->add_option("--in", in_dir, "Directory holding placements.json");

    CLI11_PARSE(cli, argc, argv);

    try {
        if (*run) {
            fogsim::validate_spec(spec);
            std::vector<fogsim::RunResult> rows;
            if (trace_path.empty()) {
                rows.push_back(fogsim::run_one(spec));
            } else {
                // Traced runs bypass run_one so the stream can be attached.
                std::ofstream trace(trace_path);
                const auto topo = fogsim::resolve_topology(spec.topology);
                const auto app = fogsim::resolve_app(spec.app);
                const auto inst = fogsim::assemble_instances(topo, app);
                const auto pm = fogsim::place(*fogsim::parse_algorithm(spec.algorithm), topo, app, inst,
                                              {spec.ancestor_instance_lookup, false});
                fogsim::RunOptions opts;
                opts.duration = fogsim::SimTime::from_ms(static_cast<double>(spec.duration_ms));
                opts.seed = spec.seed;
                opts.arrival = *fogsim::parse_arrival_mode(spec.arrival);
                opts.trace = &trace;
                fogsim::RunResult r{spec, fogsim::run_scenario(topo, app, inst, pm, opts),
                                    fogsim::summarize_placement(pm, topo, app, inst),
                                    fogsim::placement_to_json(pm, topo, inst), {}};
                rows.push_back(std::move(r));
            }
            fogsim::write_outputs(out_dir, rows);
            for (const auto& r : rows)
                if (r.report) std::cout << fogsim::to_csv_row(*r.report) << '\n';
            return report_rows(rows);
        }
        if (*matrix) {
            const auto rows = fogsim::run_matrix(fogsim::default_matrix_specs(matrix_duration, matrix_seed), jobs);
            fogsim::write_outputs(out_dir, rows);
            std::cout << fogsim::results_csv(fogsim::reports_of(rows));
            return report_rows(rows);
        }
        if (*chart) {
            const auto fig = fogsim::parse_figure(figure);
            if (!fig) throw fogsim::UsageError("unknown figure '" + figure + "'");
            std::ifstream in(std::filesystem::path(in_dir) / "results.csv");
            if (!in) throw fogsim::UsageError("cannot read " + in_dir + "/results.csv");
            const auto cd = fogsim::emit_chart_data(fogsim::parse_results_csv(in), *fig);
            std::ofstream(chart_out) << fogsim::write_dat(cd);
            return 0;
        }
        if (*placements) {
            const auto j = fogsim::read_json_file((std::filesystem::path(in_dir) / "placements.json").string());
            std::cout << fogsim::format_placement_table(fogsim::emit_placement_table(fogsim::placements_from_json(j)));
            return 0;
        }
    } catch (const fogsim::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
