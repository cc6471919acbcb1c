#include "support.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace fogsim;

namespace {

const std::vector<RunResult>& full_matrix() {
    static const auto rows = run_matrix(default_matrix_specs());
    return rows;
}

} // namespace

TEST(Specs, InvalidValuesRejectedBeforeRunning) {
    ScenarioSpec s;
    s.algorithm = "greedy";
    EXPECT_THROW(validate_spec(s), UsageError);
    s = {};
    s.topology = "top9";
    EXPECT_THROW(validate_spec(s), UsageError);
    s = {};
    s.app = "app4";
    EXPECT_THROW(validate_spec(s), UsageError);
    s = {};
    s.arrival = "bursty";
    EXPECT_THROW(validate_spec(s), UsageError);
    s = {};
    s.duration_ms = 0;
    EXPECT_THROW(validate_spec(s), UsageError);

    auto specs = default_matrix_specs();
    specs.back().algorithm = "nope";
    EXPECT_THROW(run_matrix(specs), UsageError);
}

TEST(Matrix, FullMatrixHas27SortedRows) {
    const auto& rows = full_matrix();
    ASSERT_EQ(rows.size(), 27u);
    for (const auto& r : rows) EXPECT_TRUE(r.ok()) << r.error;
    EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end(), row_less));
    EXPECT_EQ(rows[0].report->scenario, "cloud-only/top1/app1");
    EXPECT_EQ(rows[1].report->scenario, "mapping/top1/app1");
    EXPECT_EQ(rows[26].report->scenario, "edge-ward/top3/app3");
}

TEST(Matrix, SingleMappingCellCompletesLoops) {
    ScenarioSpec s;
    s.algorithm = "mapping";
    const auto r = run_one(s);
    ASSERT_TRUE(r.ok()) << r.error;
    EXPECT_GT(r.report->loops_completed, 0u);
}

TEST(Matrix, StandaloneCellMatchesMatrixRow) {
    const auto& rows = full_matrix();
    for (std::size_t i : {0u, 13u, 26u}) {
        const auto alone = run_one(rows[i].spec);
        EXPECT_EQ(to_csv_row(*alone.report), to_csv_row(*rows[i].report));
    }
}

TEST(Matrix, ParallelRunMatchesSerial) {
    const auto specs = default_matrix_specs(2000);
    EXPECT_EQ(results_csv(reports_of(run_matrix(specs, 1))), results_csv(reports_of(run_matrix(specs, 4))));
}

TEST(Matrix, FailedCellIsRecordedOthersRun) {
    const auto dir = std::filesystem::temp_directory_path() / "fogsim_bad_topology";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "bad.json").string();
    std::ofstream(path) << R"({"devices": [{"id": "c", "kind": "Cloud"}, {"id": "c2", "kind": "Cloud"}]})";
    auto specs = default_matrix_specs(1000);
    specs.resize(2);
    specs[1].topology = path;
    const auto rows = run_matrix(specs);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.ok(); }), 1);
    const auto bad = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return !r.ok(); });
    EXPECT_NE(bad->error.find("devices[1].kind"), std::string::npos);
}

TEST(Matrix, ExponentialModeReportsReplicationSpread) {
    ScenarioSpec s;
    s.algorithm = "mapping";
    s.app = "app2";
    s.arrival = "exponential";
    s.duration_ms = 2000;
    const auto r = run_one(s);
    ASSERT_TRUE(r.ok()) << r.error;
    EXPECT_EQ(r.report->replications, kExponentialReplications);
    EXPECT_GT(r.report->execution_time_stddev_s, 0.0);
}

TEST(Matrix, PlacementTimeCanBeAdded) {
    ScenarioSpec s;
    s.include_placement_time = true;
    const auto with = run_one(s);
    s.include_placement_time = false;
    const auto without = run_one(s);
    EXPECT_NEAR(with.report->execution_time_s - without.report->execution_time_s,
                with.report->placement_wallclock_ms / 1000.0, 1e-9);
}

TEST(Charts, Cardinality) {
    const auto reports = reports_of(full_matrix());
    for (auto f : {Figure::Fig5, Figure::Fig6, Figure::Fig7, Figure::Fig8}) {
        const auto cd = emit_chart_data(reports, f);
        std::size_t n = 0;
        for (const auto& row : cd.values) n += row.size();
        EXPECT_EQ(n, 9u);
    }
    const auto fig5 = emit_chart_data(reports, Figure::Fig5);
    EXPECT_EQ(fig5.rows, (std::vector<std::string>{"top1", "top2", "top3"}));
    EXPECT_EQ(fig5.columns, (std::vector<std::string>{"cloud-only", "mapping", "edge-ward"}));
    const auto fig8 = emit_chart_data(reports, Figure::Fig8);
    EXPECT_EQ(fig8.rows, (std::vector<std::string>{"cloud-only", "mapping", "edge-ward"}));
    EXPECT_EQ(fig8.columns, (std::vector<std::string>{"app1", "app2", "app3"}));
}

TEST(Charts, MissingCellsAreNamed) {
    auto reports = reports_of(full_matrix());
    std::erase_if(reports, [](const auto& r) { return r.algorithm == "edge-ward"; });
    try {
        emit_chart_data(reports, Figure::Fig5);
        FAIL();
    } catch (const MissingCell& e) {
        const std::string msg = e.what();
        for (const char* t : {"top1", "top2", "top3"})
            EXPECT_NE(msg.find(std::string("(edge-ward, ") + t + ", app1)"), std::string::npos) << msg;
    }
}

TEST(Charts, DatRoundTripFromMatrix) {
    const auto reports = reports_of(full_matrix());
    for (auto f : {Figure::Fig5, Figure::Fig6, Figure::Fig7, Figure::Fig8}) {
        const auto cd = emit_chart_data(reports, f);
        EXPECT_EQ(parse_dat(write_dat(cd)), cd);
    }
}

TEST(Placements, KindCountsPerCell) {
    std::vector<PlacementSummary> ps;
    for (const auto& r : full_matrix()) ps.push_back(*r.placement);
    const auto table = emit_placement_table(ps);
    ASSERT_EQ(table.size(), 27u * 2u);
    for (const auto& c : table) {
        if (c.algorithm == "cloud-only") {
            EXPECT_EQ(c.counts.size(), 1u);
            EXPECT_TRUE(c.counts.contains(DeviceKind::Cloud));
        }
        if (c.algorithm == "mapping" && c.topology == "top1" && c.app == "app3") {
            const auto expected = c.module == "ClientModule" ? DeviceKind::FogDevice : DeviceKind::Cloud;
            EXPECT_EQ(c.counts, (std::map<DeviceKind, std::size_t>{{expected, 4}}));
        }
        if (c.algorithm == "edge-ward" && c.app == "app3") {
            EXPECT_EQ(c.counts.size(), 1u);
            EXPECT_TRUE(c.counts.contains(DeviceKind::Cloud));
        }
    }
}

TEST(Outputs, WrittenFilesReloadIdentically) {
    const auto dir = std::filesystem::temp_directory_path() / "fogsim_outputs_test";
    std::filesystem::remove_all(dir);
    const auto& rows = full_matrix();
    write_outputs(dir, rows);
    std::ifstream csv(dir / "results.csv");
    const auto back = parse_results_csv(csv);
    EXPECT_EQ(results_csv(back), results_csv(reports_of(rows)));
    EXPECT_TRUE(std::filesystem::exists(dir / "runs" / "edge-ward_top2_app3.json"));
    std::vector<PlacementSummary> expected;
    for (const auto& r : rows) expected.push_back(*r.placement);
    EXPECT_EQ(placements_from_json(read_json_file((dir / "placements.json").string())), expected);
}
