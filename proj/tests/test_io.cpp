#include "support.hpp"

#include <gtest/gtest.h>

using namespace fogsim;

TEST(Numbers, ShortestRoundTrip) {
    for (double v : {0.0, 1.0, 0.1, 357.142857142857, 1e-300, 123456789.125, -2.5}) {
        EXPECT_EQ(parse_number(format_number(v), "x"), v);
    }
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(12.0), "12");
    EXPECT_THROW(parse_number("12ab", "f"), ConfigError);
}

TEST(Csv, HeaderAndRowLayout) {
    MetricsReport r;
    r.scenario = "mapping/top1/app1";
    r.algorithm = "mapping";
    r.topology = "top1";
    r.app = "app1";
    r.execution_time_s = 1.5;
    r.cloud_energy_j = 100;
    r.total_energy_j = 200.25;
    r.loops_completed = 7;
    r.mean_loop_ms = 3.5;
    r.max_loop_ms = 4;
    r.placement_wallclock_ms = 0.4;
    EXPECT_EQ(kCsvHeader, "scenario,algorithm,topology,app,execution_time_s,cloud_energy_j,total_energy_j,"
                          "loops_completed,mean_loop_ms,max_loop_ms,placement_wallclock_ms");
    EXPECT_EQ(to_csv_row(r), "mapping/top1/app1,mapping,top1,app1,1.5,100,200.25,7,3.5,4,0");
    const auto back = from_csv_row(to_csv_row(r));
    EXPECT_EQ(back.total_energy_j, 200.25);
    EXPECT_EQ(back.loops_completed, 7u);
    EXPECT_THROW(from_csv_row("a,b,c"), ConfigError);
}

TEST(Json, PlacementListsEveryAssignment) {
    const auto t = build_top1();
    const auto a = make_app(AppPreset::App2);
    const auto inst = assemble_instances(t, a);
    const auto pm = place(Algorithm::EdgeWard, t, a, inst);
    const auto j = placement_to_json(pm, t, inst);
    EXPECT_EQ(j["algorithm"], "edge-ward");
    EXPECT_EQ(j["assignments"].size(), 8u);
    EXPECT_EQ(j["merges"].size(), pm.merges.size());
    EXPECT_EQ(j["merges"][0]["moved_to"], "cloud");
}

TEST(Json, ReportCarriesDeviceBreakdown) {
    const auto t = build_top1();
    const auto a = make_app(AppPreset::App1);
    const auto inst = assemble_instances(t, a);
    const auto pm = place(Algorithm::Mapping, t, a, inst);
    RunOptions o;
    o.duration = SimTime::from_ms(1500);
    const auto rep = run_scenario(t, a, inst, pm, o);
    const auto j = report_to_json(rep);
    EXPECT_EQ(j["devices"].size(), t.size());
    EXPECT_EQ(j["devices"][0]["id"], "cloud");
    EXPECT_EQ(j["loops_completed"], rep.loops_completed);
}

TEST(Files, MissingFileIsConfigError) {
    EXPECT_THROW(load_topology("/nonexistent/topology.json"), ConfigError);
    EXPECT_THROW(load_application("/nonexistent/app.json"), ConfigError);
}
