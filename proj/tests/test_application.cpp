#include "fogsim/application.hpp"
#include "fogsim/io.hpp"
#include "fogsim/scenario.hpp"

#include <gtest/gtest.h>

using namespace fogsim;

namespace {

const TupleType& source(const Application& a) { return a.edges()[a.source_edge()]; }

TupleType edge(std::string src, std::string dst, double cpu = 1, double ia = 0) {
    return TupleType{src + "->" + dst, std::move(src), std::move(dst), cpu, 1, ia};
}

} // namespace

TEST(Presets, SourceTupleIntensity) {
    const auto a1 = make_app(AppPreset::App1);
    EXPECT_EQ(source(a1).cpu_length, 1000);
    EXPECT_EQ(source(a1).nw_length, 1);
    EXPECT_EQ(source(a1).inter_arrival_ms, 1000);
    const auto a2 = make_app(AppPreset::App2);
    EXPECT_EQ(source(a2).cpu_length, 5000);
    EXPECT_EQ(source(a2).nw_length, 1000);
    EXPECT_EQ(source(a2).inter_arrival_ms, 50);
    const auto a3 = make_app(AppPreset::App3);
    EXPECT_EQ(source(a3).cpu_length, 10000);
    EXPECT_EQ(source(a3).nw_length, 7000);
    EXPECT_EQ(source(a3).inter_arrival_ms, 20);
}

TEST(Presets, TwoModulesWithStoragePinnedToCloud) {
    const auto a = make_app(AppPreset::App2);
    ASSERT_EQ(a.modules().size(), 2u);
    EXPECT_EQ(a.modules()[0].name, "ClientModule");
    EXPECT_EQ(a.modules()[1].name, "StorageModule");
    EXPECT_EQ(a.module("StorageModule").pinned_to, DeviceKind::Cloud);
    EXPECT_FALSE(a.module("ClientModule").pinned_to.has_value());
    EXPECT_EQ(a.module("ClientModule").required_cpu, 5000);
}

TEST(Presets, LoopEdgesExcludeStorageCopy) {
    const auto a = make_app(AppPreset::App1);
    for (std::size_t i = 0; i < a.edges().size(); ++i) {
        const bool storage = a.edges()[i].dst == "StorageModule";
        EXPECT_EQ(a.on_loop(i), !storage) << a.edges()[i].name;
    }
}

TEST(Predecessors, SensorSourceCountsAsPlaced) {
    const auto a = make_app(AppPreset::App1);
    EXPECT_TRUE(predecessors_placed(a.module("ClientModule"), {}, a));
    EXPECT_FALSE(predecessors_placed(a.module("StorageModule"), {}, a));
    EXPECT_TRUE(predecessors_placed(a.module("StorageModule"), {"ClientModule"}, a));
}

TEST(TopologicalOrder, Examples) {
    EXPECT_EQ(topological_modules(make_app(AppPreset::App1)),
              (std::vector<std::string>{"ClientModule", "StorageModule"}));

    const Application single("one", {{"M", 10, std::nullopt}}, {edge("sensor", "M", 1, 5), edge("M", "actuator")});
    EXPECT_EQ(topological_modules(single), std::vector<std::string>{"M"});

    const Application pair("two", {{"B", 10, std::nullopt}, {"A", 10, std::nullopt}, {"S", 10, std::nullopt}},
                           {edge("sensor", "S", 1, 5), edge("S", "B"), edge("S", "A"), edge("A", "actuator")});
    EXPECT_EQ(topological_modules(pair), (std::vector<std::string>{"S", "A", "B"}));
}

TEST(Validation, CycleRejected) {
    EXPECT_THROW(Application("cyc", {{"A", 1, std::nullopt}, {"B", 1, std::nullopt}},
                             {edge("sensor", "A", 1, 5), edge("A", "B"), edge("B", "A"), edge("B", "actuator")}),
                 CyclicApplication);
}

TEST(Validation, MalformedGraphs) {
    // unknown destination
    EXPECT_THROW(Application("x", {{"A", 1, std::nullopt}}, {edge("sensor", "Z", 1, 5), edge("A", "actuator")}),
                 ConfigError);
    // no actuator edge
    EXPECT_THROW(Application("x", {{"A", 1, std::nullopt}}, {edge("sensor", "A", 1, 5)}), ConfigError);
    // zero demand
    EXPECT_THROW(Application("x", {{"A", 0, std::nullopt}}, {edge("sensor", "A", 1, 5), edge("A", "actuator")}),
                 ConfigError);
    // non-positive inter-arrival
    EXPECT_THROW(Application("x", {{"A", 1, std::nullopt}}, {edge("sensor", "A", 1, 0), edge("A", "actuator")}),
                 ConfigError);
    // storage pinned elsewhere
    EXPECT_THROW(Application("x", {{"A", 1, std::nullopt}, {"StorageModule", 1, DeviceKind::Gateway}},
                             {edge("sensor", "A", 1, 5), edge("A", "StorageModule"), edge("A", "actuator")}),
                 ConfigError);
}

TEST(Validation, StorageModuleAlwaysPinned) {
    const Application a("x", {{"A", 1, std::nullopt}, {"StorageModule", 1, std::nullopt}},
                        {edge("sensor", "A", 1, 5), edge("A", "StorageModule"), edge("A", "actuator")});
    EXPECT_EQ(a.module("StorageModule").pinned_to, DeviceKind::Cloud);
}

TEST(Config, RoundTrip) {
    for (auto p : {AppPreset::App1, AppPreset::App2, AppPreset::App3}) {
        const auto a = make_app(p);
        EXPECT_EQ(application_from_json(json::parse(application_to_json(a).dump())), a);
    }
}

TEST(Config, ErrorsNameTheField) {
    try {
        application_from_json(json::parse(R"({"id": "x", "modules": [{"name": "A", "required_cpu_mips": 5,
            "pinned_to": "Moon"}], "edges": []})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "modules[0].pinned_to");
    }
}

TEST(Instances, OnePerSensorWithSiblingActuator) {
    const auto t = build_top3();
    const auto a = make_app(AppPreset::App1);
    const auto inst = assemble_instances(t, a);
    ASSERT_EQ(inst.size(), 6u);
    for (const auto& i : inst) {
        EXPECT_EQ(t.device(i.sensor).parent, t.device(i.actuator).parent);
        EXPECT_EQ(i.path.front(), *t.device(i.sensor).parent);
        EXPECT_EQ(i.path.back(), t.cloud());
        EXPECT_EQ(i.label, "app1@" + t.device(i.sensor).name);
    }
}
