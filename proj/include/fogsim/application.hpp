// Application model: a DAG of modules whose edges are tuple types. Edges may
// start at the sensor endpoint and end at the actuator endpoint; everything
// else names a module.

#pragma once

#include "fogsim/errors.hpp"
#include "fogsim/topology.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fogsim {

inline constexpr std::string_view kSensorEndpoint = "sensor";
inline constexpr std::string_view kActuatorEndpoint = "actuator";

inline constexpr std::string_view kClientModule = "ClientModule";
inline constexpr std::string_view kStorageModule = "StorageModule";

// Per-tuple work of the storage module, in million instructions.
inline constexpr double kStorageCpuLength = 100.0;

struct AppModule {
    std::string name;
    double required_cpu = 0.0; // MIPS demanded by one hosted instance
    std::optional<DeviceKind> pinned_to;

    bool operator==(const AppModule&) const = default;
};

struct TupleType {
    std::string name;
    std::string src;
    std::string dst;
    double cpu_length = 0.0;       // million instructions executed by dst
    double nw_length = 0.0;        // KBytes, reported only
    double inter_arrival_ms = 0.0; // source edges only

    [[nodiscard]] bool from_sensor() const { return src == kSensorEndpoint; }
    [[nodiscard]] bool to_actuator() const { return dst == kActuatorEndpoint; }

    bool operator==(const TupleType&) const = default;
};

class Application;
std::vector<std::string> topological_modules(const Application& app);

class Application {
public:
    Application() = default;

    // Throws ConfigError for malformed graphs and CyclicApplication for cycles.
    Application(std::string id, std::vector<AppModule> modules, std::vector<TupleType> edges)
        : id_(std::move(id)), modules_(std::move(modules)), edges_(std::move(edges)) {
        validate();
    }

    [[nodiscard]] const std::string& id() const { return id_; }
    [[nodiscard]] const std::vector<AppModule>& modules() const { return modules_; }
    [[nodiscard]] const std::vector<TupleType>& edges() const { return edges_; }

    [[nodiscard]] std::optional<std::size_t> module_index(std::string_view name) const {
        for (std::size_t i = 0; i < modules_.size(); ++i)
            if (modules_[i].name == name) return i;
        return std::nullopt;
    }

    [[nodiscard]] const AppModule& module(std::string_view name) const {
        auto i = module_index(name);
        if (!i) throw Error("application " + id_ + " has no module " + std::string(name));
        return modules_[*i];
    }

    [[nodiscard]] std::size_t source_edge() const { return source_edge_; }

    [[nodiscard]] std::vector<std::size_t> out_edges(std::string_view module) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < edges_.size(); ++i)
            if (edges_[i].src == module) out.push_back(i);
        return out;
    }

    // Module names with an edge into `module`; the sensor endpoint is omitted.
    [[nodiscard]] std::vector<std::string> predecessors(std::string_view module) const {
        std::set<std::string> preds;
        for (const auto& e : edges_)
            if (e.dst == module && !e.from_sensor()) preds.insert(e.src);
        return {preds.begin(), preds.end()};
    }

    // True for edges lying on some sensor-to-actuator route (control-loop hops).
    [[nodiscard]] bool on_loop(std::size_t edge) const { return on_loop_.at(edge); }

    bool operator==(const Application& o) const {
        return id_ == o.id_ && modules_ == o.modules_ && edges_ == o.edges_;
    }

private:
    void validate() {
        std::set<std::string> names;
        for (std::size_t i = 0; i < modules_.size(); ++i) {
            auto& m = modules_[i];
            const std::string field = "modules[" + std::to_string(i) + "]";
            if (m.name.empty() || m.name == kSensorEndpoint || m.name == kActuatorEndpoint)
                throw ConfigError(field + ".name", "invalid module name '" + m.name + "'");
            if (!names.insert(m.name).second) throw ConfigError(field + ".name", "duplicate module " + m.name);
            if (!(m.required_cpu > 0)) throw ConfigError(field + ".required_cpu_mips", "must be positive");
            if (m.name == kStorageModule) {
                if (m.pinned_to && *m.pinned_to != DeviceKind::Cloud)
                    throw ConfigError(field + ".pinned_to", "StorageModule always runs in the cloud");
                m.pinned_to = DeviceKind::Cloud;
            }
        }
        std::size_t sources = 0;
        std::size_t sinks = 0;
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            const auto& e = edges_[i];
            const std::string field = "edges[" + std::to_string(i) + "]";
            if (e.to_actuator()) ++sinks;
            if (e.from_sensor()) {
                ++sources;
                source_edge_ = i;
                if (!(e.inter_arrival_ms > 0)) throw ConfigError(field + ".inter_arrival_ms", "must be positive");
            } else if (!names.contains(e.src)) {
                throw ConfigError(field + ".src", "unknown module " + e.src);
            }
            if (!e.to_actuator() && !names.contains(e.dst)) throw ConfigError(field + ".dst", "unknown module " + e.dst);
            if (e.from_sensor() && e.to_actuator()) throw ConfigError(field, "edge bypasses every module");
            if (e.cpu_length < 0) throw ConfigError(field + ".cpu_mi", "must be non-negative");
            if (e.nw_length < 0) throw ConfigError(field + ".nw_kbytes", "must be non-negative");
        }
        if (sources != 1) throw ConfigError("edges", "exactly one sensor source edge required");
        if (sinks != 1) throw ConfigError("edges", "exactly one actuator sink edge required");

        (void)topological_modules(*this);

        on_loop_.assign(edges_.size(), false);
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < edges_.size(); ++i) {
                if (on_loop_[i]) continue;
                bool reaches = edges_[i].to_actuator();
                for (std::size_t j = 0; j < edges_.size() && !reaches; ++j)
                    reaches = on_loop_[j] && edges_[j].src == edges_[i].dst;
                if (reaches) on_loop_[i] = changed = true;
            }
        }
    }

    std::string id_;
    std::vector<AppModule> modules_;
    std::vector<TupleType> edges_;
    std::size_t source_edge_ = 0;
    std::vector<bool> on_loop_;
};

// Kahn's algorithm, ties broken by module name.
inline std::vector<std::string> topological_modules(const Application& app) {
    std::vector<std::string> order;
    std::set<std::string> placed;
    std::set<std::string> remaining;
    for (const auto& m : app.modules()) remaining.insert(m.name);
    while (!remaining.empty()) {
        auto next = std::find_if(remaining.begin(), remaining.end(), [&](const std::string& name) {
            auto preds = app.predecessors(name);
            return std::all_of(preds.begin(), preds.end(), [&](const auto& p) { return placed.contains(p); });
        });
        if (next == remaining.end()) throw CyclicApplication("application " + app.id() + " has a module cycle");
        order.push_back(*next);
        placed.insert(*next);
        remaining.erase(next);
    }
    return order;
}

// Sensor sources always count as placed.
inline bool predecessors_placed(const AppModule& module, const std::set<std::string>& placed,
                                const Application& app) {
    for (const auto& p : app.predecessors(module.name))
        if (!placed.contains(p)) return false;
    return true;
}

enum class AppPreset { App1, App2, App3 };

struct AppIntensity {
    double cpu_mi;
    double nw_kbytes;
    double inter_arrival_ms;
};

inline AppIntensity intensity_of(AppPreset p) {
    switch (p) {
    case AppPreset::App1: return {1000, 1, 1000};
    case AppPreset::App2: return {5000, 1000, 50};
    case AppPreset::App3: return {10000, 7000, 20};
    }
    return {};
}

// sensor -> ClientModule -> actuator, with ClientModule also forwarding a
// copy of each tuple to the cloud-pinned StorageModule.
inline Application make_app(AppPreset preset) {
    const auto in = intensity_of(preset);
    const std::string id = preset == AppPreset::App1 ? "app1" : preset == AppPreset::App2 ? "app2" : "app3";
    std::vector<AppModule> modules{
        {std::string(kClientModule), in.cpu_mi, std::nullopt},
        {std::string(kStorageModule), kStorageCpuLength, DeviceKind::Cloud},
    };
    std::vector<TupleType> edges{
        {"SENSOR_DATA", std::string(kSensorEndpoint), std::string(kClientModule), in.cpu_mi, in.nw_kbytes,
         in.inter_arrival_ms},
        {"STORE_DATA", std::string(kClientModule), std::string(kStorageModule), kStorageCpuLength, in.nw_kbytes, 0},
        {"ACTUATION", std::string(kClientModule), std::string(kActuatorEndpoint), 0, in.nw_kbytes, 0},
    };
    return Application(id, std::move(modules), std::move(edges));
}

} // namespace fogsim
