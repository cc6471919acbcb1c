// JSON and CSV (de)serialization: topology and application configs,
// placement maps, and run reports.

#pragma once

#include "fogsim/application.hpp"
#include "fogsim/errors.hpp"
#include "fogsim/placement.hpp"
#include "fogsim/runtime.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/topology.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace fogsim {

using nlohmann::json;

// Shortest text that parses back to exactly `v`.
inline std::string format_number(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view s, const std::string& field) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError(field, "not a number: '" + std::string(s) + "'");
    return v;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path, e.what());
    }
}

namespace detail {

inline double number_or(const json& obj, const char* key, double fallback, const std::string& field) {
    if (!obj.contains(key) || obj[key].is_null()) return fallback;
    if (!obj[key].is_number()) throw ConfigError(field + "." + key, "expected a number");
    return obj[key].get<double>();
}

inline std::string required_string(const json& obj, const char* key, const std::string& field) {
    if (!obj.contains(key) || !obj[key].is_string()) throw ConfigError(field + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

inline std::string kind_pair_key(const KindPair& p) {
    return std::string(to_string(p.a)) + "-" + std::string(to_string(p.b));
}

} // namespace detail

// ---- topology ---------------------------------------------------------------

inline json topology_to_json(const Topology& topo) {
    json devices = json::array();
    for (const auto& d : topo.devices()) {
        devices.push_back({
            {"id", d.name},
            {"kind", std::string(to_string(d.kind))},
            {"parent", d.parent ? json(topo.device(*d.parent).name) : json(nullptr)},
            {"mips", d.mips},
            {"cpu_ghz", d.cpu_ghz},
            {"ram_gb", d.ram_gb},
            {"up_bw_kbps", d.up_bw_kbps},
            {"down_bw_kbps", d.down_bw_kbps},
            {"level", d.level},
            {"rate_per_mips", d.rate_per_mips},
            {"storage_gb", d.storage_gb},
            {"busy_power_w", d.busy_power_w},
            {"idle_power_w", d.idle_power_w},
        });
    }
    json delays = json::object();
    for (const auto& [pair, ms] : topo.link_delays()) delays[detail::kind_pair_key(pair)] = ms;
    return {{"name", topo.name()}, {"devices", devices}, {"link_delays_ms", delays}};
}

// Omitted device attributes take the per-kind defaults; an omitted
// `link_delays_ms` takes the default delay table.
inline Topology topology_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("", "topology config must be an object");
    const std::string name = j.value("name", std::string("custom"));
    if (!j.contains("devices") || !j["devices"].is_array()) throw ConfigError("devices", "expected an array");

    const auto& arr = j["devices"];
    std::map<std::string, std::uint32_t> ids;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string field = "devices[" + std::to_string(i) + "]";
        if (!arr[i].is_object()) throw ConfigError(field, "expected an object");
        const auto id = detail::required_string(arr[i], "id", field);
        if (!ids.emplace(id, static_cast<std::uint32_t>(i)).second) throw ConfigError(field + ".id", "duplicate id " + id);
    }

    std::vector<FogDevice> devices;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& e = arr[i];
        const std::string field = "devices[" + std::to_string(i) + "]";
        const auto kind_text = detail::required_string(e, "kind", field);
        const auto kind = parse_device_kind(kind_text);
        if (!kind) throw ConfigError(field + ".kind", "unknown kind " + kind_text);

        FogDevice d = default_device(*kind);
        d.id = DeviceId{static_cast<std::uint32_t>(i)};
        d.name = e["id"].get<std::string>();
        if (e.contains("parent") && !e["parent"].is_null()) {
            if (!e["parent"].is_string()) throw ConfigError(field + ".parent", "expected a device id");
            auto it = ids.find(e["parent"].get<std::string>());
            if (it == ids.end()) throw ConfigError(field + ".parent", "unknown device " + e["parent"].get<std::string>());
            d.parent = DeviceId{it->second};
        }
        d.mips = detail::number_or(e, "mips", d.mips, field);
        d.cpu_ghz = detail::number_or(e, "cpu_ghz", d.cpu_ghz, field);
        d.ram_gb = detail::number_or(e, "ram_gb", d.ram_gb, field);
        d.up_bw_kbps = detail::number_or(e, "up_bw_kbps", d.up_bw_kbps, field);
        d.down_bw_kbps = detail::number_or(e, "down_bw_kbps", d.down_bw_kbps, field);
        d.level = static_cast<int>(detail::number_or(e, "level", d.level, field));
        d.rate_per_mips = detail::number_or(e, "rate_per_mips", d.rate_per_mips, field);
        d.storage_gb = detail::number_or(e, "storage_gb", d.storage_gb, field);
        d.busy_power_w = detail::number_or(e, "busy_power_w", d.busy_power_w, field);
        d.idle_power_w = detail::number_or(e, "idle_power_w", d.idle_power_w, field);
        devices.push_back(std::move(d));
    }

    LinkDelayTable delays = default_link_delays();
    if (j.contains("link_delays_ms")) {
        if (!j["link_delays_ms"].is_object()) throw ConfigError("link_delays_ms", "expected an object");
        delays.clear();
        for (const auto& [key, value] : j["link_delays_ms"].items()) {
            const std::string field = "link_delays_ms." + key;
            const auto dash = key.find('-');
            const auto a = dash == std::string::npos ? std::nullopt : parse_device_kind(key.substr(0, dash));
            const auto b = dash == std::string::npos ? std::nullopt : parse_device_kind(key.substr(dash + 1));
            if (!a || !b) throw ConfigError(field, "expected a \"KindA-KindB\" key");
            if (!value.is_number() || value.get<double>() < 0) throw ConfigError(field, "expected a non-negative number");
            delays[KindPair::of(*a, *b)] = value.get<double>();
        }
    }
    return Topology(name, std::move(devices), std::move(delays));
}

inline Topology load_topology(const std::string& path) { return topology_from_json(read_json_file(path)); }

// ---- application ------------------------------------------------------------

inline json application_to_json(const Application& app) {
    json modules = json::array();
    for (const auto& m : app.modules()) {
        modules.push_back({{"name", m.name},
                           {"required_cpu_mips", m.required_cpu},
                           {"pinned_to", m.pinned_to ? json(std::string(to_string(*m.pinned_to))) : json(nullptr)}});
    }
    json edges = json::array();
    for (const auto& e : app.edges()) {
        edges.push_back({{"name", e.name},
                         {"src", e.src},
                         {"dst", e.dst},
                         {"cpu_mi", e.cpu_length},
                         {"nw_kbytes", e.nw_length},
                         {"inter_arrival_ms", e.inter_arrival_ms}});
    }
    return {{"id", app.id()}, {"modules", modules}, {"edges", edges}};
}

inline Application application_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("", "application config must be an object");
    const std::string id = detail::required_string(j, "id", "");
    if (!j.contains("modules") || !j["modules"].is_array()) throw ConfigError("modules", "expected an array");
    if (!j.contains("edges") || !j["edges"].is_array()) throw ConfigError("edges", "expected an array");

    std::vector<AppModule> modules;
    for (std::size_t i = 0; i < j["modules"].size(); ++i) {
        const auto& e = j["modules"][i];
        const std::string field = "modules[" + std::to_string(i) + "]";
        AppModule m;
        m.name = detail::required_string(e, "name", field);
        m.required_cpu = detail::number_or(e, "required_cpu_mips", 0.0, field);
        if (e.contains("pinned_to") && !e["pinned_to"].is_null()) {
            auto k = e["pinned_to"].is_string() ? parse_device_kind(e["pinned_to"].get<std::string>()) : std::nullopt;
            if (!k) throw ConfigError(field + ".pinned_to", "unknown device kind");
            m.pinned_to = k;
        }
        modules.push_back(std::move(m));
    }
    std::vector<TupleType> edges;
    for (std::size_t i = 0; i < j["edges"].size(); ++i) {
        const auto& e = j["edges"][i];
        const std::string field = "edges[" + std::to_string(i) + "]";
        TupleType t;
        t.src = detail::required_string(e, "src", field);
        t.dst = detail::required_string(e, "dst", field);
        t.name = e.value("name", t.src + "->" + t.dst);
        t.cpu_length = detail::number_or(e, "cpu_mi", 0.0, field);
        t.nw_length = detail::number_or(e, "nw_kbytes", 0.0, field);
        t.inter_arrival_ms = detail::number_or(e, "inter_arrival_ms", 0.0, field);
        edges.push_back(std::move(t));
    }
    return Application(id, std::move(modules), std::move(edges));
}

inline Application load_application(const std::string& path) { return application_from_json(read_json_file(path)); }

// ---- placement --------------------------------------------------------------

inline json placement_to_json(const PlacementMap& pm, const Topology& topo,
                              const std::vector<AppInstance>& instances) {
    json rows = json::array();
    for (const auto& [key, dev] : pm.assignments) {
        rows.push_back({{"instance", instances.at(key.instance).label},
                        {"module", key.module},
                        {"device", topo.device(dev).name},
                        {"device_kind", std::string(to_string(topo.device(dev).kind))}});
    }
    json merges = json::array();
    for (const auto& m : pm.merges) {
        merges.push_back({{"instance", instances.at(m.instance).label},
                          {"module", m.module},
                          {"at", topo.device(m.at).name},
                          {"merged_demand_mips", m.merged_demand},
                          {"moved_to", m.moved_to ? json(topo.device(*m.moved_to).name) : json(nullptr)}});
    }
    json merged = json::object();
    for (const auto& [dev, modules] : pm.merged_instances) {
        for (const auto& [module, demand] : modules) merged[topo.device(dev).name][module] = demand;
    }
    return {{"algorithm", std::string(to_string(pm.algorithm))},
            {"assignments", rows},
            {"merges", merges},
            {"merged_instances", merged}};
}

// ---- metrics ----------------------------------------------------------------

inline constexpr std::string_view kCsvHeader =
    "scenario,algorithm,topology,app,execution_time_s,cloud_energy_j,total_energy_j,loops_completed,"
    "mean_loop_ms,max_loop_ms,placement_wallclock_ms";

// Host wall-clock varies run to run, so the CSV carries it at whole
// milliseconds; the JSON detail keeps the measured value.
inline std::string to_csv_row(const MetricsReport& r) {
    std::ostringstream os;
    os << r.scenario << ',' << r.algorithm << ',' << r.topology << ',' << r.app << ','
       << format_number(r.execution_time_s) << ',' << format_number(r.cloud_energy_j) << ','
       << format_number(r.total_energy_j) << ',' << r.loops_completed << ',' << format_number(r.mean_loop_ms) << ','
       << format_number(r.max_loop_ms) << ',' << std::llround(r.placement_wallclock_ms);
    return os.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline MetricsReport from_csv_row(const std::string& line) {
    const auto c = split_csv_line(line);
    if (c.size() != 11) throw ConfigError("csv", "expected 11 columns, got " + std::to_string(c.size()));
    MetricsReport r;
    r.scenario = c[0];
    r.algorithm = c[1];
    r.topology = c[2];
    r.app = c[3];
    r.execution_time_s = parse_number(c[4], "execution_time_s");
    r.cloud_energy_j = parse_number(c[5], "cloud_energy_j");
    r.total_energy_j = parse_number(c[6], "total_energy_j");
    r.loops_completed = static_cast<std::uint64_t>(parse_number(c[7], "loops_completed"));
    r.mean_loop_ms = parse_number(c[8], "mean_loop_ms");
    r.max_loop_ms = parse_number(c[9], "max_loop_ms");
    r.placement_wallclock_ms = parse_number(c[10], "placement_wallclock_ms");
    return r;
}

inline json report_to_json(const MetricsReport& r) {
    json devices = json::array();
    for (const auto& d : r.devices) {
        devices.push_back({{"id", d.name},
                           {"kind", std::string(to_string(d.kind))},
                           {"energy_j", d.energy_j},
                           {"busy_ms", d.busy_ms},
                           {"utilization", d.utilization},
                           {"services", d.services},
                           {"hosted", d.hosted}});
    }
    return {{"scenario", r.scenario},
            {"algorithm", r.algorithm},
            {"topology", r.topology},
            {"app", r.app},
            {"execution_time_s", r.execution_time_s},
            {"service_time_ms", r.service_time_ms},
            {"link_delay_ms", r.link_delay_ms},
            {"cloud_energy_j", r.cloud_energy_j},
            {"total_energy_j", r.total_energy_j},
            {"tuples_emitted", r.tuples_emitted},
            {"loops_completed", r.loops_completed},
            {"loops_in_flight", r.loops_in_flight},
            {"mean_loop_ms", r.mean_loop_ms},
            {"max_loop_ms", r.max_loop_ms},
            {"placement_wallclock_ms", r.placement_wallclock_ms},
            {"replications", r.replications},
            {"execution_time_stddev_s", r.execution_time_stddev_s},
            {"cloud_energy_stddev_j", r.cloud_energy_stddev_j},
            {"devices", devices}};
}

} // namespace fogsim
