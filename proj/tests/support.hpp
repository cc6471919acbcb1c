// Helpers shared by the test binaries.
#pragma once

#include "fogsim/fogsim.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

namespace fogsim::support {

// (algorithm, instance label, module) -> device name, read from a trace file
// whose lines are "<algorithm> <sensor> <module> <device>".
using PlacementTable = std::map<std::tuple<std::string, std::string, std::string>, std::string>;

inline PlacementTable load_placement_fixture(const std::string& topology, const std::string& app) {
    const std::string path = std::string(FOGSIM_FIXTURES) + "/placements/" + topology + "_" + app + ".txt";
    std::ifstream in(path);
    if (!in) throw std::runtime_error("missing fixture " + path);
    PlacementTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string algo, sensor, module, device;
        ls >> algo >> sensor >> module >> device;
        t[{algo, app + "@" + sensor, module}] = device;
    }
    return t;
}

inline PlacementTable as_table(const PlacementMap& pm, const Topology& topo,
                               const std::vector<AppInstance>& instances) {
    PlacementTable t;
    for (const auto& [key, dev] : pm.assignments)
        t[{std::string(to_string(pm.algorithm)), instances.at(key.instance).label, key.module}] = topo.device(dev).name;
    return t;
}

inline PlacementTable only(const PlacementTable& t, const std::string& algo) {
    PlacementTable out;
    for (const auto& [k, v] : t)
        if (std::get<0>(k) == algo) out[k] = v;
    return out;
}

// Completion times of a single FCFS server, computed by sorting arrivals
// (stable on submission order) and scanning.
inline std::vector<std::int64_t> sort_and_scan(std::vector<std::pair<std::int64_t, std::int64_t>> jobs) {
    std::vector<std::size_t> order(jobs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return jobs[a].first < jobs[b].first; });
    std::vector<std::int64_t> done(jobs.size());
    std::int64_t free_at = 0;
    for (auto i : order) {
        const std::int64_t start = std::max(free_at, jobs[i].first);
        free_at = start + jobs[i].second;
        done[i] = free_at;
    }
    return done;
}

// Drives process_fcfs through the event engine. A completion is recorded
// when its ServiceComplete event fires and the FIFO head leaves service;
// -1 marks a head that does not match the completing tuple.
inline std::vector<std::int64_t> simulate_fcfs(const std::vector<std::pair<std::int64_t, std::int64_t>>& jobs) {
    Engine engine;
    DeviceQueue q;
    std::vector<std::int64_t> done(jobs.size(), -2);
    for (std::size_t i = 0; i < jobs.size(); ++i)
        engine.schedule(SimTime::from_us(jobs[i].first), EventKind::TransferArrive,
                        EventPayload{static_cast<std::int64_t>(i), 0, 0, 0});
    engine.run_until(SimTime::from_us(std::int64_t{1} << 40), [&](const SimEvent& ev) {
        const auto i = static_cast<std::size_t>(ev.payload.tuple);
        if (ev.kind == EventKind::TransferArrive) {
            const SimTime at = process_fcfs(q, ev.payload.tuple, engine.now(), SimTime::from_us(jobs[i].second));
            engine.schedule(at, EventKind::ServiceComplete, ev.payload);
            return;
        }
        const auto head = q.fifo.front();
        q.fifo.pop_front();
        done[i] = head == ev.payload.tuple ? engine.now().us() : -1;
    });
    return done;
}

} // namespace fogsim::support
