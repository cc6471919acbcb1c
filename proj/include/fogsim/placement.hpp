// Module placement strategies: Cloud-only, Mapping and Edge-ward.
//
// All three walk the instance paths leaf-to-root and place modules once all
// of their predecessors are placed. They differ in where a ready module goes:
//   Cloud-only  always the cloud;
//   Mapping     the first device of the path, whatever its capacity;
//   Edge-ward   the lowest device with spare CPU, merging with an instance
//               already hosted there and pushing the merge north when the
//               combined demand no longer fits.

#pragma once

#include "fogsim/application.hpp"
#include "fogsim/errors.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/topology.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fogsim {

enum class Algorithm { CloudOnly, Mapping, EdgeWard };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::CloudOnly, Algorithm::Mapping, Algorithm::EdgeWard};

inline std::string_view to_string(Algorithm a) {
    switch (a) {
    case Algorithm::CloudOnly: return "cloud-only";
    case Algorithm::Mapping: return "mapping";
    case Algorithm::EdgeWard: return "edge-ward";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
    for (auto a : kAllAlgorithms)
        if (to_string(a) == s) return a;
    return std::nullopt;
}

struct ModuleKey {
    std::size_t instance = 0;
    std::string module;
    auto operator<=>(const ModuleKey&) const = default;
};

// One merge step taken by Edge-ward: `instance`'s copy of `module` joined the
// instance group already hosted on `at`; when the merged demand did not fit,
// the whole group moved to `moved_to`.
struct MergeRecord {
    std::size_t instance = 0;
    std::string module;
    DeviceId at;
    double merged_demand = 0.0;
    std::optional<DeviceId> moved_to;
    bool operator==(const MergeRecord&) const = default;
};

struct PlacementMap {
    Algorithm algorithm = Algorithm::CloudOnly;
    std::map<ModuleKey, DeviceId> assignments;
    // Edge-ward only: device -> module -> aggregate demand of the single
    // merged instance of that module on the device.
    std::map<DeviceId, std::map<std::string, double>> merged_instances;
    std::vector<MergeRecord> merges;

    // Whether co-located instances of one module share a server at runtime.
    [[nodiscard]] bool merges_colocated() const { return algorithm == Algorithm::EdgeWard; }

    [[nodiscard]] DeviceId device_of(std::size_t instance, std::string_view module) const {
        auto it = assignments.find(ModuleKey{instance, std::string(module)});
        if (it == assignments.end())
            throw Error("module " + std::string(module) + " of instance " + std::to_string(instance) + " is unplaced");
        return it->second;
    }

    bool operator==(const PlacementMap&) const = default;
};

class CapacityLedger {
public:
    explicit CapacityLedger(const Topology& topo) {
        for (const auto& d : topo.devices()) {
            capacity_[d.id] = d.mips;
            remaining_[d.id] = d.mips;
        }
    }

    [[nodiscard]] double capacity(DeviceId d) const { return capacity_.at(d); }
    [[nodiscard]] double remaining(DeviceId d) const { return remaining_.at(d); }

    // Exact fits are accepted.
    [[nodiscard]] bool fits(DeviceId d, double demand) const { return demand <= remaining_.at(d); }

    void take(DeviceId d, double demand) { remaining_.at(d) -= demand; }
    void refund(DeviceId d, double demand) { remaining_.at(d) = std::min(capacity_.at(d), remaining_.at(d) + demand); }

private:
    std::map<DeviceId, double> capacity_;
    std::map<DeviceId, double> remaining_;
};

namespace detail {

// Visits each instance's path device by device, handing `place` every module
// whose predecessors are all placed. A device's turn lasts until no further
// module becomes ready on it; each module is offered once per device.
// `place` returns true when it placed the module.
template <typename PlaceFn>
void walk_paths(const Application& app, const std::vector<AppInstance>& instances, PlaceFn&& place) {
    const auto order = topological_modules(app);
    std::vector<const AppInstance*> sorted;
    for (const auto& inst : instances) sorted.push_back(&inst);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const AppInstance* a, const AppInstance* b) { return a->path.front() < b->path.front(); });

    for (const AppInstance* inst : sorted) {
        std::set<std::string> placed;
        for (std::size_t hop = 0; hop < inst->path.size(); ++hop) {
            std::set<std::string> tried;
            bool progress = true;
            while (progress) {
                progress = false;
                std::vector<std::string> ready;
                for (const auto& name : order) {
                    if (!placed.contains(name) && !tried.contains(name) &&
                        predecessors_placed(app.module(name), placed, app))
                        ready.push_back(name);
                }
                for (const auto& name : ready) {
                    tried.insert(name);
                    if (place(*inst, hop, app.module(name))) {
                        placed.insert(name);
                        progress = true;
                    }
                }
            }
        }
        if (placed.size() != app.modules().size()) {
            for (const auto& name : order) {
                if (!placed.contains(name))
                    throw UnplaceableModule("no device on the path of " + inst->label + " can host " + name);
            }
        }
    }
}

} // namespace detail

inline PlacementMap place_cloud_only(const Topology& topo, const Application& app,
                                     const std::vector<AppInstance>& instances) {
    PlacementMap pm;
    pm.algorithm = Algorithm::CloudOnly;
    detail::walk_paths(app, instances, [&](const AppInstance& inst, std::size_t, const AppModule& m) {
        pm.assignments[ModuleKey{inst.index, m.name}] = topo.cloud();
        return true;
    });
    return pm;
}

inline PlacementMap place_mapping(const Topology& topo, const Application& app,
                                  const std::vector<AppInstance>& instances) {
    PlacementMap pm;
    pm.algorithm = Algorithm::Mapping;
    detail::walk_paths(app, instances, [&](const AppInstance& inst, std::size_t hop, const AppModule& m) {
        const DeviceId d = inst.path[hop];
        if (m.pinned_to) {
            if (topo.device(d).kind != *m.pinned_to) return false;
        } else if (hop != 0) {
            return false;
        }
        pm.assignments[ModuleKey{inst.index, m.name}] = d;
        return true;
    });
    return pm;
}

struct EdgewardOptions {
    // Skip local placement when a device further north on the path already
    // hosts the module, so the instance merges there instead.
    bool ancestor_instance_lookup = false;
    // Apply the capacity test to the cloud too; the cloud otherwise always
    // qualifies as the last resort.
    bool strict_cloud_capacity = false;
};

inline PlacementMap place_edgeward(const Topology& topo, const Application& app,
                                   const std::vector<AppInstance>& instances, CapacityLedger& ledger,
                                   const EdgewardOptions& opts = {}) {
    PlacementMap pm;
    pm.algorithm = Algorithm::EdgeWard;
    // (device, module) -> instances served by the merged instance there
    std::map<std::pair<DeviceId, std::string>, std::vector<std::size_t>> groups;

    auto qualifies = [&](DeviceId d, double demand) {
        if (d == topo.cloud() && !opts.strict_cloud_capacity) return true;
        return ledger.fits(d, demand);
    };
    auto host = [&](DeviceId d, const std::string& module, const std::vector<std::size_t>& members, double demand) {
        ledger.take(d, demand);
        pm.merged_instances[d][module] += demand;
        auto& g = groups[{d, module}];
        for (auto i : members) {
            g.push_back(i);
            pm.assignments[ModuleKey{i, module}] = d;
        }
    };

    detail::walk_paths(app, instances, [&](const AppInstance& inst, std::size_t hop, const AppModule& m) {
        const DeviceId d = inst.path[hop];
        if (m.pinned_to && topo.device(d).kind != *m.pinned_to) return false;
        const double demand = m.required_cpu;

        auto existing = groups.find({d, m.name});
        if (existing != groups.end()) {
            if (qualifies(d, demand)) {
                host(d, m.name, {inst.index}, demand);
                pm.merges.push_back(MergeRecord{inst.index, m.name, d, pm.merged_instances[d][m.name], std::nullopt});
                return true;
            }
            // Merged demand does not fit here: walk north until it does.
            const double merged = pm.merged_instances[d][m.name] + demand;
            std::optional<DeviceId> f = topo.device(d).parent;
            while (f && !qualifies(*f, merged)) f = topo.device(*f).parent;
            if (!f) {
                throw UnplaceableModule("merged " + m.name + " (" + std::to_string(merged) +
                                        " MIPS) fits no device north of " + topo.device(d).name);
            }
            std::vector<std::size_t> members = std::move(existing->second);
            groups.erase(existing);
            ledger.refund(d, pm.merged_instances[d][m.name]);
            pm.merged_instances[d].erase(m.name);
            if (pm.merged_instances[d].empty()) pm.merged_instances.erase(d);
            members.push_back(inst.index);
            host(*f, m.name, members, merged);
            pm.merges.push_back(MergeRecord{inst.index, m.name, d, merged, *f});
            return true;
        }

        if (opts.ancestor_instance_lookup) {
            for (std::size_t up = hop + 1; up < inst.path.size(); ++up)
                if (groups.contains({inst.path[up], m.name})) return false;
        }
        if (!qualifies(d, demand)) return false; // retried further up the path
        host(d, m.name, {inst.index}, demand);
        return true;
    });
    return pm;
}

inline PlacementMap place(Algorithm algo, const Topology& topo, const Application& app,
                          const std::vector<AppInstance>& instances, const EdgewardOptions& opts = {}) {
    switch (algo) {
    case Algorithm::CloudOnly: return place_cloud_only(topo, app, instances);
    case Algorithm::Mapping: return place_mapping(topo, app, instances);
    case Algorithm::EdgeWard: {
        CapacityLedger ledger(topo);
        return place_edgeward(topo, app, instances, ledger, opts);
    }
    }
    throw Error("unknown algorithm");
}

struct Violation {
    enum class Kind { Coverage, Pin, Capacity, FieldDevice };
    Kind kind;
    std::string message;
};

// Empty result iff every (instance, module) is placed exactly once, pins are
// respected, no module sits on a sensor/actuator and, when capacity checking
// is on, every device's assigned demand is within its CPU capacity. Capacity
// is checked by default only for Edge-ward output.
inline std::vector<Violation> validate_placement(const PlacementMap& pm, const Application& app,
                                                 const std::vector<AppInstance>& instances, const Topology& topo,
                                                 std::optional<bool> check_capacity = std::nullopt) {
    std::vector<Violation> out;
    std::map<DeviceId, double> demand;
    std::set<ModuleKey> expected;
    for (const auto& inst : instances) {
        for (const auto& m : app.modules()) {
            ModuleKey key{inst.index, m.name};
            expected.insert(key);
            auto it = pm.assignments.find(key);
            if (it == pm.assignments.end()) {
                out.push_back({Violation::Kind::Coverage, m.name + " of " + inst.label + " is not placed"});
                continue;
            }
            if (it->second.value >= topo.size()) {
                out.push_back({Violation::Kind::Coverage, m.name + " of " + inst.label + " is on an unknown device"});
                continue;
            }
            const auto& dev = topo.device(it->second);
            if (m.pinned_to && dev.kind != *m.pinned_to) {
                out.push_back({Violation::Kind::Pin, m.name + " of " + inst.label + " must run on " +
                                                         std::string(to_string(*m.pinned_to)) + ", found on " +
                                                         dev.name});
            }
            if (is_field_device(dev.kind)) {
                out.push_back({Violation::Kind::FieldDevice, m.name + " of " + inst.label + " placed on " + dev.name});
            }
            demand[it->second] += m.required_cpu;
        }
    }
    for (const auto& [key, dev] : pm.assignments) {
        if (!expected.contains(key)) {
            out.push_back({Violation::Kind::Coverage, "unexpected assignment of " + key.module + " for instance " +
                                                          std::to_string(key.instance)});
        }
    }
    if (check_capacity.value_or(pm.algorithm == Algorithm::EdgeWard)) {
        for (const auto& [d, total] : demand) {
            const auto& dev = topo.device(d);
            if (total > dev.mips) {
                out.push_back({Violation::Kind::Capacity, dev.name + " hosts " + std::to_string(total) +
                                                              " MIPS of modules with capacity " +
                                                              std::to_string(dev.mips)});
            }
        }
    }
    return out;
}

} // namespace fogsim
