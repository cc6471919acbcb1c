// Binds application instances to topology sensors: one instance per sensor.

#pragma once

#include "fogsim/application.hpp"
#include "fogsim/topology.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace fogsim {

struct AppInstance {
    std::size_t index = 0;
    std::string label;  // "<app>@<sensor name>"
    DeviceId sensor;
    DeviceId actuator;
    Path path;          // leaf-to-root path starting at the sensor's attachment device
};

inline std::vector<AppInstance> assemble_instances(const Topology& topo, const Application& app) {
    std::vector<AppInstance> out;
    for (const auto& dev : topo.devices()) {
        if (dev.kind != DeviceKind::Sensor) continue;
        const DeviceId attach = *dev.parent;

        // k-th sensor under a device pairs with its k-th actuator.
        std::size_t rank = 0;
        std::vector<DeviceId> actuators;
        for (auto c : topo.children(attach)) {
            const auto k = topo.device(c).kind;
            if (k == DeviceKind::Sensor && c < dev.id) ++rank;
            if (k == DeviceKind::Actuator) actuators.push_back(c);
        }
        if (actuators.empty()) throw ConfigError("devices", "sensor " + dev.name + " has no sibling actuator");

        AppInstance inst;
        inst.index = out.size();
        inst.label = app.id() + "@" + dev.name;
        inst.sensor = dev.id;
        inst.actuator = actuators[rank < actuators.size() ? rank : 0];
        inst.path = topo.ancestors_inclusive(attach);
        out.push_back(std::move(inst));
    }
    return out;
}

} // namespace fogsim
