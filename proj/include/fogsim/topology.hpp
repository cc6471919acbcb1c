// Tiered fog/cloud device hierarchy: device attributes, link delays, the
// three reference topologies and leaf-to-root path enumeration.

#pragma once

#include "fogsim/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fogsim {

enum class DeviceKind : std::uint8_t { Cloud, Gateway, FogDevice, Sensor, Actuator };

inline constexpr std::array kAllDeviceKinds{DeviceKind::Cloud, DeviceKind::Gateway, DeviceKind::FogDevice,
                                            DeviceKind::Sensor, DeviceKind::Actuator};

inline std::string_view to_string(DeviceKind k) {
    switch (k) {
    case DeviceKind::Cloud: return "Cloud";
    case DeviceKind::Gateway: return "Gateway";
    case DeviceKind::FogDevice: return "FogDevice";
    case DeviceKind::Sensor: return "Sensor";
    case DeviceKind::Actuator: return "Actuator";
    }
    return "?";
}

// Case-insensitive; accepts "SmartPhone" as an alias of FogDevice.
inline std::optional<DeviceKind> parse_device_kind(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "cloud") return DeviceKind::Cloud;
    if (lower == "gateway") return DeviceKind::Gateway;
    if (lower == "fogdevice" || lower == "fog_device" || lower == "fog" || lower == "smartphone")
        return DeviceKind::FogDevice;
    if (lower == "sensor") return DeviceKind::Sensor;
    if (lower == "actuator") return DeviceKind::Actuator;
    return std::nullopt;
}

inline bool is_field_device(DeviceKind k) { return k == DeviceKind::Sensor || k == DeviceKind::Actuator; }

// Tier level as listed in the device attribute table.
inline int canonical_level(DeviceKind k) {
    switch (k) {
    case DeviceKind::Cloud: return 0;
    case DeviceKind::Gateway: return 1;
    case DeviceKind::FogDevice: return 2;
    case DeviceKind::Sensor:
    case DeviceKind::Actuator: return 3;
    }
    return -1;
}

struct DeviceId {
    std::uint32_t value = 0;
    constexpr auto operator<=>(const DeviceId&) const = default;
};

struct FogDevice {
    DeviceId id;
    std::string name;
    DeviceKind kind = DeviceKind::FogDevice;
    double mips = 0.0;
    double cpu_ghz = 0.0;
    double ram_gb = 0.0;
    double up_bw_kbps = 0.0;
    double down_bw_kbps = 0.0;
    int level = 0;
    double rate_per_mips = 0.0; // carried, not used by any metric
    double storage_gb = 0.0;
    std::optional<DeviceId> parent;
    double busy_power_w = 0.0;
    double idle_power_w = 0.0;

    bool operator==(const FogDevice&) const = default;
};

// Attribute defaults per device kind. Gateway and smartphone MIPS sit at the
// top of their usual ranges; busy/idle power are typical host profiles.
inline FogDevice default_device(DeviceKind kind) {
    FogDevice d;
    d.kind = kind;
    d.level = canonical_level(kind);
    switch (kind) {
    case DeviceKind::Cloud:
        d.mips = 44800;
        d.cpu_ghz = 130;
        d.ram_gb = 40;
        d.up_bw_kbps = 100;
        d.down_bw_kbps = 10000;
        d.rate_per_mips = 0.01;
        d.storage_gb = 12500;
        d.busy_power_w = 1648;
        d.idle_power_w = 1332;
        break;
    case DeviceKind::Gateway:
        d.mips = 7000;
        d.cpu_ghz = 2.4;
        d.ram_gb = 4;
        d.up_bw_kbps = 10000;
        d.down_bw_kbps = 10000;
        d.storage_gb = 500;
        d.busy_power_w = 107.34;
        d.idle_power_w = 83.43;
        break;
    case DeviceKind::FogDevice:
        d.mips = 2800;
        d.cpu_ghz = 1.6;
        d.ram_gb = 1;
        d.up_bw_kbps = 10000;
        d.down_bw_kbps = 10000;
        d.storage_gb = 32;
        d.busy_power_w = 87.53;
        d.idle_power_w = 82.44;
        break;
    case DeviceKind::Sensor:
    case DeviceKind::Actuator:
        d.up_bw_kbps = 1000;
        d.down_bw_kbps = 1000;
        break;
    }
    return d;
}

// Unordered kind pair used as the link-delay table key.
struct KindPair {
    DeviceKind a;
    DeviceKind b;

    static KindPair of(DeviceKind x, DeviceKind y) { return x <= y ? KindPair{x, y} : KindPair{y, x}; }
    auto operator<=>(const KindPair&) const = default;
};

using LinkDelayTable = std::map<KindPair, double>;

// Default link latency table (milliseconds). Actuators share the sensor
// rows: both are field-level devices attached the same way.
inline const LinkDelayTable& default_link_delays() {
    static const LinkDelayTable table = [] {
        LinkDelayTable t;
        t[KindPair::of(DeviceKind::Sensor, DeviceKind::FogDevice)] = 2;
        t[KindPair::of(DeviceKind::Sensor, DeviceKind::Gateway)] = 5;
        t[KindPair::of(DeviceKind::FogDevice, DeviceKind::Gateway)] = 20;
        t[KindPair::of(DeviceKind::FogDevice, DeviceKind::Cloud)] = 50;
        t[KindPair::of(DeviceKind::Gateway, DeviceKind::Cloud)] = 100;
        t[KindPair::of(DeviceKind::Actuator, DeviceKind::FogDevice)] = 2;
        t[KindPair::of(DeviceKind::Actuator, DeviceKind::Gateway)] = 5;
        return t;
    }();
    return table;
}

inline double link_delay(const LinkDelayTable& table, DeviceKind src, DeviceKind dst) {
    if (src == dst) return 0.0;
    auto it = table.find(KindPair::of(src, dst));
    if (it == table.end()) {
        throw UnknownLinkPair("no link delay for " + std::string(to_string(src)) + "-" +
                              std::string(to_string(dst)));
    }
    return it->second;
}

// Symmetric lookup into the default table; same-kind pairs are 0 ms.
inline double link_delay(DeviceKind src, DeviceKind dst) { return link_delay(default_link_delays(), src, dst); }

// Leaf-to-root device chain starting at a fog device (or a gateway for
// sensors attached to gateways) and ending at the cloud.
using Path = std::vector<DeviceId>;

class Topology {
public:
    Topology() = default;

    // Device ids must equal their index in `devices`. Throws ConfigError
    // when the tree invariants do not hold.
    Topology(std::string name, std::vector<FogDevice> devices, LinkDelayTable delays = default_link_delays())
        : name_(std::move(name)), devices_(std::move(devices)), delays_(std::move(delays)) {
        validate();
        children_.assign(devices_.size(), {});
        for (const auto& d : devices_) {
            if (d.parent) children_[d.parent->value].push_back(d.id);
        }
    }

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::vector<FogDevice>& devices() const { return devices_; }
    [[nodiscard]] const LinkDelayTable& link_delays() const { return delays_; }
    [[nodiscard]] std::size_t size() const { return devices_.size(); }

    [[nodiscard]] const FogDevice& device(DeviceId id) const { return devices_.at(id.value); }
    [[nodiscard]] DeviceId cloud() const { return cloud_; }
    [[nodiscard]] const std::vector<DeviceId>& children(DeviceId id) const { return children_.at(id.value); }

    [[nodiscard]] std::optional<DeviceId> find(std::string_view name) const {
        for (const auto& d : devices_)
            if (d.name == name) return d.id;
        return std::nullopt;
    }

    [[nodiscard]] std::vector<DeviceId> devices_of(DeviceKind kind) const {
        std::vector<DeviceId> out;
        for (const auto& d : devices_)
            if (d.kind == kind) out.push_back(d.id);
        return out;
    }

    [[nodiscard]] double link_delay(DeviceKind src, DeviceKind dst) const {
        return fogsim::link_delay(delays_, src, dst);
    }

    // Chain from `id` up to the cloud, inclusive at both ends.
    [[nodiscard]] Path ancestors_inclusive(DeviceId id) const {
        Path out{id};
        while (auto p = device(out.back()).parent) out.push_back(*p);
        return out;
    }

    [[nodiscard]] bool is_ancestor(DeviceId ancestor, DeviceId of) const {
        for (auto p = device(of).parent; p; p = device(*p).parent)
            if (*p == ancestor) return true;
        return false;
    }

    bool operator==(const Topology& o) const {
        return name_ == o.name_ && devices_ == o.devices_ && delays_ == o.delays_;
    }

private:
    void validate() {
        std::optional<DeviceId> cloud;
        for (std::size_t i = 0; i < devices_.size(); ++i) {
            const auto& d = devices_[i];
            const std::string field = "devices[" + std::to_string(i) + "]";
            if (d.id.value != i) throw ConfigError(field + ".id", "device ids must be dense and ordered");
            if (d.mips < 0) throw ConfigError(field + ".mips", "negative CPU capacity");
            if (is_field_device(d.kind) && d.mips != 0)
                throw ConfigError(field + ".mips", "sensors and actuators have zero CPU capacity");
            if (d.kind == DeviceKind::Cloud) {
                if (cloud) throw ConfigError(field + ".kind", "more than one cloud device");
                if (d.parent) throw ConfigError(field + ".parent", "the cloud has no parent");
                cloud = d.id;
            } else if (!d.parent) {
                throw ConfigError(field + ".parent", "missing parent for " + d.name);
            } else if (d.parent->value >= devices_.size()) {
                throw ConfigError(field + ".parent", "unknown parent for " + d.name);
            }
            if (d.level != canonical_level(d.kind))
                throw ConfigError(field + ".level", "level " + std::to_string(d.level) + " does not match kind " +
                                                        std::string(to_string(d.kind)));
        }
        if (!cloud) throw ConfigError("devices", "no cloud device");
        cloud_ = *cloud;

        for (std::size_t i = 0; i < devices_.size(); ++i) {
            const auto& d = devices_[i];
            if (!d.parent) continue;
            const std::string field = "devices[" + std::to_string(i) + "].parent";
            const auto& p = devices_[d.parent->value];
            const bool ok = is_field_device(d.kind)
                                ? (p.kind == DeviceKind::FogDevice || p.kind == DeviceKind::Gateway)
                                : p.level == d.level - 1;
            if (!ok) {
                throw ConfigError(field, std::string(to_string(d.kind)) + " " + d.name + " cannot attach to " +
                                             std::string(to_string(p.kind)) + " " + p.name);
            }
            if (!delays_.contains(KindPair::of(d.kind, p.kind))) {
                throw ConfigError("link_delays_ms", "no delay for " + std::string(to_string(d.kind)) + "-" +
                                                        std::string(to_string(p.kind)));
            }
            // Walk to the root; the level rule already forbids cycles among
            // tiered devices, this guards leaves chained to each other.
            std::size_t hops = 0;
            for (auto a = d.parent; a; a = devices_[a->value].parent) {
                if (++hops > devices_.size()) throw ConfigError(field, "parent cycle through " + d.name);
            }
        }
    }

    std::string name_;
    std::vector<FogDevice> devices_;
    LinkDelayTable delays_;
    std::vector<std::vector<DeviceId>> children_;
    DeviceId cloud_;
};

// Builds a cloud -> gateways -> fog devices tree where every fog device owns
// one sensor and one actuator. Ids: cloud, gateways, fog devices
// (gateway-major), then each fog device's sensor followed by its actuator.
inline Topology build_tiered(std::string name, int gateways, int fog_per_gateway) {
    std::vector<FogDevice> devs;
    auto add = [&](DeviceKind kind, std::string dev_name, std::optional<DeviceId> parent) {
        FogDevice d = default_device(kind);
        d.id = DeviceId{static_cast<std::uint32_t>(devs.size())};
        d.name = std::move(dev_name);
        d.parent = parent;
        devs.push_back(std::move(d));
        return devs.back().id;
    };
    const DeviceId cloud = add(DeviceKind::Cloud, "cloud", std::nullopt);
    std::vector<DeviceId> gws;
    for (int g = 1; g <= gateways; ++g) gws.push_back(add(DeviceKind::Gateway, "gateway-" + std::to_string(g), cloud));
    std::vector<std::pair<DeviceId, std::string>> fogs;
    for (int g = 1; g <= gateways; ++g) {
        for (int f = 1; f <= fog_per_gateway; ++f) {
            const std::string suffix = std::to_string(g) + "-" + std::to_string(f);
            fogs.emplace_back(add(DeviceKind::FogDevice, "fog-" + suffix, gws[g - 1]), suffix);
        }
    }
    for (const auto& [fog, suffix] : fogs) {
        add(DeviceKind::Sensor, "sensor-" + suffix, fog);
        add(DeviceKind::Actuator, "actuator-" + suffix, fog);
    }
    return Topology(std::move(name), std::move(devs));
}

inline Topology build_top1() { return build_tiered("top1", 2, 2); }
inline Topology build_top2() { return build_tiered("top2", 3, 2); }
inline Topology build_top3() { return build_tiered("top3", 2, 3); }

// One path per fog device, ordered by fog device id: [fog, gateway, cloud].
inline std::vector<Path> leaf_to_root_paths(const Topology& topo) {
    std::vector<Path> paths;
    for (const auto& d : topo.devices()) {
        if (d.kind == DeviceKind::FogDevice) paths.push_back(topo.ancestors_inclusive(d.id));
    }
    return paths;
}

// Shortest delay (ms) between two devices along their tree route through
// the lowest common ancestor. Besides parent-child hops, a tiered device may
// reach one of its ancestors directly when the delay table has an entry for
// the two kinds (FogDevice-Cloud in the default table). Field devices only
// use their attachment link.
inline double route_delay_ms(const Topology& topo, DeviceId src, DeviceId dst) {
    if (src == dst) return 0.0;
    const auto& s = topo.device(src);
    const auto& d = topo.device(dst);
    if (s.kind == DeviceKind::Actuator || d.kind == DeviceKind::Sensor) {
        throw NoRoute("no route from " + s.name + " to " + d.name);
    }
    const Path up_src = topo.ancestors_inclusive(src);
    const Path up_dst = topo.ancestors_inclusive(dst);
    std::size_t lca_src = up_src.size();
    std::size_t lca_dst = 0;
    for (std::size_t i = 0; i < up_src.size() && lca_src == up_src.size(); ++i) {
        for (std::size_t j = 0; j < up_dst.size(); ++j) {
            if (up_src[i] == up_dst[j]) {
                lca_src = i;
                lca_dst = j;
                break;
            }
        }
    }
    if (lca_src == up_src.size()) throw NoRoute("devices " + s.name + " and " + d.name + " share no ancestor");

    auto climb = [&](const Path& chain, std::size_t last) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        std::vector<double> best(last + 1, inf);
        best[0] = 0.0;
        for (std::size_t i = 0; i < last; ++i) {
            const auto ki = topo.device(chain[i]).kind;
            best[i + 1] = std::min(best[i + 1], best[i] + topo.link_delay(ki, topo.device(chain[i + 1]).kind));
            if (is_field_device(ki)) continue;
            for (std::size_t j = i + 2; j <= last; ++j) {
                auto it = topo.link_delays().find(KindPair::of(ki, topo.device(chain[j]).kind));
                if (it != topo.link_delays().end()) best[j] = std::min(best[j], best[i] + it->second);
            }
        }
        return best[last];
    };
    return climb(up_src, lca_src) + climb(up_dst, lca_dst);
}

} // namespace fogsim
