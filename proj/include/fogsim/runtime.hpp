// Executes a placed scenario on the event engine.
//
// Every hosted module instance is a single-server FCFS queue. Instances that
// share a device split its MIPS evenly (static processor sharing), and a
// device draws busy power while any of its queues is serving. Transfers take
// the link delays of their route; bandwidth adds no delay.

#pragma once

#include "fogsim/application.hpp"
#include "fogsim/engine.hpp"
#include "fogsim/errors.hpp"
#include "fogsim/placement.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/sim_time.hpp"
#include "fogsim/topology.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace fogsim {

// Milliseconds to run `cpu_length` million instructions on `device` when
// `sharing_factor` module instances split its capacity.
inline double service_time_ms(double cpu_length, const FogDevice& device, int sharing_factor = 1) {
    if (!(device.mips > 0)) throw ZeroCapacityDevice(device.name + " has no CPU capacity");
    if (sharing_factor < 1) throw Error("sharing factor must be at least 1");
    return cpu_length / (device.mips / sharing_factor) * 1000.0;
}

struct DeviceQueue {
    DeviceId device;
    std::deque<std::int64_t> fifo; // tuple in service at the front, then waiting tuples
    SimTime busy_until;
    std::uint64_t served_count = 0;
    double busy_time_accum_ms = 0.0;
};

// Admits `tuple` arriving at `now`; returns its completion time. Service
// starts at max(now, busy_until).
inline SimTime process_fcfs(DeviceQueue& q, std::int64_t tuple, SimTime now, SimTime service) {
    const SimTime start = max(now, q.busy_until);
    const SimTime done = start + service;
    q.busy_until = done;
    q.busy_time_accum_ms += service.ms();
    q.fifo.push_back(tuple);
    return done;
}

struct EnergyAccount {
    DeviceId device;
    double idle_power_w = 0.0;
    double busy_power_w = 0.0;
    SimTime last_update;
    double last_utilization = 0.0;
    double joules = 0.0;
};

// Linear power model, integrated exactly over the piecewise-constant
// utilization held since the last update.
inline EnergyAccount integrate_energy(EnergyAccount acct, SimTime now, double new_utilization) {
    if (now < acct.last_update) throw ClockRegression("energy update moves backwards in time");
    if (new_utilization < 0.0 || new_utilization > 1.0) throw Error("utilization outside [0, 1]");
    const double power = acct.idle_power_w + (acct.busy_power_w - acct.idle_power_w) * acct.last_utilization;
    acct.joules += power * static_cast<double>((now - acct.last_update).us()) / 1.0e6;
    acct.last_update = now;
    acct.last_utilization = new_utilization;
    return acct;
}

enum class ArrivalMode { Periodic, Exponential };

inline std::string_view to_string(ArrivalMode m) { return m == ArrivalMode::Periodic ? "periodic" : "exponential"; }

inline std::optional<ArrivalMode> parse_arrival_mode(std::string_view s) {
    if (s == "periodic") return ArrivalMode::Periodic;
    if (s == "exponential") return ArrivalMode::Exponential;
    return std::nullopt;
}

struct RunOptions {
    SimTime duration = SimTime::from_s(10);
    std::uint64_t seed = 42;
    ArrivalMode arrival = ArrivalMode::Periodic;
    double extra_execution_ms = 0.0; // e.g. measured placement time
    std::ostream* trace = nullptr;
};

struct Segment {
    enum class Kind { Link, Wait, Service };
    Kind kind;
    SimTime duration;
};

struct LoopRecord {
    std::size_t instance = 0;
    std::int64_t tuple = 0; // id of the emitted source tuple
    SimTime emitted_at;
    std::optional<SimTime> actuated_at;
    std::vector<Segment> segments;

    [[nodiscard]] SimTime latency() const { return *actuated_at - emitted_at; }
};

struct DeviceMetrics {
    DeviceId id;
    std::string name;
    DeviceKind kind = DeviceKind::Cloud;
    double energy_j = 0.0;
    double busy_ms = 0.0;
    double utilization = 0.0;
    std::uint64_t services = 0;
    std::vector<std::string> hosted; // "<module>" or "<module>#<instance>"
};

struct MetricsReport {
    std::string scenario;
    std::string algorithm;
    std::string topology;
    std::string app;
    double execution_time_s = 0.0;
    double service_time_ms = 0.0; // components of execution_time_s
    double link_delay_ms = 0.0;
    double cloud_energy_j = 0.0;
    double total_energy_j = 0.0;
    std::uint64_t tuples_emitted = 0;
    std::uint64_t loops_completed = 0;
    std::uint64_t loops_in_flight = 0;
    double mean_loop_ms = 0.0;
    double max_loop_ms = 0.0;
    double placement_wallclock_ms = 0.0;
    std::uint64_t replications = 1; // >1: the fields above are means over seeds
    double execution_time_stddev_s = 0.0;
    double cloud_energy_stddev_j = 0.0;
    std::vector<DeviceMetrics> devices;
};

class Simulation {
public:
    Simulation(const Topology& topo, const Application& app, std::vector<AppInstance> instances,
               const PlacementMap& pm, RunOptions opts = {})
        : topo_(topo), app_(app), instances_(std::move(instances)), pm_(pm), opts_(opts) {
        auto violations = validate_placement(pm_, app_, instances_, topo_, false);
        for (const auto& v : violations) {
            if (v.kind == Violation::Kind::Coverage || v.kind == Violation::Kind::FieldDevice) throw Error(v.message);
        }
        build_servers();
        for (const auto& d : topo_.devices()) {
            energy_.push_back(EnergyAccount{d.id, d.idle_power_w, d.busy_power_w, SimTime{}, 0.0, 0.0});
        }
        active_.assign(topo_.size(), 0);
        busy_since_.assign(topo_.size(), SimTime{});
        busy_ms_.assign(topo_.size(), 0.0);
        services_.assign(topo_.size(), 0);
        engine_.set_trace(opts_.trace);
    }

    MetricsReport run() {
        const auto& src = app_.edges()[app_.source_edge()];
        for (const auto& inst : instances_) {
            std::seed_seq seq{opts_.seed, static_cast<std::uint64_t>(inst.index)};
            rngs_.emplace_back(seq);
            engine_.schedule(first_emission(inst.index, src.inter_arrival_ms), EventKind::TupleEmit,
                             EventPayload{-1, static_cast<std::int32_t>(inst.sensor.value), -1,
                                          static_cast<std::int32_t>(inst.index)});
        }
        engine_.run_until(opts_.duration, [this](const SimEvent& ev) { handle(ev); });
        for (auto& acct : energy_) acct = integrate_energy(acct, opts_.duration, acct.last_utilization);
        for (std::size_t d = 0; d < active_.size(); ++d) {
            if (active_[d] > 0) busy_ms_[d] += (opts_.duration - busy_since_[d]).ms();
        }
        return report();
    }

    [[nodiscard]] const std::vector<LoopRecord>& loops() const { return loops_; }
    [[nodiscard]] const Engine& engine() const { return engine_; }

    // Open loops that still own a tuple in a queue or in transit.
    [[nodiscard]] std::uint64_t in_flight_loops() const {
        std::set<std::size_t> open;
        auto note = [&](std::int64_t tuple_id) {
            const auto& t = tuples_.at(tuple_id);
            if (app_.on_loop(t.edge) && !loops_[t.loop].actuated_at) open.insert(t.loop);
        };
        for (const auto& ev : engine_.queue().snapshot()) {
            if (ev.kind == EventKind::TransferArrive) note(ev.payload.tuple);
        }
        for (const auto& s : servers_)
            for (auto id : s.queue.fifo) note(id);
        return open.size();
    }

private:
    static constexpr std::int32_t kToActuator = -2;

    struct Server {
        DeviceId device;
        std::string module;
        int sharing = 1;
        DeviceQueue queue;
    };

    struct Tuple {
        std::size_t instance = 0;
        std::size_t edge = 0;
        std::size_t loop = 0;
        SimTime arrived_at;
        SimTime service;
        std::vector<Segment> segments;
    };

    void build_servers() {
        std::map<std::tuple<DeviceId, std::string, std::size_t>, std::size_t> by_key;
        for (const auto& [key, dev] : pm_.assignments) {
            const std::size_t group = pm_.merges_colocated() ? 0 : key.instance + 1;
            auto [it, fresh] = by_key.try_emplace({dev, key.module, group}, servers_.size());
            if (fresh) servers_.push_back(Server{dev, key.module, 1, DeviceQueue{dev, {}, {}, 0, 0.0}});
            server_of_[{key.instance, key.module}] = it->second;
        }
        std::map<DeviceId, int> per_device;
        for (const auto& s : servers_) ++per_device[s.device];
        for (auto& s : servers_) s.sharing = per_device[s.device];
    }

    SimTime first_emission(std::size_t instance, double inter_arrival_ms) {
        if (opts_.arrival == ArrivalMode::Periodic) return SimTime{};
        return next_gap(instance, inter_arrival_ms);
    }

    SimTime next_gap(std::size_t instance, double inter_arrival_ms) {
        if (opts_.arrival == ArrivalMode::Periodic) return SimTime::from_ms(inter_arrival_ms);
        std::exponential_distribution<double> dist(1.0 / inter_arrival_ms);
        return max(SimTime::from_us(1), SimTime::from_ms(dist(rngs_[instance])));
    }

    void handle(const SimEvent& ev) {
        switch (ev.kind) {
        case EventKind::TupleEmit: on_emit(ev); break;
        case EventKind::TransferArrive: on_arrive(ev); break;
        case EventKind::ServiceComplete: on_complete(ev); break;
        case EventKind::SimEnd: break;
        }
    }

    void on_emit(const SimEvent& ev) {
        const auto inst_idx = static_cast<std::size_t>(ev.payload.target);
        const auto& inst = instances_[inst_idx];
        const auto& src = app_.edges()[app_.source_edge()];

        const auto id = next_tuple_++;
        loops_.push_back(LoopRecord{inst_idx, id, engine_.now(), std::nullopt, {}});
        tuples_[id] = Tuple{inst_idx, app_.source_edge(), loops_.size() - 1, {}, {}, {}};
        ++emitted_;
        dispatch(id, inst.sensor);

        const SimTime next = engine_.now() + next_gap(inst_idx, src.inter_arrival_ms);
        if (next <= opts_.duration) engine_.schedule(next, EventKind::TupleEmit, ev.payload);
    }

    void dispatch(std::int64_t id, DeviceId from) {
        auto& t = tuples_.at(id);
        const auto& edge = app_.edges()[t.edge];
        const auto& inst = instances_[t.instance];
        EventPayload p{id, -1, -1, kToActuator};
        DeviceId to = inst.actuator;
        if (!edge.to_actuator()) {
            const auto server = server_of_.at({t.instance, edge.dst});
            to = servers_[server].device;
            p.target = static_cast<std::int32_t>(server);
            p.module = static_cast<std::int32_t>(*app_.module_index(edge.dst));
        }
        p.device = static_cast<std::int32_t>(to.value);
        const SimTime delay = SimTime::from_ms(route_delay_ms(topo_, from, to));
        t.segments.push_back(Segment{Segment::Kind::Link, delay});
        engine_.schedule_in(delay, EventKind::TransferArrive, p);
    }

    void on_arrive(const SimEvent& ev) {
        auto& t = tuples_.at(ev.payload.tuple);
        if (app_.on_loop(t.edge)) link_ms_ += t.segments.back().duration.ms();

        if (ev.payload.target == kToActuator) {
            auto& loop = loops_[t.loop];
            if (!loop.actuated_at) {
                loop.actuated_at = engine_.now();
                loop.segments = std::move(t.segments);
            }
            tuples_.erase(ev.payload.tuple);
            return;
        }

        auto& server = servers_[static_cast<std::size_t>(ev.payload.target)];
        const auto& dev = topo_.device(server.device);
        const double cpu = app_.edges()[t.edge].cpu_length;
        t.service = SimTime::from_ms(service_time_ms(cpu, dev, server.sharing));
        t.arrived_at = engine_.now();

        if (server.queue.fifo.empty()) set_active(server.device, +1);
        const SimTime done = process_fcfs(server.queue, ev.payload.tuple, engine_.now(), t.service);
        t.segments.push_back(Segment{Segment::Kind::Wait, done - t.service - engine_.now()});
        t.segments.push_back(Segment{Segment::Kind::Service, t.service});
        engine_.schedule(done, EventKind::ServiceComplete, ev.payload);
    }

    void on_complete(const SimEvent& ev) {
        auto& server = servers_[static_cast<std::size_t>(ev.payload.target)];
        const auto id = server.queue.fifo.front();
        server.queue.fifo.pop_front();
        ++server.queue.served_count;
        ++services_[server.device.value];
        if (server.queue.fifo.empty()) set_active(server.device, -1);

        const Tuple done = std::move(tuples_.at(id));
        tuples_.erase(id);
        service_ms_ += done.service.ms();

        for (auto e : app_.out_edges(server.module)) {
            const auto child = next_tuple_++;
            tuples_[child] = Tuple{done.instance, e, done.loop, {}, {}, done.segments};
            dispatch(child, server.device);
        }
    }

    void set_active(DeviceId d, int delta) {
        const int before = active_[d.value];
        active_[d.value] += delta;
        const int after = active_[d.value];
        if ((before == 0) == (after == 0)) return;
        if (after > 0) {
            busy_since_[d.value] = engine_.now();
        } else {
            busy_ms_[d.value] += (engine_.now() - busy_since_[d.value]).ms();
        }
        energy_[d.value] = integrate_energy(energy_[d.value], engine_.now(), after > 0 ? 1.0 : 0.0);
    }

    MetricsReport report() const {
        MetricsReport r;
        r.algorithm = std::string(to_string(pm_.algorithm));
        r.topology = topo_.name();
        r.app = app_.id();
        r.scenario = r.algorithm + "/" + r.topology + "/" + r.app;
        r.service_time_ms = service_ms_;
        r.link_delay_ms = link_ms_;
        r.execution_time_s = (service_ms_ + link_ms_ + opts_.extra_execution_ms) / 1000.0;
        r.tuples_emitted = emitted_;
        r.loops_in_flight = in_flight_loops();

        double sum = 0.0;
        for (const auto& l : loops_) {
            if (!l.actuated_at) continue;
            ++r.loops_completed;
            const double ms = l.latency().ms();
            sum += ms;
            r.max_loop_ms = std::max(r.max_loop_ms, ms);
        }
        if (r.loops_completed > 0) r.mean_loop_ms = sum / static_cast<double>(r.loops_completed);

        std::map<DeviceId, std::vector<std::string>> hosted;
        for (const auto& [key, dev] : pm_.assignments) {
            hosted[dev].push_back(pm_.merges_colocated() ? key.module
                                                         : key.module + "#" + std::to_string(key.instance));
        }
        for (const auto& d : topo_.devices()) {
            DeviceMetrics m;
            m.id = d.id;
            m.name = d.name;
            m.kind = d.kind;
            m.energy_j = energy_[d.id.value].joules;
            m.busy_ms = busy_ms_[d.id.value];
            m.utilization = opts_.duration.us() > 0 ? m.busy_ms / opts_.duration.ms() : 0.0;
            m.services = services_[d.id.value];
            auto& h = hosted[d.id];
            std::sort(h.begin(), h.end());
            h.erase(std::unique(h.begin(), h.end()), h.end());
            m.hosted = h;
            r.total_energy_j += m.energy_j;
            if (d.kind == DeviceKind::Cloud) r.cloud_energy_j += m.energy_j;
            r.devices.push_back(std::move(m));
        }
        return r;
    }

    const Topology& topo_;
    const Application& app_;
    std::vector<AppInstance> instances_;
    const PlacementMap& pm_;
    RunOptions opts_;

    Engine engine_;
    std::vector<Server> servers_;
    std::map<std::pair<std::size_t, std::string>, std::size_t> server_of_;
    std::map<std::int64_t, Tuple> tuples_;
    std::vector<LoopRecord> loops_;
    std::vector<std::mt19937_64> rngs_;
    std::vector<EnergyAccount> energy_;
    std::vector<int> active_;
    std::vector<SimTime> busy_since_;
    std::vector<double> busy_ms_;
    std::vector<std::uint64_t> services_;
    std::int64_t next_tuple_ = 0;
    std::uint64_t emitted_ = 0;
    double service_ms_ = 0.0;
    double link_ms_ = 0.0;
};

inline MetricsReport run_scenario(const Topology& topo, const Application& app,
                                  const std::vector<AppInstance>& instances, const PlacementMap& pm,
                                  const RunOptions& opts = {}) {
    Simulation sim(topo, app, instances, pm, opts);
    return sim.run();
}

} // namespace fogsim
