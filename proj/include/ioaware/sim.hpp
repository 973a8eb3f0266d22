#pragma once

#include "ioaware/device.hpp"
#include "ioaware/scheduler.hpp"
#include "ioaware/trace.hpp"
#include "ioaware/workload.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <vector>

namespace ioaware {

struct RunOptions {
   std::uint64_t seed = 0;
   /// Compute durations are multiplied by a seeded factor in [1 - jitter, 1 + jitter].
   double compute_jitter = 0.0;
   PlacementPolicy policy = PlacementPolicy::FirstCandidate;
   /// Check ledger and concurrency invariants after every event.
   bool audit = true;
};

struct RunResult {
   Trace trace;
   RunMetrics metrics;
   std::map<std::string, std::vector<LearningRow>> learning;
   std::map<std::string, AutoRegistry> registries;
};

namespace detail {

inline void check_nodes_required(const Workload& w, const ClusterModel& c) {
   if (w.nodes_required > static_cast<int>(c.nodes.size()))
      throw WorkloadError("workload needs " + std::to_string(w.nodes_required) + " nodes, cluster has " +
                          std::to_string(c.nodes.size()));
}

inline void submit_all(Scheduler& sched, const Workload& w) {
   for (const auto& d : w.initial_data) sched.register_initial(d);
   for (const auto& t : w.tasks) sched.submit(t, 0.0);
}

inline RunResult collect(const Scheduler& sched, std::int64_t congestion_events) {
   RunResult r;
   r.trace = sched.trace();
   r.metrics = compute_metrics(r.trace, sched.graph());
   r.metrics.io_congestion_events = congestion_events;
   r.metrics.chosen_constraints = sched.chosen_constraints();
   for (const auto& [type, l] : sched.learners()) {
      r.learning[type] = l.rows();
      r.registries[type] = l.registry();
   }
   return r;
}

} // namespace detail

/// Deterministic discrete-event run in virtual seconds.
///
/// Compute tasks complete after their declared duration. Any task that
/// carries bytes becomes a stream on its node's DeviceModel and completes when
/// the stream drains.
inline RunResult sim_run(const Workload& workload, const ClusterModel& cluster, const RunMode& mode,
                         const RunOptions& opts = {}) {
   cluster.validate();
   detail::check_nodes_required(workload, cluster);
   const Workload w = apply_mode(workload, mode);

   Scheduler sched(cluster, opts.policy);
   detail::submit_all(sched, w);

   std::vector<double> jitter(w.tasks.size(), 1.0);
   if (opts.compute_jitter > 0) {
      std::mt19937_64 rng(opts.seed);
      std::uniform_real_distribution<double> dist(1.0 - opts.compute_jitter, 1.0 + opts.compute_jitter);
      for (auto& j : jitter) j = dist(rng);
   }

   std::vector<DeviceModel> devices;
   for (const auto& n : cluster.nodes) devices.emplace_back(n.device);

   using Timer = std::pair<double, TaskId>;
   std::priority_queue<Timer, std::vector<Timer>, std::greater<>> timers;
   std::int64_t congestion_events = 0;
   double now = 0.0;

   auto start = [&](const std::vector<Launch>& launches) {
      for (const auto& l : launches) {
         const auto& spec = sched.graph().at(l.task).spec;
         if (spec.bytes > 0) {
            auto& dev = devices[l.node_index];
            dev.add(l.task, static_cast<double>(spec.bytes) / 1e6);
            if (static_cast<double>(dev.active()) > dev.params().saturation_n0) ++congestion_events;
         } else {
            timers.emplace(now + spec.duration_s * jitter[l.task], l.task);
         }
      }
      if (opts.audit) sched.audit();
   };

   start(sched.schedule_tick(now));
   while (!sched.finished()) {
      double next = std::numeric_limits<double>::infinity();
      if (!timers.empty()) next = timers.top().first;
      std::vector<double> due(devices.size(), std::numeric_limits<double>::infinity());
      for (std::size_t i = 0; i < devices.size(); ++i) {
         if (auto dt = devices[i].time_to_next_completion()) {
            due[i] = now + *dt;
            next = std::min(next, due[i]);
         }
      }

      if (next == std::numeric_limits<double>::infinity()) {
         if (!sched.resolve_stall()) throw DeadlockError("simulation stalled with unfinished tasks");
         auto launches = sched.schedule_tick(now);
         if (launches.empty()) throw DeadlockError("simulation stalled with unfinished tasks");
         start(launches);
         continue;
      }

      std::vector<TaskId> finished;
      for (std::size_t i = 0; i < devices.size(); ++i) {
         // The device that defines `next` drains exactly to its completion.
         auto done = due[i] == next ? devices[i].step_to_next_completion()
                                    : (devices[i].advance(next - now), devices[i].take_finished());
         finished.insert(finished.end(), done.begin(), done.end());
      }
      while (!timers.empty() && timers.top().first <= next) {
         finished.push_back(timers.top().second);
         timers.pop();
      }
      now = next;
      std::sort(finished.begin(), finished.end());
      for (TaskId id : finished) sched.on_complete(id, now);
      start(sched.schedule_tick(now));
   }
   return detail::collect(sched, congestion_events);
}

} // namespace ioaware
