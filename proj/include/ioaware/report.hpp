#pragma once

#include "ioaware/sim.hpp"

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace ioaware {

inline void write_learning_csv(std::ostream& os, const std::map<std::string, std::vector<LearningRow>>& learning) {
   os << "task_type,epoch_index,constraint_mbs,epoch_size,t_epoch_s,decision,chosen_constraint_mbs\n";
   for (const auto& [type, rows] : learning) {
      for (const auto& r : rows) {
         os << type << ',' << r.epoch_index << ',' << r.constraint << ',' << r.epoch_size << ',';
         if (r.t_epoch_s) os << format_seconds(*r.t_epoch_s);
         os << ',' << (r.stop ? "STOP" : "NEXT") << ',';
         if (r.chosen) os << *r.chosen;
         os << '\n';
      }
   }
}

struct SweepRow {
   std::string mode;
   double makespan_s = 0.0;
   double io_throughput_mbs = 0.0;
   std::int64_t io_congestion_events = 0;
};

/// One simulated run per static constraint plus the baseline and the
/// non-constrained (declared constraints stripped) runs.
inline std::vector<SweepRow> sweep(const Workload& workload, const ClusterModel& cluster,
                                   const std::vector<Mbps>& constraints, const RunOptions& opts = {}) {
   if (constraints.empty()) throw WorkloadError("sweep needs at least one constraint");
   std::vector<SweepRow> rows;
   auto add = [&](const Workload& w, const RunMode& mode, std::string label) {
      const auto r = sim_run(w, cluster, mode, opts);
      rows.push_back({std::move(label), r.metrics.makespan_s, r.metrics.io_throughput_mbs,
                      r.metrics.io_congestion_events});
   };
   add(workload, RunMode::parse("baseline"), "baseline");
   add(without_constraints(workload), RunMode::parse("io-tasks"), "non-constrained");
   for (Mbps c : constraints) {
      RunMode m;
      m.kind = RunMode::Kind::Static;
      m.value = c;
      add(workload, m, m.to_string());
   }
   return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
   os << "mode,makespan_s,io_throughput_mbs,io_congestion_events\n";
   for (const auto& r : rows)
      os << r.mode << ',' << format_seconds(r.makespan_s) << ',' << format_seconds(r.io_throughput_mbs) << ','
         << r.io_congestion_events << '\n';
}

} // namespace ioaware
