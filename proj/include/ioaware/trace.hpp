#pragma once

#include "ioaware/constraint.hpp"
#include "ioaware/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace ioaware {

enum class EventKind { Submit, Ready, Start, End };

inline const char* to_string(EventKind k) {
   switch (k) {
      case EventKind::Submit: return "SUBMIT";
      case EventKind::Ready: return "READY";
      case EventKind::Start: return "START";
      case EventKind::End: return "END";
   }
   return "?";
}

struct TraceRecord {
   double time_s = 0.0;
   EventKind kind = EventKind::Submit;
   TaskId task_id = 0;
   std::string task_type;
   TaskKind task_kind = TaskKind::Compute;
   std::optional<NodeId> node;
   std::optional<Mbps> admitted_bw;
   std::optional<int> epoch_index;
};

using Trace = std::vector<TraceRecord>;

inline std::string format_seconds(double s) {
   char buf[64];
   std::snprintf(buf, sizeof buf, "%.6f", s);
   return buf;
}

inline void write_trace_csv(std::ostream& os, const Trace& trace) {
   os << "event_time_s,event_kind,task_id,task_type,kind,node,admitted_bw_mbs,epoch_index\n";
   for (const auto& r : trace) {
      os << format_seconds(r.time_s) << ',' << to_string(r.kind) << ',' << r.task_id << ',' << r.task_type << ','
         << to_string(r.task_kind) << ',';
      if (r.node) os << *r.node;
      os << ',';
      if (r.admitted_bw) os << *r.admitted_bw;
      os << ',';
      if (r.epoch_index) os << *r.epoch_index;
      os << '\n';
   }
}

struct TypeStats {
   std::size_t count = 0;
   double mean_s = 0.0;
   double p50_s = 0.0;
   double p95_s = 0.0;
};

struct RunMetrics {
   double makespan_s = 0.0;
   std::map<std::string, TypeStats> per_type;
   double io_throughput_mbs = 0.0;
   double total_io_mb = 0.0;
   double io_active_s = 0.0;
   std::int64_t io_congestion_events = 0;
   std::map<std::string, Mbps> chosen_constraints;
};

/// Nearest-rank percentile of a sorted sample.
inline double percentile(const std::vector<double>& sorted, double p) {
   if (sorted.empty()) return 0.0;
   auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
   rank = std::clamp<std::size_t>(rank, 1, sorted.size());
   return sorted[rank - 1];
}

/// Derives makespan, per-type timing and achieved I/O throughput from a trace.
/// Throughput is megabytes written divided by the wall time during which at
/// least one byte-writing task was running anywhere in the cluster.
inline RunMetrics compute_metrics(const Trace& trace, const TaskGraph& graph) {
   RunMetrics m;
   std::map<TaskId, double> starts;
   std::map<std::string, std::vector<double>> durations;
   std::vector<std::pair<double, double>> io_intervals;
   for (const auto& r : trace) {
      if (r.kind == EventKind::Start) starts[r.task_id] = r.time_s;
      if (r.kind != EventKind::End) continue;
      m.makespan_s = std::max(m.makespan_s, r.time_s);
      const double begin = starts.at(r.task_id);
      durations[r.task_type].push_back(r.time_s - begin);
      const auto& spec = graph.at(r.task_id).spec;
      if (spec.bytes > 0) {
         m.total_io_mb += static_cast<double>(spec.bytes) / 1e6;
         io_intervals.emplace_back(begin, r.time_s);
      }
   }
   for (auto& [type, d] : durations) {
      std::sort(d.begin(), d.end());
      TypeStats s;
      s.count = d.size();
      double sum = 0;
      for (double x : d) sum += x;
      s.mean_s = sum / static_cast<double>(d.size());
      s.p50_s = percentile(d, 50);
      s.p95_s = percentile(d, 95);
      m.per_type[type] = s;
   }
   std::sort(io_intervals.begin(), io_intervals.end());
   double cur_begin = 0, cur_end = -1;
   for (auto [b, e] : io_intervals) {
      if (b > cur_end) {
         if (cur_end > cur_begin) m.io_active_s += cur_end - cur_begin;
         cur_begin = b;
         cur_end = e;
      } else {
         cur_end = std::max(cur_end, e);
      }
   }
   if (cur_end > cur_begin) m.io_active_s += cur_end - cur_begin;
   if (m.io_active_s > 0) m.io_throughput_mbs = m.total_io_mb / m.io_active_s;
   return m;
}

inline nlohmann::json metrics_to_json(const RunMetrics& m) {
   nlohmann::json j;
   j["makespan_s"] = m.makespan_s;
   nlohmann::json per_type = nlohmann::json::object();
   for (const auto& [type, s] : m.per_type)
      per_type[type] = {{"count", s.count}, {"mean_s", s.mean_s}, {"p50_s", s.p50_s}, {"p95_s", s.p95_s}};
   j["per_type"] = per_type;
   j["io_throughput_mbs"] = m.io_throughput_mbs;
   j["io_congestion_events"] = m.io_congestion_events;
   nlohmann::json chosen = nlohmann::json::object();
   for (const auto& [type, c] : m.chosen_constraints) chosen[type] = c;
   j["chosen_constraints"] = chosen;
   return j;
}

} // namespace ioaware
