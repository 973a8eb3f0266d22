#pragma once

#include "ioaware/constraint.hpp"
#include "ioaware/error.hpp"
#include "ioaware/graph.hpp"
#include "ioaware/resources.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ioaware {

/// Task declarations in submission order.
struct Workload {
   int nodes_required = 1;
   std::vector<std::string> initial_data;
   std::vector<TaskSpec> tasks;
};

/// How I/O declarations are interpreted for a run.
struct RunMode {
   enum class Kind {
      Baseline, ///< I/O tasks run as ordinary one-CPU compute tasks
      IoTasks,  ///< I/O tasks on the I/O platform, constraints as declared
      Static,   ///< every I/O task gets storageBW = value
      Auto      ///< every I/O task gets the auto constraint `auto_spec`
   };
   Kind kind = Kind::IoTasks;
   Mbps value = 0;
   ConstraintSpec auto_spec = ConstraintSpec::unbounded();

   /// Accepts baseline | io-tasks | static:<v> | auto | auto:<min>,<max>,<delta>.
   static RunMode parse(std::string_view text) {
      RunMode m;
      if (text == "baseline") {
         m.kind = Kind::Baseline;
      } else if (text == "io-tasks") {
         m.kind = Kind::IoTasks;
      } else if (text.starts_with("static:")) {
         m.kind = Kind::Static;
         m.value = ConstraintSpec::parse(text.substr(7)).static_value();
      } else if (text == "auto") {
         m.kind = Kind::Auto;
      } else if (text.starts_with("auto:")) {
         m.kind = Kind::Auto;
         m.auto_spec = ConstraintSpec::parse("auto(" + std::string(text.substr(5)) + ")");
         if (!m.auto_spec.is_bounded()) throw WorkloadError("invalid mode: " + std::string(text));
      } else {
         throw WorkloadError("invalid mode '" + std::string(text) +
                             "' (expected baseline, io-tasks, static:<v>, auto or auto:<min>,<max>,<delta>)");
      }
      return m;
   }

   std::string to_string() const {
      switch (kind) {
         case Kind::Baseline: return "baseline";
         case Kind::IoTasks: return "io-tasks";
         case Kind::Static: return "static:" + std::to_string(value);
         case Kind::Auto: {
            if (!auto_spec.is_bounded()) return "auto";
            const auto& b = auto_spec.bounds();
            return "auto:" + std::to_string(b.min) + "," + std::to_string(b.max) + "," + std::to_string(b.delta);
         }
      }
      return "?";
   }
};

/// Rewrites the I/O declarations of a workload according to `mode`.
inline Workload apply_mode(Workload w, const RunMode& mode) {
   for (auto& t : w.tasks) {
      if (t.kind != TaskKind::Io) continue;
      switch (mode.kind) {
         case RunMode::Kind::Baseline:
            t.kind = TaskKind::Compute;
            t.computing_units = 1;
            t.storage_bw.reset();
            break;
         case RunMode::Kind::IoTasks: break;
         case RunMode::Kind::Static: t.storage_bw = ConstraintSpec::fixed(mode.value); break;
         case RunMode::Kind::Auto: t.storage_bw = mode.auto_spec; break;
      }
   }
   return w;
}

/// Strips every declared storage bandwidth constraint.
inline Workload without_constraints(Workload w) {
   for (auto& t : w.tasks) t.storage_bw.reset();
   return w;
}

namespace detail {

inline Direction parse_direction(const std::string& s) {
   if (s == "IN") return Direction::In;
   if (s == "INOUT") return Direction::InOut;
   if (s == "OUT") return Direction::Out;
   throw WorkloadError("invalid parameter direction '" + s + "'");
}

inline TaskKind parse_kind(const std::string& s) {
   if (s == "COMPUTE") return TaskKind::Compute;
   if (s == "IO") return TaskKind::Io;
   throw WorkloadError("invalid task kind '" + s + "'");
}

inline nlohmann::json read_json_file(const std::string& path) {
   std::ifstream in(path);
   if (!in) throw WorkloadError("cannot open " + path);
   try {
      return nlohmann::json::parse(in);
   } catch (const nlohmann::json::exception& e) {
      throw WorkloadError(path + ": " + e.what());
   }
}

} // namespace detail

inline Workload workload_from_json(const nlohmann::json& j) {
   try {
      Workload w;
      w.nodes_required = j.value("nodes_required", 1);
      for (const auto& d : j.value("initial_data", nlohmann::json::array())) w.initial_data.push_back(d.get<std::string>());
      for (const auto& jt : j.at("tasks")) {
         TaskSpec t;
         t.task_type = jt.at("type").get<std::string>();
         t.kind = detail::parse_kind(jt.at("kind").get<std::string>());
         for (const auto& jp : jt.value("params", nlohmann::json::array())) {
            t.params.push_back({jp.value("name", std::string{}), detail::parse_direction(jp.at("dir").get<std::string>()),
                                jp.at("datum").get<std::string>()});
         }
         t.computing_units = jt.value("computing_units", t.kind == TaskKind::Compute ? 1 : 0);
         if (jt.contains("storage_bw") && !jt["storage_bw"].is_null()) {
            const auto& c = jt["storage_bw"];
            t.storage_bw = c.is_number_integer() ? ConstraintSpec::fixed(c.get<Mbps>())
                                                 : ConstraintSpec::parse(c.get<std::string>());
         }
         const auto& sim = jt.at("sim");
         if (t.kind == TaskKind::Compute) t.duration_s = sim.at("duration_s").get<double>();
         else t.bytes = sim.at("bytes").get<std::uint64_t>();
         t.validate();
         w.tasks.push_back(std::move(t));
      }
      return w;
   } catch (const nlohmann::json::exception& e) {
      throw WorkloadError(std::string("malformed workload: ") + e.what());
   }
}

inline nlohmann::json workload_to_json(const Workload& w) {
   nlohmann::json tasks = nlohmann::json::array();
   for (const auto& t : w.tasks) {
      nlohmann::json params = nlohmann::json::array();
      for (const auto& p : t.params) params.push_back({{"name", p.name}, {"dir", to_string(p.direction)}, {"datum", p.datum}});
      nlohmann::json jt = {{"type", t.task_type}, {"kind", to_string(t.kind)}, {"params", params},
                           {"computing_units", t.computing_units}};
      if (t.storage_bw) {
         if (t.storage_bw->is_static()) jt["storage_bw"] = t.storage_bw->static_value();
         else jt["storage_bw"] = t.storage_bw->to_string();
      }
      if (t.kind == TaskKind::Compute) jt["sim"] = {{"duration_s", t.duration_s}};
      else jt["sim"] = {{"bytes", t.bytes}};
      tasks.push_back(std::move(jt));
   }
   return {{"nodes_required", w.nodes_required}, {"initial_data", w.initial_data}, {"tasks", tasks}};
}

inline Workload load_workload(const std::string& path) { return workload_from_json(detail::read_json_file(path)); }

inline ClusterModel cluster_from_json(const nlohmann::json& j) {
   try {
      ClusterModel c;
      for (const auto& jn : j.at("nodes")) {
         NodeDescription n;
         n.id = jn.at("id").get<NodeId>();
         n.cpus = jn.at("cpus").get<int>();
         n.io_executors = jn.at("io_executors").get<int>();
         const auto& d = jn.at("device");
         n.device.peak_bw_mbs = d.at("peak_bw_mbs").get<double>();
         n.device.per_stream_cap_mbs = d.value("per_stream_cap_mbs", n.device.peak_bw_mbs / 8.0);
         n.device.congestion_beta = d.value("congestion_beta", 0.05);
         n.device.saturation_n0 = d.value("saturation_n0", n.device.peak_bw_mbs / n.device.per_stream_cap_mbs);
         c.nodes.push_back(n);
      }
      c.validate();
      return c;
   } catch (const nlohmann::json::exception& e) {
      throw WorkloadError(std::string("malformed cluster: ") + e.what());
   }
}

inline nlohmann::json cluster_to_json(const ClusterModel& c) {
   nlohmann::json nodes = nlohmann::json::array();
   for (const auto& n : c.nodes) {
      nodes.push_back({{"id", n.id},
                       {"cpus", n.cpus},
                       {"io_executors", n.io_executors},
                       {"device",
                        {{"peak_bw_mbs", n.device.peak_bw_mbs},
                         {"per_stream_cap_mbs", n.device.per_stream_cap_mbs},
                         {"congestion_beta", n.device.congestion_beta},
                         {"saturation_n0", n.device.saturation_n0}}}});
   }
   return {{"nodes", nodes}};
}

inline ClusterModel load_cluster(const std::string& path) { return cluster_from_json(detail::read_json_file(path)); }

} // namespace ioaware
