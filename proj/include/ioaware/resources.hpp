#pragma once

#include "ioaware/constraint.hpp"
#include "ioaware/error.hpp"
#include "ioaware/graph.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace ioaware {

/// Storage device parameters of one node.
struct DeviceParams {
   double peak_bw_mbs = 450.0;
   double per_stream_cap_mbs = 450.0 / 8.0;
   double congestion_beta = 0.05;
   double saturation_n0 = 8.0;
};

struct NodeDescription {
   NodeId id = 0;
   int cpus = 1;
   int io_executors = 1;
   DeviceParams device;

   /// Whole MB/s available for admission credit.
   Mbps peak_bw() const { return static_cast<Mbps>(device.peak_bw_mbs); }

   void validate() const {
      const auto who = "node " + std::to_string(id);
      if (cpus < 1) throw WorkloadError(who + ": cpus must be >= 1");
      if (io_executors < 1) throw WorkloadError(who + ": io_executors must be >= 1");
      if (!(device.peak_bw_mbs > 0)) throw WorkloadError(who + ": peak_bw must be positive");
      if (peak_bw() < 1) throw WorkloadError(who + ": peak_bw must be at least 1 MB/s");
      if (!(device.per_stream_cap_mbs > 0) || device.per_stream_cap_mbs > device.peak_bw_mbs)
         throw WorkloadError(who + ": per_stream_cap must be in (0, peak_bw]");
      if (device.congestion_beta < 0) throw WorkloadError(who + ": congestion_beta must be >= 0");
      if (device.saturation_n0 < 0) throw WorkloadError(who + ": saturation_n0 must be >= 0");
   }
};

/// Ordered list of nodes; "lowest id" placement refers to this order.
struct ClusterModel {
   std::vector<NodeDescription> nodes;

   void validate() const {
      if (nodes.empty()) throw WorkloadError("cluster has no nodes");
      for (std::size_t i = 0; i < nodes.size(); ++i) {
         nodes[i].validate();
         if (i > 0 && nodes[i].id <= nodes[i - 1].id)
            throw WorkloadError("cluster node ids must be unique and listed in increasing order");
      }
   }

   Mbps max_peak_bw() const {
      Mbps m = 0;
      for (const auto& n : nodes) m = std::max(m, n.peak_bw());
      return m;
   }

   /// Homogeneous convenience constructor.
   static ClusterModel uniform(int node_count, int cpus, int io_executors, DeviceParams device = {}) {
      ClusterModel c;
      for (int i = 0; i < node_count; ++i) c.nodes.push_back({i, cpus, io_executors, device});
      return c;
   }
};

/// Maximum concurrent I/O tasks a node admits under constraint `c` (c > 0).
inline std::int64_t concurrency_bound(const NodeDescription& node, Mbps c) {
   return std::min<std::int64_t>(node.peak_bw() / c, node.io_executors);
}

enum class Admission { Ok, Insufficient };
enum class ResourceKind { Cpu, Io };

/// Live admission-control credit per node.
///
/// I/O reservations hold one I/O executor plus their bandwidth; they never
/// touch the CPU pool. A node marked for learning admits only I/O of the
/// marking task type.
class ResourceLedger {
public:
   struct NodeState {
      int free_cpus = 0;
      Mbps free_bw = 0;
      int free_io_executors = 0;
      std::optional<std::string> learning_reservation;
   };

   explicit ResourceLedger(const ClusterModel& cluster) : cluster_(cluster) {
      cluster_.validate();
      for (const auto& n : cluster_.nodes) state_.push_back({n.cpus, n.peak_bw(), n.io_executors, std::nullopt});
   }

   std::size_t node_count() const { return state_.size(); }
   const NodeDescription& node(std::size_t idx) const { return cluster_.nodes.at(idx); }
   const NodeState& state(std::size_t idx) const { return state_.at(idx); }
   const ClusterModel& cluster() const { return cluster_; }

   Admission reserve_compute(std::size_t idx, int units) {
      if (units < 1) throw ContractViolation("reserve_compute needs units >= 1");
      auto& s = state_.at(idx);
      if (s.free_cpus < units) return Admission::Insufficient;
      s.free_cpus -= units;
      return Admission::Ok;
   }

   /// A zero bandwidth reservation is an unconstrained I/O task: it only needs an executor.
   Admission reserve_io(std::size_t idx, Mbps bw) {
      if (bw < 0) throw ContractViolation("reserve_io needs a non-negative bandwidth");
      auto& s = state_.at(idx);
      if (s.free_io_executors == 0 || s.free_bw < bw) return Admission::Insufficient;
      s.free_bw -= bw;
      --s.free_io_executors;
      return Admission::Ok;
   }

   bool can_reserve_io(std::size_t idx, Mbps bw) const {
      const auto& s = state_.at(idx);
      return s.free_io_executors > 0 && s.free_bw >= bw;
   }

   /// For Cpu `amount` is a unit count; for Io it is the bandwidth of one reservation.
   void release(std::size_t idx, ResourceKind kind, std::int64_t amount) {
      auto& s = state_.at(idx);
      const auto& n = cluster_.nodes.at(idx);
      if (kind == ResourceKind::Cpu) {
         if (amount < 1 || s.free_cpus + amount > n.cpus)
            throw ContractViolation("over-release of CPUs on node " + std::to_string(n.id));
         s.free_cpus += static_cast<int>(amount);
      } else {
         if (amount < 0 || s.free_bw + amount > n.peak_bw() || s.free_io_executors + 1 > n.io_executors)
            throw ContractViolation("over-release of I/O resources on node " + std::to_string(n.id));
         s.free_bw += amount;
         ++s.free_io_executors;
      }
   }

   /// Returns false (refusal) when the node already learns for another type.
   bool mark_learning_node(std::size_t idx, const std::string& task_type) {
      auto& r = state_.at(idx).learning_reservation;
      if (r && *r != task_type) return false;
      r = task_type;
      return true;
   }

   void unmark_learning_node(std::size_t idx) { state_.at(idx).learning_reservation.reset(); }

   /// Whether an I/O task of `task_type` may be admitted to this node's I/O platform.
   bool io_eligible(std::size_t idx, const std::string& task_type) const {
      const auto& r = state_.at(idx).learning_reservation;
      return !r || *r == task_type;
   }

   std::size_t index_of(NodeId id) const {
      for (std::size_t i = 0; i < cluster_.nodes.size(); ++i)
         if (cluster_.nodes[i].id == id) return i;
      throw ContractViolation("unknown node id " + std::to_string(id));
   }

private:
   ClusterModel cluster_;
   std::vector<NodeState> state_;
};

} // namespace ioaware
