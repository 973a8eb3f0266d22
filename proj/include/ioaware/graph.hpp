#pragma once

#include "ioaware/constraint.hpp"
#include "ioaware/error.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace ioaware {

using TaskId = std::int64_t;
using NodeId = int;

enum class Direction { In, InOut, Out };
enum class TaskKind { Compute, Io };
enum class TaskState { Pending, Ready, Running, Done };

inline bool reads(Direction d) { return d != Direction::Out; }
inline bool writes(Direction d) { return d != Direction::In; }

inline const char* to_string(Direction d) {
   switch (d) {
      case Direction::In: return "IN";
      case Direction::InOut: return "INOUT";
      case Direction::Out: return "OUT";
   }
   return "?";
}
inline const char* to_string(TaskKind k) { return k == TaskKind::Compute ? "COMPUTE" : "IO"; }
inline const char* to_string(TaskState s) {
   switch (s) {
      case TaskState::Pending: return "PENDING";
      case TaskState::Ready: return "READY";
      case TaskState::Running: return "RUNNING";
      case TaskState::Done: return "DONE";
   }
   return "?";
}

struct ParamDecl {
   std::string name;
   Direction direction = Direction::In;
   std::string datum;
};

/// Declared unit of work.
///
/// `duration_s` drives compute tasks and `bytes` drives I/O tasks. A task that
/// carries bytes writes them through the node's storage device no matter which
/// platform runs it, so an I/O task demoted to the compute platform still
/// competes for bandwidth.
struct TaskSpec {
   std::string task_type;
   TaskKind kind = TaskKind::Compute;
   std::vector<ParamDecl> params;
   int computing_units = 1;
   std::optional<ConstraintSpec> storage_bw;
   double duration_s = 0.0;
   std::uint64_t bytes = 0;

   /// Throws WorkloadError when the declaration is inconsistent.
   void validate() const {
      if (task_type.empty()) throw WorkloadError("task type must not be empty");
      if (kind == TaskKind::Compute) {
         if (computing_units < 1)
            throw WorkloadError("compute task '" + task_type + "' needs computing_units >= 1");
         if (storage_bw) throw WorkloadError("compute task '" + task_type + "' cannot carry a storage_bw constraint");
         if (duration_s < 0.0) throw WorkloadError("compute task '" + task_type + "' has a negative duration");
      } else {
         if (computing_units < 0) throw WorkloadError("I/O task '" + task_type + "' has negative computing_units");
         if (bytes == 0) throw WorkloadError("I/O task '" + task_type + "' must write a positive number of bytes");
      }
   }
};

struct TaskInstance {
   TaskId id = 0;
   TaskSpec spec;
   std::vector<TaskId> predecessors;
   std::vector<TaskId> successors;
   TaskState state = TaskState::Pending;
   std::optional<NodeId> assigned_node;
   std::optional<Mbps> admitted_bw;
   std::size_t unmet = 0;
};

struct GraphStats {
   std::array<std::size_t, 4> by_state{};
   std::size_t critical_path = 0;

   std::size_t count(TaskState s) const { return by_state[static_cast<std::size_t>(s)]; }
   std::size_t total() const { return by_state[0] + by_state[1] + by_state[2] + by_state[3]; }
};

/// Dataflow task graph built from parameter directions.
///
/// Each read of a datum depends on its last writer. Every write creates a new
/// version of the datum, so readers of an older version never wait for later
/// writers and write-after-read needs no edge. Ids are dense and assigned in
/// submission order, so every edge points from a lower id to a higher one.
class TaskGraph {
public:
   void register_initial(const std::string& datum) { initial_.insert(datum); }

   /// Submits a task whose params carry their own datum names.
   TaskInstance& submit(TaskSpec spec) {
      std::vector<std::string> bindings;
      bindings.reserve(spec.params.size());
      for (const auto& p : spec.params) bindings.push_back(p.datum);
      return submit(std::move(spec), bindings);
   }

   TaskInstance& submit(TaskSpec spec, std::span<const std::string> datum_bindings) {
      if (datum_bindings.size() != spec.params.size())
         throw ContractViolation("task '" + spec.task_type + "': " + std::to_string(datum_bindings.size()) +
                                 " data bindings for " + std::to_string(spec.params.size()) + " params");
      spec.validate();

      const TaskId id = static_cast<TaskId>(tasks_.size());
      std::vector<TaskId> preds;
      for (std::size_t i = 0; i < spec.params.size(); ++i) {
         if (!reads(spec.params[i].direction)) continue;
         const auto& datum = datum_bindings[i];
         if (auto it = last_writer_.find(datum); it != last_writer_.end()) {
            preds.push_back(it->second);
         } else if (!initial_.contains(datum)) {
            throw WorkloadError("undefined input: datum '" + datum + "' read by task '" + spec.task_type +
                                "' has no prior writer");
         }
      }
      std::sort(preds.begin(), preds.end());
      preds.erase(std::unique(preds.begin(), preds.end()), preds.end());

      for (std::size_t i = 0; i < spec.params.size(); ++i) {
         spec.params[i].datum = datum_bindings[i];
         if (writes(spec.params[i].direction)) last_writer_[datum_bindings[i]] = id;
      }

      TaskInstance t;
      t.id = id;
      t.spec = std::move(spec);
      t.predecessors = std::move(preds);
      for (TaskId p : t.predecessors) {
         tasks_[p].successors.push_back(id);
         if (tasks_[p].state != TaskState::Done) ++t.unmet;
      }
      t.state = t.unmet == 0 ? TaskState::Ready : TaskState::Pending;
      tasks_.push_back(std::move(t));
      return tasks_.back();
   }

   /// READY -> RUNNING.
   void start(TaskId id, NodeId node, std::optional<Mbps> admitted_bw) {
      auto& t = at(id);
      if (t.state != TaskState::Ready)
         throw ContractViolation("task " + std::to_string(id) + " started while " + to_string(t.state));
      t.state = TaskState::Running;
      t.assigned_node = node;
      t.admitted_bw = admitted_bw;
   }

   /// RUNNING -> DONE. Returns the successors that became READY, in id order.
   std::vector<TaskId> mark_done(TaskId id) {
      auto& t = at(id);
      if (t.state != TaskState::Running)
         throw ContractViolation("mark_done on task " + std::to_string(id) + " in state " + to_string(t.state));
      t.state = TaskState::Done;
      std::vector<TaskId> ready;
      for (TaskId s : t.successors) {
         auto& succ = tasks_[s];
         if (--succ.unmet == 0) {
            succ.state = TaskState::Ready;
            ready.push_back(s);
         }
      }
      return ready;
   }

   GraphStats stats() const {
      GraphStats st;
      std::vector<std::size_t> depth(tasks_.size(), 0);
      for (const auto& t : tasks_) {
         ++st.by_state[static_cast<std::size_t>(t.state)];
         std::size_t d = 0;
         for (TaskId p : t.predecessors) d = std::max(d, depth[p]);
         depth[t.id] = d + 1;
         st.critical_path = std::max(st.critical_path, depth[t.id]);
      }
      return st;
   }

   const TaskInstance& at(TaskId id) const {
      if (id < 0 || static_cast<std::size_t>(id) >= tasks_.size())
         throw ContractViolation("unknown task id " + std::to_string(id));
      return tasks_[id];
   }
   TaskInstance& at(TaskId id) { return const_cast<TaskInstance&>(std::as_const(*this).at(id)); }

   std::size_t size() const { return tasks_.size(); }
   const std::vector<TaskInstance>& tasks() const { return tasks_; }

private:
   std::vector<TaskInstance> tasks_;
   std::unordered_map<std::string, TaskId> last_writer_;
   std::unordered_set<std::string> initial_;
};

} // namespace ioaware
