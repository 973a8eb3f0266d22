#pragma once

#include "ioaware/autotune.hpp"
#include "ioaware/graph.hpp"
#include "ioaware/resources.hpp"
#include "ioaware/trace.hpp"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ioaware {

enum class PlacementPolicy { FirstCandidate, Locality };

/// A task admitted by schedule_tick.
struct Launch {
   TaskId task = 0;
   std::size_t node_index = 0;
   bool io_platform = false;
   std::optional<Mbps> admitted_bw;
   std::optional<int> epoch_index;
};

/// I/O-aware scheduling core shared by every backend.
///
/// Compute tasks are admitted against CPUs. I/O tasks are admitted against
/// I/O executors and storage bandwidth only, so CPU occupancy never delays
/// them. Auto-constrained types are routed through their Learner while it is
/// learning: their tasks are pinned to a dedicated node and fed one epoch at a
/// time.
///
/// All methods must be called from one thread (the backend's event loop).
class Scheduler {
public:
   explicit Scheduler(ClusterModel cluster, PlacementPolicy policy = PlacementPolicy::FirstCandidate)
       : ledger_(cluster), policy_(policy), running_by_node_(ledger_.node_count()), io_running_(ledger_.node_count()) {}

   void register_initial(const std::string& datum) { graph_.register_initial(datum); }

   /// Adds a task; it is enqueued immediately if it has no unmet predecessor.
   TaskId submit(TaskSpec spec, double now) {
      check_constraint(spec);
      auto& t = graph_.submit(std::move(spec));
      const TaskId id = t.id;
      start_time_.push_back(0.0);
      epoch_of_.push_back(std::nullopt);
      if (t.spec.kind == TaskKind::Io) ++unlaunched_[t.spec.task_type];
      record(now, EventKind::Submit, t);
      if (t.state == TaskState::Ready) on_task_ready(id, now);
      return id;
   }

   /// Enqueues a READY task on its platform's queue.
   void on_task_ready(TaskId id, double now) {
      const auto& t = graph_.at(id);
      if (t.state != TaskState::Ready) throw ContractViolation("on_task_ready for a task that is not READY");
      record(now, EventKind::Ready, t);
      if (t.spec.kind == TaskKind::Compute) {
         compute_queue_.push_back(id);
         return;
      }
      auto& q = io_queues_[t.spec.task_type];
      q.push_back(id);
      if (auto* l = learner_for(t.spec.task_type)) l->on_arrival(static_cast<std::int64_t>(q.size()));
   }

   /// Admits as many queued tasks as the ledger allows.
   std::vector<Launch> schedule_tick(double now) {
      std::vector<Launch> out;
      bind_learning_nodes();
      admit_compute(now, out);
      admit_io(now, out);
      return out;
   }

   /// Completion of a RUNNING task; frees its resources and enqueues newly
   /// READY successors.
   void on_complete(TaskId id, double now) {
      auto& t = graph_.at(id);
      if (t.state != TaskState::Running) throw ContractViolation("completion of a task that is not RUNNING");
      const std::size_t node = ledger_.index_of(*t.assigned_node);
      if (t.spec.kind == TaskKind::Io) {
         ledger_.release(node, ResourceKind::Io, t.admitted_bw.value_or(0));
         --io_running_[node][t.spec.task_type];
      } else {
         ledger_.release(node, ResourceKind::Cpu, t.spec.computing_units);
      }
      running_by_node_[node].erase(id);
      ++done_;
      const double duration = now - start_time_[id];
      record(now, EventKind::End, t);

      if (auto* l = learner_for(t.spec.task_type); l && epoch_of_[id] && l->learning()) {
         l->record_completion(*epoch_of_[id], duration, ready_count(t.spec.task_type));
         if (!l->learning()) release_learning_node(*l);
      }
      for (TaskId s : graph_.mark_done(id)) on_task_ready(s, now);
      finish_exhausted_learners();
   }

   /// Called when nothing is running but tasks remain. Ends every learning
   /// phase that waits for tasks which cannot arrive. Returns whether any
   /// state changed.
   bool resolve_stall() {
      bool changed = false;
      for (auto& [type, l] : learners_) {
         if (l.learning() && l.in_flight() == 0) {
            l.finish_early(ready_count(type));
            release_learning_node(l);
            changed = true;
         }
      }
      return changed;
   }

   bool finished() const { return done_ == graph_.size(); }
   std::size_t done_count() const { return done_; }

   /// Per auto type: the constraint most post-learning admissions used (ties
   /// go to the larger value), or the choice made when learning ended.
   std::map<std::string, Mbps> chosen_constraints() const {
      std::map<std::string, std::map<Mbps, std::int64_t>> used;
      for (const auto& r : trace_)
         if (r.kind == EventKind::Start && !r.epoch_index && r.admitted_bw && learners_.contains(r.task_type))
            ++used[r.task_type][*r.admitted_bw];
      std::map<std::string, Mbps> out;
      for (const auto& [type, l] : learners_) {
         if (auto it = used.find(type); it != used.end()) {
            Mbps best = 0;
            std::int64_t best_n = -1;
            for (auto [c, n] : it->second)
               if (n >= best_n) {
                  best = c;
                  best_n = n;
               }
            out[type] = best;
         } else if (auto c = l.chosen_at_learning_end()) {
            out[type] = *c;
         }
      }
      return out;
   }

   /// Constraint an I/O task would be admitted with right now.
   std::optional<Mbps> effective_constraint(TaskId id) const {
      const auto& spec = graph_.at(id).spec;
      if (spec.kind != TaskKind::Io || !spec.storage_bw) return std::nullopt;
      if (spec.storage_bw->is_static()) return spec.storage_bw->static_value();
      return learners_.at(spec.task_type).current_constraint();
   }

   /// Node a ready task would be placed on, if any fits now.
   std::optional<std::size_t> pick_node(TaskId id) const {
      const auto& t = graph_.at(id);
      if (t.spec.kind == TaskKind::Compute) {
         return pick([&](std::size_t n) { return ledger_.state(n).free_cpus >= t.spec.computing_units; }, t);
      }
      const Mbps bw = effective_constraint(id).value_or(0);
      return pick(
          [&](std::size_t n) { return ledger_.io_eligible(n, t.spec.task_type) && ledger_.can_reserve_io(n, bw); }, t);
   }

   /// Verifies ledger conservation and concurrency bounds on every node.
   void audit() const {
      for (std::size_t n = 0; n < ledger_.node_count(); ++n) {
         const auto& desc = ledger_.node(n);
         const auto& st = ledger_.state(n);
         Mbps bw = 0;
         int cpus = 0, io = 0;
         std::map<Mbps, std::int64_t> per_constraint;
         for (TaskId id : running_by_node_[n]) {
            const auto& t = graph_.at(id);
            if (t.spec.kind == TaskKind::Io) {
               bw += t.admitted_bw.value_or(0);
               ++io;
               if (t.admitted_bw && *t.admitted_bw > 0) ++per_constraint[*t.admitted_bw];
            } else {
               cpus += t.spec.computing_units;
            }
         }
         const auto where = " on node " + std::to_string(desc.id);
         if (bw + st.free_bw != desc.peak_bw()) throw ContractViolation("bandwidth conservation broken" + where);
         if (bw > desc.peak_bw()) throw ContractViolation("admitted bandwidth exceeds peak" + where);
         if (io + st.free_io_executors != desc.io_executors) throw ContractViolation("I/O executor accounting broken" + where);
         if (cpus + st.free_cpus != desc.cpus) throw ContractViolation("CPU accounting broken" + where);
         for (auto [c, count] : per_constraint)
            if (count > concurrency_bound(desc, c)) throw ContractViolation("concurrency bound exceeded" + where);
      }
   }

   const TaskGraph& graph() const { return graph_; }
   const ResourceLedger& ledger() const { return ledger_; }
   const Trace& trace() const { return trace_; }
   const std::map<std::string, Learner>& learners() const { return learners_; }
   double start_time(TaskId id) const { return start_time_.at(id); }
   std::optional<int> epoch_of(TaskId id) const { return epoch_of_.at(id); }
   std::size_t running_count() const {
      std::size_t n = 0;
      for (const auto& s : running_by_node_) n += s.size();
      return n;
   }
   std::int64_t ready_count(const std::string& type) const {
      auto it = io_queues_.find(type);
      return it == io_queues_.end() ? 0 : static_cast<std::int64_t>(it->second.size());
   }

private:
   Learner* learner_for(const std::string& type) {
      auto it = learners_.find(type);
      return it == learners_.end() ? nullptr : &it->second;
   }

   void check_constraint(const TaskSpec& spec) {
      if (spec.kind == TaskKind::Compute) {
         int most = 0;
         for (const auto& n : ledger_.cluster().nodes) most = std::max(most, n.cpus);
         if (spec.computing_units > most)
            throw UnsatisfiableConstraint("task '" + spec.task_type + "' needs " + std::to_string(spec.computing_units) +
                                          " CPUs but no node has that many");
         return;
      }
      if (spec.kind != TaskKind::Io || !spec.storage_bw) {
         if (spec.kind == TaskKind::Io) note_type_constraint(spec);
         return;
      }
      const auto& c = *spec.storage_bw;
      const Mbps peak = ledger_.cluster().max_peak_bw();
      if (c.is_static() && c.static_value() > peak)
         throw UnsatisfiableConstraint("constraint " + std::to_string(c.static_value()) + " MB/s of '" +
                                       spec.task_type + "' exceeds the peak bandwidth of every node");
      if (c.is_bounded() && c.bounds().min > peak)
         throw UnsatisfiableConstraint("auto constraint minimum of '" + spec.task_type +
                                       "' exceeds the peak bandwidth of every node");
      note_type_constraint(spec);
      if (c.is_auto() && !learners_.contains(spec.task_type))
         learners_.emplace(spec.task_type, Learner(spec.task_type, c, ledger_.cluster()));
   }

   // Every instance of an I/O type must share its constraint; auto types must
   // also write the same volume every time.
   void note_type_constraint(const TaskSpec& spec) {
      auto [it, inserted] = type_decl_.try_emplace(spec.task_type, TypeDecl{spec.storage_bw, spec.bytes});
      if (inserted) return;
      if (it->second.constraint != spec.storage_bw)
         throw WorkloadError("instances of I/O task type '" + spec.task_type + "' declare different constraints");
      if (spec.storage_bw && spec.storage_bw->is_auto() && it->second.bytes != spec.bytes)
         throw WorkloadError("instances of auto-constrained task type '" + spec.task_type +
                             "' declare different byte sizes");
   }

   template <typename Fits>
   std::optional<std::size_t> pick(Fits fits, const TaskInstance& t) const {
      if (policy_ == PlacementPolicy::FirstCandidate) {
         for (std::size_t n = 0; n < ledger_.node_count(); ++n)
            if (fits(n)) return n;
         return std::nullopt;
      }
      std::optional<std::size_t> best;
      std::size_t best_count = 0;
      for (std::size_t n = 0; n < ledger_.node_count(); ++n) {
         if (!fits(n)) continue;
         std::size_t count = 0;
         for (TaskId p : t.predecessors) {
            const auto& pn = graph_.at(p).assigned_node;
            count += pn && *pn == ledger_.node(n).id;
         }
         if (!best || count > best_count) {
            best = n;
            best_count = count;
         }
      }
      return best;
   }

   void bind_learning_nodes() {
      for (auto& [type, l] : learners_) {
         if (!l.learning() || l.learning_node() || ready_count(type) == 0) continue;
         for (std::size_t n = 0; n < ledger_.node_count(); ++n) {
            if (ledger_.state(n).learning_reservation) continue;
            if (ledger_.mark_learning_node(n, type)) {
               l.begin(n);
               break;
            }
         }
      }
   }

   void release_learning_node(const Learner& l) {
      if (l.learning_node()) ledger_.unmark_learning_node(*l.learning_node());
   }

   void finish_exhausted_learners() {
      for (auto& [type, l] : learners_) {
         if (l.learning() && l.in_flight() == 0 && unlaunched_[type] == 0) {
            l.finish_early(ready_count(type));
            release_learning_node(l);
         }
      }
   }

   std::int64_t foreign_io_running(std::size_t node, const std::string& type) const {
      std::int64_t n = 0;
      for (const auto& [other, count] : io_running_[node])
         if (other != type) n += count;
      return n;
   }

   void launch(TaskId id, std::size_t node, bool io, std::optional<Mbps> bw, std::optional<int> epoch, double now,
               std::vector<Launch>& out) {
      graph_.start(id, ledger_.node(node).id, bw);
      start_time_[id] = now;
      epoch_of_[id] = epoch;
      running_by_node_[node].insert(id);
      const auto& t = graph_.at(id);
      if (io) {
         ++io_running_[node][t.spec.task_type];
         --unlaunched_[t.spec.task_type];
      }
      record(now, EventKind::Start, t);
      out.push_back({id, node, io, bw, epoch});
   }

   void admit_compute(double now, std::vector<Launch>& out) {
      std::deque<TaskId> waiting;
      while (!compute_queue_.empty()) {
         const TaskId id = compute_queue_.front();
         compute_queue_.pop_front();
         int free_total = 0;
         for (std::size_t n = 0; n < ledger_.node_count(); ++n) free_total += ledger_.state(n).free_cpus;
         if (free_total == 0) {
            waiting.push_back(id);
            break;
         }
         auto node = pick_node(id);
         if (!node) {
            waiting.push_back(id);
            continue;
         }
         ledger_.reserve_compute(*node, graph_.at(id).spec.computing_units);
         launch(id, *node, false, std::nullopt, std::nullopt, now, out);
      }
      for (TaskId id : compute_queue_) waiting.push_back(id);
      compute_queue_ = std::move(waiting);
   }

   bool try_admit_io(TaskId id, double now, std::vector<Launch>& out) {
      const auto& type = graph_.at(id).spec.task_type;
      if (auto* l = learner_for(type); l && l->learning()) {
         if (!l->learning_node() || !l->epoch_has_room()) return false;
         const std::size_t node = *l->learning_node();
         if (foreign_io_running(node, type) > 0) return false;
         const Mbps c = *l->current_constraint();
         if (ledger_.reserve_io(node, c) != Admission::Ok) return false;
         const int epoch = l->note_launch();
         launch(id, node, true, c, epoch, now, out);
         return true;
      }
      const auto c = effective_constraint(id);
      auto node = pick_node(id);
      if (!node) return false;
      ledger_.reserve_io(*node, c.value_or(0));
      launch(id, *node, true, c.value_or(0), std::nullopt, now, out);
      return true;
   }

   void admit_io(double now, std::vector<Launch>& out) {
      std::set<std::string> blocked;
      while (true) {
         const std::string* next = nullptr;
         TaskId head = 0;
         for (auto& [type, q] : io_queues_) {
            if (q.empty() || blocked.contains(type)) continue;
            if (!next || q.front() < head) {
               next = &type;
               head = q.front();
            }
         }
         if (!next) break;
         if (try_admit_io(head, now, out)) io_queues_[*next].pop_front();
         else blocked.insert(*next);
      }
   }

   void record(double now, EventKind kind, const TaskInstance& t) {
      TraceRecord r;
      r.time_s = now;
      r.kind = kind;
      r.task_id = t.id;
      r.task_type = t.spec.task_type;
      r.task_kind = t.spec.kind;
      if (kind == EventKind::Start || kind == EventKind::End) {
         r.node = t.assigned_node;
         if (t.spec.kind == TaskKind::Io) r.admitted_bw = t.admitted_bw;
         r.epoch_index = epoch_of_[t.id];
      }
      trace_.push_back(std::move(r));
   }

   struct TypeDecl {
      std::optional<ConstraintSpec> constraint;
      std::uint64_t bytes = 0;
   };

   TaskGraph graph_;
   ResourceLedger ledger_;
   PlacementPolicy policy_;
   std::deque<TaskId> compute_queue_;
   std::map<std::string, std::deque<TaskId>> io_queues_;
   std::map<std::string, Learner> learners_;
   std::map<std::string, TypeDecl> type_decl_;
   std::map<std::string, std::int64_t> unlaunched_;
   std::vector<std::set<TaskId>> running_by_node_;
   std::vector<std::map<std::string, std::int64_t>> io_running_;
   std::size_t done_ = 0;
   std::vector<double> start_time_;
   std::vector<std::optional<int>> epoch_of_;
   Trace trace_;
};

} // namespace ioaware
