#pragma once

#include "ioaware/constraint.hpp"
#include "ioaware/error.hpp"
#include "ioaware/resources.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace ioaware {

/// One learned point: mean I/O task time under constraint c and the number of
/// tasks the whole cluster can run concurrently under c.
struct RegistryEntry {
   double mean_s = 0.0;
   std::int64_t max_tasks = 0;
   friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

/// Constraint -> (mean task time, cluster-wide concurrency).
using AutoRegistry = std::map<Mbps, RegistryEntry>;

/// Constraint of the first learning epoch.
inline Mbps initial_constraint(const ConstraintSpec& spec, const NodeDescription& learning_node) {
   if (spec.is_static()) throw ContractViolation("initial_constraint called on a static constraint");
   if (spec.is_bounded()) return spec.bounds().min;
   return std::max<Mbps>(1, learning_node.peak_bw() / learning_node.io_executors);
}

/// Number of concurrent tasks that make up an epoch under `c` on the learning
/// node, or nullopt when `c` exceeds the device and cannot be tested.
inline std::optional<std::int64_t> epoch_size(Mbps c, const NodeDescription& learning_node) {
   if (c <= 0) throw ContractViolation("epoch_size needs a positive constraint");
   if (c > learning_node.peak_bw()) return std::nullopt;
   return concurrency_bound(learning_node, c);
}

/// Sum over nodes of the per-node concurrency bound under `c`.
inline std::int64_t cluster_max_tasks(const ClusterModel& cluster, Mbps c) {
   std::int64_t total = 0;
   for (const auto& n : cluster.nodes)
      if (c <= n.peak_bw()) total += concurrency_bound(n, c);
   return total;
}

struct EpochDecision {
   std::optional<Mbps> next; ///< empty means STOP
   bool stop() const { return !next.has_value(); }
};

/// Continue-or-stop rule applied after epoch `epoch_index` (1-based) closed
/// with constraint `c` and mean time `t_current`; `t_previous` is the prior
/// epoch's mean.
inline EpochDecision advance_or_stop(const ConstraintSpec& spec, Mbps c, int epoch_index, double t_current,
                                     std::optional<double> t_previous) {
   if (spec.is_static()) throw ContractViolation("advance_or_stop called on a static constraint");
   if (spec.is_bounded()) {
      const auto& b = spec.bounds();
      const Mbps next = c * b.delta;
      if (next <= b.max) return {next};
      return {};
   }
   if (epoch_index <= 1 || !t_previous) return {2 * c};
   if (t_current <= *t_previous / 2.0) return {2 * c};
   return {};
}

/// Estimated time to run `num_tasks` under `c`: every group of up to
/// max_tasks concurrent tasks costs one mean task time, including the
/// partial remainder group.
inline double estimate_time(std::int64_t num_tasks, Mbps c, const AutoRegistry& registry) {
   if (num_tasks < 0) throw ContractViolation("estimate_time needs num_tasks >= 0");
   auto it = registry.find(c);
   if (it == registry.end()) throw ContractViolation("constraint " + std::to_string(c) + " not in registry");
   const auto max = it->second.max_tasks;
   if (max <= 0) throw ContractViolation("registry entry with no concurrency");
   const auto groups = (num_tasks + max - 1) / max;
   return static_cast<double>(groups) * it->second.mean_s;
}

/// argmin of estimate_time over the registry; exact ties go to the highest constraint.
inline Mbps choose_constraint(std::int64_t num_tasks, const AutoRegistry& registry) {
   if (registry.empty()) throw ContractViolation("choose_constraint on an empty registry");
   Mbps best = registry.begin()->first;
   double best_t = estimate_time(num_tasks, best, registry);
   for (const auto& [c, entry] : registry) {
      const double t = estimate_time(num_tasks, c, registry);
      if (t <= best_t) {
         best = c;
         best_t = t;
      }
   }
   return best;
}

enum class LearnPhase { Learning, Done };

struct EpochRecord {
   int index = 0;
   Mbps constraint = 0;
   std::int64_t planned_size = 0;
   std::vector<double> samples;
   double mean_s = 0.0;
};

/// Row of the learning trace.
struct LearningRow {
   int epoch_index = 0;
   Mbps constraint = 0;
   std::int64_t epoch_size = 0;
   std::optional<double> t_epoch_s;
   bool stop = false;
   std::optional<Mbps> chosen;
};

/// Learning-phase state machine for one auto-constrained task type.
///
/// The scheduler owns the dedicated node and the admission gate; the learner
/// decides constraints. Epochs are serial: an epoch opens with a planned size,
/// admits at most that many tasks and closes when all of them have completed.
class Learner {
public:
   Learner(std::string task_type, ConstraintSpec spec, ClusterModel cluster)
       : type_(std::move(task_type)), spec_(spec), cluster_(std::move(cluster)) {
      if (!spec_.is_auto()) throw ContractViolation("learner needs an auto constraint");
   }

   const std::string& task_type() const { return type_; }
   const ConstraintSpec& spec() const { return spec_; }
   LearnPhase phase() const { return phase_; }
   bool learning() const { return phase_ == LearnPhase::Learning; }
   const AutoRegistry& registry() const { return registry_; }
   const std::vector<LearningRow>& rows() const { return rows_; }
   std::optional<Mbps> chosen() const { return chosen_; }
   std::optional<Mbps> chosen_at_learning_end() const { return chosen_at_end_; }
   const std::optional<EpochRecord>& current_epoch() const { return epoch_; }
   std::optional<std::size_t> learning_node() const { return node_; }
   std::int64_t launched_in_epoch() const { return launched_; }

   /// Binds the dedicated node and opens the first epoch.
   void begin(std::size_t node_index) {
      if (node_ || phase_ != LearnPhase::Learning) throw ContractViolation("learner already started");
      node_ = node_index;
      open_epoch(initial_constraint(spec_, cluster_.nodes.at(node_index)));
   }

   /// Constraint admissions must use right now, if any.
   std::optional<Mbps> current_constraint() const {
      if (phase_ == LearnPhase::Done) return chosen_;
      if (epoch_) return epoch_->constraint;
      return std::nullopt;
   }

   /// Whether the open epoch still accepts a task.
   bool epoch_has_room() const { return phase_ == LearnPhase::Learning && epoch_ && launched_ < epoch_->planned_size; }

   /// Returns the epoch index the task is attributed to.
   int note_launch() {
      if (!epoch_has_room()) throw ContractViolation("epoch of '" + type_ + "' is full");
      ++launched_;
      return epoch_->index;
   }

   /// Feeds a completed epoch task. Returns true when the epoch closed.
   bool record_completion(int epoch_index, double duration_s, std::int64_t ready_now) {
      if (phase_ == LearnPhase::Done) return false;
      if (!epoch_ || epoch_index != epoch_->index)
         throw ContractViolation("completion for epoch " + std::to_string(epoch_index) + " of '" + type_ +
                                 "' does not belong to the open epoch");
      epoch_->samples.push_back(duration_s);
      if (static_cast<std::int64_t>(epoch_->samples.size()) < epoch_->planned_size) return false;
      close_epoch(ready_now);
      return true;
   }

   /// Tasks launched in the open epoch that have not completed yet.
   std::int64_t in_flight() const {
      return epoch_ ? launched_ - static_cast<std::int64_t>(epoch_->samples.size()) : 0;
   }

   /// Ends learning early because no more tasks of this type can arrive for
   /// the open epoch. A partial epoch is not registered.
   void finish_early(std::int64_t ready_now) {
      if (phase_ == LearnPhase::Done) return;
      LearningRow row;
      if (epoch_) {
         row.epoch_index = epoch_->index;
         row.constraint = epoch_->constraint;
         row.epoch_size = epoch_->planned_size;
         if (!epoch_->samples.empty()) row.t_epoch_s = mean(epoch_->samples);
      }
      row.stop = true;
      const std::optional<Mbps> fallback = epoch_ ? std::optional<Mbps>(epoch_->constraint) : std::nullopt;
      finish(row, ready_now, fallback);
   }

   /// Re-runs the objective function for the current ready count.
   void on_arrival(std::int64_t ready_now) {
      if (phase_ != LearnPhase::Done || registry_.empty()) return;
      chosen_ = choose_constraint(ready_now, registry_);
   }

private:
   static double mean(const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
   }

   void open_epoch(Mbps c) {
      const auto size = epoch_size(c, cluster_.nodes.at(*node_));
      const int index = epoch_ ? epoch_->index + 1 : 1;
      if (!size) {
         // Untestable constraint ends the phase with what has been learned.
         epoch_.reset();
         LearningRow row;
         row.epoch_index = index;
         row.constraint = c;
         row.stop = true;
         finish(row, last_ready_, std::nullopt);
         return;
      }
      epoch_ = EpochRecord{index, c, *size, {}, 0.0};
      launched_ = 0;
   }

   void close_epoch(std::int64_t ready_now) {
      auto& e = *epoch_;
      e.mean_s = mean(e.samples);
      registry_[e.constraint] = {e.mean_s, cluster_max_tasks(cluster_, e.constraint)};
      const auto decision = advance_or_stop(spec_, e.constraint, e.index, e.mean_s, previous_mean_);
      previous_mean_ = e.mean_s;
      LearningRow row{e.index, e.constraint, e.planned_size, e.mean_s, decision.stop(), std::nullopt};
      last_ready_ = ready_now;
      if (decision.stop()) {
         finish(row, ready_now, std::nullopt);
         return;
      }
      rows_.push_back(row);
      open_epoch(*decision.next);
   }

   void finish(LearningRow row, std::int64_t ready_now, std::optional<Mbps> fallback) {
      phase_ = LearnPhase::Done;
      if (!registry_.empty()) {
         chosen_ = choose_constraint(ready_now, registry_);
      } else if (fallback) {
         chosen_ = fallback;
      } else {
         // Nothing testable at all: fall back to the largest admissible constraint.
         chosen_ = cluster_.max_peak_bw();
      }
      chosen_at_end_ = chosen_;
      row.chosen = chosen_;
      rows_.push_back(row);
      epoch_.reset();
   }

   std::string type_;
   ConstraintSpec spec_;
   ClusterModel cluster_;
   LearnPhase phase_ = LearnPhase::Learning;
   std::optional<std::size_t> node_;
   std::optional<EpochRecord> epoch_;
   std::int64_t launched_ = 0;
   std::optional<double> previous_mean_;
   std::int64_t last_ready_ = 0;
   AutoRegistry registry_;
   std::optional<Mbps> chosen_;
   std::optional<Mbps> chosen_at_end_;
   std::vector<LearningRow> rows_;
};

} // namespace ioaware
