#pragma once

#include "ioaware/graph.hpp"
#include "ioaware/resources.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <vector>

namespace ioaware {

/// Aggregate bandwidth a device delivers to n concurrent streams.
inline double aggregate_bw(const DeviceParams& d, std::size_t n) {
   const double excess = std::max(0.0, static_cast<double>(n) - d.saturation_n0);
   return d.peak_bw_mbs / (1.0 + d.congestion_beta * excess);
}

/// Rate of each of n concurrent streams (all streams share equally).
inline double per_stream_rate(const DeviceParams& d, std::size_t n) {
   if (n == 0) return 0.0;
   return std::min(d.per_stream_cap_mbs, aggregate_bw(d, n) / static_cast<double>(n));
}

/// Fluid-flow storage device: active streams drain their remaining megabytes
/// at the shared per-stream rate, recomputed whenever membership changes.
class DeviceModel {
public:
   struct Stream {
      TaskId task = 0;
      double remaining_mb = 0.0;
   };

   explicit DeviceModel(DeviceParams params = {}) : params_(params) {}

   const DeviceParams& params() const { return params_; }
   std::size_t active() const { return streams_.size(); }
   const std::vector<Stream>& streams() const { return streams_; }
   double rate() const { return per_stream_rate(params_, streams_.size()); }

   void add(TaskId task, double megabytes) { streams_.push_back({task, megabytes}); }

   /// Time until the earliest stream empties at the current rate.
   std::optional<double> time_to_next_completion() const {
      if (streams_.empty()) return std::nullopt;
      double least = std::numeric_limits<double>::infinity();
      for (const auto& s : streams_) least = std::min(least, s.remaining_mb);
      return least / rate();
   }

   /// Drains every stream for `dt` seconds at the current rate.
   void advance(double dt) {
      if (dt <= 0 || streams_.empty()) return;
      const double drained = rate() * dt;
      for (auto& s : streams_) s.remaining_mb -= drained;
   }

   /// Removes and returns streams that are empty after an advance that ended at
   /// a predicted completion, in task id order. Anything under 1e-9 MB
   /// (one byte) counts as empty.
   std::vector<TaskId> take_finished() {
      std::vector<TaskId> done;
      if (streams_.empty()) return done;
      double least = std::numeric_limits<double>::infinity();
      for (const auto& s : streams_) least = std::min(least, s.remaining_mb);
      const double slack = 1e-9;
      if (least > slack) return done;
      std::vector<Stream> keep;
      for (const auto& s : streams_) {
         if (s.remaining_mb <= slack) done.push_back(s.task);
         else keep.push_back(s);
      }
      streams_ = std::move(keep);
      std::sort(done.begin(), done.end());
      return done;
   }

   /// Drains exactly to the next completion and returns the finished tasks.
   std::vector<TaskId> step_to_next_completion() {
      auto dt = time_to_next_completion();
      if (!dt) return {};
      double least = std::numeric_limits<double>::infinity();
      for (const auto& s : streams_) least = std::min(least, s.remaining_mb);
      for (auto& s : streams_) s.remaining_mb -= least;
      return take_finished();
   }

private:
   DeviceParams params_;
   std::vector<Stream> streams_;
};

} // namespace ioaware
