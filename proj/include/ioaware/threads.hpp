#pragma once

#include "ioaware/scheduler.hpp"
#include "ioaware/sim.hpp"
#include "ioaware/workload.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <exception>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <fcntl.h>
#include <unistd.h>

namespace ioaware {

/// Fixed-size pool of executor threads.
class ExecutorPool {
public:
   explicit ExecutorPool(std::size_t threads) {
      for (std::size_t i = 0; i < threads; ++i) workers_.emplace_back([this] { work(); });
   }
   ~ExecutorPool() {
      {
         std::lock_guard lock(mu_);
         stop_ = true;
      }
      cv_.notify_all();
      for (auto& w : workers_) w.join();
   }
   ExecutorPool(const ExecutorPool&) = delete;
   ExecutorPool& operator=(const ExecutorPool&) = delete;

   void enqueue(std::function<void()> job) {
      {
         std::lock_guard lock(mu_);
         jobs_.push_back(std::move(job));
      }
      cv_.notify_one();
   }

private:
   void work() {
      while (true) {
         std::function<void()> job;
         {
            std::unique_lock lock(mu_);
            cv_.wait(lock, [this] { return stop_ || !jobs_.empty(); });
            if (jobs_.empty()) return;
            job = std::move(jobs_.front());
            jobs_.pop_front();
         }
         job();
      }
   }

   std::vector<std::thread> workers_;
   std::deque<std::function<void()>> jobs_;
   std::mutex mu_;
   std::condition_variable cv_;
   bool stop_ = false;
};

/// Ordered completion channel from executors to the scheduler loop.
class CompletionChannel {
public:
   struct Message {
      TaskId task = 0;
      std::exception_ptr error;
   };

   void post(Message m) {
      {
         std::lock_guard lock(mu_);
         queue_.push_back(std::move(m));
      }
      cv_.notify_one();
   }

   /// Blocks until at least one message is available, then drains the channel.
   std::vector<Message> take_all() {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [this] { return !queue_.empty(); });
      std::vector<Message> out(std::make_move_iterator(queue_.begin()), std::make_move_iterator(queue_.end()));
      queue_.clear();
      return out;
   }

private:
   std::deque<Message> queue_;
   std::mutex mu_;
   std::condition_variable cv_;
};

struct ThreadOptions {
   std::filesystem::path scratch_dir = std::filesystem::temp_directory_path() / "ioaware-scratch";
   /// Wall seconds slept per declared compute second.
   double time_scale = 1e-3;
   /// Bytes actually written per declared byte (at least one byte is written).
   double bytes_scale = 1e-6;
   PlacementPolicy policy = PlacementPolicy::FirstCandidate;
   bool audit = true;
};

namespace detail {

inline void write_and_flush(const std::filesystem::path& path, std::size_t bytes) {
   const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
   if (fd < 0) throw Error("cannot open scratch file " + path.string());
   std::vector<char> buf(std::min<std::size_t>(bytes, 1 << 20), 'x');
   std::size_t left = bytes;
   while (left > 0) {
      const auto chunk = std::min(left, buf.size());
      const auto n = ::write(fd, buf.data(), chunk);
      if (n <= 0) {
         ::close(fd);
         throw Error("write failed on " + path.string());
      }
      left -= static_cast<std::size_t>(n);
   }
   ::fsync(fd);
   ::close(fd);
   std::filesystem::remove(path);
}

inline void check_scratch(const std::filesystem::path& dir) {
   std::error_code ec;
   std::filesystem::create_directories(dir, ec);
   const auto probe = dir / ".probe";
   const int fd = ::open(probe.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
   if (fd < 0) throw Error("scratch directory not writable: " + dir.string());
   ::close(fd);
   std::filesystem::remove(probe, ec);
}

} // namespace detail

/// Runs the workload with real executor threads: compute tasks sleep and I/O
/// tasks write and fsync a scratch file. The same Scheduler makes every
/// decision; timestamps are wall-clock seconds since the start of the run.
inline RunResult thread_run(const Workload& workload, const ClusterModel& cluster, const RunMode& mode,
                            const ThreadOptions& opts = {}) {
   cluster.validate();
   detail::check_nodes_required(workload, cluster);
   detail::check_scratch(opts.scratch_dir);
   const Workload w = apply_mode(workload, mode);

   Scheduler sched(cluster, opts.policy);
   detail::submit_all(sched, w);

   CompletionChannel channel;
   // Pools are declared after the channel so they join before it is destroyed.
   std::vector<std::unique_ptr<ExecutorPool>> compute_pools, io_pools;
   for (const auto& n : cluster.nodes) {
      compute_pools.push_back(std::make_unique<ExecutorPool>(static_cast<std::size_t>(n.cpus)));
      io_pools.push_back(std::make_unique<ExecutorPool>(static_cast<std::size_t>(n.io_executors)));
   }

   const auto t0 = std::chrono::steady_clock::now();
   double last = 0.0;
   auto elapsed = [&] {
      last = std::max(last, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
      return last;
   };

   auto dispatch = [&](const std::vector<Launch>& launches) {
      for (const auto& l : launches) {
         const auto& spec = sched.graph().at(l.task).spec;
         std::function<void()> body;
         if (spec.bytes > 0) {
            const auto bytes = std::max<std::size_t>(1, static_cast<std::size_t>(static_cast<double>(spec.bytes) * opts.bytes_scale));
            auto path = opts.scratch_dir / ("task_" + std::to_string(l.task) + ".bin");
            body = [path, bytes] { detail::write_and_flush(path, bytes); };
         } else {
            const auto sleep = std::chrono::duration<double>(spec.duration_s * opts.time_scale);
            body = [sleep] { std::this_thread::sleep_for(sleep); };
         }
         auto& pool = l.io_platform ? io_pools[l.node_index] : compute_pools[l.node_index];
         pool->enqueue([&channel, id = l.task, body = std::move(body)] {
            CompletionChannel::Message m{id, nullptr};
            try {
               body();
            } catch (...) {
               m.error = std::current_exception();
            }
            channel.post(std::move(m));
         });
      }
      if (opts.audit) sched.audit();
   };

   dispatch(sched.schedule_tick(0.0));
   while (!sched.finished()) {
      if (sched.running_count() == 0) {
         if (!sched.resolve_stall()) throw DeadlockError("threaded run stalled with unfinished tasks");
         auto launches = sched.schedule_tick(elapsed());
         if (launches.empty()) throw DeadlockError("threaded run stalled with unfinished tasks");
         dispatch(launches);
         continue;
      }
      for (auto& m : channel.take_all()) {
         if (m.error) std::rethrow_exception(m.error);
         sched.on_complete(m.task, elapsed());
      }
      dispatch(sched.schedule_tick(elapsed()));
   }
   return detail::collect(sched, 0);
}

} // namespace ioaware
