#include "ioaware/generators.hpp"
#include "ioaware/sim.hpp"
#include "trace_audit.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace ioaware;

namespace {

TaskSpec compute(std::string type, double d, std::vector<ParamDecl> params = {}) {
   TaskSpec t;
   t.task_type = std::move(type);
   t.duration_s = d;
   t.params = std::move(params);
   return t;
}

TaskSpec io(std::string type, std::uint64_t bytes, std::vector<ParamDecl> params = {},
            std::optional<ConstraintSpec> c = std::nullopt) {
   TaskSpec t;
   t.task_type = std::move(type);
   t.kind = TaskKind::Io;
   t.computing_units = 0;
   t.bytes = bytes;
   t.params = std::move(params);
   t.storage_bw = c;
   return t;
}

ParamDecl in(std::string d) { return {"i", Direction::In, std::move(d)}; }
ParamDecl out(std::string d) { return {"o", Direction::Out, std::move(d)}; }
ParamDecl inout(std::string d) { return {"io", Direction::InOut, std::move(d)}; }

ClusterModel plain_device(int nodes = 1, int cpus = 4, int io = 8) {
   DeviceParams d{450, 450, 0.0, 1};
   return ClusterModel::uniform(nodes, cpus, io, d);
}

std::string dump(const RunResult& r) {
   std::ostringstream os;
   write_trace_csv(os, r.trace);
   os << metrics_to_json(r.metrics).dump();
   return os.str();
}

double end_time(const RunResult& r, TaskId id) {
   for (const auto& e : r.trace)
      if (e.kind == EventKind::End && e.task_id == id) return e.time_s;
   return -1;
}

TaskGraph rebuild(const Workload& w, const RunMode& m) {
   TaskGraph g;
   const auto applied = apply_mode(w, m);
   for (const auto& d : applied.initial_data) g.register_initial(d);
   for (const auto& t : applied.tasks) g.submit(t);
   return g;
}

} // namespace

TEST(Sim, SerialComputeChain) {
   Workload w;
   w.initial_data = {"R"};
   for (double d : {1.0, 2.0, 3.0}) w.tasks.push_back(compute("step", d, {inout("R")}));
   const auto r = sim_run(w, plain_device(), RunMode::parse("io-tasks"));
   EXPECT_DOUBLE_EQ(r.metrics.makespan_s, 6.0);
}

TEST(Sim, SingleStreamAtPeak) {
   Workload w;
   w.tasks.push_back(io("ckpt", 90000000));
   const auto r = sim_run(w, plain_device(), RunMode::parse("io-tasks"));
   EXPECT_NEAR(r.metrics.makespan_s, 0.2, 1e-12);
   EXPECT_NEAR(r.metrics.io_throughput_mbs, 450.0, 1e-9);
}

TEST(Sim, TwoStreamsFinishTogether) {
   Workload w;
   w.tasks.push_back(io("ckpt", 450000000));
   w.tasks.push_back(io("ckpt", 450000000));
   const auto r = sim_run(w, plain_device(), RunMode::parse("io-tasks"));
   EXPECT_NEAR(end_time(r, 0), 2.0, 1e-12);
   EXPECT_NEAR(end_time(r, 1), 2.0, 1e-12);
}

TEST(Sim, CheckpointOverlapsWithNextCompute) {
   // gen -> {ckpt, work}: in io-tasks mode ckpt and work run together on one CPU.
   Workload w;
   w.tasks.push_back(compute("gen", 1.0, {out("B")}));
   w.tasks.push_back(io("ckpt", 450000000, {in("B")}));
   w.tasks.push_back(compute("work", 1.0, {in("B")}));
   const auto overlapped = sim_run(w, plain_device(1, 1, 1), RunMode::parse("io-tasks"));
   EXPECT_NEAR(overlapped.metrics.makespan_s, 2.0, 1e-12);
   const auto serial = sim_run(w, plain_device(1, 1, 1), RunMode::parse("baseline"));
   EXPECT_NEAR(serial.metrics.makespan_s, 3.0, 1e-12);
}

TEST(Sim, BaselineRunsCheckpointsOnCpus) {
   const auto w = generate(GeneratorParams::defaults(Shape::Homogeneous));
   const auto cluster = ClusterModel::uniform(2, 8, 14);
   const auto r = sim_run(w, cluster, RunMode::parse("baseline"));
   for (const auto& e : r.trace) EXPECT_EQ(e.task_kind, TaskKind::Compute);
   const auto rep = audit::check_trace(r.trace, rebuild(w, RunMode::parse("baseline")), cluster);
   EXPECT_TRUE(rep.ok()) << rep.summary();
}

TEST(Sim, DeterministicBytes) {
   const auto w = generate(GeneratorParams::defaults(Shape::Pipeline));
   const auto cluster = ClusterModel::uniform(2, 8, 14);
   RunOptions o;
   o.seed = 9;
   o.compute_jitter = 0.2;
   for (const char* m : {"baseline", "io-tasks", "static:32", "auto", "auto:2,256,2"}) {
      const auto a = sim_run(w, cluster, RunMode::parse(m), o);
      const auto b = sim_run(w, cluster, RunMode::parse(m), o);
      EXPECT_EQ(dump(a), dump(b)) << m;
   }
}

TEST(Sim, SeedChangesJitteredRun) {
   const auto w = generate(GeneratorParams::defaults(Shape::Homogeneous));
   const auto cluster = ClusterModel::uniform(2, 8, 14);
   RunOptions a, b;
   a.compute_jitter = b.compute_jitter = 0.3;
   a.seed = 1;
   b.seed = 2;
   EXPECT_NE(dump(sim_run(w, cluster, RunMode::parse("io-tasks"), a)),
             dump(sim_run(w, cluster, RunMode::parse("io-tasks"), b)));
}

TEST(Sim, AuditedTracesForAllModes) {
   const auto cluster = ClusterModel::uniform(2, 8, 14);
   for (auto shape : {Shape::Homogeneous, Shape::Pipeline, Shape::Iterative}) {
      const auto w = generate(GeneratorParams::defaults(shape));
      for (const char* m : {"baseline", "io-tasks", "static:8", "static:450", "auto", "auto:2,256,2"}) {
         const auto mode = RunMode::parse(m);
         const auto r = sim_run(w, cluster, mode);
         auto rep = audit::check_trace(r.trace, rebuild(w, mode), cluster);
         EXPECT_TRUE(rep.ok()) << m << ": " << rep.summary();
         rep = audit::check_learning_isolation(r.trace);
         EXPECT_TRUE(rep.ok()) << m << ": " << rep.summary();
      }
   }
}

TEST(Sim, MakespanIsLastEnd) {
   const auto w = generate(GeneratorParams::defaults(Shape::Iterative));
   const auto r = sim_run(w, ClusterModel::uniform(2, 8, 14), RunMode::parse("auto"));
   double last = 0;
   for (const auto& e : r.trace)
      if (e.kind == EventKind::End) last = std::max(last, e.time_s);
   EXPECT_EQ(r.metrics.makespan_s, last);
   EXPECT_LE(r.metrics.io_throughput_mbs, 450.0 * 2 + 1e-9);
}

TEST(Sim, TwoAutoTypesOnOneNodeLearnInTurn) {
   Workload w;
   for (int i = 0; i < 12; ++i) w.tasks.push_back(compute("gen", 1.0, {out("x" + std::to_string(i))}));
   for (int i = 0; i < 12; ++i) {
      const auto x = "x" + std::to_string(i);
      w.tasks.push_back(io(i % 2 ? "ckptA" : "ckptB", 100000000, {in(x)}, ConstraintSpec::unbounded()));
   }
   DeviceParams d;
   const auto cluster = ClusterModel::uniform(1, 4, 4, d);
   const auto r = sim_run(w, cluster, RunMode::parse("io-tasks"));
   EXPECT_EQ(r.learning.size(), 2u);
   const auto rep = audit::check_learning_isolation(r.trace);
   EXPECT_TRUE(rep.ok()) << rep.summary();
}

TEST(Sim, StalledLearnerIsClosedEarly) {
   // One node, two auto types. The type that learns first waits for tasks that
   // only appear after the other type's I/O has run: the learner must give up
   // its node instead of deadlocking.
   Workload w;
   w.tasks.push_back(compute("gen", 1.0, {out("seed")}));
   w.tasks.push_back(io("first", 10000000, {in("seed")}, ConstraintSpec::unbounded()));
   w.tasks.push_back(io("second", 10000000, {in("seed"), out("token")}, ConstraintSpec::unbounded()));
   w.tasks.push_back(compute("use", 1.0, {in("token"), out("late")}));
   w.tasks.push_back(io("first", 10000000, {in("late")}, ConstraintSpec::unbounded()));
   const auto cluster = ClusterModel::uniform(1, 2, 4);
   RunResult r;
   ASSERT_NO_THROW(r = sim_run(w, cluster, RunMode::parse("io-tasks")));
   EXPECT_EQ(r.metrics.per_type.at("first").count, 2u);
   EXPECT_TRUE(r.learning.at("first").back().stop);
}

TEST(Sim, RegistryIndependentOfOtherAutoType) {
   auto make = [](bool with_b) {
      Workload w;
      for (int i = 0; i < 40; ++i) {
         const auto x = "x" + std::to_string(i);
         w.tasks.push_back(compute("gen", 2.0, {out(x)}));
         w.tasks.push_back(io("ckptA", 200000000, {in(x)}, ConstraintSpec::unbounded()));
         if (with_b) w.tasks.push_back(io("ckptB", 50000000, {in(x)}, ConstraintSpec::unbounded()));
      }
      return w;
   };
   const auto cluster = ClusterModel::uniform(2, 8, 14);
   const auto both = sim_run(make(true), cluster, RunMode::parse("io-tasks"));
   const auto alone = sim_run(make(false), cluster, RunMode::parse("io-tasks"));
   EXPECT_EQ(both.registries.at("ckptA"), alone.registries.at("ckptA"));
   EXPECT_TRUE(both.registries.contains("ckptB"));
}

TEST(Sim, RejectsTooFewNodes) {
   Workload w;
   w.nodes_required = 3;
   w.tasks.push_back(compute("a", 1.0));
   EXPECT_THROW(sim_run(w, ClusterModel::uniform(2, 1, 1), RunMode::parse("io-tasks")), WorkloadError);
}

TEST(Sim, RejectsUnsatisfiableStaticMode) {
   const auto w = generate(GeneratorParams::defaults(Shape::Homogeneous));
   EXPECT_THROW(sim_run(w, ClusterModel::uniform(2, 8, 14), RunMode::parse("static:1000")), UnsatisfiableConstraint);
}

TEST(Sim, CongestionEventsOnlyAboveSaturation) {
   const auto w = generate(GeneratorParams::defaults(Shape::Homogeneous));
   const auto cluster = ClusterModel::uniform(2, 8, 14);
   EXPECT_EQ(sim_run(w, cluster, RunMode::parse("static:64")).metrics.io_congestion_events, 0);
   EXPECT_GT(sim_run(w, cluster, RunMode::parse("io-tasks")).metrics.io_congestion_events, 0);
}
