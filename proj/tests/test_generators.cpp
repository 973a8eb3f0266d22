#include "ioaware/generators.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace ioaware;

namespace {

std::map<std::string, int> count_types(const Workload& w) {
   std::map<std::string, int> m;
   for (const auto& t : w.tasks) ++m[t.task_type];
   return m;
}

TaskGraph build(const Workload& w) {
   TaskGraph g;
   for (const auto& d : w.initial_data) g.register_initial(d);
   for (const auto& t : w.tasks) g.submit(t);
   return g;
}

} // namespace

TEST(Generators, HomogeneousFullScale) {
   auto p = GeneratorParams::defaults(Shape::Homogeneous);
   p.fragments = 48;
   const auto w = generate(p);
   const auto n = count_types(w);
   EXPECT_EQ(n.at("hmmpfam"), 2304);
   EXPECT_EQ(n.at("checkpointFrag"), 2304);
   EXPECT_EQ(n.at("gatherDB"), 48);
   EXPECT_EQ(n.at("gatherSeq"), 1);
   for (const auto& t : w.tasks)
      if (t.kind == TaskKind::Io) {
         EXPECT_EQ(t.bytes, 290000000u);
      }
   EXPECT_EQ(build(w).size(), w.tasks.size());
}

TEST(Generators, PipelineCheckpointSizes) {
   const auto w = generate(GeneratorParams::defaults(Shape::Pipeline));
   const std::map<std::string, std::uint64_t> expect{{"checkpoint_fastq", 162000000},
                                                     {"checkpoint_mapped", 290000000},
                                                     {"checkpoint_merged", 330000000},
                                                     {"checkpoint_marked", 596000000},
                                                     {"checkpoint_grouped", 615000000}};
   std::map<std::string, int> seen;
   for (const auto& t : w.tasks) {
      if (t.kind != TaskKind::Io) continue;
      ASSERT_TRUE(expect.contains(t.task_type)) << t.task_type;
      EXPECT_EQ(t.bytes, expect.at(t.task_type));
      ++seen[t.task_type];
   }
   EXPECT_EQ(seen.size(), 5u);
   EXPECT_EQ(seen.at("checkpoint_mapped"), 2 * seen.at("checkpoint_fastq"));
   build(w);
}

TEST(Generators, IterativeShape) {
   for (int it : {1, 3, 6}) {
      auto p = GeneratorParams::defaults(Shape::Iterative);
      p.fragments = 500;
      p.iterations = it;
      const auto w = generate(p);
      const auto n = count_types(w);
      EXPECT_EQ(n.at("generate_fragment"), 500);
      EXPECT_EQ(n.at("partial_sum"), 500 * it);
      EXPECT_EQ(n.at("checkpointCenters"), 500 * it);
      EXPECT_EQ(n.at("merge_centers"), it);
      for (const auto& t : w.tasks)
         if (t.kind == TaskKind::Io) {
            EXPECT_EQ(t.bytes, 109000000u);
         }
      // Iteration k+1 waits on iteration k's merge.
      const auto g = build(w);
      EXPECT_EQ(g.stats().critical_path, static_cast<std::size_t>(1 + 2 * it));
   }
}

TEST(Generators, DeterministicUnderSeed) {
   for (auto shape : {Shape::Homogeneous, Shape::Pipeline, Shape::Iterative}) {
      auto p = GeneratorParams::defaults(shape);
      p.compute_jitter = 0.2;
      const auto a = workload_to_json(generate(p));
      const auto b = workload_to_json(generate(p));
      EXPECT_EQ(a, b);
      p.seed += 1;
      EXPECT_NE(workload_to_json(generate(p)), a);
   }
}

TEST(Generators, JitterStaysInRange) {
   auto p = GeneratorParams::defaults(Shape::Homogeneous);
   p.compute_jitter = 0.25;
   for (const auto& t : generate(p).tasks) {
      if (t.task_type != "hmmpfam") continue;
      EXPECT_GE(t.duration_s, p.compute_mean_s * 0.75);
      EXPECT_LE(t.duration_s, p.compute_mean_s * 1.25);
   }
}

TEST(Generators, ValidationErrors) {
   auto p = GeneratorParams::defaults(Shape::Homogeneous);
   p.fragments = 0;
   EXPECT_THROW(generate(p), WorkloadError);
   p = GeneratorParams::defaults(Shape::Iterative);
   p.iterations = 0;
   EXPECT_THROW(generate(p), WorkloadError);
   p = GeneratorParams::defaults(Shape::Pipeline);
   p.checkpoint_bytes["checkpoint_fastq"] = 0;
   EXPECT_THROW(generate(p), WorkloadError);
   p = GeneratorParams::defaults(Shape::Pipeline);
   p.checkpoint_bytes.erase("checkpoint_marked");
   EXPECT_THROW(generate(p), WorkloadError);
   EXPECT_THROW(parse_shape("spiral"), WorkloadError);
}
