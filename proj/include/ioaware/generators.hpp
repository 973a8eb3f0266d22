#pragma once

#include "ioaware/error.hpp"
#include "ioaware/workload.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>

namespace ioaware {

enum class Shape { Homogeneous, Pipeline, Iterative };

inline Shape parse_shape(std::string_view s) {
   if (s == "homogeneous") return Shape::Homogeneous;
   if (s == "pipeline") return Shape::Pipeline;
   if (s == "iterative") return Shape::Iterative;
   throw WorkloadError("unknown shape '" + std::string(s) + "'");
}

inline constexpr std::uint64_t megabytes(std::uint64_t mb) { return mb * 1000000ULL; }

/// Parameters of the synthetic application generators.
///
/// Compute durations are free parameters. The defaults put the mean compute
/// time of the dominant compute task at about twice the time one checkpoint
/// takes on an idle default device (290 MB at 56.25 MB/s is ~5.2 s), which is
/// enough for the baseline's CPU-bound checkpoints to show up in the makespan.
struct GeneratorParams {
   Shape shape = Shape::Homogeneous;
   /// homogeneous: sequence and database fragments (F x F searches);
   /// pipeline: independent samples; iterative: data fragments.
   int fragments = 12;
   int iterations = 1;
   std::map<std::string, std::uint64_t> checkpoint_bytes;
   double compute_mean_s = 10.0;
   double compute_jitter = 0.1;
   std::uint64_t seed = 42;

   static GeneratorParams defaults(Shape shape) {
      GeneratorParams p;
      p.shape = shape;
      switch (shape) {
         case Shape::Homogeneous:
            p.fragments = 12;
            p.compute_mean_s = 10.0;
            p.checkpoint_bytes = {{"checkpointFrag", megabytes(290)}};
            break;
         case Shape::Pipeline:
            p.fragments = 24;
            p.compute_mean_s = 10.0;
            p.checkpoint_bytes = {{"checkpoint_fastq", megabytes(162)},
                                  {"checkpoint_mapped", megabytes(290)},
                                  {"checkpoint_merged", megabytes(330)},
                                  {"checkpoint_marked", megabytes(596)},
                                  {"checkpoint_grouped", megabytes(615)}};
            break;
         case Shape::Iterative:
            // Fragments are equal-sized, so partial_sum times do not vary.
            p.fragments = 24;
            p.iterations = 1;
            p.compute_mean_s = 4.0;
            p.compute_jitter = 0.0;
            p.checkpoint_bytes = {{"checkpointCenters", megabytes(109)}};
            break;
      }
      return p;
   }

   void validate() const {
      if (fragments < 1) throw WorkloadError("fragments must be >= 1");
      if (iterations < 1) throw WorkloadError("iterations must be >= 1");
      if (compute_mean_s < 0 || compute_jitter < 0 || compute_jitter >= 1)
         throw WorkloadError("compute duration needs mean >= 0 and jitter in [0, 1)");
      for (const auto& [type, bytes] : checkpoint_bytes)
         if (bytes == 0) throw WorkloadError("checkpoint size of '" + type + "' must be positive");
   }
};

namespace detail {

class WorkloadBuilder {
public:
   explicit WorkloadBuilder(const GeneratorParams& p) : p_(p), rng_(p.seed), jitter_(1.0 - p.compute_jitter, 1.0 + p.compute_jitter) {}

   void initial(const std::string& datum) { w_.initial_data.push_back(datum); }

   /// Compute task whose duration is `scale` times the jittered mean.
   void compute(const std::string& type, std::vector<ParamDecl> params, double scale = 1.0) {
      TaskSpec t;
      t.task_type = type;
      t.kind = TaskKind::Compute;
      t.params = std::move(params);
      t.duration_s = p_.compute_mean_s * scale * (p_.compute_jitter > 0 ? jitter_(rng_) : 1.0);
      w_.tasks.push_back(std::move(t));
   }

   void checkpoint(const std::string& type, const std::string& datum) {
      auto it = p_.checkpoint_bytes.find(type);
      if (it == p_.checkpoint_bytes.end()) throw WorkloadError("no checkpoint size for '" + type + "'");
      TaskSpec t;
      t.task_type = type;
      t.kind = TaskKind::Io;
      t.computing_units = 0;
      t.params = {{"data", Direction::In, datum}};
      t.bytes = it->second;
      w_.tasks.push_back(std::move(t));
   }

   Workload take() { return std::move(w_); }

private:
   const GeneratorParams& p_;
   std::mt19937_64 rng_;
   std::uniform_real_distribution<double> jitter_;
   Workload w_;
};

inline ParamDecl in(std::string d) { return {"in", Direction::In, std::move(d)}; }
inline ParamDecl out(std::string d) { return {"out", Direction::Out, std::move(d)}; }

} // namespace detail

/// Builds one of the three synthetic application skeletons.
///
/// homogeneous: splitSeq/splitDB, then per (sequence, database) fragment an
/// hmmpfam search followed by checkpointFrag; gatherDB joins each sequence
/// fragment's searches and gatherSeq joins everything.
///
/// pipeline: per sample a preprocessing, mapping and variant-calling chain
/// with five checkpoint types (checkpoint_mapped is used by both bwa_map and
/// sort_sam).
///
/// iterative: generate_fragment per fragment, then per iteration a
/// partial_sum per fragment, its checkpointCenters and one merge_centers.
inline Workload generate(const GeneratorParams& p) {
   using detail::in;
   using detail::out;
   p.validate();
   detail::WorkloadBuilder b(p);
   const int f = p.fragments;
   const auto s = [](auto... parts) { return (std::string{} + ... + std::string(parts)); };
   const auto n = [](int i) { return std::to_string(i); };

   switch (p.shape) {
      case Shape::Homogeneous: {
         b.initial("sequence_file");
         b.initial("database_file");
         std::vector<ParamDecl> seq_out{in("sequence_file")}, db_out{in("database_file")};
         for (int i = 0; i < f; ++i) {
            seq_out.push_back(out(s("seq_", n(i))));
            db_out.push_back(out(s("db_", n(i))));
         }
         b.compute("splitSeq", seq_out, 0.05);
         b.compute("splitDB", db_out, 0.05);
         std::vector<ParamDecl> all_gathers;
         for (int i = 0; i < f; ++i) {
            std::vector<ParamDecl> row;
            for (int j = 0; j < f; ++j) {
               const auto res = s("res_", n(i), "_", n(j));
               b.compute("hmmpfam", {in(s("seq_", n(i))), in(s("db_", n(j))), out(res)});
               b.checkpoint("checkpointFrag", res);
               row.push_back(in(res));
            }
            row.push_back(out(s("gathered_", n(i))));
            b.compute("gatherDB", row, 0.1);
            all_gathers.push_back(in(s("gathered_", n(i))));
         }
         all_gathers.push_back(out("result"));
         b.compute("gatherSeq", all_gathers, 0.1);
         break;
      }
      case Shape::Pipeline: {
         for (int i = 0; i < f; ++i) {
            const auto k = n(i);
            const auto sample = s("sample_", k);
            b.initial(sample);
            b.compute("revert_sam", {in(sample), out(s("unmapped_", k))}, 0.5);
            b.compute("convert_sam_to_fastq", {in(s("unmapped_", k)), out(s("fastq_", k))}, 0.5);
            b.checkpoint("checkpoint_fastq", s("fastq_", k));
            b.compute("bwa_map", {in(s("fastq_", k)), out(s("mapped_", k))}, 2.0);
            b.checkpoint("checkpoint_mapped", s("mapped_", k));
            b.compute("sort_sam", {in(s("mapped_", k)), out(s("sorted_", k))});
            b.checkpoint("checkpoint_mapped", s("sorted_", k));
            b.compute("merge_bam_alignment", {in(s("sorted_", k)), in(s("unmapped_", k)), out(s("merged_", k))});
            b.checkpoint("checkpoint_merged", s("merged_", k));
            b.compute("mark_duplicates", {in(s("merged_", k)), out(s("marked_", k))});
            b.checkpoint("checkpoint_marked", s("marked_", k));
            b.compute("add_read_groups", {in(s("marked_", k)), out(s("grouped_", k))}, 0.5);
            b.checkpoint("checkpoint_grouped", s("grouped_", k));
            b.compute("haplotype_caller", {in(s("grouped_", k)), out(s("variants_", k))}, 1.5);
         }
         break;
      }
      case Shape::Iterative: {
         b.initial("seed");
         b.initial("centers_0");
         for (int i = 0; i < f; ++i) b.compute("generate_fragment", {in("seed"), out(s("fragment_", n(i)))}, 0.25);
         for (int it = 0; it < p.iterations; ++it) {
            const auto centers = s("centers_", n(it));
            std::vector<ParamDecl> merge;
            for (int i = 0; i < f; ++i) {
               const auto partial = s("partial_", n(it), "_", n(i));
               b.compute("partial_sum", {in(s("fragment_", n(i))), in(centers), out(partial)});
               b.checkpoint("checkpointCenters", partial);
               merge.push_back(in(partial));
            }
            merge.push_back(out(s("centers_", n(it + 1))));
            b.compute("merge_centers", merge, 0.1);
         }
         break;
      }
   }
   return b.take();
}

} // namespace ioaware
