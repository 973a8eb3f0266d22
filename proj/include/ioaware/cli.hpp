#pragma once

#include "ioaware/generators.hpp"
#include "ioaware/report.hpp"
#include "ioaware/sim.hpp"
#include "ioaware/threads.hpp"
#include "ioaware/workload.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace ioaware {

namespace detail {

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
   std::ofstream out(path, std::ios::binary);
   if (!out) throw Error("cannot write " + path);
   writer(out);
   if (!out) throw Error("write failed on " + path);
}

inline std::vector<Mbps> parse_constraint_list(const std::string& text) {
   std::vector<Mbps> out;
   std::stringstream ss(text);
   std::string item;
   while (std::getline(ss, item, ',')) out.push_back(ConstraintSpec::parse(item).static_value());
   if (out.empty()) throw WorkloadError("empty constraint list");
   return out;
}

} // namespace detail

/// Entry point of the command-line tool. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
   CLI::App app{"I/O-aware task scheduler and cluster simulator"};
   app.require_subcommand(1);

   std::string shape = "homogeneous", gen_out;
   int fragments = 0, iterations = 0;
   std::uint64_t gen_seed = 42;
   auto* gen = app.add_subcommand("gen", "Generate a synthetic workload");
   gen->add_option("--shape", shape, "homogeneous | pipeline | iterative")
       ->check(CLI::IsMember({"homogeneous", "pipeline", "iterative"}));
   gen->add_option("--fragments", fragments, "Fragments (homogeneous: F x F searches)");
   gen->add_option("--iterations", iterations, "Iterations (iterative shape)");
   gen->add_option("--seed", gen_seed, "Seed for compute-time jitter");
   gen->add_option("--out", gen_out, "Output file (default stdout)");

   std::string workload_path, cluster_path, mode_text = "io-tasks", backend = "sim";
   std::string trace_path, metrics_path, learning_path;
   std::uint64_t seed = 0;
   auto* run = app.add_subcommand("run", "Execute a workload");
   run->add_option("--workload", workload_path, "Workload JSON")->required();
   run->add_option("--cluster", cluster_path, "Cluster JSON")->required();
   run->add_option("--mode", mode_text, "baseline | io-tasks | static:<v> | auto | auto:<min>,<max>,<delta>")->capture_default_str();
   run->add_option("--backend", backend, "sim (virtual time) or threads (wall clock)")->capture_default_str()->check(CLI::IsMember({"sim", "threads"}));
   run->add_option("--seed", seed, "Seed for simulated compute jitter");
   run->add_option("--trace", trace_path, "Event trace CSV");
   run->add_option("--metrics", metrics_path, "Metrics JSON (default stdout)");
   run->add_option("--learning", learning_path, "Learning-phase CSV (auto modes)");

   std::string sw_workload, sw_cluster, sw_constraints = "2,4,8,16,32,64,128,256", sw_out;
   auto* sw = app.add_subcommand("sweep", "Run a static-constraint sweep");
   sw->add_option("--workload", sw_workload, "Workload JSON")->required();
   sw->add_option("--cluster", sw_cluster, "Cluster JSON")->required();
   sw->add_option("--constraints", sw_constraints, "Comma-separated MB/s values")->capture_default_str();
   sw->add_option("--out", sw_out, "Output CSV (default stdout)");

   try {
      app.parse(argc, argv);
   } catch (const CLI::ParseError& e) {
      return app.exit(e, out, err);
   }

   try {
      if (*gen) {
         auto p = GeneratorParams::defaults(parse_shape(shape));
         if (fragments != 0) p.fragments = fragments;
         if (iterations != 0) p.iterations = iterations;
         p.seed = gen_seed;
         const auto text = workload_to_json(generate(p)).dump(1);
         if (gen_out.empty()) out << text << '\n';
         else detail::write_file(gen_out, [&](std::ostream& os) { os << text << '\n'; });
      } else if (*run) {
         const auto mode = RunMode::parse(mode_text);
         const auto w = load_workload(workload_path);
         const auto c = load_cluster(cluster_path);
         RunResult r;
         if (backend == "sim") {
            RunOptions o;
            o.seed = seed;
            r = sim_run(w, c, mode, o);
         } else {
            r = thread_run(w, c, mode);
         }
         if (!trace_path.empty()) detail::write_file(trace_path, [&](std::ostream& os) { write_trace_csv(os, r.trace); });
         const auto metrics = metrics_to_json(r.metrics).dump(2);
         if (!metrics_path.empty()) detail::write_file(metrics_path, [&](std::ostream& os) { os << metrics << '\n'; });
         else out << metrics << '\n';
         if (!learning_path.empty() && mode.kind == RunMode::Kind::Auto)
            detail::write_file(learning_path, [&](std::ostream& os) { write_learning_csv(os, r.learning); });
      } else if (*sw) {
         const auto rows = sweep(load_workload(sw_workload), load_cluster(sw_cluster),
                                 detail::parse_constraint_list(sw_constraints));
         if (sw_out.empty()) write_sweep_csv(out, rows);
         else detail::write_file(sw_out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
      }
   } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 1;
   }
   return 0;
}

} // namespace ioaware
