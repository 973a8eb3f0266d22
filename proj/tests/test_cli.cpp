#include "ioaware/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ioaware;
namespace fs = std::filesystem;

namespace {

struct Cli {
   std::ostringstream out, err;
   int run(std::vector<std::string> args) {
      args.insert(args.begin(), "ioaware_cli");
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
   }
};

std::string slurp(const fs::path& p) {
   std::ifstream in(p);
   std::stringstream ss;
   ss << in.rdbuf();
   return ss.str();
}

class CliTest : public ::testing::Test {
protected:
   void SetUp() override {
      dir = fs::temp_directory_path() / ("ioaware_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
      fs::create_directories(dir);
      std::ofstream(dir / "cluster.json") << cluster_to_json(ClusterModel::uniform(2, 8, 14)).dump();
      Cli c;
      ASSERT_EQ(c.run({"gen", "--shape", "homogeneous", "--fragments", "6", "--out", (dir / "w.json").string()}), 0)
          << c.err.str();
   }
   void TearDown() override { fs::remove_all(dir); }
   std::string p(const char* name) const { return (dir / name).string(); }
   fs::path dir;
};

} // namespace

TEST_F(CliTest, GenWritesLoadableWorkload) {
   const auto w = load_workload(p("w.json"));
   int hmm = 0;
   for (const auto& t : w.tasks) hmm += t.task_type == "hmmpfam";
   EXPECT_EQ(hmm, 36);
}

TEST_F(CliTest, RunBaselineAndStaticProduceMetrics) {
   Cli a, b;
   ASSERT_EQ(a.run({"run", "--workload", p("w.json"), "--cluster", p("cluster.json"), "--mode", "baseline",
                    "--metrics", p("base.json"), "--trace", p("base.csv")}),
             0)
       << a.err.str();
   ASSERT_EQ(b.run({"run", "--workload", p("w.json"), "--cluster", p("cluster.json"), "--mode", "static:8",
                    "--metrics", p("s8.json")}),
             0)
       << b.err.str();
   const auto mb = nlohmann::json::parse(slurp(p("base.json")));
   const auto ms = nlohmann::json::parse(slurp(p("s8.json")));
   EXPECT_GT(mb["makespan_s"].get<double>(), 0);
   EXPECT_GT(ms["makespan_s"].get<double>(), 0);
   EXPECT_EQ(slurp(p("base.csv")).rfind("event_time_s,event_kind,task_id", 0), 0u);
}

TEST_F(CliTest, AutoWritesLearningCsv) {
   Cli c;
   ASSERT_EQ(c.run({"run", "--workload", p("w.json"), "--cluster", p("cluster.json"), "--mode", "auto",
                    "--learning", p("learn.csv")}),
             0)
       << c.err.str();
   const auto csv = slurp(p("learn.csv"));
   EXPECT_NE(csv.find("checkpointFrag"), std::string::npos);
   EXPECT_NE(csv.find("STOP"), std::string::npos);
   const auto metrics = nlohmann::json::parse(c.out.str());
   EXPECT_TRUE(metrics["chosen_constraints"].contains("checkpointFrag"));
}

TEST_F(CliTest, BadModeFails) {
   Cli c;
   EXPECT_NE(c.run({"run", "--workload", p("w.json"), "--cluster", p("cluster.json"), "--mode", "turbo"}), 0);
   EXPECT_NE(c.err.str().find("invalid mode"), std::string::npos);
}

TEST_F(CliTest, MissingFileFails) {
   Cli c;
   EXPECT_NE(c.run({"run", "--workload", p("nope.json"), "--cluster", p("cluster.json")}), 0);
   EXPECT_NE(c.err.str().find("cannot open"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
   Cli a, b, c;
   EXPECT_NE(a.run({}), 0);
   EXPECT_NE(b.run({"gen", "--shape", "spiral"}), 0);
   EXPECT_NE(c.run({"run", "--workload", p("w.json")}), 0);
}

TEST_F(CliTest, SweepRowsAndOptimum) {
   Cli c;
   ASSERT_EQ(c.run({"sweep", "--workload", p("w.json"), "--cluster", p("cluster.json"), "--constraints",
                    "2,4,8,16,32,64,128,256", "--out", p("sweep.csv")}),
             0)
       << c.err.str();
   std::istringstream in(slurp(p("sweep.csv")));
   std::string line;
   std::getline(in, line);
   EXPECT_EQ(line, "mode,makespan_s,io_throughput_mbs,io_congestion_events");
   std::vector<std::tuple<std::string, double, long>> rows;
   while (std::getline(in, line)) {
      std::stringstream ls(line);
      std::string mode, ms, tp, ev;
      std::getline(ls, mode, ',');
      std::getline(ls, ms, ',');
      std::getline(ls, tp, ',');
      std::getline(ls, ev, ',');
      rows.emplace_back(mode, std::stod(ms), std::stol(ev));
   }
   ASSERT_EQ(rows.size(), 10u);
   EXPECT_EQ(std::get<0>(rows[0]), "baseline");
   EXPECT_EQ(std::get<0>(rows[1]), "non-constrained");
   long most = 0;
   for (const auto& r : rows) most = std::max(most, std::get<2>(r));
   EXPECT_EQ(std::get<2>(rows[1]), most);
}

TEST_F(CliTest, SweepRejectsBadList) {
   Cli c;
   EXPECT_NE(c.run({"sweep", "--workload", p("w.json"), "--cluster", p("cluster.json"), "--constraints", "4,x"}), 0);
}

TEST_F(CliTest, ThreadsBackendRuns) {
   Cli c;
   EXPECT_EQ(c.run({"run", "--workload", p("w.json"), "--cluster", p("cluster.json"), "--mode", "static:64",
                    "--backend", "threads", "--metrics", p("t.json")}),
             0)
       << c.err.str();
}
