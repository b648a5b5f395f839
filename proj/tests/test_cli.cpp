#include <gtest/gtest.h>

#include <string>

#include "support.hpp"

namespace {

using support::quote;

support::RunResult cli(const std::string& args) { return support::run(quote(SUMHIS_CLI) + " " + args); }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

// Error output is a single "error: <category>: ..." line.
void expect_error(const support::RunResult& r, int status, const std::string& category) {
  EXPECT_EQ(r.status, status) << r.output;
  EXPECT_EQ(first_line(r.output).rfind("error: " + category + ": ", 0), 0u) << r.output;
}

}  // namespace

TEST(Cli, HelpSucceeds) {
  const auto r = cli("--help");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.output.find("summarize"), std::string::npos);
  EXPECT_NE(r.output.find("--threshold"), std::string::npos);
}

TEST(Cli, ExitCodesAndCategories) {
  support::TempDir dir;
  expect_error(cli("oracle --input /nonexistent/x.jsonl --output " + quote(dir.file("l.jsonl"))), 4, "io");
  expect_error(cli("oracle"), 2, "invalid-argument");
  expect_error(cli("--threshold 1.5 oracle --input " + quote(SUMHIS_FIXTURE) + " --output " + quote(dir.file("l"))), 2,
               "invalid-argument");
  expect_error(cli("--config /nonexistent/conf oracle --input a --output b"), 4, "io");

  support::write_file(dir.file("bad.txt"), "SUMHIS-RANK v1 2 2\n1 2\n");
  expect_error(cli("summarize --input " + quote(SUMHIS_FIXTURE) + " --rank-model " + quote(dir.file("bad.txt")) +
                   " --output " + quote(dir.file("s.jsonl"))),
               3, "format");

  support::write_file(dir.file("dup.jsonl"), "{\"id\":\"a\",\"text\":\"x.\"}\n{\"id\":\"a\",\"text\":\"y.\"}\n");
  expect_error(cli("oracle --input " + quote(dir.file("dup.jsonl")) + " --output " + quote(dir.file("l.jsonl"))), 5,
               "data");

  support::write_file(dir.file("one.jsonl"), "{\"id\":\"a\",\"text\":\"Alpha beta. Gamma delta.\",\"summary\":\"alpha beta\"}\n");
  ASSERT_EQ(cli("oracle --input " + quote(dir.file("one.jsonl")) + " --output " + quote(dir.file("l.jsonl"))).status, 0);
  expect_error(cli("--rank_lr 1e300 --rank_init_scale 1e300 train-rank --input " + quote(dir.file("one.jsonl")) +
                   " --labels " + quote(dir.file("l.jsonl")) + " --model " + quote(dir.file("m.txt"))),
               6, "numeric");
}

TEST(Cli, ConfigFileSetsDefaultsAndFlagsOverride) {
  support::TempDir dir;
  const std::string in = quote(SUMHIS_FIXTURE);
  ASSERT_EQ(cli("oracle --input " + in + " --output " + quote(dir.file("l.jsonl"))).status, 0);
  auto train = [&](const std::string& opts, const std::string& out) {
    const auto r = cli(opts + " train-rank --input " + in + " --labels " + quote(dir.file("l.jsonl")) + " --model " +
                       quote(dir.file(out)));
    EXPECT_EQ(r.status, 0) << r.output;
    return support::read_file(dir.file(out));
  };
  support::write_file(dir.file("a.conf"), "# comment\nseed = 21\nrank_epochs = 1\nembed_dim = 16\n");
  const std::string from_file = train("--config " + quote(dir.file("a.conf")), "file.txt");
  const std::string from_flags = train("--seed 21 --rank_epochs 1 --embed_dim 16", "flags.txt");
  EXPECT_EQ(from_file, from_flags);
  EXPECT_EQ(first_line(from_file), "SUMHIS-RANK v1 16 16");

  const std::string overridden = train("--config " + quote(dir.file("a.conf")) + " --seed 22", "override.txt");
  EXPECT_EQ(overridden, train("--seed 22 --rank_epochs 1 --embed_dim 16", "flags22.txt"));
  EXPECT_NE(overridden, from_file);
}

TEST(Cli, EvaluatePrintsTable) {
  support::TempDir dir;
  support::write_file(dir.file("s.jsonl"), "{\"id\":\"a\",\"summary\":\"the cat sat\",\"indices\":[0]}\n");
  support::write_file(dir.file("g.jsonl"), "{\"id\":\"a\",\"text\":\"The cat sat.\",\"summary\":\"the cat sat\"}\n");
  const auto r = support::run("(" + quote(SUMHIS_CLI) + " evaluate --summaries " + quote(dir.file("s.jsonl")) + " --gold " +
                              quote(dir.file("g.jsonl")) + " --report " + quote(dir.file("r.json")) + " 2>/dev/null)");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.output,
            "R-1-p R-1-r R-1-f R-2-p R-2-r R-2-f R-L-p R-L-r R-L-f\n"
            "100.00 100.00 100.00 100.00 100.00 100.00 100.00 100.00 100.00\n");
  EXPECT_EQ(support::read_file(dir.file("r.json")).rfind("{\"documents\":1,\"skipped\":0,", 0), 0u);
}

TEST(Cli, RepeatRunsAreByteIdentical) {
  support::TempDir dir;
  const std::string conf = "--config " + quote(SUMHIS_FIXTURE_CONF) + " ";
  const std::string in = quote(SUMHIS_FIXTURE);
  for (const std::string run : {"1", "2"}) {
    auto f = [&](const std::string& name) { return quote(dir.file(name + run)); };
    ASSERT_EQ(cli(conf + "oracle --input " + in + " --output " + f("labels")).status, 0);
    ASSERT_EQ(cli(conf + "train-rank --input " + in + " --labels " + f("labels") + " --model " + f("rank")).status, 0);
    ASSERT_EQ(cli(conf + "train-cluster --input " + in + " --rank-model " + f("rank") + " --model " + f("cluster")).status,
              0);
    ASSERT_EQ(cli(conf + "summarize --input " + in + " --rank-model " + f("rank") + " --cluster-model " + f("cluster") +
                  " --output " + f("sum"))
                  .status,
              0);
  }
  for (const std::string name : {"labels", "rank", "cluster", "sum"}) {
    EXPECT_EQ(support::read_file(dir.file(name + "1")), support::read_file(dir.file(name + "2"))) << name;
  }
}
