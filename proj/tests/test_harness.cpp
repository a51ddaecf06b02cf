#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "rcrl/harness.hpp"

using namespace rcrl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string scratch_root() {
  const fs::path p = fs::temp_directory_path() / "rcrl-harness-test";
  return p.string();
}

// Cheap but real training setup: two iterations of classic TD3.
RunConfig tiny_cfg() {
  RunConfig c;
  c.name = "tiny";
  c.env = "pendulum_swingup";
  c.agent = AgentKind::RcTd3;
  c.w_c = 1.0;
  c.total_steps = 2000;
  c.block_steps = 1000;
  c.seeds = {5};
  c.eval_every = 1;
  c.eval_episodes = 1;
  c.ckpt_every = 0;
  c.out_root = scratch_root();
  return c;
}

}  // namespace

TEST_CASE("json parsing resolves env and agent dependent defaults") {
  const RunConfig td3 = RunConfig::from_json_text(R"({"agent":"rc-td3"})");
  CHECK(td3.gamma == 0.999);
  CHECK(td3.gamma_cr == -50.0);
  CHECK(td3.w_c_report == 1.0);
  CHECK(td3.episode_cap == 1000);

  const RunConfig sac = RunConfig::from_json_text(R"({"agent":"rc-sac"})");
  CHECK(sac.gamma == 0.99);
  CHECK(sac.gamma_cr == -50.0);

  const RunConfig rsac =
      RunConfig::from_json_text(R"({"agent":"rc-sac","env":"robot_nav"})");
  CHECK(rsac.gamma == 0.99);
  CHECK(rsac.gamma_cr == -20.0);
  CHECK(rsac.w_c_report == 0.1);
  CHECK(rsac.episode_cap == 300);

  const RunConfig rtd3 =
      RunConfig::from_json_text(R"({"agent":"rc-td3","env":"robot_nav"})");
  CHECK(rtd3.gamma == 0.99);
  CHECK(rtd3.gamma_cr == -6.0);

  // Explicit values beat the resolved defaults.
  const RunConfig expl =
      RunConfig::from_json_text(R"({"agent":"rc-td3","gamma":0.95,"gamma_cr":-7})");
  CHECK(expl.gamma == 0.95);
  CHECK(expl.gamma_cr == -7.0);
}

TEST_CASE("unknown keys and bad combinations are rejected") {
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"namee":"x"})"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"total_steps":999,"block_steps":1000})"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"agent":"td3","switch_mode":"static"})"),
                  ConfigError);
  CHECK_THROWS_AS(
      RunConfig::from_json_text(R"({"agent":"td3","reset_on_switch":"networks"})"),
      ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"agent":"rc-td3","base_subset":"gpv"})"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"robot_template":7})"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text(R"({"seeds":[]})"), ConfigError);
  CHECK_THROWS_AS(RunConfig::from_json_text("not json"), ConfigError);
  // Robot rc runs may restrict the phase-0 base terms.
  CHECK_NOTHROW(
      RunConfig::from_json_text(R"({"agent":"rc-sac","env":"robot_nav","base_subset":"gpv"})"));
}

TEST_CASE("config json round-trips through the canonical form") {
  RunConfig c = tiny_cfg();
  c.base_subset = "gp";
  const std::string text = c.to_json_text();
  const RunConfig back = RunConfig::from_json_text(text);
  CHECK(back.to_json_text() == text);
  CHECK(back.cache_key() == c.cache_key());
  CHECK(back.name == c.name);
  CHECK(back.seeds == c.seeds);
  CHECK(back.out_root == c.out_root);
}

TEST_CASE("cache key ignores labels and seeds but tracks training inputs") {
  const RunConfig base = tiny_cfg();
  RunConfig c = base;
  c.name = "renamed";
  c.seeds = {9, 10, 11};
  c.out_root = "/nowhere/else";
  CHECK(c.cache_key() == base.cache_key());

  c = base;
  c.w_c = 0.5;
  CHECK(c.cache_key() != base.cache_key());
  c = base;
  c.total_steps = 3000;
  CHECK(c.cache_key() != base.cache_key());
  c = base;
  c.eval_episodes = 2;
  CHECK(c.cache_key() != base.cache_key());
  c = base;
  c.agent = AgentKind::Td3;
  CHECK(c.cache_key() != base.cache_key());
}

TEST_CASE("metrics rows serialize at stable precision") {
  MetricsRow r;
  r.iteration = 17;
  r.env_steps = 17000;
  r.phase = 1;
  r.loss_q1 = 1.0 / 3.0;
  r.loss_q2 = 1.23456789e-17;
  r.fit_j = -52.25;
  r.train_return_report = -431.999972;
  r.eval_return_train = MetricsRow::kNan;

  const std::string line = metrics_row_to_csv(r);
  const MetricsRow back = metrics_row_from_csv(line);
  CHECK(back.iteration == 17);
  CHECK(back.phase == 1);
  CHECK(back.fit_j == -52.25);  // short decimals survive exactly
  CHECK(std::isnan(back.eval_return_train));
  CHECK(std::isnan(back.eval_success_rate));
  // Serialization is idempotent once through the %.9g quantizer.
  CHECK(metrics_row_to_csv(back) == line);

  // File round trip through the writer.
  const std::string dir = scratch_root();
  ensure_dir(dir);
  const std::string path = dir + "/roundtrip.csv";
  {
    MetricsWriter w(path, false);
    w.write(r);
    MetricsRow r2 = r;
    r2.iteration = 18;
    r2.eval_goal = 3;
    w.write(r2);
  }
  const auto rows = read_metrics(path);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].iteration == 17);
  CHECK(rows[1].eval_goal == 3);
  CHECK(metrics_row_to_csv(rows[0]) == line);
  const auto lines = read_metrics_lines(path);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == line);
}

TEST_CASE("normalized return maps the documented bounds onto [0,1]") {
  RunConfig classic = tiny_cfg();
  CHECK(normalize_return(1000.0, classic) == doctest::Approx(1.0));
  CHECK(normalize_return(-1000.0, classic) == doctest::Approx(0.0));
  CHECK(normalize_return(0.0, classic) == doctest::Approx(0.5));
  CHECK(normalize_return(5000.0, classic) == 1.0);   // clamped
  CHECK(normalize_return(-5000.0, classic) == 0.0);

  RunConfig robot;
  robot.env = "robot_nav";
  robot.agent = AgentKind::RcSac;
  robot.w_c_report = 0.1;
  robot.episode_cap = 300;
  const double wp = 0.25;
  const double hi = 100.0 + 300.0 * (wp + 3.0 * 0.1);
  const double lo = -300.0 * (wp + 3.0 * 0.1);
  CHECK(normalize_return(hi, robot) == doctest::Approx(1.0));
  CHECK(normalize_return(lo, robot) == doctest::Approx(0.0));
  CHECK(normalize_return(100.0, robot) == doctest::Approx((100.0 - lo) / (hi - lo)));
}

TEST_CASE("variants derive configs with new names and cache keys") {
  RunConfig base = tiny_cfg();

  const RunConfig rn = make_variant(base, "reset-networks");
  CHECK(rn.reset_on_switch == ResetOnSwitch::Networks);
  CHECK(rn.name == base.name + "-resetnet");
  CHECK(rn.cache_key() != base.cache_key());

  const RunConfig rb = make_variant(base, "reset-buffer");
  CHECK(rb.reset_on_switch == ResetOnSwitch::Buffer);

  const RunConfig st = make_variant(base, "static-switch-T/2");
  CHECK(st.switch_mode == SwitchMode::Static);
  CHECK(st.static_fraction == 0.5);
  const RunConfig st8 = make_variant(base, "static-switch-T/8");
  CHECK(st8.static_fraction == 0.125);
  CHECK(st8.name != st.name);

  RunConfig robot;
  robot.env = "robot_nav";
  robot.agent = AgentKind::RcSac;
  robot.total_steps = 2000;
  robot.block_steps = 1000;
  const RunConfig sub = make_variant(robot, "base-subset-gpv");
  CHECK(sub.base_subset == "gpv");
  CHECK(sub.switch_mode == SwitchMode::Never);

  CHECK_THROWS_AS(make_variant(base, "base-subset-gpv"), ConfigError);  // classic env
  RunConfig plain = base;
  plain.agent = AgentKind::Td3;
  CHECK_THROWS_AS(make_variant(plain, "reset-networks"), ConfigError);
  CHECK_THROWS_AS(make_variant(base, "no-such-variant"), ConfigError);
}

TEST_CASE("running averages skip gaps inside the trailing window") {
  const double nan = MetricsRow::kNan;
  const auto out = running_average({nan, 1.0, nan, 3.0, 5.0}, 2);
  REQUIRE(out.size() == 5);
  CHECK(std::isnan(out[0]));
  CHECK(out[1] == 1.0);
  CHECK(out[2] == 1.0);
  CHECK(out[3] == 3.0);
  CHECK(out[4] == 4.0);
  const auto wide = running_average({1.0, 2.0, 3.0, 4.0}, 3);
  CHECK(wide[0] == 1.0);
  CHECK(wide[1] == 1.5);
  CHECK(wide[2] == 2.0);
  CHECK(wide[3] == 3.0);
}

TEST_CASE("experiments cache completed runs and are seed deterministic") {
  fs::remove_all(scratch_root());
  const RunConfig cfg = tiny_cfg();

  const ExperimentResult first = run_experiment(cfg);
  REQUIRE(first.seeds.size() == 1);
  CHECK_FALSE(first.seeds[0].cached);
  REQUIRE(first.seeds[0].result.completed);
  CHECK(first.seeds[0].result.iterations == 2);
  CHECK(first.seeds[0].result.env_steps == 2000);

  const std::string run_dir = first.seeds[0].dir;
  REQUIRE(file_exists(run_dir + "/COMPLETE"));
  REQUIRE(file_exists(run_dir + "/metrics.csv"));
  REQUIRE(file_exists(run_dir + "/summary.json"));
  REQUIRE(file_exists(first.config_dir + "/config.json"));
  REQUIRE(file_exists(first.config_dir + "/aggregate.json"));
  const std::string metrics_before = slurp(run_dir + "/metrics.csv");
  REQUIRE(read_metrics(run_dir + "/metrics.csv").size() == 2);

  // Second invocation reuses the completed run untouched.
  const ExperimentResult second = run_experiment(cfg);
  CHECK(second.seeds[0].cached);
  CHECK(slurp(run_dir + "/metrics.csv") == metrics_before);

  // Without the marker the run is retrained and reproduces itself exactly.
  fs::remove(run_dir + "/COMPLETE");
  const ExperimentResult third = run_experiment(cfg);
  CHECK_FALSE(third.seeds[0].cached);
  CHECK(slurp(run_dir + "/metrics.csv") == metrics_before);

  // A different seed writes a different trajectory.
  RunConfig other = cfg;
  other.seeds = {6};
  const ExperimentResult fourth = run_experiment(other);
  const std::string other_metrics = slurp(fourth.seeds[0].dir + "/metrics.csv");
  CHECK(other_metrics != metrics_before);
  CHECK(fourth.seeds[0].dir != run_dir);
}

TEST_CASE("ablations run variant beside reference and emit the comparison") {
  const RunConfig cfg = tiny_cfg();  // reference cached by the previous case
  const AblationResult ab = run_ablation(cfg, "reset-buffer");
  REQUIRE(file_exists(ab.comparison_csv));
  std::ifstream f(ab.comparison_csv);
  std::string line;
  REQUIRE(std::getline(f, line));
  CHECK(line.rfind("# schema=rcrl.ablation.v1", 0) == 0);
  REQUIRE(std::getline(f, line));  // header
  CHECK(line.find("iteration") == 0);
  CHECK(line.find("ref_mean") != std::string::npos);
  CHECK(line.find("var_mean") != std::string::npos);
  int data_rows = 0;
  while (std::getline(f, line))
    if (!line.empty()) ++data_rows;
  CHECK(data_rows == 2);
  // Before any switch both arms train identically, so the smoothed
  // training returns agree.
  const auto ref_rows = read_metrics(ab.reference.seeds[0].dir + "/metrics.csv");
  const auto var_rows = read_metrics(ab.variant.seeds[0].dir + "/metrics.csv");
  REQUIRE(ref_rows.size() == var_rows.size());
  for (size_t i = 0; i < ref_rows.size(); ++i)
    if (ref_rows[i].phase == 0 && var_rows[i].phase == 0)
      CHECK(ref_rows[i].train_return_report == var_rows[i].train_return_report);
}
