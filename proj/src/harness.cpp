#include "rcrl/harness.hpp"

#include <cmath>

#include "rcrl/env_robot.hpp"
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace rcrl {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_dir(const std::string& path) { fs::create_directories(path); }

bool file_exists(const std::string& path) {
  std::error_code ec;
  return fs::exists(path, ec);
}

std::string config_dir_for(const RunConfig& cfg) {
  return cfg.resolved_out_root() + "/" + cfg.name + "-" + cfg.cache_key().substr(0, 8);
}

std::string run_dir_for(const RunConfig& cfg, uint64_t seed) {
  return config_dir_for(cfg) + "/seed" + std::to_string(seed);
}

namespace {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return json::parse(in);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
  if (!out) throw ConfigError("cannot write " + path);
}

// Mean and population standard deviation of the per-seed values of one
// summary statistic, skipping seeds where it is null.
json across_seed_stat(const std::vector<json>& summaries, const char* key) {
  std::vector<double> vals;
  for (const auto& s : summaries) {
    if (!s.contains("last50k")) continue;
    const auto& w = s["last50k"];
    if (!w.contains(key) || w[key].is_null()) continue;
    const auto& st = w[key];
    if (st.contains("mean") && st["mean"].is_number()) vals.push_back(st["mean"].get<double>());
  }
  if (vals.empty()) return nullptr;
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= (double)vals.size();
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= (double)vals.size();
  return json{{"mean", mean}, {"std", std::sqrt(var)}, {"n", vals.size()}};
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg, bool reuse_cache) {
  cfg.validate();
  if (cfg.seeds.empty()) throw ConfigError("run_experiment: config has no seeds");

  ExperimentResult out;
  out.config_dir = config_dir_for(cfg);
  ensure_dir(out.config_dir);
  write_text_file(out.config_dir + "/config.json", cfg.to_json_text());

  for (uint64_t seed : cfg.seeds) {
    SeedRunInfo info;
    info.seed = seed;
    info.dir = run_dir_for(cfg, seed);
    const std::string marker = info.dir + "/COMPLETE";
    if (reuse_cache && file_exists(marker) && file_exists(info.dir + "/summary.json")) {
      info.cached = true;
      out.seeds.push_back(std::move(info));
      continue;
    }
    ensure_dir(info.dir);
    // A stale marker without a summary means a half-written run; redo it.
    std::error_code ec;
    fs::remove(marker, ec);

    TrainingRun run(cfg, seed, info.dir);
    run.init();
    info.result = run.run();
    write_text_file(marker, "done\n");
    out.seeds.push_back(std::move(info));
  }

  // Aggregate over seeds. A diverged seed still has a summary; its flag is
  // carried through so downstream reports can see it.
  std::vector<json> summaries;
  json agg;
  agg["name"] = cfg.name;
  agg["config_hash"] = cfg.cache_key();
  agg["seeds"] = json::array();
  int n_diverged = 0;
  for (const auto& s : out.seeds) {
    json summ = read_json_file(s.dir + "/summary.json");
    if (summ.value("diverged", false)) ++n_diverged;
    json row;
    row["seed"] = s.seed;
    row["dir"] = s.dir;
    row["cached"] = s.cached;
    row["diverged"] = summ.value("diverged", false);
    row["switched"] = summ.value("switched", false);
    row["switch_iteration"] = summ["switch_iteration"];
    agg["seeds"].push_back(row);
    summaries.push_back(std::move(summ));
  }
  agg["n_seeds"] = out.seeds.size();
  agg["n_diverged"] = n_diverged;
  agg["eval_return_report"] = across_seed_stat(summaries, "eval_return_report");
  agg["eval_norm_return"] = across_seed_stat(summaries, "eval_norm_return");
  agg["eval_success_rate"] = across_seed_stat(summaries, "eval_success_rate");
  agg["train_return_report"] = across_seed_stat(summaries, "train_return_report");
  write_text_file(out.config_dir + "/aggregate.json", agg.dump(2) + "\n");
  return out;
}

RunConfig make_variant(const RunConfig& base, const std::string& variant) {
  RunConfig v = base;
  auto require_rc = [&] {
    if (!base.is_rc())
      throw ConfigError("variant '" + variant + "' requires a curriculum agent");
  };
  if (variant == "reset-networks") {
    require_rc();
    v.reset_on_switch = ResetOnSwitch::Networks;
    v.name = base.name + "-resetnet";
  } else if (variant == "reset-buffer") {
    require_rc();
    v.reset_on_switch = ResetOnSwitch::Buffer;
    v.name = base.name + "-resetbuf";
  } else if (variant == "static-switch-T/8" || variant == "static-switch-T/3" ||
             variant == "static-switch-T/2") {
    require_rc();
    v.switch_mode = SwitchMode::Static;
    char denom = variant.back();
    v.static_fraction = denom == '8' ? 0.125 : denom == '3' ? (1.0 / 3.0) : 0.5;
    v.name = base.name + "-static" + denom;
  } else if (variant.rfind("base-subset-", 0) == 0) {
    require_rc();
    if (!base.is_robot())
      throw ConfigError("variant '" + variant + "' requires the robot environment");
    (void)subset_from_string(variant.substr(12));  // reject unknown subset names
    v.base_subset = variant.substr(12);
    v.switch_mode = SwitchMode::Never;  // train on the subset base reward only
    v.name = base.name + "-" + variant.substr(12);
  } else {
    throw ConfigError("unknown ablation variant '" + variant + "'");
  }
  return v;
}

std::vector<double> running_average(const std::vector<double>& xs, int window) {
  std::vector<double> out(xs.size(), std::numeric_limits<double>::quiet_NaN());
  for (size_t i = 0; i < xs.size(); ++i) {
    double sum = 0.0;
    int n = 0;
    size_t lo = (i + 1 >= (size_t)window) ? i + 1 - (size_t)window : 0;
    for (size_t j = lo; j <= i; ++j) {
      if (std::isfinite(xs[j])) {
        sum += xs[j];
        ++n;
      }
    }
    if (n > 0) out[i] = sum / n;
  }
  return out;
}

namespace {

// Per-iteration training return series for one finished run.
std::vector<double> load_train_return_series(const std::string& run_dir) {
  auto lines = read_metrics_lines(run_dir + "/metrics.csv");
  std::vector<double> out;
  out.reserve(lines.size());
  for (const auto& ln : lines) out.push_back(metrics_row_from_csv(ln).train_return_report);
  return out;
}

}  // namespace

AblationResult run_ablation(const RunConfig& base, const std::string& variant,
                            bool reuse_cache) {
  RunConfig var_cfg = make_variant(base, variant);  // reject bad variants before any run
  AblationResult out;
  out.reference = run_experiment(base, reuse_cache);
  out.variant = run_experiment(var_cfg, reuse_cache);

  constexpr int kWindow = 50;
  std::vector<std::vector<double>> ref_s, var_s;
  size_t rows = 0;
  for (const auto& s : out.reference.seeds) {
    ref_s.push_back(running_average(load_train_return_series(s.dir), kWindow));
    rows = std::max(rows, ref_s.back().size());
  }
  for (const auto& s : out.variant.seeds) {
    var_s.push_back(running_average(load_train_return_series(s.dir), kWindow));
    rows = std::max(rows, var_s.back().size());
  }

  out.comparison_csv = out.variant.config_dir + "/comparison.csv";
  std::ofstream csv(out.comparison_csv, std::ios::trunc);
  csv << "# schema=rcrl.ablation.v1 window=" << kWindow << "\n";
  csv << "iteration";
  for (const auto& s : out.reference.seeds) csv << ",ref_seed" << s.seed;
  for (const auto& s : out.variant.seeds) csv << ",var_seed" << s.seed;
  csv << ",ref_mean,var_mean\n";
  auto cell = [](const std::vector<double>& v, size_t i) {
    return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
  };
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.9g", x);
    csv << ',' << buf;
  };
  for (size_t i = 0; i < rows; ++i) {
    csv << i;
    double rsum = 0, vsum = 0;
    int rn = 0, vn = 0;
    for (const auto& v : ref_s) {
      double x = cell(v, i);
      put(x);
      if (std::isfinite(x)) rsum += x, ++rn;
    }
    for (const auto& v : var_s) {
      double x = cell(v, i);
      put(x);
      if (std::isfinite(x)) vsum += x, ++vn;
    }
    put(rn ? rsum / rn : std::numeric_limits<double>::quiet_NaN());
    put(vn ? vsum / vn : std::numeric_limits<double>::quiet_NaN());
    csv << '\n';
  }
  if (!csv) throw ConfigError("cannot write " + out.comparison_csv);
  return out;
}

}  // namespace rcrl
