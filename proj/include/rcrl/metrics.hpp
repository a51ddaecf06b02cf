#pragma once

#include <fstream>
#include <limits>
#include <string>
#include <vector>

namespace rcrl {

inline constexpr char kMetricsSchema[] = "# schema=rcrl.metrics.v1";

// One row per training iteration. Evaluation fields are NaN on iterations
// without an evaluation pass; outcome counts are robot-only.
struct MetricsRow {
  static constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

  long iteration = 0;
  long env_steps = 0;
  int phase = 0;
  double loss_q1 = kNan;
  double loss_q2 = kNan;
  double fit_j = kNan;
  double alpha = kNan;
  double train_return_report = kNan;  // episodes finished inside the iteration
  double eval_return_train = kNan;    // at the training w_c
  double eval_return_report = kNan;   // at the reporting w_c
  double eval_rb_sum = kNan;          // mean per-episode sum of the base part
  double eval_rc_sum = kNan;
  double eval_norm_return = kNan;
  double eval_success_rate = kNan;
  int eval_goal = 0;
  int eval_timeout = 0;
  int eval_collision = 0;
};

std::string metrics_header();
std::string metrics_row_to_csv(const MetricsRow& r);  // %.9g floats, no newline
MetricsRow metrics_row_from_csv(const std::string& line);

class MetricsWriter {
 public:
  MetricsWriter(const std::string& path, bool append);
  void write(const MetricsRow& r);  // flushes so partial runs stay readable

 private:
  std::ofstream f_;
};

std::vector<MetricsRow> read_metrics(const std::string& path);
// Raw data lines (excluding schema and header), for byte-level comparisons.
std::vector<std::string> read_metrics_lines(const std::string& path);

}  // namespace rcrl
