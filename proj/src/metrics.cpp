#include "rcrl/metrics.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "rcrl/mlp.hpp"

namespace rcrl {

namespace {

const char* kColumns =
    "iteration,env_steps,phase,loss_q1,loss_q2,fit_j,alpha,"
    "train_return_report,eval_return_train,eval_return_report,eval_rb_sum,"
    "eval_rc_sum,eval_norm_return,eval_success_rate,eval_goal,eval_timeout,"
    "eval_collision";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string metrics_header() { return kColumns; }

std::string metrics_row_to_csv(const MetricsRow& r) {
  std::ostringstream os;
  os << r.iteration << ',' << r.env_steps << ',' << r.phase << ',' << fmt(r.loss_q1)
     << ',' << fmt(r.loss_q2) << ',' << fmt(r.fit_j) << ',' << fmt(r.alpha) << ','
     << fmt(r.train_return_report) << ',' << fmt(r.eval_return_train) << ','
     << fmt(r.eval_return_report) << ',' << fmt(r.eval_rb_sum) << ','
     << fmt(r.eval_rc_sum) << ',' << fmt(r.eval_norm_return) << ','
     << fmt(r.eval_success_rate) << ',' << r.eval_goal << ',' << r.eval_timeout << ','
     << r.eval_collision;
  return os.str();
}

MetricsRow metrics_row_from_csv(const std::string& line) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  if (parts.size() != 17) throw ConfigError("metrics row: wrong column count");
  MetricsRow r;
  r.iteration = std::strtol(parts[0].c_str(), nullptr, 10);
  r.env_steps = std::strtol(parts[1].c_str(), nullptr, 10);
  r.phase = static_cast<int>(std::strtol(parts[2].c_str(), nullptr, 10));
  r.loss_q1 = std::strtod(parts[3].c_str(), nullptr);
  r.loss_q2 = std::strtod(parts[4].c_str(), nullptr);
  r.fit_j = std::strtod(parts[5].c_str(), nullptr);
  r.alpha = std::strtod(parts[6].c_str(), nullptr);
  r.train_return_report = std::strtod(parts[7].c_str(), nullptr);
  r.eval_return_train = std::strtod(parts[8].c_str(), nullptr);
  r.eval_return_report = std::strtod(parts[9].c_str(), nullptr);
  r.eval_rb_sum = std::strtod(parts[10].c_str(), nullptr);
  r.eval_rc_sum = std::strtod(parts[11].c_str(), nullptr);
  r.eval_norm_return = std::strtod(parts[12].c_str(), nullptr);
  r.eval_success_rate = std::strtod(parts[13].c_str(), nullptr);
  r.eval_goal = static_cast<int>(std::strtol(parts[14].c_str(), nullptr, 10));
  r.eval_timeout = static_cast<int>(std::strtol(parts[15].c_str(), nullptr, 10));
  r.eval_collision = static_cast<int>(std::strtol(parts[16].c_str(), nullptr, 10));
  return r;
}

MetricsWriter::MetricsWriter(const std::string& path, bool append)
    : f_(path, append ? std::ios::app : std::ios::trunc) {
  if (!f_) throw ConfigError("cannot open metrics file: " + path);
  if (!append) f_ << kMetricsSchema << '\n' << kColumns << '\n';
}

void MetricsWriter::write(const MetricsRow& r) {
  f_ << metrics_row_to_csv(r) << '\n';
  f_.flush();
}

std::vector<std::string> read_metrics_lines(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open metrics file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("iteration,", 0) == 0) continue;
    lines.push_back(line);
  }
  return lines;
}

std::vector<MetricsRow> read_metrics(const std::string& path) {
  std::vector<MetricsRow> rows;
  for (const std::string& line : read_metrics_lines(path))
    rows.push_back(metrics_row_from_csv(line));
  return rows;
}

}  // namespace rcrl
