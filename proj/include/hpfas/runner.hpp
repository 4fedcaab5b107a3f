// SPDX-License-Identifier: Apache-2.0

#ifndef HPFAS_RUNNER_HPP
#define HPFAS_RUNNER_HPP

#include "hpfas/config.hpp"

#include <string>
#include <vector>

namespace hpfas {

struct Row {
  double sweep_value = 0.0;
  std::string method;
  double value = 0.0;
  double error = 0.0;
  long trials = 0; // 0 for analytic rows
  std::vector<std::string> flags;
};

struct RunOutput {
  std::string sweep_variable;
  std::vector<Row> rows;

  bool any_nonconverged() const;
};

enum class RunMode { all, analytic_only, mc_only };

/// Evaluates every selected method at every sweep point. Rows come out sweep
/// point by sweep point, methods in config order. A config without a sweep
/// is a single point of gamma_th_db.
RunOutput run_config(const RunConfig& cfg, RunMode mode = RunMode::all);

/// Header `sweep_var,method,value,error,trials,flags`, values at 17 significant digits.
std::string format_csv(const RunOutput& out);

/// Companion gnuplot script reading `csv_path`, one curve per method.
std::string gnuplot_script(const RunOutput& out, const std::string& csv_path);

/// fig2, fig3 or fig4. Throws ConfigError on any other name.
RunConfig figure_config(const std::string& preset);

/// Writes the whole file at once, replacing any previous content.
void write_text_file(const std::string& path, const std::string& text);

} // namespace hpfas

#endif // HPFAS_RUNNER_HPP
