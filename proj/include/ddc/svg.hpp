#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ddc/harness.hpp"

namespace ddc {

struct SvgOptions {
  bool log_x = false;
  bool show_train = false;  // adds square markers for emp_train_mean
  std::string title = "Test error vs overparametrization ratio";
  int width = 760;
  int height = 480;
};

/// Test error against kappa: theory as solid lines (broken at kappa = 1),
/// empirical means as crosses, one series per model/loss/rule group (a drop
/// in kappa starts a new series, so concatenated sweeps stay apart), and a
/// dashed vertical rule at the interpolation threshold when the grid spans
/// kappa = 1.
///
/// Every empirical cross is a <path class="marker">, so the number of such
/// elements equals the number of rows carrying emp_test_mean.
void emit_svg(const std::vector<SweepRow>& rows, std::ostream& out, const SvgOptions& opt = {});
void emit_svg(const std::vector<SweepRow>& rows, const std::string& path, const SvgOptions& opt = {});

}  // namespace ddc
