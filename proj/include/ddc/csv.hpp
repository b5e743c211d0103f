#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ddc/harness.hpp"

namespace ddc {

inline constexpr std::string_view sweep_csv_header =
    "kappa,s,p,n,trials,emp_test_mean,emp_test_std,emp_train_mean,emp_sq_loss_mean,emp_norm_mean,"
    "theory_risk,theory_mu,theory_alpha,theory_rho,theory_norm,model,loss,rule";

/// %.10g; the format used for every real-valued CSV cell.
std::string format_real(double v);

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out);
/// Throws std::runtime_error if the file cannot be written.
void write_csv(const std::vector<SweepRow>& rows, const std::string& path);

/// Parses a file produced by write_csv; missing values become nullopt.
std::vector<SweepRow> read_csv(std::istream& in);
std::vector<SweepRow> read_csv(const std::string& path);

}  // namespace ddc
