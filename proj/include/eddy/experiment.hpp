#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "eddy/march.hpp"

namespace eddy {

/// One sweep: the cross product degrees x divs x steps on a fixed patch layout.
struct ExperimentConfig {
  std::vector<int> degrees{1};
  std::vector<int> divs{2};  ///< global elements per direction, h = 1/divs
  std::vector<int> steps{2};
  std::array<int, 3> patches{2, 1, 1};
  double tol = 1e-6;
  int max_iter = 500;
  SolverMode mode = SolverMode::Ieti;
  TreeOrder tree_order = TreeOrder::Lexicographic;
  std::string out;  ///< CSV path, empty = standard output
  std::string summary;  ///< summary path, empty = none
  int workers = 1;
  bool quiet = false;

  /// Throws UsageError.
  void validate() const;
};

/// Command-line flags, optionally on top of a `key = value` file given with --sweep.
/// Flags override file values. Throws UsageError; `--help` throws HelpRequested.
ExperimentConfig parse_config(const std::vector<std::string>& args);

class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentRecord {
  int deg = 0;
  int divs = 0;
  int steps = 0;
  double errBa = 0.0;
  double errEa = 0.0;
  double iter = 0.0;
  int pri = 0;

  /// Failed runs carry NaN errors and pri = -1.
  bool ok() const { return pri >= 0; }
  static ExperimentRecord failed(int deg, int divs, int steps);
  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// Rows in lexicographic (deg, divs, steps) order. Progress goes to `log` when set.
std::vector<ExperimentRecord> run_sweep(const ExperimentConfig& config, std::ostream* log = nullptr);

std::string format_csv(const std::vector<ExperimentRecord>& records);
std::vector<ExperimentRecord> parse_csv(const std::string& text);
/// Throws InputError when the file cannot be written or read.
void write_csv(const std::vector<ExperimentRecord>& records, const std::string& path);
std::vector<ExperimentRecord> read_csv(const std::string& path);

struct ConvergenceEntry {
  int deg = 0;
  int fixed = 0;   ///< steps for orders in h, divs for orders in n_t
  int samples = 0;
  double order_b = 0.0;
  double order_e = 0.0;
};

struct ScalingEntry {
  int deg = 0;
  int steps = 0;
  int samples = 0;
  double iter_slope = 0.0;  ///< d log(iter) / d log(1/h)
  double pri_slope = 0.0;   ///< d log(pri) / d log(1/h)
};

struct Summary {
  std::vector<ConvergenceEntry> in_h;
  std::vector<ConvergenceEntry> in_steps;
  std::vector<ScalingEntry> scaling;
  std::vector<std::string> notes;

  std::string text() const;
  /// Tab-separated blocks, one per table, for plotting.
  std::string tsv() const;
};

Summary summarize(const std::vector<ExperimentRecord>& records);

}  // namespace eddy
