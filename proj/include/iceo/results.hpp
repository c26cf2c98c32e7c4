#pragma once

#include <optional>
#include <string>
#include <vector>

namespace iceo {

inline constexpr int kResultsSchemaVersion = 1;

struct ResultRecord {
  std::string method;
  int n = 0;
  int sim = 0;
  int degree = 1;
  bool ok = true;
  double test_cost = 0.0;        // unregularized, on the test set
  std::string hyperparameters;   // "key=value;key=value"
  std::string message;           // failure reason
  double wall_seconds = 0.0;     // written to the timings file only
};

/// Sorted by (method, degree, n, sim) for a canonical byte layout.
void sort_records(std::vector<ResultRecord>& records);

/// First line "# iceo-results schema=1", then a CSV header and one row per record.
void write_results_csv(const std::string& path, std::vector<ResultRecord> records);
void write_timings_csv(const std::string& path, std::vector<ResultRecord> records);

struct ParsedResults {
  std::vector<ResultRecord> records;
  int malformed = 0;
};
ParsedResults read_results_csv(const std::string& path);

struct Summary {
  double mean = 0.0;
  std::optional<double> std_error;  // absent for a single observation
  int count = 0;
};
Summary summarize(const std::vector<double>& values);

struct CostRow {
  std::string method;
  int degree = 1;
  int n = 0;
  Summary cost;
};
/// Successful records only, grouped by (method, degree, n).
std::vector<CostRow> cost_table(const std::vector<ResultRecord>& records);

struct ImprovementRow {
  int degree = 1;
  int n = 0;
  Summary improvement;
};
struct ImprovementCell {
  int degree = 1;
  int n = 0;
  int sim = 0;
  double pto_cost = 0.0;
  double iceo_cost = 0.0;
  double improvement = 0.0;
};

/// Pairs successful iceo and pto records by (degree, n, sim).
std::vector<ImprovementCell> improvement_cells(const std::vector<ResultRecord>& records);
/// "degree,n,sim,pto_cost,iceo_cost,improvement", one row per paired cell.
void write_improvement_csv(const std::string& path, const std::vector<ResultRecord>& records);
/// improvement_cells grouped by (degree, n).
std::vector<ImprovementRow> improvement_table(const std::vector<ResultRecord>& records);

struct PlotDataReport {
  std::vector<std::string> files;
  int malformed = 0;
};
/// Writes cost_by_n.csv and improvement_by_degree.csv into out_dir.
PlotDataReport emit_plot_data(const std::string& results_path, const std::string& out_dir);

}  // namespace iceo
