#include "iceo/results.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "iceo/benchmarks.hpp"
#include "iceo/format.hpp"

namespace iceo {

namespace {

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

const char* kHeader = "method,n,sim,degree,status,test_cost,hyperparameters,message";

}  // namespace

void sort_records(std::vector<ResultRecord>& records) {
  std::stable_sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
    return std::tie(a.method, a.degree, a.n, a.sim) < std::tie(b.method, b.degree, b.n, b.sim);
  });
}

void write_results_csv(const std::string& path, std::vector<ResultRecord> records) {
  sort_records(records);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# iceo-results schema=" << kResultsSchemaVersion << '\n' << kHeader << '\n';
  for (const auto& r : records) {
    out << sanitize(r.method) << ',' << r.n << ',' << r.sim << ',' << r.degree << ',' << (r.ok ? "ok" : "failed")
        << ',' << (r.ok ? format_double(r.test_cost) : "") << ',' << sanitize(r.hyperparameters) << ','
        << sanitize(r.message) << '\n';
  }
}

void write_timings_csv(const std::string& path, std::vector<ResultRecord> records) {
  sort_records(records);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "method,n,sim,degree,wall_seconds\n";
  for (const auto& r : records) {
    out << sanitize(r.method) << ',' << r.n << ',' << r.sim << ',' << r.degree << ',' << format_double(r.wall_seconds)
        << '\n';
  }
}

ParsedResults read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# iceo-results schema=", 0) != 0) {
    throw std::runtime_error(path + ": missing results schema line");
  }
  const int version = std::stoi(line.substr(std::string("# iceo-results schema=").size()));
  if (version != kResultsSchemaVersion) throw std::runtime_error(path + ": unsupported schema version");
  if (!std::getline(in, line) || line != kHeader) throw std::runtime_error(path + ": unexpected header");
  ParsedResults out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    try {
      if (cells.size() != 8) throw std::invalid_argument("column count");
      ResultRecord r;
      r.method = cells[0];
      r.n = std::stoi(cells[1]);
      r.sim = std::stoi(cells[2]);
      r.degree = std::stoi(cells[3]);
      if (cells[4] == "ok") {
        r.ok = true;
        r.test_cost = std::stod(cells[5]);
        if (!std::isfinite(r.test_cost)) throw std::invalid_argument("non-finite cost");
      } else if (cells[4] == "failed") {
        r.ok = false;
      } else {
        throw std::invalid_argument("status");
      }
      r.hyperparameters = cells[6];
      r.message = cells[7];
      out.records.push_back(std::move(r));
    } catch (const std::exception&) {
      ++out.malformed;
    }
  }
  return out;
}

Summary summarize(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  Summary s;
  s.count = static_cast<int>(values.size());
  double total = 0.0;
  for (double v : values) total += v;
  s.mean = total / s.count;
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_error = std::sqrt(ss / (s.count - 1)) / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

std::vector<CostRow> cost_table(const std::vector<ResultRecord>& records) {
  std::map<std::tuple<std::string, int, int>, std::vector<double>> groups;
  for (const auto& r : records) {
    if (r.ok) groups[{r.method, r.degree, r.n}].push_back(r.test_cost);
  }
  std::vector<CostRow> out;
  for (const auto& [key, values] : groups) {
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), summarize(values)});
  }
  return out;
}

std::vector<ImprovementCell> improvement_cells(const std::vector<ResultRecord>& records) {
  std::map<std::tuple<int, int, int>, std::pair<std::optional<double>, std::optional<double>>> pairs;
  for (const auto& r : records) {
    if (!r.ok) continue;
    if (r.method == "iceo") pairs[{r.degree, r.n, r.sim}].first = r.test_cost;
    if (r.method == "pto") pairs[{r.degree, r.n, r.sim}].second = r.test_cost;
  }
  std::vector<ImprovementCell> out;
  for (const auto& [key, costs] : pairs) {
    if (costs.first && costs.second && *costs.second > 0.0) {
      out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), *costs.second, *costs.first,
                     improvement(*costs.second, *costs.first)});
    }
  }
  return out;
}

void write_improvement_csv(const std::string& path, const std::vector<ResultRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "degree,n,sim,pto_cost,iceo_cost,improvement\n";
  for (const auto& c : improvement_cells(records)) {
    out << c.degree << ',' << c.n << ',' << c.sim << ',' << format_double(c.pto_cost) << ','
        << format_double(c.iceo_cost) << ',' << format_double(c.improvement) << '\n';
  }
}

std::vector<ImprovementRow> improvement_table(const std::vector<ResultRecord>& records) {
  std::map<std::pair<int, int>, std::vector<double>> groups;
  for (const auto& c : improvement_cells(records)) groups[{c.degree, c.n}].push_back(c.improvement);
  std::vector<ImprovementRow> out;
  for (const auto& [key, values] : groups) out.push_back({key.first, key.second, summarize(values)});
  return out;
}

PlotDataReport emit_plot_data(const std::string& results_path, const std::string& out_dir) {
  const ParsedResults parsed = read_results_csv(results_path);
  std::filesystem::create_directories(out_dir);
  PlotDataReport report;
  report.malformed = parsed.malformed;
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };

  const auto costs = cost_table(parsed.records);
  const std::string cost_path = (std::filesystem::path(out_dir) / "cost_by_n.csv").string();
  {
    std::ofstream out(cost_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + cost_path);
    out << "method,degree,n,count,mean_cost,std_error\n";
    for (const auto& row : costs) {
      out << row.method << ',' << row.degree << ',' << row.n << ',' << row.cost.count << ','
          << format_double(row.cost.mean) << ',' << opt(row.cost.std_error) << '\n';
    }
  }
  report.files.push_back(cost_path);

  const auto imp = improvement_table(parsed.records);
  const std::string imp_path = (std::filesystem::path(out_dir) / "improvement_by_degree.csv").string();
  {
    std::ofstream out(imp_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + imp_path);
    out << "degree,n,count,mean_improvement,std_error\n";
    for (const auto& row : imp) {
      out << row.degree << ',' << row.n << ',' << row.improvement.count << ',' << format_double(row.improvement.mean)
          << ',' << opt(row.improvement.std_error) << '\n';
    }
  }
  report.files.push_back(imp_path);
  return report;
}

}  // namespace iceo
