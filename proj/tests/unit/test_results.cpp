#include <doctest.h>

#include <fstream>

#include "iceo/results.hpp"
#include "test_support.hpp"

using namespace iceo;

namespace {

ResultRecord rec(std::string method, int n, int sim, double cost, int degree = 1) {
  ResultRecord r;
  r.method = std::move(method);
  r.n = n;
  r.sim = sim;
  r.degree = degree;
  r.test_cost = cost;
  return r;
}

}  // namespace

TEST_CASE("summary statistics") {
  const Summary one = summarize({3.5});
  CHECK(one.mean == 3.5);
  CHECK_FALSE(one.std_error.has_value());
  const Summary same = summarize(std::vector<double>(25, 80.25));
  CHECK(same.mean == 80.25);
  REQUIRE(same.std_error.has_value());
  CHECK(*same.std_error == 0.0);
  // values 1..4: mean 2.5, sample sd sqrt(5/3), se sqrt(5/3)/2
  const Summary s = summarize({1.0, 2.0, 3.0, 4.0});
  CHECK(s.mean == 2.5);
  CHECK(*s.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("results file layout and round trip") {
  const auto dir = testing::scratch_dir("results");
  std::vector<ResultRecord> rs = {rec("saa", 300, 1, 201.5), rec("iceo", 100, 0, 89.125), rec("saa", 100, 0, 201.0)};
  rs[1].hyperparameters = "lr=0.01;epoch=35";
  ResultRecord failed = rec("pto", 100, 0, 0.0);
  failed.ok = false;
  failed.message = "loss, diverged";
  rs.push_back(failed);
  write_results_csv((dir / "r.csv").string(), rs);
  const std::string text = testing::read_file(dir / "r.csv");
  CHECK(text.rfind("# iceo-results schema=1\nmethod,n,sim,degree,status,test_cost,hyperparameters,message\n", 0) == 0);
  CHECK(text.find("iceo,100,0,1,ok,89.125,lr=0.01;epoch=35,") != std::string::npos);

  const ParsedResults back = read_results_csv((dir / "r.csv").string());
  CHECK(back.malformed == 0);
  REQUIRE(back.records.size() == 4);
  CHECK(back.records[0].method == "iceo");
  CHECK(back.records[1].method == "pto");
  CHECK_FALSE(back.records[1].ok);
  CHECK(back.records[1].message == "loss  diverged");
  CHECK(back.records[2].n == 100);
  CHECK(back.records[3].test_cost == 201.5);
}

TEST_CASE("malformed rows are skipped and counted") {
  const auto dir = testing::scratch_dir("malformed");
  {
    std::ofstream out(dir / "r.csv");
    out << "# iceo-results schema=1\nmethod,n,sim,degree,status,test_cost,hyperparameters,message\n"
        << "saa,100,0,1,ok,10,,\n"
        << "saa,abc,1,1,ok,11,,\n"
        << "saa,100,2,1,weird,12,,\n"
        << "too,few\n"
        << "saa,100,3,1,ok,14,,\n";
  }
  const ParsedResults r = read_results_csv((dir / "r.csv").string());
  CHECK(r.records.size() == 2);
  CHECK(r.malformed == 3);
}

TEST_CASE("plot data on a ten-record fixture matches a recomputation") {
  const auto dir = testing::scratch_dir("plot");
  std::vector<ResultRecord> rs;
  const double iceo_costs[] = {90.0, 92.0, 88.0};
  const double pto_costs[] = {100.0, 95.0, 110.0};
  for (int s = 0; s < 3; ++s) {
    rs.push_back(rec("iceo", 500, s, iceo_costs[s], 2));
    rs.push_back(rec("pto", 500, s, pto_costs[s], 2));
  }
  rs.push_back(rec("saa", 100, 0, 200.0));
  rs.push_back(rec("saa", 100, 1, 202.0));
  rs.push_back(rec("saa", 100, 2, 207.0));
  ResultRecord failed = rec("saa", 100, 3, 0.0);
  failed.ok = false;
  rs.push_back(failed);
  write_results_csv((dir / "results.csv").string(), rs);
  const PlotDataReport report = emit_plot_data((dir / "results.csv").string(), (dir / "plots").string());
  CHECK(report.files.size() == 2);
  CHECK(report.malformed == 0);

  const std::string cost = testing::read_file(dir / "plots" / "cost_by_n.csv");
  // saa mean (200+202+207)/3 = 203; sd sqrt(13), se sqrt(13/3)
  const double se = std::sqrt(13.0 / 3.0);
  CHECK(cost.find("saa,1,100,3,203," + std::to_string(se).substr(0, 6)) != std::string::npos);
  CHECK(cost.find("iceo,2,500,3,90,") != std::string::npos);

  const auto table = improvement_table(rs);
  REQUIRE(table.size() == 1);
  const double i0 = 0.1, i1 = 3.0 / 95.0, i2 = 22.0 / 110.0;
  CHECK(table[0].improvement.mean == doctest::Approx((i0 + i1 + i2) / 3.0).epsilon(1e-14));
  CHECK(table[0].degree == 2);
  const std::string imp = testing::read_file(dir / "plots" / "improvement_by_degree.csv");
  CHECK(imp.rfind("degree,n,count,mean_improvement,std_error\n2,500,3,", 0) == 0);

  write_improvement_csv((dir / "imp.csv").string(), rs);
  const std::string cells = testing::read_file(dir / "imp.csv");
  CHECK(cells.find("2,500,0,100,90,0.1\n") != std::string::npos);
}

TEST_CASE("single record gives no standard error in the plot data") {
  const auto dir = testing::scratch_dir("single");
  write_results_csv((dir / "results.csv").string(), {rec("pto", 700, 0, 81.5)});
  emit_plot_data((dir / "results.csv").string(), dir.string());
  const std::string cost = testing::read_file(dir / "cost_by_n.csv");
  CHECK(cost.find("pto,1,700,1,81.5,\n") != std::string::npos);
}

TEST_CASE("record order is canonical") {
  std::vector<ResultRecord> a = {rec("saa", 300, 1, 1), rec("iceo", 100, 2, 2), rec("iceo", 100, 0, 3)};
  std::vector<ResultRecord> b = {a[2], a[0], a[1]};
  sort_records(a);
  sort_records(b);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].test_cost == b[i].test_cost);
  CHECK(a[0].sim == 0);
}
