#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "scnls/fit.hpp"
#include "scnls/report.hpp"

using namespace scnls;

TEST(FitLogLog, ExactPowerLaw) {
  const std::vector<double> x{0.25, 0.125, 0.0625, 0.03125};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.5));
  const SlopeFit f = fit_loglog(x, y);
  EXPECT_NEAR(f.slope, 1.5, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-12);
  EXPECT_LT(f.band95, 1e-10);
  EXPECT_LT(f.max_residual, 1e-12);
  EXPECT_EQ(f.points, 4u);
  EXPECT_TRUE(f.within(1.4, 1.6));
  EXPECT_FALSE(f.within(1.6, 2.0));
}

TEST(FitLogLog, NoisyBandCoversSlope) {
  const std::vector<double> x{1, 2, 4, 8, 16};
  const std::vector<double> y{1.0, 4.4, 15.2, 66.0, 250.0};
  const SlopeFit f = fit_loglog(x, y);
  EXPECT_GT(f.band95, 0.0);
  EXPECT_NEAR(f.slope, 2.0, f.band95 + 0.1);
  EXPECT_GT(f.band95, f.slope_stderr);
}

TEST(FitLogLog, RejectsBadInput) {
  const std::vector<double> two{1, 2};
  EXPECT_THROW(fit_loglog(two, two), ValidationError);
  const std::vector<double> x{1, 2, 3}, y{1, 0, 2}, y2{1, 2};
  EXPECT_THROW(fit_loglog(x, y), ValidationError);
  EXPECT_THROW(fit_loglog(x, y2), ValidationError);
  const std::vector<double> same{2, 2, 2};
  EXPECT_THROW(fit_loglog(same, x), ValidationError);
}

TEST(Report, Fmt17RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) EXPECT_EQ(std::stod(fmt17(v)), v);
  EXPECT_EQ(fmt17(std::nan("")), "nan");
}

TEST(Report, CsvFieldQuoting) {
  EXPECT_EQ(csv_field("plain"), "plain");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Report, CsvLayout) {
  StudyReport rep;
  rep.study = "demo";
  rep.notes.push_back("first note");
  rep.add("D", 0.25, 1.0, 2.0, "bounded below, no blow-up");
  rep.add("D_t", 0.25, 1.0, 3.0, {}, 0.5);
  SlopeFit f;
  f.slope = 1.0;
  f.points = 3;
  rep.fits.push_back({"D", 1.0, f, "order 1"});
  std::ostringstream os;
  write_csv(os, rep);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "# first note");
  std::getline(is, line);
  EXPECT_EQ(line, "kind,quantity,x_label,x,s,t,value,slope,slope_stderr,band95,max_residual,points,verdict");
  std::getline(is, line);
  EXPECT_EQ(line, "row,D,eps,0.25,1,,2,,,,,,\"bounded below, no blow-up\"");
  std::getline(is, line);
  EXPECT_EQ(line, "row,D_t,eps,0.25,1,0.5,3,,,,,,");
  std::getline(is, line);
  EXPECT_EQ(line, "fit,D,eps,,1,,,1,0,0,0,3,order 1");
  EXPECT_FALSE(std::getline(is, line));

  std::ostringstream again;
  write_csv(again, rep);
  EXPECT_EQ(os.str(), again.str());
}

TEST(Report, LookupAndSummary) {
  StudyReport rep;
  rep.study = "demo";
  rep.add("D", 0.5, 0.0, 1.0);
  rep.add("D", 0.25, 0.0, 2.0);
  rep.add("D", 0.25, 0.0, 9.0, {}, 0.1);
  EXPECT_EQ(rep.select("D", 0.0).size(), 3u);
  EXPECT_EQ(rep.value("D", 0.25, 0.0), 2.0);
  EXPECT_FALSE(rep.value("D", 0.125, 0.0).has_value());
  EXPECT_TRUE(rep.all_passed());
  rep.checks.push_back({"c1", true, "ok"});
  rep.checks.push_back({"c2", false, "bad"});
  EXPECT_FALSE(rep.all_passed());
  const auto j = summary_json(rep);
  EXPECT_EQ(j["study"], "demo");
  EXPECT_EQ(j["passed"], false);
  ASSERT_EQ(j["checks"].size(), 2u);
  EXPECT_EQ(j["checks"][1]["name"], "c2");
}
