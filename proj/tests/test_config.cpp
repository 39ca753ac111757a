#include <gtest/gtest.h>

#include <string>

#include "scnls/config.hpp"

using namespace scnls;
using nlohmann::json;

namespace {

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, MinimalDocumentGivesDefaults) {
  const Config c = parse_config(json{{"schema_version", 1}});
  const SweepConfig d;
  EXPECT_EQ(c.sweep.eps_list, d.eps_list);
  EXPECT_EQ(c.sweep.tau, d.tau);
  EXPECT_EQ(c.run.points, 512);
  EXPECT_EQ(c.scaling.n, 6);
  EXPECT_EQ(c.two_grid.points, 32);
  EXPECT_EQ(c.seed, 12345u);
  EXPECT_FALSE(c.out_dir.has_value());
}

TEST(Config, VersionRequired) {
  EXPECT_NE(error_of(json::object()).find("schema_version"), std::string::npos);
  EXPECT_NE(error_of(json{{"schema_version", 2}}).find("schema_version"), std::string::npos);
  EXPECT_THROW(parse_config(json::array()), ValidationError);
}

TEST(Config, UnknownKeyNamed) {
  const auto msg = error_of(json{{"schema_version", 1}, {"tua", 0.2}});
  EXPECT_NE(msg.find("unknown key 'tua'"), std::string::npos) << msg;
}

TEST(Config, NegativeStepNamesField) {
  const auto msg = error_of(json{{"schema_version", 1}, {"dt", -0.01}});
  EXPECT_NE(msg.find("'dt'"), std::string::npos) << msg;
}

TEST(Config, TypeErrors) {
  EXPECT_NE(error_of(json{{"schema_version", 1}, {"points", 64.5}}).find("'points'"), std::string::npos);
  EXPECT_NE(error_of(json{{"schema_version", 1}, {"eps_list", 0.1}}).find("'eps_list'"), std::string::npos);
  EXPECT_NE(error_of(json{{"schema_version", 1}, {"dealias", 1}}).find("'dealias'"), std::string::npos);
  EXPECT_NE(error_of(json{{"schema_version", 1}, {"a1_mode", "half"}}).find("'a1_mode'"), std::string::npos);
  EXPECT_NE(error_of(json{{"schema_version", 1}, {"seed", -4}}).find("'seed'"), std::string::npos);
}

TEST(Config, RangeErrors) {
  EXPECT_NE(error_of(json{{"schema_version", 1}, {"eps_list", {0.1, 0.2}}}).find("eps_list"), std::string::npos);
  EXPECT_NE(error_of(json{{"schema_version", 1}, {"points", 48}}).find("points"), std::string::npos);
  EXPECT_NE(error_of(json{{"schema_version", 1}, {"tau", 0.13}}).find("tau"), std::string::npos);
  EXPECT_NE(error_of(json{{"schema_version", 1}, {"n", 4}, {"s", 1.0}}).find("'s'"), std::string::npos);
  EXPECT_NE(error_of(json{{"schema_version", 1}, {"corollary_n", 4}}).find("corollary_n"), std::string::npos);
}

TEST(Config, JsonRoundTrip) {
  json doc{{"schema_version", 1}, {"eps_list", {0.5, 0.25, 0.125}}, {"a1_mode", "imaginary"},
           {"sing_tol", 3.5}, {"dump_fields", "binary"}, {"two_grid_j_list", {2, 3}},
           {"out_dir", "elsewhere"}, {"seed", 99}};
  const Config c = parse_config(doc);
  EXPECT_EQ(c.sweep.a1_mode, A1Mode::imaginary);
  EXPECT_EQ(c.run.sing_tol, 3.5);
  const json back = to_json(c);
  EXPECT_EQ(to_json(parse_config(back)), back);
  EXPECT_EQ(back["eps_list"], doc["eps_list"]);
  EXPECT_EQ(back["out_dir"], "elsewhere");
  EXPECT_EQ(back["seed"], 99);
  EXPECT_TRUE(to_json(parse_config(json{{"schema_version", 1}}))["sing_tol"].is_null());
}
