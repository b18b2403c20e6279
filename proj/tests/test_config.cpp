#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "robustl1/config.hpp"

using namespace robustl1;

TEST(KeyValueConfig, ParsesKeysCommentsAndWhitespace) {
  const KeyValueConfig c = KeyValueConfig::parse(
      "# header\n"
      "experiment = breakdown_1d\n"
      "  m=1000   # trailing comment\n"
      "\n"
      "grid = 0.1:0.3:0.1\r\n"
      "empirical = yes\n");
  EXPECT_EQ(c.get_string("experiment", ""), "breakdown_1d");
  EXPECT_EQ(c.get_uint("m", 0), 1000u);
  EXPECT_EQ(c.get_string("grid", ""), "0.1:0.3:0.1");
  EXPECT_TRUE(c.get_bool("empirical", false));
  EXPECT_FALSE(c.has("missing"));
  EXPECT_EQ(c.get_double("missing", 2.5), 2.5);
  EXPECT_EQ(c.entries().size(), 4u);
}

TEST(KeyValueConfig, LaterKeysOverrideEarlier) {
  KeyValueConfig c = KeyValueConfig::parse("n = 1\nn = 2\n");
  EXPECT_EQ(c.get_uint("n", 0), 2u);
  c.set("n", "7");
  EXPECT_EQ(c.get_uint("n", 0), 7u);
}

TEST(KeyValueConfig, MalformedInputRejected) {
  EXPECT_THROW(KeyValueConfig::parse("just words\n"), ConfigError);
  EXPECT_THROW(KeyValueConfig::parse(" = 3\n"), ConfigError);
  const KeyValueConfig c = KeyValueConfig::parse("a = 1.5x\nb = -3\nc = maybe\nd = 1e-3\n");
  EXPECT_THROW(c.get_double("a", 0.0), ConfigError);
  EXPECT_THROW(c.get_uint("b", 0), ConfigError);
  EXPECT_THROW(c.get_bool("c", false), ConfigError);
  EXPECT_DOUBLE_EQ(c.get_double("d", 0.0), 1e-3);
}

TEST(KeyValueConfig, LoadFromFileAndMissingFile) {
  const std::string path = ::testing::TempDir() + "robustl1_cfg_test.cfg";
  {
    std::ofstream out(path);
    out << "seed = 42\n";
  }
  EXPECT_EQ(KeyValueConfig::load(path).get_uint("seed", 0), 42u);
  std::remove(path.c_str());
  EXPECT_THROW(KeyValueConfig::load(path), ConfigError);
}

TEST(ParseGrid, RangeIncludesStopAndRounds) {
  EXPECT_EQ(parse_grid("0.1:0.2:0.02"), (std::vector<double>{0.1, 0.12, 0.14, 0.16, 0.18, 0.2}));
  EXPECT_EQ(parse_grid("0:1:0.5"), (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(parse_grid("3:3:1"), (std::vector<double>{3.0}));
  EXPECT_EQ(parse_grid("0:0.25:0.1"), (std::vector<double>{0.0, 0.1, 0.2}));
}

TEST(ParseGrid, CommaList) {
  EXPECT_EQ(parse_grid("10, 20,40 ,80"), (std::vector<double>{10, 20, 40, 80}));
  EXPECT_EQ(parse_grid("0.5"), (std::vector<double>{0.5}));
}

TEST(ParseGrid, BadGridsRejected) {
  EXPECT_THROW(parse_grid(""), ConfigError);
  EXPECT_THROW(parse_grid("0.2,0.1"), ConfigError);
  EXPECT_THROW(parse_grid("0.1,0.1"), ConfigError);
  EXPECT_THROW(parse_grid("0:1:0"), ConfigError);
  EXPECT_THROW(parse_grid("1:0:0.1"), ConfigError);
  EXPECT_THROW(parse_grid("a,b"), ConfigError);
}

TEST(SplitList, TrimsAndDropsEmpty) {
  EXPECT_EQ(split_list(" l1, torrent ,,filter "),
            (std::vector<std::string>{"l1", "torrent", "filter"}));
  EXPECT_TRUE(split_list("").empty());
  EXPECT_EQ(split_list("a:b", ':'), (std::vector<std::string>{"a", "b"}));
}
