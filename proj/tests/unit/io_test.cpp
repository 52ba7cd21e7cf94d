// Copyright 2026 The chaosrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "chaosrc/csv.hpp"
#include "chaosrc/series_io.hpp"

#include "gen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

namespace chaosrc {
namespace {

TEST(Csv, DoublesRoundTripExactly) {
  testing::for_all(5000, 1, [](testing::Gen& g, std::size_t) {
    const double v = g.any_double();
    const double back = csv::parse_double(csv::format_double(v));
    ASSERT_EQ(std::signbit(back), std::signbit(v));
    ASSERT_EQ(back, v) << csv::format_double(v);
  });
}

TEST(Csv, SpecialValues) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(csv::format_double(inf), "inf");
  EXPECT_EQ(csv::format_double(-inf), "-inf");
  EXPECT_EQ(csv::format_double(std::nan("")), "nan");
  EXPECT_EQ(csv::parse_double("inf"), inf);
  EXPECT_EQ(csv::parse_double("-inf"), -inf);
  EXPECT_TRUE(std::isnan(csv::parse_double("nan")));
  EXPECT_THROW(csv::parse_double("1.5x"), std::invalid_argument);
  EXPECT_THROW(csv::parse_double(""), std::invalid_argument);
}

TEST(Csv, Tables) {
  std::istringstream in("a,b\n1,2\n\n3,4\n");
  const auto t = csv::read_table(in);
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[1][t.column("b")], "4");
  EXPECT_THROW((void)t.column("c"), std::runtime_error);
  std::istringstream ragged("a,b\n1\n");
  EXPECT_THROW(csv::read_table(ragged), std::runtime_error);
}

TEST(SeriesCsv, RoundTripIsExact) {
  testing::for_all(20, 2, [](testing::Gen& g, std::size_t) {
    const double si = g.uniform(1e-3, 0.5);
    const auto s = g.walk(g.size(2, 300), si, g.uniform(1e-3, 1e3));
    std::istringstream in(series_to_csv(s));
    const auto back = read_series_csv(in);
    ASSERT_EQ(back.si(), s.si());
    ASSERT_EQ(back.t0(), 0.0);
    ASSERT_EQ(back.points(), s.points());
  });
}

TEST(SeriesCsv, HeaderAndOffsetSeries) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 1000; ++i) pts.emplace_back(i, -i, 0.5 * i);
  const SampledSeries s(0.02, 20.0, pts);
  const std::string text = series_to_csv(s);
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,chi,psi,omega");
  std::istringstream in(text);
  const auto back = read_series_csv(in);
  EXPECT_NEAR(back.si(), 0.02, 1e-15);
  EXPECT_EQ(back.t0(), 20.0);
}

TEST(SeriesCsv, RejectsBadInput) {
  std::istringstream one("t,chi,psi,omega\n0,1,2,3\n");
  EXPECT_THROW(read_series_csv(one), std::runtime_error);
  std::istringstream uneven("t,chi,psi,omega\n0,1,2,3\n0.1,1,2,3\n0.3,1,2,3\n");
  EXPECT_THROW(read_series_csv(uneven), std::runtime_error);
  std::istringstream back("t,chi,psi,omega\n0,1,2,3\n-0.1,1,2,3\n");
  EXPECT_THROW(read_series_csv(back), std::runtime_error);
  std::istringstream missing("t,x,y,z\n0,1,2,3\n0.1,1,2,3\n");
  EXPECT_THROW(read_series_csv(missing), std::runtime_error);
}

}  // namespace
}  // namespace chaosrc
