#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>
#include <vector>

#include "glauber/csv.hpp"
#include "helpers.hpp"

using namespace glauber;

TEST(FormatDouble, RoundTrips) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  RngStream rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-1e3, 1e3);
    ASSERT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
}

TEST(SamplesCsv, OneRowPerPoint) {
  const std::vector<Configuration> samples{fixtures::points({0.25, 0.5}), Configuration(),
                                           fixtures::points({0.75})};
  std::ostringstream out;
  write_samples_csv(out, samples, 1);
  EXPECT_EQ(out.str(),
            "replica,particle_id,x_0\n"
            "0,0,0.25\n"
            "0,1,0.5\n"
            "2,0,0.75\n");
}

TEST(SamplesCsv, TwoDimensionalHeader) {
  std::ostringstream out;
  const std::vector<Configuration> samples{Configuration::from_points(std::vector<Point>{{0.5, 0.125}})};
  write_samples_csv(out, samples, 2);
  EXPECT_EQ(out.str(), "replica,particle_id,x_0,x_1\n0,0,0.5,0.125\n");
}

TEST(EventLogCsv, KindsAndTimes) {
  const EventLog log(fixtures::points({0.2}), 1.0,
                     {{0.3, EventKind::birth, 7, Point{0.6}},
                      {0.9, EventKind::death, 7, Point{0.6}}});
  std::ostringstream out;
  write_event_log_csv(out, log, 1);
  EXPECT_EQ(out.str(),
            "time,kind,particle_id,x_0\n"
            "0.29999999999999999,BIRTH,7,0.59999999999999998\n"
            "0.90000000000000002,DEATH,7,0.59999999999999998\n");
}
