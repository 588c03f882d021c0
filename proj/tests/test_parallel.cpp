#include <gtest/gtest.h>

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "wfdelay/parallel.hpp"

using namespace wfdelay;

TEST(Parallel, ThreadCountFromEnvironment) {
  setenv("WFDELAY_THREADS", "3", 1);
  EXPECT_EQ(thread_count(), 3);
  setenv("WFDELAY_THREADS", "zero", 1);
  EXPECT_GE(thread_count(), 1);
  setenv("WFDELAY_THREADS", "-2", 1);
  EXPECT_GE(thread_count(), 1);
  unsetenv("WFDELAY_THREADS");
  EXPECT_GE(thread_count(), 1);
}

TEST(Parallel, EveryIndexOnce) {
  setenv("WFDELAY_THREADS", "8", 1);
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
  unsetenv("WFDELAY_THREADS");
  for (int h : hits) EXPECT_EQ(h, 1);
  parallel_for(0, [](std::size_t) { FAIL(); });
}

TEST(Parallel, LowestFailingIndexWins) {
  setenv("WFDELAY_THREADS", "8", 1);
  try {
    parallel_for(200, [](std::size_t i) {
      if (i % 7 == 3) throw std::runtime_error(std::to_string(i));
    });
    FAIL() << "expected a throw";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "3");
  }
  unsetenv("WFDELAY_THREADS");
}
