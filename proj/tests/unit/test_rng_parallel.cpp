#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <vector>

#include "l1qr/parallel.hpp"
#include "l1qr/rng.hpp"

namespace l1qr {
namespace {

// Zero key, zero counter known-answer vector of Philox4x32-10.
TEST(Philox, KnownAnswers) {
  Philox4x32 rng(0, 0);
  const std::uint64_t a = rng();
  const std::uint64_t b = rng();
  EXPECT_EQ(static_cast<std::uint32_t>(a), 0x6627e8d5u);
  EXPECT_EQ(static_cast<std::uint32_t>(a >> 32), 0xe169c58du);
  EXPECT_EQ(static_cast<std::uint32_t>(b), 0xbc57ac4cu);
  EXPECT_EQ(static_cast<std::uint32_t>(b >> 32), 0x9b00dbd8u);
}

TEST(Philox, StreamsDiffer) {
  Philox4x32 a(7, 0), b(7, 1), c(8, 0);
  const auto x = a();
  EXPECT_NE(x, b());
  EXPECT_NE(x, c());
}

TEST(Philox, UniformRangeAndMean) {
  Philox4x32 rng(1, 2);
  double sum = 0;
  for (int k = 0; k < 100000; ++k) {
    const double v = rng.uniform();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += v;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(DeriveSeed, DistinctTags) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < 1000; ++t) seen.insert(derive_seed(42, t));
  EXPECT_EQ(seen.size(), 1000u);
  static_assert(derive_seed(1, 2) == derive_seed(1, 2));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  for (std::size_t threads : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(257);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, RethrowsTaskError) {
  EXPECT_THROW(parallel_for(50, 3,
                            [](std::size_t i) {
                              if (i == 17) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(ParallelFor, EnvironmentDefault) {
  ::setenv(kThreadsEnvVar, "3", 1);
  EXPECT_EQ(default_thread_count(), 3u);
  ::setenv(kThreadsEnvVar, "junk", 1);
  EXPECT_GE(default_thread_count(), 1u);
  ::unsetenv(kThreadsEnvVar);
}

}  // namespace
}  // namespace l1qr
