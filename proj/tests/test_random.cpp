#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include <glogit/random.hpp>

using glogit::Philox4x32;

TEST_CASE("philox known-answer vectors") {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::bijection(B{0, 0, 0, 0}, K{0, 0}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::bijection(B{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, K{0xffffffffu, 0xffffffffu}) ==
        B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::bijection(B{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
        B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("same seed and stream replay exactly") {
  Philox4x32 a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u32() == b.next_u32());
  Philox4x32 c(42, 7), d(42, 7);
  for (int i = 0; i < 200; ++i) CHECK(c.normal() == d.normal());
}

TEST_CASE("different streams and seeds differ") {
  Philox4x32 a(42, 1), b(42, 2), c(43, 1);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u32();
    same_ab += x == b.next_u32();
    same_ac += x == c.next_u32();
  }
  CHECK(same_ab < 3);
  CHECK(same_ac < 3);
}

TEST_CASE("uniforms lie strictly inside the unit interval with the right moments") {
  Philox4x32 r(5, 0);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  const double m = s / n;
  CHECK(std::abs(m - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(s2 / n - m * m - 1.0 / 12.0) < 2e-3);
}

TEST_CASE("normal draws have unit variance") {
  Philox4x32 r(6, 0);
  const int n = 200000;
  double s = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(s4 / n - 3.0) < 0.1);
  Philox4x32 q(6, 1);
  double t = 0.0;
  for (int i = 0; i < 20000; ++i) t += q.normal(2.0, 0.3);
  CHECK(std::abs(t / 20000 - 2.0) < 0.02);
}

TEST_CASE("bounded integers are uniform and in range") {
  Philox4x32 r(8, 0);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = r.below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int c : counts) CHECK(std::abs(c - n / 7) < 5.0 * std::sqrt(n / 7.0));
  CHECK(r.below(1) == 0);
}

TEST_CASE("bernoulli frequency") {
  Philox4x32 r(9, 0);
  int hits = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) hits += r.bernoulli(0.3);
  CHECK(std::abs(hits / double(n) - 0.3) < 5.0 * std::sqrt(0.21 / n));
}

TEST_CASE("stream ids are distinct across index triples") {
  std::set<std::uint64_t> ids;
  for (std::uint64_t a = 0; a < 4; ++a)
    for (std::uint64_t b = 0; b < 30; ++b)
      for (std::uint64_t c = 0; c < 30; ++c) ids.insert(glogit::stream_id(a, b, c));
  CHECK(ids.size() == 4u * 30u * 30u);
  CHECK(glogit::stream_id(1, 2, 3) == glogit::stream_id(1, 2, 3));
}
