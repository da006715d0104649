// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "simplerc/error.hpp"
#include "simplerc/layout.hpp"
#include "support.hpp"

using namespace simplerc;

namespace {
const ChunkId x(std::size_t m) { return {1, m}; }
const ChunkId y(std::size_t m) { return {2, m}; }
const ChunkId s(std::size_t m) { return {3, m}; }
}  // namespace

TEST(Ring, WrapsBothWays) {
  for (std::size_t n : {1u, 2u, 5u, 255u}) {
    EXPECT_EQ(ring_add(n, 1, n), 1u);
    EXPECT_EQ(ring_sub(1, 1, n), n);
  }
  EXPECT_EQ(ring_add(2, 0, 5), 2u);
  EXPECT_EQ(ring_add(4, 7, 5), 1u);
  EXPECT_EQ(ring_sub(2, 7, 5), 5u);
}

TEST(Ring, AddThenSubIsIdentity) {
  for (std::size_t n = 1; n <= 12; ++n)
    for (std::size_t i = 1; i <= n; ++i)
      for (std::ptrdiff_t d = -30; d <= 30; ++d) {
        const auto r = ring_add(i, d, n);
        ASSERT_GE(r, 1u);
        ASSERT_LE(r, n);
        ASSERT_EQ(ring_sub(r, d, n), i);
      }
}

TEST(Layout, FourTwoTwoMatchesTheWorkedExample) {
  const auto lay = layout(SrcParams{4, 2, 2, 1});
  using V = std::vector<ChunkId>;
  EXPECT_EQ(lay.chunks_of(1), (V{x(1), y(2), s(3)}));
  EXPECT_EQ(lay.chunks_of(2), (V{x(2), y(3), s(4)}));
  EXPECT_EQ(lay.chunks_of(3), (V{x(3), y(4), s(1)}));
  EXPECT_EQ(lay.chunks_of(4), (V{x(4), y(1), s(2)}));
  EXPECT_EQ(lay.chunk_location(y(1)), 4u);
  EXPECT_EQ(lay.chunk_location(s(1)), 3u);
}

TEST(Layout, LabelsFollowThePartNames) {
  const SrcParams p{4, 2, 2, 1};
  EXPECT_EQ(chunk_label(p, x(1)), "x_1");
  EXPECT_EQ(chunk_label(p, y(2)), "y_2");
  EXPECT_EQ(chunk_label(p, s(3)), "s_3");
  const SrcParams q{6, 4, 3, 1};
  EXPECT_EQ(chunk_label(q, ChunkId{2, 5}), "x(2)_5");
  EXPECT_EQ(chunk_label(q, ChunkId{4, 5}), "s_5");
}

// Property: placement is a bijection, every node's subscripts are distinct,
// and node i carries part l at subscript i+(l-1) on the ring.
TEST(Layout, PlacementPropertiesForAllSmallCodes) {
  for (const auto& c : testing_support::small_codes(12)) {
    const SrcParams p{c.n, c.k, c.f, 1};
    const auto lay = layout(p);
    std::set<ChunkId> seen;
    for (NodeIndex node = 1; node <= p.n; ++node) {
      const auto& chunks = lay.chunks_of(node);
      ASSERT_EQ(chunks.size(), p.f + 1);
      std::set<std::size_t> subscripts;
      for (std::size_t slot = 0; slot < chunks.size(); ++slot) {
        const ChunkId& id = chunks[slot];
        ASSERT_EQ(id.part, slot + 1);
        ASSERT_EQ(id.subscript, ring_add(node, static_cast<std::ptrdiff_t>(slot), p.n));
        ASSERT_EQ(lay.chunk_location(id), node);
        ASSERT_EQ(lay.slot_of(id), slot);
        subscripts.insert(id.subscript);
        seen.insert(id);
      }
      ASSERT_EQ(subscripts.size(), p.f + 1) << "node " << node;
    }
    ASSERT_EQ(seen.size(), (p.f + 1) * p.n);
  }
}

TEST(Params, Validation) {
  auto kind_of = [](SrcParams p) {
    try {
      p.validate();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::internal;
  };
  EXPECT_EQ(kind_of({4, 4, 2, 1}), ErrorKind::parameter);  // k must be below n
  EXPECT_EQ(kind_of({4, 0, 2, 1}), ErrorKind::parameter);
  EXPECT_EQ(kind_of({4, 2, 0, 1}), ErrorKind::parameter);
  EXPECT_EQ(kind_of({4, 2, 4, 1}), ErrorKind::parameter);  // f + 1 > n
  EXPECT_EQ(kind_of({4, 2, 2, 0}), ErrorKind::parameter);
  EXPECT_EQ(kind_of({256, 2, 2, 1}), ErrorKind::parameter);
  EXPECT_EQ(kind_of({4, 2, 3, 1}), ErrorKind::internal);  // valid
  EXPECT_EQ(kind_of({2, 1, 1, 1}), ErrorKind::internal);
}
