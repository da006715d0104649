// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "simplerc/codec.hpp"
#include "simplerc/error.hpp"
#include "support.hpp"

using namespace simplerc;
using testing_support::for_each_subset;
using testing_support::random_bytes;
using testing_support::slow_inv;
using testing_support::slow_mul;

namespace {

Buffer chunk_copy(const CodedArray& a, std::size_t stripe, ChunkId id) {
  const auto v = a.chunk(stripe, id);
  return Buffer(v.begin(), v.end());
}

std::vector<ShardView> views_of(const CodedArray& a, const std::vector<NodeIndex>& nodes) {
  std::vector<ShardView> out;
  for (auto n : nodes) out.push_back(ShardView{n, a.shard(n).bytes});
  return out;
}

}  // namespace

// Four data chunks f1..f4 under (4,2,2): x = [f1 f2]G, y = [f3 f4]G, s = x + y,
// with G = [I | C] and C computed here from its Cauchy definition.
TEST(Encode, FourTwoTwoWorkedExample) {
  const std::size_t cs = 8;
  const SrcParams p{4, 2, 2, cs};
  const Buffer file = random_bytes(4 * cs, 42);
  const auto array = encode(file, p);
  ASSERT_EQ(array.stripe_count(), 1u);

  auto f = [&](std::size_t i) { return Buffer(file.begin() + (i - 1) * cs, file.begin() + i * cs); };
  auto coded = [&](const Buffer& a, const Buffer& b, std::size_t col) {
    Buffer out(cs);
    for (std::size_t t = 0; t < cs; ++t) {
      if (col < 2) out[t] = col == 0 ? a[t] : b[t];
      else
        out[t] = slow_mul(a[t], slow_inv(static_cast<std::uint8_t>(0 ^ col))) ^
                 slow_mul(b[t], slow_inv(static_cast<std::uint8_t>(1 ^ col)));
    }
    return out;
  };
  std::vector<Buffer> xs, ys, ss;
  for (std::size_t col = 0; col < 4; ++col) {
    xs.push_back(coded(f(1), f(2), col));
    ys.push_back(coded(f(3), f(4), col));
    Buffer s(cs);
    for (std::size_t t = 0; t < cs; ++t) s[t] = xs.back()[t] ^ ys.back()[t];
    ss.push_back(s);
  }
  // node 1 = {x1, y2, s3}, node 2 = {x2, y3, s4}, node 3 = {x3, y4, s1}, node 4 = {x4, y1, s2}
  for (NodeIndex node = 1; node <= 4; ++node) {
    const auto& bytes = array.shard(node).bytes;
    const std::size_t m1 = node, m2 = node % 4 + 1, m3 = (node + 1) % 4 + 1;
    EXPECT_EQ(Buffer(bytes.begin(), bytes.begin() + cs), xs[m1 - 1]) << "node " << node;
    EXPECT_EQ(Buffer(bytes.begin() + cs, bytes.begin() + 2 * cs), ys[m2 - 1]) << "node " << node;
    EXPECT_EQ(Buffer(bytes.begin() + 2 * cs, bytes.end()), ss[m3 - 1]) << "node " << node;
  }

  // nodes 1 and 4 lost: nodes 2 and 3 hold x2, x3, y3, y4
  const std::vector<NodeIndex> survivors{2, 3};
  EXPECT_EQ(reconstruct(array, survivors, make_generator(2, 4)), file);
}

TEST(Encode, ParityIdentityAndZeroFile) {
  for (const auto& c : testing_support::small_codes(7)) {
    const SrcParams p{c.n, c.k, c.f, 5};
    const Buffer file = random_bytes(p.stripe_bytes() * 2 + 3, c.n * 131 + c.k * 7 + c.f);
    const auto a = encode(file, p);
    for (std::size_t st = 0; st < a.stripe_count(); ++st) {
      for (std::size_t m = 1; m <= p.n; ++m) {
        Buffer sum(p.chunk_size, 0);
        for (std::size_t l = 1; l <= p.f; ++l) {
          const auto v = a.chunk(st, ChunkId{l, m});
          for (std::size_t t = 0; t < sum.size(); ++t) sum[t] ^= v[t];
        }
        ASSERT_EQ(chunk_copy(a, st, ChunkId{p.f + 1, m}), sum);
      }
    }
    const auto z = encode(Buffer(p.stripe_bytes(), 0), p);
    for (const auto& s : z.shards()) ASSERT_EQ(s.bytes, Buffer(s.bytes.size(), 0));
  }
}

TEST(Encode, StorageAccountingAndPadding) {
  for (const auto& c : testing_support::small_codes(8)) {
    const SrcParams p{c.n, c.k, c.f, 3};
    for (std::size_t size : {std::size_t{0}, std::size_t{1}, p.stripe_bytes(), 3 * p.stripe_bytes() - 1}) {
      const auto a = encode(random_bytes(size, size), p);
      const std::size_t stripes = (size + p.stripe_bytes() - 1) / p.stripe_bytes();
      ASSERT_EQ(a.stripe_count(), stripes);
      ASSERT_EQ(a.file_size(), size);
      // stored / padded file == (f+1) n / (f k)
      ASSERT_EQ(a.stored_bytes() * p.f * p.k, stripes * p.stripe_bytes() * (p.f + 1) * p.n);
    }
  }
}

TEST(Encode, IsDeterministic) {
  const SrcParams p{7, 4, 3, 16};
  const Buffer file = random_bytes(5000, 1);
  const auto a = encode(file, p), b = encode(file, p);
  for (NodeIndex n = 1; n <= 7; ++n) EXPECT_EQ(a.shard(n).bytes, b.shard(n).bytes);
}

// Every (n-k)-node erasure pattern leaves a decodable set of survivors.
TEST(Reconstruct, EveryErasurePatternUpToEightNodes) {
  for (const auto& c : testing_support::small_codes(8)) {
    const SrcParams p{c.n, c.k, c.f, 4};
    const auto g = make_generator(p.k, p.n);
    const Buffer file = random_bytes(p.stripe_bytes() * 2 - 1, c.n * 1000 + c.k * 10 + c.f);
    const auto a = encode(file, p, g);
    for_each_subset(p.n, p.k, 1, [&](const std::vector<std::size_t>& nodes) {
      ASSERT_EQ(reconstruct(a, nodes, g), file) << "(" << c.n << "," << c.k << "," << c.f << ")";
    });
  }
}

TEST(Reconstruct, ExtraShardsAndSystematicPath) {
  const SrcParams p{6, 3, 2, 64};
  const auto g = make_generator(3, 6);
  const Buffer file = random_bytes(10000, 9);
  const auto a = encode(file, p, g);
  EXPECT_EQ(reconstruct(views_of(a, {1, 2, 3}), p, g, file.size()), file);
  EXPECT_EQ(reconstruct(views_of(a, {6, 5, 4, 3, 2}), p, g, file.size()), file);
}

TEST(Reconstruct, Errors) {
  const SrcParams p{5, 3, 2, 16};
  const auto g = make_generator(3, 5);
  const Buffer file = random_bytes(500, 2);
  const auto a = encode(file, p, g);
  auto kind_of = [&](std::vector<ShardView> views) {
    try {
      reconstruct(views, p, g, file.size());
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::internal;
  };
  EXPECT_EQ(kind_of(views_of(a, {1, 2})), ErrorKind::insufficient_data);
  EXPECT_EQ(kind_of(views_of(a, {1, 1, 2})), ErrorKind::parameter);
  auto truncated = views_of(a, {1, 2, 3});
  truncated[1].bytes = truncated[1].bytes.first(truncated[1].bytes.size() - 1);
  EXPECT_EQ(kind_of(truncated), ErrorKind::shape);
}

TEST(Reconstruct, OneMebibyteFileAllSubsetsOfFiveThreeTwo) {
  const SrcParams p{5, 3, 2, 4096};
  const auto g = make_generator(3, 5);
  const Buffer file = random_bytes(1 << 20, 77);
  const auto a = encode(file, p, g);
  int checked = 0;
  for_each_subset(5, 3, 1, [&](const std::vector<std::size_t>& nodes) {
    ASSERT_EQ(reconstruct(a, nodes, g), file);
    ++checked;
  });
  EXPECT_EQ(checked, 10);
}
