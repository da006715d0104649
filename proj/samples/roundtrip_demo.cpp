// SPDX-License-Identifier: Apache-2.0

// Encode a buffer with SRC(6,4,2), lose one node, repair it from the
// surviving chunks and decode the file from four other nodes.

#include <iostream>
#include <numeric>
#include <vector>

#include "simplerc/simplerc.hpp"

using namespace simplerc;

int main() {
  const SrcParams params{6, 4, 2, 1024};
  Buffer file(20000);
  std::iota(file.begin(), file.end(), std::uint8_t{0});

  const auto g = make_generator(params.k, params.n);
  const CodedArray array = encode(file, params, g);
  std::cout << "stripes: " << array.stripe_count() << ", stored bytes: " << array.stored_bytes() << "\n";

  const NodeIndex failed = 3;
  auto source = ShardSource::from_array(array, {failed});
  const auto rebuilt = rebuild_node(params, g, failed, source, array.stripe_count());
  const bool same = rebuilt.shard.bytes == array.shard(failed).bytes;
  std::cout << "node " << failed << " rebuilt from " << source.nodes_accessed().size() << " nodes, "
            << rebuilt.chunk_reads << " chunk reads: " << (same ? "identical" : "MISMATCH") << "\n";

  const std::vector<NodeIndex> survivors{1, 2, 5, 6};
  const Buffer decoded = reconstruct(array, survivors, g);
  std::cout << "decode from nodes 1,2,5,6: " << (decoded == file ? "identical" : "MISMATCH") << "\n";

  std::cout << plan_report(node_repair_plan(params, failed), array.stripe_count());
  return same && decoded == file ? 0 : 1;
}
