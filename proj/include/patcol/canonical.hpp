#pragma once

#include <string>
#include <vector>

#include "patcol/graph.hpp"

namespace patcol {

/// Canonical encoding of a colored graph under vertex relabeling: the
/// lexicographically least serialization over all permutations.  Exhaustive,
/// guarded to small graphs (the obstructions this library deduplicates).
std::string canonical_key(const ColoredGraph& g);

/// The relabeled graph realizing the canonical encoding; its edge order is
/// the stable edge order used by relations built over the shape.
ColoredGraph canonical_form(const ColoredGraph& g);

bool is_isomorphic(const ColoredGraph& a, const ColoredGraph& b);

/// Vertex permutations fixing g (colors included).
std::vector<std::vector<int>> vertex_automorphisms(const ColoredGraph& g);

/// The permutations the vertex automorphisms induce on edge indices,
/// deduplicated.
std::vector<std::vector<int>> edge_automorphisms(const ColoredGraph& g);

} // namespace patcol
