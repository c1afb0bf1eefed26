#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "patcol/graph.hpp"

namespace patcol {

/// Color-matched homomorphism search from a totally colored pattern into a
/// partially colored target.  A match maps pattern edges onto target edges
/// (direction-preserving when oriented) whose colors equal the pattern's;
/// pattern vertex-color sets must be contained in the target's.
///
/// Plain backtracking with a static connectivity-aware vertex order seeded by
/// degree; deterministic (target vertices tried ascending).
struct HomOptions {
    /// Restrict to homomorphisms whose image contains this target edge.
    std::optional<int> focus_edge;
    /// Restrict to homomorphisms whose image contains this target vertex.
    std::optional<int> focus_vertex;
    /// Allow exactly one uncolored target edge in the image; the reported
    /// completion is the color the pattern would force on it.
    bool allow_one_uncolored = false;
};

struct HomMatch {
    std::vector<int> map;   // pattern vertex -> target vertex
    int open_edge = -1;     // target edge left uncolored (allow_one_uncolored mode)
    int open_color = 0;     // color that would complete the violation
};

/// First match in deterministic order, or nullopt.
std::optional<HomMatch> find_hom(const ColoredGraph& pattern, const ColoredGraph& target,
                                 const HomOptions& opts = {});

/// Enumerate matches; return false from the callback to stop.  With a focus
/// the same map may be visited once per pattern-edge seed.
void for_each_hom(const ColoredGraph& pattern, const ColoredGraph& target, const HomOptions& opts,
                  const std::function<bool(const HomMatch&)>& visit);

/// All homomorphisms pattern -> target ignoring colors entirely (used by the
/// CSP reduction, where the pattern is an underlying graph).
void for_each_uncolored_hom(const ColoredGraph& pattern, const ColoredGraph& target,
                            const std::function<bool(const std::vector<int>&)>& visit);

} // namespace patcol
