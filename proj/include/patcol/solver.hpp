#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "patcol/family.hpp"
#include "patcol/graph.hpp"

namespace patcol {

enum class Status { SAT, UNSAT };

struct SolveStats {
    long long nodes = 0;
    long long violation_checks = 0;
};

struct ColResult {
    Status status = Status::UNSAT;
    /// Total edge coloring; present iff SAT.
    std::optional<std::vector<int>> witness;
    /// Vertex color masks; present iff SAT and the family carries vertex colors.
    std::optional<std::vector<std::uint64_t>> vertex_witness;
    SolveStats stats;

    bool sat() const { return status == Status::SAT; }
};

struct SolveOptions {
    /// Branch in edge-index order so the witness is the lexicographically
    /// least free coloring; otherwise edges are ordered by endpoint degree sum.
    bool deterministic_witness = false;
    /// Level-1 propagation: prune per-edge feasible colors via obstruction
    /// images with exactly one uncolored edge; forced edges are assigned to a
    /// fixpoint.
    bool propagate = false;
    /// Failed-literal probing on top of propagation: tentatively assign each
    /// feasible color and prune the ones whose cascade dies.  Implies the
    /// cost of a propagation pass per edge-color pair per node; pays off on
    /// gadget-sized pin queries.
    bool probe = false;
    /// Colors an edge must not take (keyed by edge index).
    std::map<int, std::set<int>> forbidden;
};

/// Decide Col(F): does g admit a total F-free coloring.  g must be uncolored.
ColResult solve_col(const ColoredGraph& g, const ObstructionFamily& family,
                    const SolveOptions& opts = {});

/// Decide Ext(F): extend g's partial coloring to a total F-free one.  A
/// precoloring that is already violated yields UNSAT.
ColResult solve_ext(const ColoredGraph& g, const ObstructionFamily& family,
                    const SolveOptions& opts = {});

/// solve_ext with extra pins on currently uncolored edges.
ColResult solve_ext_pinned(const ColoredGraph& g, const ObstructionFamily& family,
                           const std::map<int, int>& pins, const SolveOptions& opts = {});

struct Enumeration {
    std::vector<std::vector<int>> colorings; // lexicographic, edge-index-major
    bool truncated = false;                  // hit the limit; count not exact
};

/// All F-free total extensions in lexicographic order, truncated at limit.
/// Guarded to 30 uncolored edges.  Families with vertex colors are out of
/// scope here (the solver handles them; enumeration is an edge-only oracle).
Enumeration enumerate_extensions(const ColoredGraph& g, const ObstructionFamily& family, int limit,
                                 const SolveOptions& opts = {});

} // namespace patcol
