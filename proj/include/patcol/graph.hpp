#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "patcol/error.hpp"

namespace patcol {

struct Edge {
    int u = 0;
    int v = 0;
};

/// A finite graph (optionally oriented, optionally vertex-colored) with a
/// partial edge-coloring over the universe [1..r].  Color 0 means "uncolored".
/// Vertex colors are sets, kept as bitmasks; they exist for the normal-form
/// machinery and stay empty for ordinary inputs.
///
/// Loops and parallel edges are rejected at construction.  Edge indices are
/// dense and stable.  All library operations treat graphs as values.
class ColoredGraph {
public:
    ColoredGraph() = default;
    ColoredGraph(int vertex_count, bool oriented, int colors);

    int vertex_count() const { return n_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    bool oriented() const { return oriented_; }
    int colors() const { return colors_; }

    int add_vertex();
    int add_edge(int u, int v);
    /// Index of the edge between u and v, or -1.  Direction matters when oriented.
    int find_edge(int u, int v) const;
    bool has_edge(int u, int v) const { return find_edge(u, v) >= 0; }
    const Edge& edge(int e) const { return edges_.at(check_edge(e)); }

    void set_edge_color(int e, int color);
    void clear_edge_color(int e);
    int edge_color(int e) const { return edge_color_.at(check_edge(e)); }
    bool edge_colored(int e) const { return edge_color(e) != 0; }
    const std::vector<int>& edge_coloring() const { return edge_color_; }
    void set_edge_coloring(const std::vector<int>& coloring);
    int colored_edge_count() const;
    std::vector<int> colored_edges() const;
    std::vector<int> uncolored_edges() const;
    bool totally_colored() const { return colored_edge_count() == edge_count(); }

    // Vertex-color sets.  Universe 0 means vertex colors are unused.
    int vertex_colors() const { return vertex_colors_; }
    void set_vertex_color_universe(int k);
    void add_vertex_color(int v, int c);
    void set_vertex_color_mask(int v, std::uint64_t mask);
    std::uint64_t vertex_color_mask(int v) const;
    bool any_vertex_colored() const;

    struct Arc {
        int to;
        int edge;
        bool forward; // stored direction leaves this vertex
    };
    const std::vector<Arc>& arcs(int v) const { return adj_.at(check_vertex(v)); }
    int degree(int v) const { return static_cast<int>(arcs(v).size()); }

    int check_vertex(int v) const;
    int check_edge(int e) const;

private:
    int n_ = 0;
    bool oriented_ = false;
    int colors_ = 1;
    std::vector<Edge> edges_;
    std::vector<int> edge_color_;
    int vertex_colors_ = 0;
    std::vector<std::uint64_t> vertex_color_;
    std::vector<std::vector<Arc>> adj_;
    std::map<std::pair<int, int>, int> edge_lookup_;

    std::pair<int, int> lookup_key(int u, int v) const;
};

/// Which endpoint maps to which when gluing unoriented edges; the paper leaves
/// this implicit, the artifact makes it explicit.
struct EdgeSelector {
    int edge_index = 0;
    bool flip = false;
};

ColoredGraph disjoint_union(const ColoredGraph& g, const ColoredGraph& h);

struct AmalgamResult {
    ColoredGraph graph;
    std::vector<int> g_vertex_map;
    std::vector<int> h_vertex_map;
    std::vector<int> g_edge_map;
    std::vector<int> h_edge_map;
};

/// Glue g and h along the selected edge pairs (g first in the id layout).
/// Selected edges must be pairwise disjoint within each side; a glued edge
/// inherits whichever color is present, and clashing colors are an error.
AmalgamResult amalgamate(const ColoredGraph& g, const ColoredGraph& h,
                         const std::vector<std::pair<EdgeSelector, EdgeSelector>>& pairs);

struct QuotientResult {
    ColoredGraph graph;
    std::vector<int> vertex_map; // old vertex -> class id
    std::vector<int> edge_map;   // old edge -> new edge
};

/// Merge vertices by partition class.  Merging adjacent vertices or edges of
/// conflicting colors is rejected; parallel edges collapse.
QuotientResult quotient(const ColoredGraph& g, const std::vector<int>& partition);

/// Minimum over the four endpoint pairs of vertex distance; nullopt when the
/// edges lie in different components.
std::optional<int> edge_distance(const ColoredGraph& g, int e, int f);
std::optional<int> set_distance(const ColoredGraph& g, int e, const std::vector<int>& s);

bool is_connected(const ColoredGraph& g);

struct CutStructure {
    struct Cut {
        std::vector<int> removed;  // one or two vertices
        std::vector<int> side1;    // vertex set of one component plus the cut
        std::vector<int> side2;    // remaining vertices plus the cut
    };
    std::vector<Cut> cut_vertices;
    std::vector<Cut> two_cuts;
};

/// Articulation vertices and disconnecting vertex pairs of a connected graph,
/// each with its component split.
CutStructure cut_structure(const ColoredGraph& g);

// Small builders used across the library and its tests.
ColoredGraph complete_graph(int n, int colors);
ColoredGraph cycle_graph(int n, int colors);
ColoredGraph path_graph(int n, int colors);
ColoredGraph mono_colored(ColoredGraph g, int color);

} // namespace patcol
