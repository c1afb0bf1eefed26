#include "patcol/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace patcol {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::UniverseMismatch: return "UniverseMismatch";
        case ErrorCode::GluingConflict: return "GluingConflict";
        case ErrorCode::ColorClash: return "ColorClash";
        case ErrorCode::LoopCreated: return "LoopCreated";
        case ErrorCode::BadIndex: return "BadIndex";
        case ErrorCode::NotConnected: return "NotConnected";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::PinConflict: return "PinConflict";
        case ErrorCode::NotUncolorable: return "NotUncolorable";
        case ErrorCode::LemmaCheckFailed: return "LemmaCheckFailed";
        case ErrorCode::NoGroundGraph: return "NoGroundGraph";
        case ErrorCode::IncompleteInputs: return "IncompleteInputs";
        case ErrorCode::RemotenessFailed: return "RemotenessFailed";
        case ErrorCode::UnverifiedGadget: return "UnverifiedGadget";
        case ErrorCode::HypothesisUnmet: return "HypothesisUnmet";
        case ErrorCode::AlreadyOriented: return "AlreadyOriented";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::Unsupported: return "Unsupported";
    }
    return "Error";
}

ColoredGraph::ColoredGraph(int vertex_count, bool oriented, int colors)
    : n_(vertex_count), oriented_(oriented), colors_(colors), adj_(vertex_count) {
    if (vertex_count < 0) fail(ErrorCode::BadIndex, "negative vertex count");
    if (colors < 1) fail(ErrorCode::UniverseMismatch, "color universe must be positive");
}

int ColoredGraph::check_vertex(int v) const {
    if (v < 0 || v >= n_) fail(ErrorCode::BadIndex, "vertex " + std::to_string(v) + " out of range");
    return v;
}

int ColoredGraph::check_edge(int e) const {
    if (e < 0 || e >= edge_count()) fail(ErrorCode::BadIndex, "edge " + std::to_string(e) + " out of range");
    return e;
}

std::pair<int, int> ColoredGraph::lookup_key(int u, int v) const {
    if (oriented_) return {u, v};
    return {std::min(u, v), std::max(u, v)};
}

int ColoredGraph::add_vertex() {
    adj_.emplace_back();
    if (vertex_colors_ > 0) vertex_color_.push_back(0);
    return n_++;
}

int ColoredGraph::add_edge(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) fail(ErrorCode::LoopCreated, "loop at vertex " + std::to_string(u));
    if (edge_lookup_.count(lookup_key(u, v)))
        fail(ErrorCode::GluingConflict, "parallel edge " + std::to_string(u) + "-" + std::to_string(v));
    int idx = edge_count();
    edges_.push_back({u, v});
    edge_color_.push_back(0);
    adj_[u].push_back({v, idx, true});
    adj_[v].push_back({u, idx, false});
    edge_lookup_[lookup_key(u, v)] = idx;
    return idx;
}

int ColoredGraph::find_edge(int u, int v) const {
    if (u < 0 || v < 0 || u >= n_ || v >= n_) return -1;
    auto it = edge_lookup_.find(lookup_key(u, v));
    return it == edge_lookup_.end() ? -1 : it->second;
}

void ColoredGraph::set_edge_color(int e, int color) {
    check_edge(e);
    if (color < 1 || color > colors_)
        fail(ErrorCode::UniverseMismatch, "color " + std::to_string(color) + " outside [1.." + std::to_string(colors_) + "]");
    edge_color_[e] = color;
}

void ColoredGraph::clear_edge_color(int e) { edge_color_[check_edge(e)] = 0; }

void ColoredGraph::set_edge_coloring(const std::vector<int>& coloring) {
    if (static_cast<int>(coloring.size()) != edge_count())
        fail(ErrorCode::BadIndex, "coloring size mismatch");
    for (int e = 0; e < edge_count(); ++e) {
        if (coloring[e] == 0)
            edge_color_[e] = 0;
        else
            set_edge_color(e, coloring[e]);
    }
}

int ColoredGraph::colored_edge_count() const {
    return static_cast<int>(std::count_if(edge_color_.begin(), edge_color_.end(), [](int c) { return c != 0; }));
}

std::vector<int> ColoredGraph::colored_edges() const {
    std::vector<int> out;
    for (int e = 0; e < edge_count(); ++e)
        if (edge_color_[e] != 0) out.push_back(e);
    return out;
}

std::vector<int> ColoredGraph::uncolored_edges() const {
    std::vector<int> out;
    for (int e = 0; e < edge_count(); ++e)
        if (edge_color_[e] == 0) out.push_back(e);
    return out;
}

void ColoredGraph::set_vertex_color_universe(int k) {
    if (k < 0 || k > 64) fail(ErrorCode::UniverseMismatch, "vertex color universe must be in [0..64]");
    vertex_colors_ = k;
    vertex_color_.assign(n_, 0);
}

void ColoredGraph::add_vertex_color(int v, int c) {
    check_vertex(v);
    if (c < 1 || c > vertex_colors_) fail(ErrorCode::UniverseMismatch, "vertex color out of range");
    vertex_color_[v] |= (std::uint64_t{1} << (c - 1));
}

void ColoredGraph::set_vertex_color_mask(int v, std::uint64_t mask) {
    check_vertex(v);
    if (vertex_colors_ == 0 && mask != 0) fail(ErrorCode::UniverseMismatch, "vertex colors unused");
    if (vertex_colors_ < 64 && (mask >> vertex_colors_) != 0)
        fail(ErrorCode::UniverseMismatch, "vertex color mask out of range");
    vertex_color_[v] = mask;
}

std::uint64_t ColoredGraph::vertex_color_mask(int v) const {
    check_vertex(v);
    if (vertex_colors_ == 0) return 0;
    return vertex_color_[v];
}

bool ColoredGraph::any_vertex_colored() const {
    for (int v = 0; v < n_; ++v)
        if (vertex_color_mask(v) != 0) return true;
    return false;
}

ColoredGraph disjoint_union(const ColoredGraph& g, const ColoredGraph& h) {
    if (g.colors() != h.colors() || g.oriented() != h.oriented() || g.vertex_colors() != h.vertex_colors())
        fail(ErrorCode::UniverseMismatch, "disjoint_union: universes differ");
    ColoredGraph out(g.vertex_count() + h.vertex_count(), g.oriented(), g.colors());
    if (g.vertex_colors() > 0) out.set_vertex_color_universe(g.vertex_colors());
    int shift = g.vertex_count();
    for (int e = 0; e < g.edge_count(); ++e) {
        int idx = out.add_edge(g.edge(e).u, g.edge(e).v);
        if (g.edge_colored(e)) out.set_edge_color(idx, g.edge_color(e));
    }
    for (int e = 0; e < h.edge_count(); ++e) {
        int idx = out.add_edge(h.edge(e).u + shift, h.edge(e).v + shift);
        if (h.edge_colored(e)) out.set_edge_color(idx, h.edge_color(e));
    }
    if (g.vertex_colors() > 0) {
        for (int v = 0; v < g.vertex_count(); ++v) out.set_vertex_color_mask(v, g.vertex_color_mask(v));
        for (int v = 0; v < h.vertex_count(); ++v) out.set_vertex_color_mask(v + shift, h.vertex_color_mask(v));
    }
    return out;
}

AmalgamResult amalgamate(const ColoredGraph& g, const ColoredGraph& h,
                         const std::vector<std::pair<EdgeSelector, EdgeSelector>>& pairs) {
    if (g.colors() != h.colors() || g.oriented() != h.oriented())
        fail(ErrorCode::UniverseMismatch, "amalgamate: universes differ");
    if (g.vertex_colors() != h.vertex_colors())
        fail(ErrorCode::UniverseMismatch, "amalgamate: vertex color universes differ");

    // Selected edges must be pairwise vertex-disjoint within each side.
    auto check_disjoint = [&](const ColoredGraph& side, bool take_g) {
        std::vector<int> used;
        for (const auto& pr : pairs) {
            const EdgeSelector& sel = take_g ? pr.first : pr.second;
            Edge e = side.edge(sel.edge_index);
            for (int x : {e.u, e.v}) {
                if (std::find(used.begin(), used.end(), x) != used.end())
                    fail(ErrorCode::GluingConflict, "selected edges share vertex " + std::to_string(x));
                used.push_back(x);
            }
        }
    };
    check_disjoint(g, true);
    check_disjoint(h, false);

    AmalgamResult res;
    res.g_vertex_map.resize(g.vertex_count(), -1);
    res.h_vertex_map.resize(h.vertex_count(), -1);
    res.g_edge_map.resize(g.edge_count(), -1);
    res.h_edge_map.resize(h.edge_count(), -1);

    // h endpoints that land on g vertices.
    for (const auto& [gs, hs] : pairs) {
        Edge ge = g.edge(gs.edge_index);
        Edge he = h.edge(hs.edge_index);
        int gu = ge.u, gv = ge.v;
        int hu = he.u, hv = he.v;
        bool flip = g.oriented() ? false : (gs.flip != hs.flip);
        if (flip) std::swap(hu, hv);
        res.h_vertex_map[hu] = gu;
        res.h_vertex_map[hv] = gv;
        if (g.edge_colored(gs.edge_index) && h.edge_colored(hs.edge_index) &&
            g.edge_color(gs.edge_index) != h.edge_color(hs.edge_index))
            fail(ErrorCode::ColorClash, "glued edges carry different colors");
    }

    int next = g.vertex_count();
    for (int v = 0; v < h.vertex_count(); ++v)
        if (res.h_vertex_map[v] < 0) res.h_vertex_map[v] = next++;

    ColoredGraph out(next, g.oriented(), g.colors());
    if (g.vertex_colors() > 0) out.set_vertex_color_universe(g.vertex_colors());
    for (int v = 0; v < g.vertex_count(); ++v) res.g_vertex_map[v] = v;

    for (int e = 0; e < g.edge_count(); ++e) {
        int idx = out.add_edge(g.edge(e).u, g.edge(e).v);
        res.g_edge_map[e] = idx;
        if (g.edge_colored(e)) out.set_edge_color(idx, g.edge_color(e));
    }
    for (int e = 0; e < h.edge_count(); ++e) {
        int u = res.h_vertex_map[h.edge(e).u];
        int v = res.h_vertex_map[h.edge(e).v];
        int existing = out.find_edge(u, v);
        if (existing >= 0) {
            // Parallel images collapse; colors must agree.
            res.h_edge_map[e] = existing;
            if (h.edge_colored(e)) {
                if (out.edge_colored(existing) && out.edge_color(existing) != h.edge_color(e))
                    fail(ErrorCode::ColorClash, "collapsed edges carry different colors");
                out.set_edge_color(existing, h.edge_color(e));
            }
        } else {
            int idx = out.add_edge(u, v);
            res.h_edge_map[e] = idx;
            if (h.edge_colored(e)) out.set_edge_color(idx, h.edge_color(e));
        }
    }
    if (g.vertex_colors() > 0) {
        for (int v = 0; v < g.vertex_count(); ++v)
            out.set_vertex_color_mask(v, g.vertex_color_mask(v));
        for (int v = 0; v < h.vertex_count(); ++v) {
            int w = res.h_vertex_map[v];
            out.set_vertex_color_mask(w, out.vertex_color_mask(w) | h.vertex_color_mask(v));
        }
    }
    res.graph = std::move(out);
    return res;
}

QuotientResult quotient(const ColoredGraph& g, const std::vector<int>& partition) {
    if (static_cast<int>(partition.size()) != g.vertex_count())
        fail(ErrorCode::BadIndex, "partition size mismatch");

    // Renumber classes by first occurrence.
    std::map<int, int> relabel;
    std::vector<int> cls(g.vertex_count());
    for (int v = 0; v < g.vertex_count(); ++v) {
        auto [it, fresh] = relabel.try_emplace(partition[v], static_cast<int>(relabel.size()));
        cls[v] = it->second;
        (void)fresh;
    }
    int classes = static_cast<int>(relabel.size());

    ColoredGraph out(classes, g.oriented(), g.colors());
    if (g.vertex_colors() > 0) out.set_vertex_color_universe(g.vertex_colors());
    QuotientResult res;
    res.vertex_map = cls;
    res.edge_map.resize(g.edge_count(), -1);

    for (int e = 0; e < g.edge_count(); ++e) {
        int u = cls[g.edge(e).u];
        int v = cls[g.edge(e).v];
        if (u == v) fail(ErrorCode::LoopCreated, "partition merges adjacent vertices");
        int existing = out.find_edge(u, v);
        int idx = existing >= 0 ? existing : out.add_edge(u, v);
        res.edge_map[e] = idx;
        if (g.edge_colored(e)) {
            if (out.edge_colored(idx) && out.edge_color(idx) != g.edge_color(e))
                fail(ErrorCode::ColorClash, "merged edges carry different colors");
            out.set_edge_color(idx, g.edge_color(e));
        }
    }
    if (g.vertex_colors() > 0)
        for (int v = 0; v < g.vertex_count(); ++v)
            out.set_vertex_color_mask(cls[v], out.vertex_color_mask(cls[v]) | g.vertex_color_mask(v));
    res.graph = std::move(out);
    return res;
}

namespace {

std::vector<int> bfs_from(const ColoredGraph& g, std::vector<int> sources) {
    std::vector<int> dist(g.vertex_count(), -1);
    std::deque<int> queue;
    for (int s : sources) {
        dist[s] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (const auto& arc : g.arcs(v)) {
            if (dist[arc.to] < 0) {
                dist[arc.to] = dist[v] + 1;
                queue.push_back(arc.to);
            }
        }
    }
    return dist;
}

} // namespace

std::optional<int> edge_distance(const ColoredGraph& g, int e, int f) {
    Edge a = g.edge(e);
    Edge b = g.edge(f);
    auto dist = bfs_from(g, {a.u, a.v});
    int best = -1;
    for (int x : {b.u, b.v}) {
        if (dist[x] >= 0 && (best < 0 || dist[x] < best)) best = dist[x];
    }
    if (best < 0) return std::nullopt;
    return best;
}

std::optional<int> set_distance(const ColoredGraph& g, int e, const std::vector<int>& s) {
    if (s.empty()) fail(ErrorCode::BadIndex, "set_distance over empty set");
    Edge a = g.edge(e);
    auto dist = bfs_from(g, {a.u, a.v});
    int best = -1;
    for (int f : s) {
        Edge b = g.edge(f);
        for (int x : {b.u, b.v})
            if (dist[x] >= 0 && (best < 0 || dist[x] < best)) best = dist[x];
    }
    if (best < 0) return std::nullopt;
    return best;
}

bool is_connected(const ColoredGraph& g) {
    if (g.vertex_count() <= 1) return true;
    auto dist = bfs_from(g, {0});
    return std::all_of(dist.begin(), dist.end(), [](int d) { return d >= 0; });
}

namespace {

// Components of g with the given vertices removed; returns class id per vertex
// (-1 for removed) and the number of components.
std::pair<std::vector<int>, int> components_without(const ColoredGraph& g, const std::vector<int>& removed) {
    std::vector<int> comp(g.vertex_count(), -1);
    std::vector<bool> skip(g.vertex_count(), false);
    for (int v : removed) skip[v] = true;
    int count = 0;
    for (int s = 0; s < g.vertex_count(); ++s) {
        if (skip[s] || comp[s] >= 0) continue;
        std::deque<int> queue{s};
        comp[s] = count;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (const auto& arc : g.arcs(v)) {
                if (!skip[arc.to] && comp[arc.to] < 0) {
                    comp[arc.to] = count;
                    queue.push_back(arc.to);
                }
            }
        }
        ++count;
    }
    return {comp, count};
}

CutStructure::Cut make_cut(const std::vector<int>& removed, const std::vector<int>& comp) {
    // side1 = component containing the smallest remaining vertex, side2 = rest.
    CutStructure::Cut cut;
    cut.removed = removed;
    int first_comp = -1;
    for (size_t v = 0; v < comp.size(); ++v) {
        if (comp[v] >= 0) {
            first_comp = comp[v];
            break;
        }
    }
    for (size_t v = 0; v < comp.size(); ++v) {
        if (comp[v] < 0) continue;
        if (comp[v] == first_comp)
            cut.side1.push_back(static_cast<int>(v));
        else
            cut.side2.push_back(static_cast<int>(v));
    }
    for (int r : removed) {
        cut.side1.push_back(r);
        cut.side2.push_back(r);
    }
    std::sort(cut.side1.begin(), cut.side1.end());
    std::sort(cut.side2.begin(), cut.side2.end());
    return cut;
}

} // namespace

CutStructure cut_structure(const ColoredGraph& g) {
    if (!is_connected(g)) fail(ErrorCode::NotConnected, "cut_structure requires a connected graph");
    CutStructure out;
    for (int v = 0; v < g.vertex_count(); ++v) {
        auto [comp, count] = components_without(g, {v});
        if (count >= 2) out.cut_vertices.push_back(make_cut({v}, comp));
    }
    for (int v = 0; v < g.vertex_count(); ++v) {
        for (int w = v + 1; w < g.vertex_count(); ++w) {
            auto [comp, count] = components_without(g, {v, w});
            if (count >= 2) out.two_cuts.push_back(make_cut({v, w}, comp));
        }
    }
    return out;
}

ColoredGraph complete_graph(int n, int colors) {
    ColoredGraph g(n, false, colors);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
}

ColoredGraph cycle_graph(int n, int colors) {
    ColoredGraph g(n, false, colors);
    for (int v = 0; v < n; ++v) g.add_edge(v, (v + 1) % n);
    return g;
}

ColoredGraph path_graph(int n, int colors) {
    ColoredGraph g(n, false, colors);
    for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
    return g;
}

ColoredGraph mono_colored(ColoredGraph g, int color) {
    for (int e = 0; e < g.edge_count(); ++e) g.set_edge_color(e, color);
    return g;
}

} // namespace patcol
