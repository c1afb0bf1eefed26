#include "patcol/gadgets.hpp"

#include <algorithm>
#include <deque>
#include <future>
#include <numeric>

#include "patcol/canonical.hpp"
#include "patcol/hom.hpp"

namespace patcol {

const char* gadget_kind_name(GadgetKind k) {
    switch (k) {
        case GadgetKind::BaseH: return "base_h";
        case GadgetKind::Ci: return "c_i";
        case GadgetKind::DNegI: return "d_neg_i";
        case GadgetKind::Determiner: return "determiner";
        case GadgetKind::RemoteDeterminer: return "remote_determiner";
        case GadgetKind::Hij: return "h_ij";
        case GadgetKind::GijChain: return "g_ij_chain";
        case GadgetKind::Equality: return "equality";
    }
    return "unknown";
}

std::optional<GadgetKind> gadget_kind_from_name(const std::string& name) {
    for (GadgetKind k : {GadgetKind::BaseH, GadgetKind::Ci, GadgetKind::DNegI, GadgetKind::Determiner,
                         GadgetKind::RemoteDeterminer, GadgetKind::Hij, GadgetKind::GijChain,
                         GadgetKind::Equality}) {
        if (name == gadget_kind_name(k)) return k;
    }
    return std::nullopt;
}

int Gadget::distinguished_edge(const std::string& label) const {
    auto it = distinguished.find(label);
    if (it == distinguished.end()) fail(ErrorCode::BadIndex, "no distinguished edge " + label);
    return it->second;
}

int max_obstruction_vertices(const ObstructionFamily& family) {
    int d = 0;
    for (const ColoredGraph& f : family.obstructions) d = std::max(d, f.vertex_count());
    return d;
}

namespace {

SolveOptions verify_options() {
    SolveOptions opts;
    opts.propagate = true;
    opts.probe = true;
    return opts;
}

bool pin_sat(const ColoredGraph& g, const ObstructionFamily& family, const std::map<int, int>& pins,
             SolveStats* stats = nullptr) {
    auto res = solve_ext_pinned(g, family, pins, verify_options());
    if (stats) {
        stats->nodes += res.stats.nodes;
        stats->violation_checks += res.stats.violation_checks;
    }
    return res.sat();
}

/// Underlying shape tests for ground-graph selection.
bool is_odd_cycle(const ColoredGraph& g) {
    int n = g.vertex_count();
    if (n < 3 || n % 2 == 0 || g.edge_count() != n) return false;
    for (int v = 0; v < n; ++v)
        if (g.degree(v) != 2) return false;
    return is_connected(g);
}

bool is_clique(const ColoredGraph& g) {
    int n = g.vertex_count();
    return g.edge_count() == n * (n - 1) / 2 && n >= 2;
}

bool is_mono(const ColoredGraph& g, int color) {
    for (int e = 0; e < g.edge_count(); ++e)
        if (g.edge_color(e) != color) return false;
    return g.edge_count() > 0;
}

/// Longest mono-i odd cycle in the family, else the smallest mono-i clique.
/// Returns the fresh uncolored ground graph.
std::optional<ColoredGraph> ground_graph(const ObstructionFamily& family, int i) {
    int best_cycle = 0, best_clique = 0;
    for (const ColoredGraph& f : family.obstructions) {
        if (!is_mono(f, i)) continue;
        if (is_odd_cycle(f)) best_cycle = std::max(best_cycle, f.vertex_count());
        else if (is_clique(f)) {
            if (best_clique == 0 || f.vertex_count() < best_clique) best_clique = f.vertex_count();
        }
    }
    if (best_cycle >= 3) return cycle_graph(best_cycle, family.colors);
    if (best_clique >= 2) return complete_graph(best_clique, family.colors);
    return std::nullopt;
}

ColoredGraph remove_edge(const ColoredGraph& g, int victim) {
    ColoredGraph out(g.vertex_count(), g.oriented(), g.colors());
    if (g.vertex_colors() > 0) out.set_vertex_color_universe(g.vertex_colors());
    for (int e = 0; e < g.edge_count(); ++e) {
        if (e == victim) continue;
        int idx = out.add_edge(g.edge(e).u, g.edge(e).v);
        if (g.edge_colored(e)) out.set_edge_color(idx, g.edge_color(e));
    }
    if (g.vertex_colors() > 0)
        for (int v = 0; v < g.vertex_count(); ++v) out.set_vertex_color_mask(v, g.vertex_color_mask(v));
    return out;
}

ColoredGraph drop_isolated(const ColoredGraph& g) {
    std::vector<int> keep;
    for (int v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) > 0) keep.push_back(v);
    if (static_cast<int>(keep.size()) == g.vertex_count()) return g;
    std::vector<int> where(g.vertex_count(), -1);
    for (size_t i = 0; i < keep.size(); ++i) where[keep[i]] = static_cast<int>(i);
    ColoredGraph out(static_cast<int>(keep.size()), g.oriented(), g.colors());
    for (int e = 0; e < g.edge_count(); ++e) {
        int idx = out.add_edge(where[g.edge(e).u], where[g.edge(e).v]);
        if (g.edge_colored(e)) out.set_edge_color(idx, g.edge_color(e));
    }
    return out;
}

/// The endpoint of `edge` that touches no colored edge, if any.
std::optional<int> uncovered_endpoint(const ColoredGraph& g, int edge) {
    for (int v : {g.edge(edge).u, g.edge(edge).v}) {
        bool covered = false;
        for (const auto& arc : g.arcs(v))
            if (g.edge_colored(arc.edge)) covered = true;
        if (!covered) return v;
    }
    return std::nullopt;
}

/// Flip value so that gluing maps `h_vertex` (an endpoint of h_edge) onto
/// `g_vertex` (an endpoint of g_edge).
bool flip_for(const ColoredGraph& g, int g_edge, int g_vertex, const ColoredGraph& h, int h_edge,
              int h_vertex) {
    bool g_is_u = g.edge(g_edge).u == g_vertex;
    bool h_is_u = h.edge(h_edge).u == h_vertex;
    return g_is_u != h_is_u;
}

SafetyCertificate::Node mono_base_leaf(const ColoredGraph& base, int color,
                                       std::vector<int> gadget_safe) {
    SafetyCertificate::Node node;
    node.kind = SafetyCertificate::Node::Kind::MonoBase;
    node.base = base;
    node.mono_color = color;
    for (int e = 0; e < base.edge_count(); ++e)
        if (!base.edge_colored(e)) node.base_safe_edges.push_back(e);
    node.safe_edges = std::move(gadget_safe);
    return node;
}

} // namespace

std::vector<std::string> check_certificate(const SafetyCertificate& cert,
                                           const ObstructionFamily& family) {
    std::vector<std::string> problems;
    if (cert.nodes.empty()) {
        problems.push_back("empty certificate");
        return problems;
    }
    for (size_t i = 0; i < cert.nodes.size(); ++i) {
        const auto& node = cert.nodes[i];
        std::string tag = "node " + std::to_string(i);
        switch (node.kind) {
            case SafetyCertificate::Node::Kind::MonoBase: {
                if (node.base_safe_edges.empty()) problems.push_back(tag + ": no uncolored edge");
                for (int e = 0; e < node.base.edge_count(); ++e)
                    if (node.base.edge_colored(e) && node.base.edge_color(e) != node.mono_color)
                        problems.push_back(tag + ": leaf coloring is not monochromatic");
                auto ground = ground_graph(family, node.mono_color);
                bool shape_ok = false;
                if (is_clique(node.base)) {
                    // Any clique whose mono coloring is forbidden qualifies.
                    for (const ColoredGraph& f : family.obstructions)
                        if (is_mono(f, node.mono_color) && is_clique(f) &&
                            f.vertex_count() == node.base.vertex_count())
                            shape_ok = true;
                } else if (ground && is_odd_cycle(node.base)) {
                    shape_ok = node.base.vertex_count() == ground->vertex_count() && is_odd_cycle(*ground);
                }
                if (!shape_ok) problems.push_back(tag + ": leaf is not a family ground shape");
                break;
            }
            case SafetyCertificate::Node::Kind::FreeEdge:
                break;
            case SafetyCertificate::Node::Kind::DNegLemma:
                if (node.safe_edges.empty()) problems.push_back(tag + ": lemma leaf declares no safe edge");
                break;
            case SafetyCertificate::Node::Kind::Amalgam:
            case SafetyCertificate::Node::Kind::RemoteStep: {
                if (node.left < 0 || node.left >= static_cast<int>(i) ||
                    (node.right >= 0 && node.right >= static_cast<int>(i)))
                    problems.push_back(tag + ": child indices out of order");
                if (node.safe_edges.empty()) problems.push_back(tag + ": no safe edges declared");
                break;
            }
        }
    }
    return problems;
}

ColoredGraph minimize_uncolorable(const ColoredGraph& witness, const ObstructionFamily& family) {
    if (witness.colored_edge_count() != 0)
        fail(ErrorCode::NotUncolorable, "witness must be uncolored");
    if (solve_col(witness, family, verify_options()).sat())
        fail(ErrorCode::NotUncolorable, "witness admits a free coloring");
    ColoredGraph current = witness;
    int e = 0;
    while (e < current.edge_count()) {
        ColoredGraph candidate = remove_edge(current, e);
        if (!solve_col(candidate, family, verify_options()).sat())
            current = std::move(candidate); // keep index: edges shifted down
        else
            ++e;
    }
    return drop_isolated(current);
}

Gadget build_base_H(const ColoredGraph& witness, const ObstructionFamily& family) {
    ColoredGraph minimal = minimize_uncolorable(witness, family);
    if (minimal.edge_count() == 0) fail(ErrorCode::LemmaCheckFailed, "minimal witness has no edges");
    Edge removed = minimal.edge(0);
    ColoredGraph h = remove_edge(minimal, 0);
    int x = std::min(removed.u, removed.v);

    if (!solve_col(h, family, verify_options()).sat())
        fail(ErrorCode::LemmaCheckFailed, "H is not colorable after edge removal");
    for (int i = 1; i <= family.colors; ++i) {
        SolveOptions opts = verify_options();
        for (const auto& arc : h.arcs(x)) opts.forbidden[arc.edge].insert(i);
        if (solve_col(h, family, opts).sat())
            fail(ErrorCode::LemmaCheckFailed,
                 "color " + std::to_string(i) + " is avoidable at x; witness outside the lemma's reach");
    }

    Gadget g;
    g.kind = GadgetKind::BaseH;
    g.graph = std::move(h);
    g.marked_vertices["x"] = x;
    g.family_fingerprint = family_fingerprint(family);
    g.verified = true;
    return g;
}

Gadget build_C_i(const Gadget& base, int i, const ObstructionFamily& family) {
    if (base.kind != GadgetKind::BaseH) fail(ErrorCode::IncompleteInputs, "build_C_i expects a base gadget");
    int x = base.marked_vertices.at("x");
    ColoredGraph work = base.graph;

    std::vector<int> x_edges;
    for (const auto& arc : work.arcs(x)) x_edges.push_back(arc.edge);
    std::sort(x_edges.begin(), x_edges.end());

    for (int e : x_edges) {
        for (int c = 1; c <= family.colors; ++c) {
            if (c == i) continue;
            work.set_edge_color(e, c);
            if (solve_ext(work, family, verify_options()).sat()) break;
            work.clear_edge_color(e);
        }
    }
    int f = -1;
    for (int e : x_edges)
        if (!work.edge_colored(e)) {
            f = e;
            break;
        }
    if (f < 0)
        fail(ErrorCode::LemmaCheckFailed, "all x-incident edges got colored away from " + std::to_string(i));

    if (!solve_ext(work, family, verify_options()).sat())
        fail(ErrorCode::LemmaCheckFailed, "partial coloring lost extendability");
    for (int j = 1; j <= family.colors; ++j) {
        if (j == i) continue;
        if (pin_sat(work, family, {{f, j}}))
            fail(ErrorCode::LemmaCheckFailed, "distinguished edge not forced to " + std::to_string(i));
    }

    Gadget g;
    g.kind = GadgetKind::Ci;
    g.graph = std::move(work);
    g.distinguished["f^" + std::to_string(i)] = f;
    g.marked_vertices["x"] = x;
    g.color = i;
    g.family_fingerprint = family_fingerprint(family);
    g.verified = true;
    return g;
}

Gadget build_D_neg_i(const Gadget& ci, int i, const ObstructionFamily& family) {
    if (ci.kind != GadgetKind::Ci || ci.color != i)
        fail(ErrorCode::IncompleteInputs, "build_D_neg_i expects C^i for the same color");
    auto ground = ground_graph(family, i);
    if (!ground) fail(ErrorCode::NoGroundGraph, "no monochromatic cycle or clique of color " + std::to_string(i));

    // Ground layout: y = 0, z = 1, distinguished edge is edge 0 = {0,1}.
    ColoredGraph current = *ground;
    const int y = 0;
    const int f_edge = 0;

    int ci_f = ci.distinguished_edge("f^" + std::to_string(i));
    auto ci_uncovered = uncovered_endpoint(ci.graph, ci_f);
    if (!ci_uncovered) fail(ErrorCode::LemmaCheckFailed, "C^i has no uncovered endpoint");

    // Attach a C^i copy to every ground edge at y except the distinguished
    // one; the glued edge stays uncolored and is forced by the copy.
    std::vector<int> attach;
    for (const auto& arc : ground->arcs(y))
        if (arc.edge != f_edge) attach.push_back(arc.edge);
    std::sort(attach.begin(), attach.end());

    for (int ge : attach) {
        bool flip = flip_for(current, ge, y, ci.graph, ci_f, *ci_uncovered);
        auto res = amalgamate(current, ci.graph, {{{ge, false}, {ci_f, flip}}});
        current = std::move(res.graph);
        // Ground edge indices are preserved on the g side.
    }

    // Color the ground edges away from y.
    for (int e = 0; e < ground->edge_count(); ++e) {
        if (e == f_edge) continue;
        Edge ed = ground->edge(e);
        if (ed.u == y || ed.v == y) continue;
        current.set_edge_color(e, i);
    }

    if (pin_sat(current, family, {{f_edge, i}}))
        fail(ErrorCode::LemmaCheckFailed, "distinguished edge can still take " + std::to_string(i));
    if (!solve_ext(current, family, verify_options()).sat())
        fail(ErrorCode::LemmaCheckFailed, "D construction is not extendable");
    if (!uncovered_endpoint(current, f_edge))
        fail(ErrorCode::LemmaCheckFailed, "no uncovered endpoint on the distinguished edge");

    Gadget g;
    g.kind = GadgetKind::DNegI;
    g.graph = std::move(current);
    g.distinguished["f^~" + std::to_string(i)] = f_edge;
    g.color = i;
    g.family_fingerprint = family_fingerprint(family);
    SafetyCertificate cert;
    SafetyCertificate::Node node;
    node.kind = SafetyCertificate::Node::Kind::DNegLemma;
    node.safe_edges = {f_edge};
    cert.nodes.push_back(node);
    g.safety = std::move(cert);
    g.verified = true;
    return g;
}

Gadget build_determiner(int i, const ObstructionFamily& family, const std::map<int, Gadget>& dnegs) {
    std::vector<int> others;
    for (int j = 1; j <= family.colors; ++j)
        if (j != i) others.push_back(j);
    for (int j : others)
        if (!dnegs.count(j))
            fail(ErrorCode::IncompleteInputs, "missing D^{~" + std::to_string(j) + "}");

    ColoredGraph current;
    int f_edge = -1;
    SafetyCertificate cert;
    bool first = true;
    for (int j : others) {
        const Gadget& dn = dnegs.at(j);
        int dn_f = dn.distinguished_edge("f^~" + std::to_string(j));
        if (first) {
            current = dn.graph;
            f_edge = dn_f;
            if (dn.safety) cert.nodes = dn.safety->nodes;
            first = false;
            continue;
        }
        auto cur_uncov = uncovered_endpoint(current, f_edge);
        auto dn_uncov = uncovered_endpoint(dn.graph, dn_f);
        if (!cur_uncov || !dn_uncov) fail(ErrorCode::LemmaCheckFailed, "uncovered endpoints lost while gluing");
        bool flip = flip_for(current, f_edge, *cur_uncov, dn.graph, dn_f, *dn_uncov);
        auto res = amalgamate(current, dn.graph, {{{f_edge, false}, {dn_f, flip}}});
        current = std::move(res.graph);

        SafetyCertificate::Node node;
        node.kind = SafetyCertificate::Node::Kind::Amalgam;
        node.left = static_cast<int>(cert.nodes.size()) - 1;
        SafetyCertificate::Node leaf;
        leaf.kind = SafetyCertificate::Node::Kind::DNegLemma;
        leaf.safe_edges = {f_edge};
        cert.nodes.push_back(leaf);
        node.right = static_cast<int>(cert.nodes.size()) - 1;
        node.safe_edges = {f_edge};
        cert.nodes.push_back(node);
    }

    Gadget g;
    g.kind = GadgetKind::Determiner;
    g.graph = std::move(current);
    g.distinguished["f^" + std::to_string(i)] = f_edge;
    g.color = i;
    g.d = 0;
    g.family_fingerprint = family_fingerprint(family);
    g.safety = std::move(cert);

    auto report = verify_gadget(g, family);
    if (!report.all_pass) fail(ErrorCode::LemmaCheckFailed, "determiner verification failed");
    g.verified = true;
    return g;
}

Gadget make_remote(const Gadget& det, int d, const std::map<int, Gadget>& dets,
                   const ObstructionFamily& family) {
    if (det.kind != GadgetKind::Determiner && det.kind != GadgetKind::RemoteDeterminer)
        fail(ErrorCode::IncompleteInputs, "make_remote expects a determiner");
    for (int c = 1; c <= family.colors; ++c)
        if (!dets.count(c)) fail(ErrorCode::IncompleteInputs, "missing determiner for color " + std::to_string(c));

    std::string label = "f^" + std::to_string(det.color);
    ColoredGraph current = det.graph;
    int f_edge = det.distinguished_edge(label);
    SafetyCertificate cert = det.safety ? *det.safety : SafetyCertificate{};

    auto colored = current.colored_edges();
    if (colored.empty()) fail(ErrorCode::RemotenessFailed, "determiner has no precolored edges");

    auto remote_enough = [&]() {
        auto dom = current.colored_edges();
        if (dom.empty()) fail(ErrorCode::RemotenessFailed, "precolored edge set vanished");
        auto dist = set_distance(current, f_edge, dom);
        return !dist.has_value() || *dist >= d;
    };

    int rounds = 0;
    while (!remote_enough()) {
        if (++rounds > 4 * d + 4) fail(ErrorCode::RemotenessFailed, "distance failed to grow");
        if (current.edge_count() > 20000) fail(ErrorCode::TooLarge, "remote determiner exceeds the size budget");
        // Only the precolored edges that are still too close get replaced;
        // vertex distances from the distinguished edge guide the flips.
        std::vector<int> dom;
        for (int e : current.colored_edges()) {
            auto dist = edge_distance(current, f_edge, e);
            if (dist.has_value() && *dist < d) dom.push_back(e);
        }
        for (int e : dom) {
            int color = current.edge_color(e);
            const Gadget& copy = dets.at(color);
            int copy_f = copy.distinguished_edge("f^" + std::to_string(color));
            auto copy_uncov = uncovered_endpoint(copy.graph, copy_f);
            if (!copy_uncov) fail(ErrorCode::LemmaCheckFailed, "determiner copy lost its uncovered endpoint");
            // Attach the copy's uncovered endpoint to the e-endpoint nearer
            // the distinguished edge, pushing the copy's precolored set away.
            Edge ed = current.edge(e);
            int near = ed.u;
            {
                // Distance from f's endpoints to each endpoint of e.
                ColoredGraph& gref = current;
                std::deque<int> queue{gref.edge(f_edge).u, gref.edge(f_edge).v};
                std::vector<int> dist(gref.vertex_count(), -1);
                dist[gref.edge(f_edge).u] = 0;
                dist[gref.edge(f_edge).v] = 0;
                while (!queue.empty()) {
                    int v = queue.front();
                    queue.pop_front();
                    for (const auto& arc : gref.arcs(v))
                        if (dist[arc.to] < 0) {
                            dist[arc.to] = dist[v] + 1;
                            queue.push_back(arc.to);
                        }
                }
                int du_ = dist[ed.u] < 0 ? 1 << 20 : dist[ed.u];
                int dv_ = dist[ed.v] < 0 ? 1 << 20 : dist[ed.v];
                near = du_ <= dv_ ? ed.u : ed.v;
            }
            bool flip = flip_for(current, e, near, copy.graph, copy_f, *copy_uncov);
            auto res = amalgamate(current, copy.graph, {{{e, false}, {copy_f, flip}}});
            current = std::move(res.graph);
            current.clear_edge_color(e);

            SafetyCertificate::Node leaf;
            leaf.kind = SafetyCertificate::Node::Kind::DNegLemma;
            leaf.safe_edges = {e};
            SafetyCertificate::Node node;
            node.kind = SafetyCertificate::Node::Kind::RemoteStep;
            node.left = static_cast<int>(cert.nodes.size()) - 1;
            cert.nodes.push_back(leaf);
            node.right = static_cast<int>(cert.nodes.size()) - 1;
            node.safe_edges = {f_edge};
            cert.nodes.push_back(node);
        }
    }

    Gadget g;
    g.kind = GadgetKind::RemoteDeterminer;
    g.graph = std::move(current);
    g.distinguished[label] = f_edge;
    g.color = det.color;
    g.d = d;
    g.family_fingerprint = family_fingerprint(family);
    g.safety = std::move(cert);

    auto report = verify_gadget(g, family);
    if (!report.all_pass) fail(ErrorCode::LemmaCheckFailed, "remote determiner verification failed");
    g.verified = true;
    return g;
}

Gadget build_H_ij(int i, int j, const ObstructionFamily& family) {
    if (i == j) fail(ErrorCode::IncompleteInputs, "H^{i,j} needs two distinct colors");
    Gadget g;
    g.kind = GadgetKind::Hij;
    g.color = i;
    g.color2 = j;
    g.family_fingerprint = family_fingerprint(family);

    std::vector<int> ps;
    for (int p = 1; p <= family.colors; ++p)
        if (p != i && p != j) ps.push_back(p);

    SafetyCertificate cert;
    if (ps.empty()) {
        // Vacuous product: a bare uncolored edge.
        ColoredGraph lone(2, false, family.colors);
        lone.add_edge(0, 1);
        g.graph = std::move(lone);
        g.distinguished["f^{i,j}"] = 0;
        SafetyCertificate::Node node;
        node.kind = SafetyCertificate::Node::Kind::FreeEdge;
        node.safe_edges = {0};
        cert.nodes.push_back(node);
    } else {
        ColoredGraph current;
        bool first = true;
        for (int p : ps) {
            auto ground = ground_graph(family, p);
            if (!ground) fail(ErrorCode::NoGroundGraph, "no mono obstruction for color " + std::to_string(p));
            ColoredGraph part = *ground;
            for (int e = 1; e < part.edge_count(); ++e) part.set_edge_color(e, p);
            // Edge 0 stays uncolored and is the gluing edge.
            if (first) {
                current = part;
                first = false;
                cert.nodes.push_back(mono_base_leaf(part, p, {0}));
            } else {
                auto res = amalgamate(current, part, {{{0, false}, {0, false}}});
                current = std::move(res.graph);
                int left = static_cast<int>(cert.nodes.size()) - 1;
                cert.nodes.push_back(mono_base_leaf(part, p, {0}));
                SafetyCertificate::Node node;
                node.kind = SafetyCertificate::Node::Kind::Amalgam;
                node.left = left;
                node.right = static_cast<int>(cert.nodes.size()) - 1;
                node.safe_edges = {0};
                cert.nodes.push_back(node);
            }
        }
        g.graph = std::move(current);
        g.distinguished["f^{i,j}"] = 0;
    }
    g.safety = std::move(cert);

    for (int p = 1; p <= family.colors; ++p) {
        bool sat = pin_sat(g.graph, family, {{g.distinguished_edge("f^{i,j}"), p}});
        bool expect = (p == i || p == j);
        if (sat != expect) fail(ErrorCode::LemmaCheckFailed, "pair gadget pin battery failed");
    }
    g.verified = true;
    return g;
}

namespace {

/// One chain block: the distinguished pair cannot take (i, j).
struct Block {
    ColoredGraph graph;
    int left_edge;   // e_2^i
    int right_edge;  // e_2^j
    SafetyCertificate cert;
};

Block build_block(int i, int j, const ObstructionFamily& family) {
    auto hi = ground_graph(family, i);
    auto hj = ground_graph(family, j);
    if (!hi || !hj) fail(ErrorCode::NoGroundGraph, "missing mono obstruction for a chain color");

    Block block;
    if (hi->vertex_count() == 3 && is_clique(*hi) && hj->vertex_count() == 3 && is_clique(*hj)) {
        // Both grounds are triangles: the dedicated four-vertex picture.
        // Vertices a=0, b=1, u=2, v=3; center edge ab is uncolored, the
        // outer edges ua and vb are the distinguished pair.
        ColoredGraph g(4, false, family.colors);
        int ab = g.add_edge(0, 1);
        int ua = g.add_edge(2, 0);
        int ub = g.add_edge(2, 1);
        int va = g.add_edge(3, 0);
        int vb = g.add_edge(3, 1);
        g.set_edge_color(ub, i);
        g.set_edge_color(va, j);
        block.graph = std::move(g);
        block.left_edge = ua;
        block.right_edge = vb;
        ColoredGraph leaf_i(3, false, family.colors);
        leaf_i.add_edge(0, 1);
        leaf_i.add_edge(2, 0);
        int li = leaf_i.add_edge(2, 1);
        leaf_i.set_edge_color(li, i);
        ColoredGraph leaf_j(3, false, family.colors);
        leaf_j.add_edge(0, 1);
        int lj = leaf_j.add_edge(2, 0);
        leaf_j.add_edge(2, 1);
        leaf_j.set_edge_color(lj, j);
        block.cert.nodes.push_back(mono_base_leaf(leaf_i, i, {ab, ua}));
        block.cert.nodes.push_back(mono_base_leaf(leaf_j, j, {ab, vb}));
        SafetyCertificate::Node node;
        node.kind = SafetyCertificate::Node::Kind::Amalgam;
        node.left = 0;
        node.right = 1;
        node.safe_edges = {ua, vb};
        block.cert.nodes.push_back(node);
        (void)ab;
    } else {
        // General recipe: color each ground away from two chosen edges and
        // glue the pair through H^{i,j}.
        auto pick_edges = [](const ColoredGraph& ground) {
            int e1 = 0;
            Edge a = ground.edge(0);
            int e2 = -1;
            for (int e = 1; e < ground.edge_count(); ++e) {
                Edge b = ground.edge(e);
                if (b.u != a.u && b.u != a.v && b.v != a.u && b.v != a.v) {
                    e2 = e;
                    break;
                }
            }
            if (e2 < 0) e2 = 1; // K_3 side: edges share a vertex
            return std::pair<int, int>{e1, e2};
        };
        ColoredGraph part_i = *hi;
        auto [i1, i2] = pick_edges(part_i);
        for (int e = 0; e < part_i.edge_count(); ++e)
            if (e != i1 && e != i2) part_i.set_edge_color(e, i);
        ColoredGraph part_j = *hj;
        auto [j1, j2] = pick_edges(part_j);
        for (int e = 0; e < part_j.edge_count(); ++e)
            if (e != j1 && e != j2) part_j.set_edge_color(e, j);

        auto res = amalgamate(part_i, part_j, {{{i1, false}, {j1, false}}});
        ColoredGraph current = std::move(res.graph);
        int left = i2;                    // part_i edges keep their indices
        int right = res.h_edge_map[j2];
        int center = i1;

        Gadget hij = build_H_ij(i, j, family);
        if (hij.graph.edge_count() > 1) {
            auto res2 = amalgamate(current, hij.graph, {{{center, false},
                                                         {hij.distinguished_edge("f^{i,j}"), false}}});
            current = std::move(res2.graph);
        }
        block.graph = std::move(current);
        block.left_edge = left;
        block.right_edge = right;
        block.cert.nodes.push_back(mono_base_leaf(part_i, i, {center, left}));
        block.cert.nodes.push_back(mono_base_leaf(part_j, j, {center, right}));
        SafetyCertificate::Node node;
        node.kind = SafetyCertificate::Node::Kind::Amalgam;
        node.left = 0;
        node.right = 1;
        node.safe_edges = {left, right};
        block.cert.nodes.push_back(node);
    }
    return block;
}

/// Append `other` to `cert`, shifting child indices, and return the index of
/// other's root in the combined list.
int splice_cert(SafetyCertificate& cert, const SafetyCertificate& other) {
    int offset = static_cast<int>(cert.nodes.size());
    for (auto node : other.nodes) {
        if (node.left >= 0) node.left += offset;
        if (node.right >= 0) node.right += offset;
        cert.nodes.push_back(std::move(node));
    }
    return static_cast<int>(cert.nodes.size()) - 1;
}

} // namespace

Gadget build_G_ij_chain(int i, int j, int d, const ObstructionFamily& family) {
    if (d < 1) fail(ErrorCode::IncompleteInputs, "chain length must be at least 1");
    Block block = build_block(i, j, family);

    ColoredGraph current = block.graph;
    int left = block.left_edge;
    int right = block.right_edge;
    SafetyCertificate cert = block.cert;

    Gadget hij = build_H_ij(i, j, family);
    bool attach_hij = hij.graph.edge_count() > 1;

    for (int t = 1; t < d; ++t) {
        auto res = amalgamate(current, block.graph, {{{right, false}, {block.left_edge, false}}});
        // The junction edge is interior now; attach the pair gadget to it.
        int junction = res.g_edge_map[right];
        current = std::move(res.graph);
        right = res.h_edge_map[block.right_edge];
        int left_idx = static_cast<int>(cert.nodes.size()) - 1;
        int right_idx = splice_cert(cert, block.cert);
        SafetyCertificate::Node node;
        node.kind = SafetyCertificate::Node::Kind::Amalgam;
        node.left = left_idx;
        node.right = right_idx;
        node.safe_edges = {left, right};
        cert.nodes.push_back(node);
        if (attach_hij) {
            auto res2 = amalgamate(current, hij.graph,
                                   {{{junction, false}, {hij.distinguished_edge("f^{i,j}"), false}}});
            current = std::move(res2.graph);
        }
    }
    // Attach the pair gadget to interior uncolored edges other than the ends.
    if (attach_hij) {
        for (int e = 0; e < current.edge_count(); ++e) {
            if (e == left || e == right || current.edge_colored(e)) continue;
            auto res = amalgamate(current, hij.graph, {{{e, false}, {hij.distinguished_edge("f^{i,j}"), false}}});
            current = std::move(res.graph);
        }
    }

    Gadget g;
    g.kind = GadgetKind::GijChain;
    g.graph = std::move(current);
    g.distinguished["e_2^i"] = left;
    g.distinguished["e_2^j"] = right;
    g.color = i;
    g.color2 = j;
    g.d = d;
    g.family_fingerprint = family_fingerprint(family);
    if (!cert.nodes.empty()) {
        cert.nodes.back().simultaneous = d > max_obstruction_vertices(family);
        g.safety = std::move(cert);
    }

    auto report = verify_gadget(g, family);
    if (!report.all_pass) fail(ErrorCode::LemmaCheckFailed, "chain verification failed");
    g.verified = true;
    return g;
}

Gadget build_equality_gadget(const ObstructionFamily& family, int d) {
    if (d < 1) fail(ErrorCode::IncompleteInputs, "equality gadget needs d >= 1");
    Gadget g;
    g.kind = GadgetKind::Equality;
    g.d = d;
    g.family_fingerprint = family_fingerprint(family);

    if (family.colors == 1) {
        // One color: two far-apart uncolored edges are trivially equal.
        ColoredGraph lone(4, false, 1);
        lone.add_edge(0, 1);
        lone.add_edge(2, 3);
        g.graph = std::move(lone);
        g.distinguished["e^="] = 0;
        g.distinguished["f^="] = 1;
        SafetyCertificate cert;
        SafetyCertificate::Node node;
        node.kind = SafetyCertificate::Node::Kind::FreeEdge;
        node.safe_edges = {0, 1};
        node.simultaneous = true;
        cert.nodes.push_back(node);
        g.safety = std::move(cert);
    } else {
        ColoredGraph current;
        int e_left = -1, e_right = -1;
        SafetyCertificate cert;
        bool first = true;
        for (int i = 1; i <= family.colors; ++i) {
            for (int j = i + 1; j <= family.colors; ++j) {
                Gadget chain = build_G_ij_chain(i, j, d, family);
                int a_left = chain.distinguished_edge("e_2^i");
                int a_right = chain.distinguished_edge("e_2^j");
                // Double chain: two copies glued end-to-end both ways.
                auto res = amalgamate(chain.graph, chain.graph,
                                      {{{a_left, false}, {a_right, false}},
                                       {{a_right, false}, {a_left, false}}});
                ColoredGraph doubled = std::move(res.graph);
                int dbl_left = a_left;
                int dbl_right = a_right;
                SafetyCertificate dbl_cert;
                if (chain.safety) {
                    int l = splice_cert(dbl_cert, *chain.safety);
                    int r = splice_cert(dbl_cert, *chain.safety);
                    SafetyCertificate::Node node;
                    node.kind = SafetyCertificate::Node::Kind::Amalgam;
                    node.left = l;
                    node.right = r;
                    node.safe_edges = {dbl_left, dbl_right};
                    node.simultaneous = chain.safety->root().simultaneous;
                    dbl_cert.nodes.push_back(node);
                }
                if (first) {
                    current = std::move(doubled);
                    e_left = dbl_left;
                    e_right = dbl_right;
                    cert = std::move(dbl_cert);
                    first = false;
                } else {
                    auto res2 = amalgamate(current, doubled,
                                           {{{e_left, false}, {dbl_left, false}},
                                            {{e_right, false}, {dbl_right, false}}});
                    current = std::move(res2.graph);
                    int l = static_cast<int>(cert.nodes.size()) - 1;
                    int r = splice_cert(cert, dbl_cert);
                    SafetyCertificate::Node node;
                    node.kind = SafetyCertificate::Node::Kind::Amalgam;
                    node.left = l;
                    node.right = r;
                    node.safe_edges = {e_left, e_right};
                    node.simultaneous = cert.nodes[l].simultaneous && dbl_cert.root().simultaneous;
                    cert.nodes.push_back(node);
                }
            }
        }
        g.graph = std::move(current);
        g.distinguished["e^="] = e_left;
        g.distinguished["f^="] = e_right;
        g.safety = std::move(cert);
    }

    auto report = verify_gadget(g, family);
    if (!report.all_pass) fail(ErrorCode::LemmaCheckFailed, "equality gadget verification failed");
    g.verified = true;
    return g;
}

namespace {

void add_check(VerificationReport& report, const std::string& name, bool pass,
               const std::string& detail = "") {
    report.checks.push_back({name, pass, detail});
}

void run_pin_checks(VerificationReport& report, const Gadget& g, const ObstructionFamily& family,
                    const std::vector<std::pair<std::map<int, int>, std::pair<std::string, bool>>>& batt,
                    int threads) {
    if (threads > 1) {
        std::vector<std::future<bool>> futures;
        for (const auto& [pins, meta] : batt)
            futures.push_back(std::async(std::launch::async, [&g, &family, pins = pins] {
                return pin_sat(g.graph, family, pins);
            }));
        for (size_t k = 0; k < batt.size(); ++k) {
            bool sat = futures[k].get();
            const auto& [name, expect_sat] = batt[k].second;
            add_check(report, name, sat == expect_sat, sat ? "SAT" : "UNSAT");
        }
    } else {
        for (const auto& [pins, meta] : batt) {
            bool sat = pin_sat(g.graph, family, pins, &report.stats);
            add_check(report, meta.first, sat == meta.second, sat ? "SAT" : "UNSAT");
        }
    }
}

} // namespace

VerificationReport verify_gadget(const Gadget& g, const ObstructionFamily& family, int threads) {
    VerificationReport report;
    if (g.family_fingerprint != family_fingerprint(family)) {
        add_check(report, "family fingerprint", false, "gadget was built for a different family");
        report.all_pass = false;
        return report;
    }

    for (const auto& [label, e] : g.distinguished) {
        bool ok = e >= 0 && e < g.graph.edge_count() && !g.graph.edge_colored(e);
        add_check(report, "distinguished edge " + label + " uncolored", ok);
    }

    std::vector<std::pair<std::map<int, int>, std::pair<std::string, bool>>> battery;
    switch (g.kind) {
        case GadgetKind::BaseH: {
            add_check(report, "colorable", solve_col(g.graph, family, verify_options()).sat());
            int x = g.marked_vertices.at("x");
            for (int i = 1; i <= family.colors; ++i) {
                SolveOptions opts = verify_options();
                for (const auto& arc : g.graph.arcs(x)) opts.forbidden[arc.edge].insert(i);
                bool avoidable = solve_col(g.graph, family, opts).sat();
                add_check(report, "color " + std::to_string(i) + " forced at x", !avoidable);
            }
            break;
        }
        case GadgetKind::Ci: {
            int f = g.distinguished_edge("f^" + std::to_string(g.color));
            int x = g.marked_vertices.at("x");
            bool dom_at_x = true;
            for (int e = 0; e < g.graph.edge_count(); ++e)
                if (g.graph.edge_colored(e) && g.graph.edge(e).u != x && g.graph.edge(e).v != x)
                    dom_at_x = false;
            add_check(report, "precolored edges all incident to x", dom_at_x);
            add_check(report, "extendable", solve_ext(g.graph, family, verify_options()).sat());
            for (int j = 1; j <= family.colors; ++j)
                battery.push_back({{{f, j}},
                                   {"pin " + std::to_string(j), j == g.color}});
            break;
        }
        case GadgetKind::DNegI: {
            int f = g.distinguished_edge("f^~" + std::to_string(g.color));
            add_check(report, "extendable", solve_ext(g.graph, family, verify_options()).sat());
            add_check(report, "uncovered endpoint", uncovered_endpoint(g.graph, f).has_value());
            battery.push_back({{{f, g.color}}, {"pin " + std::to_string(g.color) + " blocked", false}});
            break;
        }
        case GadgetKind::Determiner:
        case GadgetKind::RemoteDeterminer: {
            int f = g.distinguished_edge("f^" + std::to_string(g.color));
            add_check(report, "uncovered endpoint", uncovered_endpoint(g.graph, f).has_value());
            if (g.kind == GadgetKind::RemoteDeterminer) {
                auto dom = g.graph.colored_edges();
                bool remote = true;
                if (!dom.empty()) {
                    auto dist = set_distance(g.graph, f, dom);
                    remote = !dist.has_value() || *dist >= g.d;
                }
                add_check(report, "remoteness >= " + std::to_string(g.d), remote);
            }
            if (static_cast<int>(g.graph.uncolored_edges().size()) <= 16) {
                auto all = enumerate_extensions(g.graph, family, 1 << 20);
                bool forced = !all.colorings.empty();
                for (const auto& coloring : all.colorings)
                    if (coloring[f] != g.color) forced = false;
                add_check(report, "every extension colors the edge " + std::to_string(g.color), forced,
                          std::to_string(all.colorings.size()) + " extensions enumerated");
            } else {
                for (int j = 1; j <= family.colors; ++j)
                    battery.push_back({{{f, j}},
                                       {"pin " + std::to_string(j), j == g.color}});
            }
            break;
        }
        case GadgetKind::Hij: {
            int f = g.distinguished_edge("f^{i,j}");
            for (int p = 1; p <= family.colors; ++p)
                battery.push_back({{{f, p}},
                                   {"pin " + std::to_string(p), p == g.color || p == g.color2}});
            break;
        }
        case GadgetKind::GijChain: {
            int left = g.distinguished_edge("e_2^i");
            int right = g.distinguished_edge("e_2^j");
            auto dist = edge_distance(g.graph, left, right);
            add_check(report, "end distance >= " + std::to_string(g.d),
                      !dist.has_value() || *dist >= g.d);
            for (int p = 1; p <= family.colors; ++p)
                for (int q = 1; q <= family.colors; ++q)
                    battery.push_back({{{left, p}, {right, q}},
                                       {"pins (" + std::to_string(p) + "," + std::to_string(q) + ")",
                                        !(p == g.color && q == g.color2)}});
            break;
        }
        case GadgetKind::Equality: {
            int e = g.distinguished_edge("e^=");
            int f = g.distinguished_edge("f^=");
            for (int p = 1; p <= family.colors; ++p)
                for (int q = 1; q <= family.colors; ++q)
                    battery.push_back({{{e, p}, {f, q}},
                                       {"pins (" + std::to_string(p) + "," + std::to_string(q) + ")",
                                        p == q}});
            break;
        }
    }
    run_pin_checks(report, g, family, battery, threads);

    if (g.safety) {
        auto problems = check_certificate(*g.safety, family);
        add_check(report, "certificate well-formed", problems.empty(),
                  problems.empty() ? "" : problems.front());
    }

    report.all_pass = std::all_of(report.checks.begin(), report.checks.end(),
                                  [](const VerificationCheck& c) { return c.pass; });
    return report;
}

std::optional<SafetyCounterexample> falsify_safety(const Gadget& g, const ObstructionFamily& family,
                                                   int bound) {
    // Declared safe edges: the certificate root's, else the distinguished set.
    std::vector<int> safe;
    bool simultaneous = false;
    if (g.safety) {
        safe = g.safety->root().safe_edges;
        simultaneous = g.safety->root().simultaneous;
    } else {
        for (const auto& [label, e] : g.distinguished) safe.push_back(e);
    }
    std::sort(safe.begin(), safe.end());
    safe.erase(std::unique(safe.begin(), safe.end()), safe.end());
    if (safe.empty()) return std::nullopt;

    // Catalog: cliques and cycles up to the bound, plus obstruction shapes.
    std::vector<ColoredGraph> catalog;
    for (int n = 2; n <= bound; ++n) catalog.push_back(complete_graph(n, family.colors));
    for (int n = 3; n <= bound; ++n) catalog.push_back(cycle_graph(n, family.colors));
    for (const ColoredGraph& f : family.obstructions) {
        ColoredGraph shape(f.vertex_count(), false, family.colors);
        for (int e = 0; e < f.edge_count(); ++e) {
            int u = f.edge(e).u, v = f.edge(e).v;
            if (shape.find_edge(u, v) < 0) shape.add_edge(u, v);
        }
        catalog.push_back(std::move(shape));
    }

    // Achievable pin colors per safe edge.
    std::map<int, std::vector<int>> sat_pins;
    for (int e : safe)
        for (int c = 1; c <= family.colors; ++c)
            if (pin_sat(g.graph, family, {{e, c}})) sat_pins[e].push_back(c);

    auto try_amalgam = [&](const ColoredGraph& host, const std::vector<int>& host_edges,
                           const std::vector<int>& gadget_edges,
                           const std::vector<bool>& flips) -> bool {
        std::vector<std::pair<EdgeSelector, EdgeSelector>> pairs;
        for (size_t k = 0; k < host_edges.size(); ++k)
            pairs.push_back({{gadget_edges[k], false}, {host_edges[k], flips[k]}});
        auto res = amalgamate(g.graph, host, pairs);
        return solve_ext(res.graph, family, verify_options()).sat();
    };

    for (const ColoredGraph& shape : catalog) {
        if (shape.edge_count() == 0 || shape.edge_count() > 30) continue;
        auto colorings = enumerate_extensions(shape, family, 1 << 16);
        for (const auto& coloring : colorings.colorings) {
            ColoredGraph host = shape;
            host.set_edge_coloring(coloring);
            // Single-edge gluings.
            for (int e : safe) {
                for (int c : sat_pins[e]) {
                    for (int he = 0; he < host.edge_count(); ++he) {
                        if (host.edge_color(he) != c) continue;
                        for (bool flip : {false, true}) {
                            if (!try_amalgam(host, {he}, {e}, {flip})) {
                                return SafetyCounterexample{
                                    "gluing color-" + std::to_string(c) + " edge kills extendability",
                                    host,
                                    {he},
                                    {e}};
                            }
                        }
                    }
                }
            }
            // Simultaneous two-edge gluings for pair-safe gadgets.
            if (simultaneous && safe.size() == 2) {
                int e1 = safe[0], e2 = safe[1];
                for (int c1 : sat_pins[e1]) {
                    for (int c2 : sat_pins[e2]) {
                        if (g.kind == GadgetKind::Equality && c1 != c2) continue;
                        std::map<int, int> both{{e1, c1}, {e2, c2}};
                        if (!pin_sat(g.graph, family, both)) continue;
                        for (int h1 = 0; h1 < host.edge_count(); ++h1) {
                            if (host.edge_color(h1) != c1) continue;
                            for (int h2 = 0; h2 < host.edge_count(); ++h2) {
                                if (h2 == h1 || host.edge_color(h2) != c2) continue;
                                Edge a = host.edge(h1), b = host.edge(h2);
                                if (a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v) continue;
                                if (!try_amalgam(host, {h1, h2}, {e1, e2}, {false, false})) {
                                    return SafetyCounterexample{"gluing two edges kills extendability",
                                                                host,
                                                                {h1, h2},
                                                                {e1, e2}};
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    return std::nullopt;
}

DeterminerPipeline build_determiner_pipeline(const ColoredGraph& witness,
                                             const ObstructionFamily& family) {
    DeterminerPipeline pipe;
    pipe.base = build_base_H(witness, family);
    for (int i = 1; i <= family.colors; ++i) pipe.cis.emplace(i, build_C_i(pipe.base, i, family));
    for (int i = 1; i <= family.colors; ++i)
        pipe.dnegs.emplace(i, build_D_neg_i(pipe.cis.at(i), i, family));
    for (int i = 1; i <= family.colors; ++i) {
        std::map<int, Gadget> inputs;
        for (int j = 1; j <= family.colors; ++j)
            if (j != i) inputs.emplace(j, pipe.dnegs.at(j));
        pipe.determiners.emplace(i, build_determiner(i, family, inputs));
    }
    return pipe;
}

std::map<int, Gadget> build_remote_determiners(const DeterminerPipeline& pipeline, int d,
                                               const ObstructionFamily& family) {
    std::map<int, Gadget> out;
    for (const auto& [i, det] : pipeline.determiners)
        out.emplace(i, make_remote(det, d, pipeline.determiners, family));
    return out;
}

std::optional<ColoredGraph> default_witness(const ObstructionFamily& family) {
    ObstructionFamily triangle;
    triangle.colors = 2;
    triangle.obstructions.push_back(mono_colored(complete_graph(3, 2), 1));
    triangle.obstructions.push_back(mono_colored(complete_graph(3, 2), 2));
    if (family_fingerprint(family) == family_fingerprint(triangle)) return complete_graph(6, 2);
    return std::nullopt;
}

} // namespace patcol
