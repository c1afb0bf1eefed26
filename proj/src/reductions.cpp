#include "patcol/reductions.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include "patcol/canonical.hpp"
#include "patcol/hom.hpp"
#include "patcol/solver.hpp"

namespace patcol {

namespace {

std::string graph_fingerprint(const ColoredGraph& g) {
    // Content hash over the exact layout (no canonicalization; reductions are
    // layout-deterministic).
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](long long x) {
        for (int b = 0; b < 8; ++b) {
            h ^= static_cast<unsigned char>(x >> (8 * b));
            h *= 1099511628211ull;
        }
    };
    mix(g.vertex_count());
    mix(g.oriented());
    mix(g.colors());
    for (int e = 0; e < g.edge_count(); ++e) {
        mix(g.edge(e).u);
        mix(g.edge(e).v);
        mix(g.edge_color(e));
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string csp_fingerprint(const CspInstance& x) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    mix(std::to_string(x.variables));
    for (const auto& c : x.constraints) {
        mix(c.relation);
        for (int v : c.tuple) mix(std::to_string(v));
    }
    for (const auto& [v, c] : x.pins) mix(std::to_string(v) + ":" + std::to_string(c));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SolveOptions reduction_solve_options() {
    SolveOptions opts;
    opts.propagate = true;
    opts.probe = true;
    return opts;
}

} // namespace

std::pair<CspInstance, ReductionTrace> col_to_csp(const ColoredGraph& g,
                                                  const ObstructionFamily& family) {
    if (g.colored_edge_count() != 0)
        fail(ErrorCode::Unsupported, "col_to_csp expects an uncolored input");
    FiniteStructure s = build_G_F(family);

    CspInstance out;
    out.variables = g.edge_count();
    ReductionTrace trace;
    trace.input_fingerprint = graph_fingerprint(g);

    for (const auto& rel : s.relations) {
        if (rel.singleton) continue;
        auto autos = edge_automorphisms(rel.shape);
        std::set<std::vector<int>> seen;
        for_each_uncolored_hom(rel.shape, g, [&](const std::vector<int>& hom) {
            std::vector<int> tuple(rel.arity);
            for (int e = 0; e < rel.arity; ++e) {
                Edge pe = rel.shape.edge(e);
                tuple[e] = g.find_edge(hom[pe.u], hom[pe.v]);
            }
            // Canonical representative under the shape's edge automorphisms.
            std::vector<int> best = tuple;
            std::vector<int> permuted(rel.arity);
            for (const auto& sigma : autos) {
                for (int e = 0; e < rel.arity; ++e) permuted[e] = tuple[sigma[e]];
                if (permuted < best) best = permuted;
            }
            if (seen.insert(best).second) {
                out.constraints.push_back({rel.name, best});
                trace.constraint_edges.push_back(best);
            }
            return true;
        });
    }
    for (int e = 0; e < g.edge_count(); ++e) trace.variable_edges[e] = {e};
    trace.output_fingerprint = csp_fingerprint(out);
    return {out, trace};
}

namespace {

/// Identify two disjoint-or-adjacent edges of one graph (the self-gluing the
/// equality star needs when a variable repeats inside a constraint).
ColoredGraph glue_own_edges(const ColoredGraph& g, int e1, int e2, std::vector<int>* edge_map) {
    for (bool flip : {false, true}) {
        std::vector<int> part(g.vertex_count());
        std::iota(part.begin(), part.end(), 0);
        std::function<int(int)> find = [&](int x) { return part[x] == x ? x : part[x] = find(part[x]); };
        auto unite = [&](int a, int b) { part[find(a)] = find(b); };
        Edge a = g.edge(e1), b = g.edge(e2);
        unite(a.u, flip ? b.v : b.u);
        unite(a.v, flip ? b.u : b.v);
        std::vector<int> classes(g.vertex_count());
        for (int v = 0; v < g.vertex_count(); ++v) classes[v] = find(v);
        try {
            auto res = quotient(g, classes);
            if (edge_map) *edge_map = res.edge_map;
            return res.graph;
        } catch (const Error&) {
            if (flip) throw;
        }
    }
    fail(ErrorCode::GluingConflict, "edge identification failed");
}

} // namespace

std::pair<ColoredGraph, ReductionTrace> csp_to_ext(const CspInstance& x,
                                                   const ObstructionFamily& family,
                                                   const Gadget& equality) {
    if (!equality.verified || equality.kind != GadgetKind::Equality ||
        equality.family_fingerprint != family_fingerprint(family))
        fail(ErrorCode::UnverifiedGadget, "csp_to_ext needs a verified equality gadget for this family");
    FiniteStructure s = build_G_F(family);

    ReductionTrace trace;
    trace.input_fingerprint = csp_fingerprint(x);

    ColoredGraph out(0, false, family.colors);
    std::map<int, std::vector<int>> occurrences;

    // Step one: a disjoint obstruction-shape copy per constraint.
    for (const auto& c : x.constraints) {
        const auto* rel = s.find(c.relation);
        if (!rel || rel->singleton) fail(ErrorCode::BadIndex, "unknown relation " + c.relation);
        if (static_cast<int>(c.tuple.size()) != rel->arity)
            fail(ErrorCode::BadIndex, "arity mismatch in constraint over " + c.relation);
        int base = out.vertex_count();
        for (int v = 0; v < rel->shape.vertex_count(); ++v) out.add_vertex();
        std::vector<int> copy_edges;
        for (int e = 0; e < rel->shape.edge_count(); ++e) {
            int idx = out.add_edge(base + rel->shape.edge(e).u, base + rel->shape.edge(e).v);
            copy_edges.push_back(idx);
        }
        trace.constraint_edges.push_back(copy_edges);
        for (int pos = 0; pos < rel->arity; ++pos) {
            int var = c.tuple[pos];
            if (var < 0 || var >= x.variables) fail(ErrorCode::BadIndex, "variable out of range");
            occurrences[var].push_back(copy_edges[pos]);
        }
    }
    // Variables that appear nowhere still get a representative edge.
    for (int v = 0; v < x.variables; ++v) {
        if (occurrences.count(v)) continue;
        int a = out.add_vertex();
        int b = out.add_vertex();
        occurrences[v] = {out.add_edge(a, b)};
    }

    // Step two: equality gadgets in a star per shared variable.  Edge indices
    // shift whenever a self-identification collapses parallel edges, so every
    // insertion threads the occurrence table through the produced maps.
    int eq_e = equality.distinguished_edge("e^=");
    int eq_f = equality.distinguished_edge("f^=");
    auto remap_all = [&](const std::vector<int>& edge_map) {
        for (auto& [var, edges] : occurrences)
            for (int& e : edges) e = edge_map[e];
        for (auto& edges : trace.constraint_edges)
            for (int& e : edges) e = edge_map[e];
    };
    for (auto& [var, edges] : occurrences) {
        for (size_t k = 1; k < edges.size(); ++k) {
            int hub = occurrences[var][0];
            int other = occurrences[var][k];
            Edge he = out.edge(hub), oe = out.edge(other);
            bool disjoint = he.u != oe.u && he.u != oe.v && he.v != oe.u && he.v != oe.v;
            if (disjoint) {
                auto res = amalgamate(out, equality.graph,
                                      {{{hub, false}, {eq_e, false}}, {{other, false}, {eq_f, false}}});
                out = std::move(res.graph);
                remap_all(res.g_edge_map);
            } else {
                auto res = amalgamate(out, equality.graph, {{{hub, false}, {eq_e, false}}});
                int f_img = res.h_edge_map[eq_f];
                out = std::move(res.graph);
                remap_all(res.g_edge_map);
                std::vector<int> edge_map;
                int target = occurrences[var][k];
                out = glue_own_edges(out, target, f_img, &edge_map);
                remap_all(edge_map);
            }
        }
    }

    // Step three: pins become precolored representative edges.
    for (const auto& [var, color] : x.pins) {
        if (color < 1 || color > family.colors) fail(ErrorCode::UniverseMismatch, "pin color out of range");
        auto it = occurrences.find(var);
        if (it == occurrences.end()) fail(ErrorCode::BadIndex, "pin on unknown variable");
        for (int e : it->second)
            if (!out.edge_colored(e)) out.set_edge_color(e, color);
    }

    trace.variable_edges = occurrences;
    trace.output_fingerprint = graph_fingerprint(out);
    return {out, trace};
}

std::pair<ColoredGraph, ReductionTrace> ext_to_col(const ColoredGraph& x,
                                                   const ObstructionFamily& family,
                                                   const std::map<int, Gadget>& determiners) {
    for (int c = 1; c <= family.colors; ++c) {
        auto it = determiners.find(c);
        if (it == determiners.end() || !it->second.verified ||
            it->second.family_fingerprint != family_fingerprint(family))
            fail(ErrorCode::UnverifiedGadget,
                 "ext_to_col needs verified determiners for every color");
    }

    ReductionTrace trace;
    trace.input_fingerprint = graph_fingerprint(x);

    ColoredGraph out = x;
    // One determiner copy per precolored edge; remember where each copy's
    // template edges landed for the identification pass.
    struct Copy {
        int color;
        std::vector<int> edge_map;
        std::vector<int> vertex_map;
    };
    std::vector<Copy> copies;
    int ordinal = 0;
    for (int e : x.colored_edges()) {
        int color = x.edge_color(e);
        const Gadget& det = determiners.at(color);
        int f = det.distinguished_edge("f^" + std::to_string(color));
        auto res = amalgamate(out, det.graph, {{{e, false}, {f, false}}});
        out = std::move(res.graph);
        out.clear_edge_color(e);
        // Earlier copies keep their indices: the glued side is the g side.
        copies.push_back({color, res.h_edge_map, res.h_vertex_map});
        trace.precolored_copy[e] = ordinal++;
    }

    // Identify the precolored sets across copies of the same determiner.
    std::vector<int> part(out.vertex_count());
    std::iota(part.begin(), part.end(), 0);
    std::function<int(int)> find = [&](int v) { return part[v] == v ? v : part[v] = find(part[v]); };
    bool any_merge = false;
    for (int color = 1; color <= family.colors; ++color) {
        const Gadget& det = determiners.at(color);
        std::vector<int> dom = det.graph.colored_edges();
        const Copy* first = nullptr;
        for (const auto& copy : copies) {
            if (copy.color != color) continue;
            if (!first) {
                first = &copy;
                continue;
            }
            for (int t : dom) {
                Edge te = det.graph.edge(t);
                part[find(first->vertex_map[te.u])] = find(copy.vertex_map[te.u]);
                part[find(first->vertex_map[te.v])] = find(copy.vertex_map[te.v]);
                any_merge = true;
            }
        }
    }
    if (any_merge) {
        std::vector<int> classes(out.vertex_count());
        for (int v = 0; v < out.vertex_count(); ++v) classes[v] = find(v);
        auto res = quotient(out, classes);
        out = std::move(res.graph);
    }

    // Finally erase every color: the output is a plain coloring instance.
    for (int e = 0; e < out.edge_count(); ++e)
        if (out.edge_colored(e)) out.clear_edge_color(e);

    trace.output_fingerprint = graph_fingerprint(out);
    return {out, trace};
}

bool brute_csp_satisfiable(const CspInstance& x, const FiniteStructure& s) {
    if (x.variables > 20) fail(ErrorCode::TooLarge, "brute CSP limited to 20 variables");
    std::map<std::string, std::set<std::vector<int>>> members;
    for (const auto& rel : s.relations) members[rel.name] = {rel.tuples.begin(), rel.tuples.end()};

    std::vector<int> assignment(x.variables, 1);
    if (x.variables == 0) {
        for (const auto& c : x.constraints)
            if (!members.count(c.relation)) fail(ErrorCode::BadIndex, "unknown relation");
        return x.constraints.empty();
    }
    while (true) {
        bool ok = true;
        for (const auto& [var, color] : x.pins)
            if (assignment.at(var) != color) ok = false;
        for (const auto& c : x.constraints) {
            if (!ok) break;
            std::vector<int> image;
            for (int v : c.tuple) image.push_back(assignment.at(v));
            if (!members.at(c.relation).count(image)) ok = false;
        }
        if (ok) return true;
        int pos = x.variables - 1;
        while (pos >= 0) {
            if (++assignment[pos] <= s.domain) break;
            assignment[pos] = 1;
            --pos;
        }
        if (pos < 0) return false;
    }
}

AgreementReport check_reduction_pair(const std::function<bool(int)>& left,
                                     const std::function<bool(int)>& right, int count,
                                     const std::function<std::string(int)>& describe) {
    AgreementReport report;
    for (int i = 0; i < count; ++i) {
        ++report.total;
        bool a = left(i);
        bool b = right(i);
        if (a == b) {
            ++report.agreed;
        } else {
            std::string what = describe ? describe(i) : ("instance " + std::to_string(i));
            report.disagreements.push_back(what + ": " + (a ? "SAT" : "UNSAT") + " vs " +
                                           (b ? "SAT" : "UNSAT"));
        }
    }
    return report;
}

namespace {

struct Counter {
    std::uint64_t state;
    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

} // namespace

ColoredGraph generated_graph(std::uint64_t index, int max_vertices, int colors) {
    Counter rng{index * 2654435761ull + 17};
    int n = 1 + rng.below(max_vertices);
    ColoredGraph g(n, false, colors);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.below(100) < 55) g.add_edge(u, v);
    return g;
}

CspInstance generated_csp(std::uint64_t index, const FiniteStructure& structure, int max_variables) {
    Counter rng{index * 0x9E3779B97F4A7C15ull + 3};
    CspInstance x;
    x.variables = 1 + rng.below(max_variables);
    std::vector<const FiniteStructure::Relation*> graph_relations;
    for (const auto& rel : structure.relations)
        if (!rel.singleton) graph_relations.push_back(&rel);
    int constraints = graph_relations.empty() ? 0 : rng.below(4);
    for (int c = 0; c < constraints; ++c) {
        const auto* rel = graph_relations[rng.below(static_cast<int>(graph_relations.size()))];
        CspInstance::Constraint constraint;
        constraint.relation = rel->name;
        for (int t = 0; t < rel->arity; ++t) constraint.tuple.push_back(rng.below(x.variables));
        x.constraints.push_back(std::move(constraint));
    }
    int pins = rng.below(3);
    for (int p = 0; p < pins; ++p) x.pins[rng.below(x.variables)] = 1 + rng.below(structure.domain);
    return x;
}

ColoredGraph generated_partial(std::uint64_t index, int max_vertices, int colors, int max_pins) {
    Counter rng{index * 0xBF58476D1CE4E5B9ull + 41};
    ColoredGraph g = generated_graph(rng.next() >> 8, max_vertices, colors);
    if (g.edge_count() > 0) {
        int pins = rng.below(max_pins + 1);
        for (int p = 0; p < pins; ++p) {
            int e = rng.below(g.edge_count());
            if (!g.edge_colored(e)) g.set_edge_color(e, 1 + rng.below(colors));
        }
    }
    return g;
}

AgreementReport check_col_to_csp(const ObstructionFamily& family, int count) {
    FiniteStructure s = build_G_F(family);
    return check_reduction_pair(
        [&](int i) { return solve_col(generated_graph(i, 5, family.colors), family).sat(); },
        [&](int i) {
            auto g = generated_graph(i, 5, family.colors);
            auto [instance, trace] = col_to_csp(g, family);
            return brute_csp_satisfiable(instance, s);
        },
        count);
}

AgreementReport check_csp_to_ext(const ObstructionFamily& family, const Gadget& equality, int count) {
    FiniteStructure s = build_G_F(family);
    return check_reduction_pair(
        [&](int i) { return brute_csp_satisfiable(generated_csp(i, s, 6), s); },
        [&](int i) {
            auto [graph, trace] = csp_to_ext(generated_csp(i, s, 6), family, equality);
            return solve_ext(graph, family, reduction_solve_options()).sat();
        },
        count);
}

AgreementReport check_ext_to_col(const ObstructionFamily& family,
                                 const std::map<int, Gadget>& determiners, int count) {
    return check_reduction_pair(
        [&](int i) {
            auto g = generated_partial(i, 5, family.colors, 3);
            return solve_ext(g, family, reduction_solve_options()).sat();
        },
        [&](int i) {
            auto g = generated_partial(i, 5, family.colors, 3);
            auto [col, trace] = ext_to_col(g, family, determiners);
            return solve_col(col, family, reduction_solve_options()).sat();
        },
        count);
}

} // namespace patcol
