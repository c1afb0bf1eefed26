#include <doctest.h>

#include <map>
#include <set>

#include "helpers.hpp"
#include "oracles.hpp"
#include "patcol/normalize.hpp"
#include "patcol/solver.hpp"

using namespace patcol;
using namespace patcol::testing;

namespace {

// Two triangles sharing one vertex; triangle {0,1,2} colored a, {2,3,4} colored b.
ColoredGraph bowtie(int colors, int a, int b) {
    ColoredGraph g(5, false, colors);
    g.set_edge_color(g.add_edge(0, 1), a);
    g.set_edge_color(g.add_edge(0, 2), a);
    g.set_edge_color(g.add_edge(1, 2), a);
    g.set_edge_color(g.add_edge(2, 3), b);
    g.set_edge_color(g.add_edge(2, 4), b);
    g.set_edge_color(g.add_edge(3, 4), b);
    return g;
}

// Oriented K_4 minus an edge: two transitive triangles sharing the edge 0->1.
ColoredGraph oriented_k4e() {
    ColoredGraph g(4, true, 1);
    g.set_edge_color(g.add_edge(0, 1), 1);
    g.set_edge_color(g.add_edge(0, 2), 1);
    g.set_edge_color(g.add_edge(2, 1), 1);
    g.set_edge_color(g.add_edge(0, 3), 1);
    g.set_edge_color(g.add_edge(3, 1), 1);
    return g;
}

// Exhaustive edge-amalgamation check over small catalog graphs: every glued
// pair of free totally colored graphs must stay free.  Only usable when the
// palette and vertex-pair count are small.
void check_closure_exhaustive(const ObstructionFamily& family, int max_vertices) {
    std::vector<ColoredGraph> catalog;
    for (int n = 3; n <= max_vertices; ++n) {
        ColoredGraph cyc(n, true, family.colors);
        for (int v = 0; v < n; ++v) cyc.add_edge(v, (v + 1) % n);
        catalog.push_back(cyc);
        ColoredGraph pth(n, true, family.colors);
        for (int v = 0; v + 1 < n; ++v) pth.add_edge(v, v + 1);
        catalog.push_back(pth);
    }
    ColoredGraph tri(3, true, family.colors);
    tri.add_edge(0, 1);
    tri.add_edge(0, 2);
    tri.add_edge(2, 1);
    catalog.push_back(tri);

    REQUIRE(family.vertex_colors == 0);
    std::vector<ColoredGraph> free_graphs;
    for (const auto& g : catalog) {
        std::vector<int> pick(g.edge_count(), 1);
        while (true) {
            ColoredGraph total = g;
            for (int e = 0; e < g.edge_count(); ++e) total.set_edge_color(e, pick[e]);
            if (oracle::brute_free(total, family)) free_graphs.push_back(total);
            int pos = g.edge_count() - 1;
            while (pos >= 0) {
                if (++pick[pos] <= family.colors) break;
                pick[pos] = 1;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    int checked = 0;
    for (size_t i = 0; i < free_graphs.size(); ++i) {
        for (size_t j = i; j < free_graphs.size(); ++j) {
            const auto& a = free_graphs[i];
            const auto& b = free_graphs[j];
            for (int ea = 0; ea < a.edge_count(); ++ea) {
                for (int eb = 0; eb < b.edge_count(); ++eb) {
                    if (a.edge_color(ea) != b.edge_color(eb)) continue;
                    auto glued = amalgamate(a, b, {{{ea, false}, {eb, false}}});
                    CHECK(oracle::brute_free(glued.graph, family));
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 0);
}

} // namespace

TEST_CASE("normalize on a 3-connected family touches only quotients and the palette") {
    auto tri = orient_family(triangle_family());
    auto norm = normalize(tri);
    CHECK(norm.marker_pairs == 0);
    CHECK(norm.vertex_pairs == 0);
    CHECK(norm.one_cut_events == 0);
    CHECK(norm.two_cuts.empty());
    CHECK(norm.family.colors == 2);
    CHECK(norm.family.vertex_colors == 0);
    // Identity palette: the problem is untouched.
    oracle::Rng rng(101);
    for (int i = 0; i < 40; ++i) {
        auto g = oracle::random_graph(rng, 5, 2, 55);
        CHECK(solve_col(g, triangle_family()).sat() == solve_col(lift_input(g, norm), norm.family).sat());
    }
    check_closure_exhaustive(norm.family, 5);
}

TEST_CASE("normalize splits the two-colored bowtie at its cut vertex") {
    // Oriented so that both triangles point into the shared vertex: every
    // cross-triangle quotient then clashes on a merged edge and the only
    // splitting is the one-cut at the shared vertex.
    ObstructionFamily f;
    f.colors = 2;
    ColoredGraph b(5, true, 2);
    b.set_edge_color(b.add_edge(0, 1), 1);
    b.set_edge_color(b.add_edge(0, 4), 1);
    b.set_edge_color(b.add_edge(1, 4), 1);
    b.set_edge_color(b.add_edge(2, 3), 2);
    b.set_edge_color(b.add_edge(2, 4), 2);
    b.set_edge_color(b.add_edge(3, 4), 2);
    f.obstructions.push_back(b);
    auto norm = normalize(f);

    CHECK(norm.one_cut_events == 1);
    CHECK(norm.vertex_pairs == 1);
    CHECK(norm.marker_pairs == 0);
    CHECK(norm.family.colors == 2);
    CHECK(norm.family.vertex_colors == 2);

    // The clash obstruction and apex-colored triangle pieces are present.
    bool found_clash = false, found_apex = false;
    for (const auto& obs : norm.family.obstructions) {
        if (obs.vertex_count() == 1 && obs.edge_count() == 0 && obs.vertex_color_mask(0) == 0b11)
            found_clash = true;
        if (obs.vertex_count() == 3 && obs.edge_count() == 3 && obs.any_vertex_colored()) found_apex = true;
    }
    CHECK(found_clash);
    CHECK(found_apex);

    // Same problem on every oriented graph with <= 4 vertices (one direction
    // per vertex pair), plus sampled 5-vertex ones.
    for (int n = 1; n <= 4; ++n) {
        std::vector<std::pair<int, int>> slots;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) slots.push_back({u, v});
        int total = 1;
        for (size_t s = 0; s < slots.size(); ++s) total *= 3;
        for (int code = 0; code < total; ++code) {
            ColoredGraph g(n, true, 2);
            int c = code;
            for (auto [u, v] : slots) {
                int pick = c % 3;
                c /= 3;
                if (pick == 1) g.add_edge(u, v);
                if (pick == 2) g.add_edge(v, u);
            }
            bool original = solve_col(g, f).sat();
            bool normalized = solve_col(lift_input(g, norm), norm.family).sat();
            CHECK(original == normalized);
        }
    }
    oracle::Rng rng(103);
    for (int i = 0; i < 30; ++i) {
        ColoredGraph g(5, true, 2);
        for (int u = 0; u < 5; ++u)
            for (int v = u + 1; v < 5; ++v) {
                int pick = rng.below(3);
                if (pick == 1) g.add_edge(u, v);
                if (pick == 2) g.add_edge(v, u);
            }
        CHECK(solve_col(g, f).sat() == solve_col(lift_input(g, norm), norm.family).sat());
    }
}

TEST_CASE("normalize splits an adjacent two-cut with fresh markers") {
    ObstructionFamily f;
    f.colors = 1;
    f.obstructions.push_back(oriented_k4e());
    auto norm = normalize(f);

    CHECK(norm.marker_pairs >= 1);
    CHECK(norm.vertex_pairs == 0);
    CHECK(norm.family.colors == palette_size(1, norm.marker_pairs));
    bool edge_case_seen = false;
    for (const auto& rec : norm.two_cuts)
        if (rec.edge_case) edge_case_seen = true;
    CHECK(edge_case_seen);

    // Same problem for oriented inputs up to 4 vertices (sampled densely).
    oracle::Rng rng(107);
    for (int i = 0; i < 120; ++i) {
        int n = 1 + rng.below(4);
        ColoredGraph g(n, true, 1);
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (u != v && !g.has_edge(u, v) && rng.chance(45)) g.add_edge(u, v);
        bool original = solve_col(g, f).sat();
        bool normalized = solve_col(lift_input(g, norm), norm.family).sat();
        CHECK(original == normalized);
    }

    check_closure_exhaustive(norm.family, 4);
}

TEST_CASE("normalize transcript shows the bowtie one-cut pieces") {
    ObstructionFamily f;
    f.colors = 1;
    f.obstructions.push_back(bowtie(1, 1, 1));
    NormalizeOptions opts;
    opts.splits_only = true;
    opts.max_marker_pairs = 62;
    auto norm = normalize(orient_family(f), opts);
    CHECK(norm.one_cut_events > 0);
    CHECK(norm.vertex_pairs > 0);
}

TEST_CASE("normalize fires the two-cut phase on every non-adjacent pair of C_5") {
    ObstructionFamily f;
    f.colors = 1;
    f.obstructions.push_back(mono_colored(cycle_graph(5, 1), 1));
    auto oriented = orient_family(f);
    size_t c5_classes = oriented.obstructions.size();

    NormalizeOptions opts;
    opts.splits_only = true;
    opts.max_marker_pairs = 62;
    auto norm = normalize(oriented, opts);

    // Group the records of 5-vertex members (the oriented C_5 classes and
    // nothing else at that size) by member identity.
    std::map<std::string, std::set<std::pair<int, int>>> by_member;
    for (const auto& rec : norm.two_cuts)
        if (rec.member_vertices == 5) by_member[rec.member_key].insert({rec.v, rec.w});

    CHECK(by_member.size() == c5_classes);
    std::set<std::pair<int, int>> expected{{0, 2}, {0, 3}, {1, 3}, {1, 4}, {2, 4}};
    for (const auto& [key, pairs] : by_member) CHECK(pairs == expected);
    for (const auto& rec : norm.two_cuts)
        if (rec.member_vertices == 5) CHECK_FALSE(rec.edge_case);

    // The full normal form of this family does not materialize at desk scale.
    CHECK_THROWS_AS(normalize(oriented), Error);
}
