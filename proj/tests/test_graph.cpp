#include <doctest.h>

#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "oracles.hpp"
#include "patcol/canonical.hpp"
#include "patcol/family.hpp"
#include "patcol/graph.hpp"

using namespace patcol;
using namespace patcol::testing;

TEST_CASE("disjoint union basics") {
    ColoredGraph k1(1, false, 2);
    auto u = disjoint_union(k1, k1);
    CHECK(u.vertex_count() == 2);
    CHECK(u.edge_count() == 0);

    auto colored = mono_colored(complete_graph(3, 2), 1);
    auto plain = complete_graph(3, 2);
    auto both = disjoint_union(colored, plain);
    CHECK(both.vertex_count() == 6);
    CHECK(both.edge_count() == 6);
    CHECK(both.colored_edge_count() == 3);

    ColoredGraph wrong(1, false, 3);
    CHECK_THROWS_AS(disjoint_union(k1, wrong), Error);
}

TEST_CASE("disjoint union vertex counts add up") {
    oracle::Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        auto g = oracle::random_graph(rng, 6, 2, 50);
        auto h = oracle::random_graph(rng, 6, 2, 50);
        auto u = disjoint_union(g, h);
        CHECK(u.vertex_count() == g.vertex_count() + h.vertex_count());
        CHECK(u.edge_count() == g.edge_count() + h.edge_count());
    }
}

TEST_CASE("amalgamate glues single edges into one") {
    ColoredGraph a(2, false, 2);
    a.add_edge(0, 1);
    ColoredGraph b(2, false, 2);
    b.add_edge(0, 1);
    auto res = amalgamate(a, b, {{{0, false}, {0, false}}});
    CHECK(res.graph.vertex_count() == 2);
    CHECK(res.graph.edge_count() == 1);
}

TEST_CASE("amalgamate two triangles over an edge") {
    auto t1 = complete_graph(3, 2);
    auto t2 = complete_graph(3, 2);
    auto res = amalgamate(t1, t2, {{{0, false}, {0, false}}});
    CHECK(res.graph.vertex_count() == 4);
    CHECK(res.graph.edge_count() == 5);
    // Embeddings reproduce both sides.
    for (int e = 0; e < t1.edge_count(); ++e) {
        Edge orig = t1.edge(e);
        Edge img = res.graph.edge(res.g_edge_map[e]);
        CHECK(img.u == res.g_vertex_map[orig.u]);
        CHECK(img.v == res.g_vertex_map[orig.v]);
    }
    for (int e = 0; e < t2.edge_count(); ++e) {
        int img = res.h_edge_map[e];
        CHECK(img >= 0);
        Edge ie = res.graph.edge(img);
        std::set<int> want{res.h_vertex_map[t2.edge(e).u], res.h_vertex_map[t2.edge(e).v]};
        CHECK(want == std::set<int>{ie.u, ie.v});
    }
}

TEST_CASE("amalgamate rejects clashing colors and shared endpoints") {
    auto t1 = complete_graph(3, 2);
    t1.set_edge_color(0, 1);
    auto t2 = complete_graph(3, 2);
    t2.set_edge_color(0, 2);
    CHECK_THROWS_AS(amalgamate(t1, t2, {{{0, false}, {0, false}}}), Error);

    // Edges 0 and 1 of K_3 share a vertex.
    CHECK_THROWS_AS(amalgamate(t1, t2, {{{0, false}, {0, false}}, {{1, false}, {1, false}}}), Error);
}

TEST_CASE("amalgamation preserves freeness for the triangle family") {
    // Edge-amalgams of free graphs stay free when the obstructions are mono
    // cliques: a straddling triangle would have to live on one side.
    auto family = triangle_family();
    oracle::Rng rng(7);
    int checked = 0;
    while (checked < 120) {
        auto g = oracle::random_graph(rng, 5, 2, 60);
        auto h = oracle::random_graph(rng, 5, 2, 60);
        if (g.edge_count() == 0 || h.edge_count() == 0) continue;
        ColoredGraph gc = g, hc = h;
        for (int e = 0; e < gc.edge_count(); ++e) gc.set_edge_color(e, 1 + rng.below(2));
        for (int e = 0; e < hc.edge_count(); ++e) hc.set_edge_color(e, 1 + rng.below(2));
        if (!oracle::brute_free(gc, family) || !oracle::brute_free(hc, family)) continue;
        int ge = rng.below(gc.edge_count());
        int he = rng.below(hc.edge_count());
        if (gc.edge_color(ge) != hc.edge_color(he)) continue;
        auto res = amalgamate(gc, hc, {{{ge, false}, {he, rng.chance(50)}}});
        CHECK(oracle::brute_free(res.graph, family));
        ++checked;
    }
}

TEST_CASE("quotient identity is isomorphic") {
    auto g = mono_colored(cycle_graph(5, 2), 1);
    std::vector<int> identity{0, 1, 2, 3, 4};
    auto q = quotient(g, identity);
    CHECK(is_isomorphic(q.graph, g));
}

TEST_CASE("quotient collapses a path") {
    auto p = path_graph(3, 1); // a-b-c
    auto q = quotient(p, {0, 1, 0});
    CHECK(q.graph.vertex_count() == 2);
    CHECK(q.graph.edge_count() == 1);
}

TEST_CASE("quotient rejections") {
    auto p = path_graph(3, 2);
    CHECK_THROWS_AS(quotient(p, {0, 0, 1}), Error); // adjacent merge
    ColoredGraph g(4, false, 2);                    // two parallel-to-be edges, clashing colors
    g.add_edge(0, 1);
    g.add_edge(2, 3);
    g.set_edge_color(0, 1);
    g.set_edge_color(1, 2);
    CHECK_THROWS_AS(quotient(g, {0, 1, 0, 1}), Error);
}

TEST_CASE("C_5 quotients include the triangle") {
    auto c5 = mono_colored(cycle_graph(5, 1), 1);
    std::set<std::string> images;
    for_each_partition(5, [&](const std::vector<int>& part) {
        bool loop = false;
        for (int e = 0; e < c5.edge_count(); ++e)
            if (part[c5.edge(e).u] == part[c5.edge(e).v]) loop = true;
        if (loop) return;
        images.insert(canonical_key(quotient(c5, part).graph));
    });
    CHECK(images.count(canonical_key(mono_colored(complete_graph(3, 1), 1))) == 1);
}

TEST_CASE("edge distances") {
    auto p = path_graph(4, 1); // edges 0:ab 1:bc 2:cd
    CHECK(edge_distance(p, 0, 0) == 0);
    CHECK(edge_distance(p, 0, 2) == 1);
    auto c6 = cycle_graph(6, 1);
    CHECK(edge_distance(c6, 0, 3) == 2); // antipodal

    ColoredGraph two(4, false, 1);
    two.add_edge(0, 1);
    two.add_edge(2, 3);
    CHECK_FALSE(edge_distance(two, 0, 1).has_value());
}

TEST_CASE("edge distance agrees with Floyd-Warshall and is symmetric") {
    oracle::Rng rng(11);
    for (int i = 0; i < 60; ++i) {
        auto g = oracle::random_graph(rng, 7, 1, 40);
        if (g.edge_count() < 2) continue;
        int e = rng.below(g.edge_count());
        int f = rng.below(g.edge_count());
        CHECK(edge_distance(g, e, f) == oracle::edge_distance_by_floyd(g, e, f));
        CHECK(edge_distance(g, e, f) == edge_distance(g, f, e));
    }
}

TEST_CASE("set distance") {
    auto p = path_graph(5, 1);
    CHECK(set_distance(p, 1, {1, 3}) == 0);        // e in s
    CHECK(set_distance(p, 0, {3}) == edge_distance(p, 0, 3));
    CHECK_THROWS_AS(set_distance(p, 0, {}), Error);

    oracle::Rng rng(13);
    for (int i = 0; i < 40; ++i) {
        auto g = oracle::random_graph(rng, 7, 1, 40);
        if (g.edge_count() < 3) continue;
        int e = rng.below(g.edge_count());
        std::vector<int> s{rng.below(g.edge_count()), rng.below(g.edge_count())};
        std::optional<int> best;
        for (int f : s) {
            auto d = oracle::edge_distance_by_floyd(g, e, f);
            if (d && (!best || *d < *best)) best = d;
        }
        CHECK(set_distance(g, e, s) == best);
    }
}

TEST_CASE("connectivity") {
    CHECK(is_connected(ColoredGraph(1, false, 1)));
    CHECK(is_connected(ColoredGraph(0, false, 1)));
    auto two_triangles = disjoint_union(complete_graph(3, 1), complete_graph(3, 1));
    CHECK_FALSE(is_connected(two_triangles));

    oracle::Rng rng(17);
    for (int i = 0; i < 80; ++i) {
        auto g = oracle::random_graph(rng, 7, 1, 35);
        CHECK(is_connected(g) == oracle::connected_by_unionfind(g));
    }
}

TEST_CASE("find_violation on triangles") {
    auto family = triangle_family();
    auto k3 = mono_colored(complete_graph(3, 2), 1);
    auto hit = find_violation(k3, family);
    REQUIRE(hit.has_value());
    CHECK(hit->obstruction == 0);

    ColoredGraph mixed = complete_graph(3, 2);
    mixed.set_edge_color(0, 1);
    mixed.set_edge_color(1, 1);
    mixed.set_edge_color(2, 2);
    CHECK_FALSE(find_violation(mixed, family).has_value());
}

TEST_CASE("odd cycle obstruction maps onto a triangle") {
    ObstructionFamily family = mono_family(2, {{cycle_graph(5, 2), 1}});
    auto k3 = mono_colored(complete_graph(3, 2), 1);
    CHECK(oracle::brute_hom_exists(family.obstructions[0], k3));
    CHECK(find_violation(k3, family).has_value());
}

TEST_CASE("find_violation matches the exhaustive oracle") {
    auto family = triangle_family();
    oracle::Rng rng(23);
    for (int i = 0; i < 150; ++i) {
        auto g = oracle::random_partial_coloring(rng, oracle::random_graph(rng, 6, 2, 55), 70);
        bool found = find_violation(g, family).has_value();
        bool oracle_found = false;
        for (const auto& obs : family.obstructions)
            if (oracle::brute_hom_exists(obs, g)) oracle_found = true;
        CHECK(found == oracle_found);
    }
}

TEST_CASE("find_violation focus only reports violations through the focus edge") {
    auto family = triangle_family();
    // Two disjoint mono triangles; focus on an edge of the second.
    auto g = disjoint_union(mono_colored(complete_graph(3, 2), 1), mono_colored(complete_graph(3, 2), 2));
    auto hit = find_violation(g, family, 3);
    REQUIRE(hit.has_value());
    CHECK(hit->obstruction == 1);
    for (int img : hit->hom) CHECK(img >= 3);
}

TEST_CASE("violation homs returned are genuine") {
    auto family = triangle_family();
    auto k6 = mono_colored(complete_graph(6, 2), 1);
    auto hit = find_violation(k6, family);
    REQUIRE(hit.has_value());
    const auto& obs = family.obstructions[hit->obstruction];
    for (int e = 0; e < obs.edge_count(); ++e) {
        int u = hit->hom[obs.edge(e).u];
        int v = hit->hom[obs.edge(e).v];
        int te = k6.find_edge(u, v);
        REQUIRE(te >= 0);
        CHECK(k6.edge_color(te) == obs.edge_color(e));
    }
}

TEST_CASE("cut structure of K_4 and the bowtie") {
    auto k4 = complete_graph(4, 1);
    auto cuts = cut_structure(k4);
    CHECK(cuts.cut_vertices.empty());
    CHECK(cuts.two_cuts.empty());

    // Bowtie: triangles 0,1,2 and 2,3,4 sharing vertex 2.
    ColoredGraph bowtie(5, false, 1);
    bowtie.add_edge(0, 1);
    bowtie.add_edge(0, 2);
    bowtie.add_edge(1, 2);
    bowtie.add_edge(2, 3);
    bowtie.add_edge(2, 4);
    bowtie.add_edge(3, 4);
    auto bcuts = cut_structure(bowtie);
    REQUIRE(bcuts.cut_vertices.size() == 1);
    CHECK(bcuts.cut_vertices[0].removed == std::vector<int>{2});
    CHECK(bcuts.cut_vertices[0].side1.size() == 3);
    CHECK(bcuts.cut_vertices[0].side2.size() == 3);

    CHECK_THROWS_AS(cut_structure(disjoint_union(k4, k4)), Error);
}

TEST_CASE("two-cuts of C_5 are the non-adjacent pairs") {
    auto c5 = cycle_graph(5, 1);
    auto cuts = cut_structure(c5);
    CHECK(cuts.cut_vertices.empty());
    REQUIRE(cuts.two_cuts.size() == 5);
    for (const auto& cut : cuts.two_cuts) {
        REQUIRE(cut.removed.size() == 2);
        CHECK(c5.find_edge(cut.removed[0], cut.removed[1]) < 0);
    }
}

TEST_CASE("oriented graphs distinguish directions") {
    ColoredGraph g(3, true, 1);
    g.add_edge(0, 1);
    g.add_edge(1, 0); // anti-parallel is allowed when oriented
    CHECK(g.edge_count() == 2);
    CHECK(g.find_edge(0, 1) == 0);
    CHECK(g.find_edge(1, 0) == 1);

    // Directed 2-path needs head-to-tail edges; a sink vertex has none.
    ColoredGraph pattern(3, true, 1);
    pattern.add_edge(0, 1);
    pattern.add_edge(1, 2);
    pattern.set_edge_color(0, 1);
    pattern.set_edge_color(1, 1);
    ColoredGraph target(3, true, 1);
    target.add_edge(0, 1);
    target.add_edge(2, 1);
    target.set_edge_color(0, 1);
    target.set_edge_color(1, 1);
    ObstructionFamily f;
    f.colors = 1;
    f.obstructions.push_back(pattern);
    CHECK_FALSE(find_violation(target, f).has_value());
    ColoredGraph chain(3, true, 1);
    chain.add_edge(0, 1);
    chain.add_edge(1, 2);
    chain.set_edge_color(0, 1);
    chain.set_edge_color(1, 1);
    CHECK(find_violation(chain, f).has_value());
}
