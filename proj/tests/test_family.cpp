#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "oracles.hpp"
#include "patcol/canonical.hpp"
#include "patcol/family.hpp"
#include "patcol/solver.hpp"

using namespace patcol;
using namespace patcol::testing;

TEST_CASE("validate flags broken families") {
    CHECK(validate(triangle_family()).empty());

    ObstructionFamily disconnected;
    disconnected.colors = 2;
    disconnected.obstructions.push_back(
        mono_colored(disjoint_union(complete_graph(3, 2), complete_graph(3, 2)), 1));
    CHECK(validate(disconnected).size() == 1);

    ObstructionFamily partial;
    partial.colors = 2;
    auto k3 = complete_graph(3, 2);
    k3.set_edge_color(0, 1);
    partial.obstructions.push_back(k3);
    CHECK(validate(partial).size() == 1);
}

TEST_CASE("prune_redundant drops the implied triangle") {
    // C_5 maps into the mono triangle, so the triangle obstruction is implied.
    ObstructionFamily f = mono_family(1, {{complete_graph(3, 1), 1}, {cycle_graph(5, 1), 1}});
    CHECK(oracle::brute_hom_exists(f.obstructions[1], f.obstructions[0]));
    CHECK_FALSE(oracle::brute_hom_exists(f.obstructions[0], f.obstructions[1]));

    auto pruned = prune_redundant(f);
    REQUIRE(pruned.obstructions.size() == 1);
    CHECK(pruned.obstructions[0].vertex_count() == 5);
}

TEST_CASE("prune_redundant keeps singletons and drops supercliques") {
    ObstructionFamily single = mono_family(1, {{complete_graph(3, 1), 1}});
    CHECK(prune_redundant(single).obstructions.size() == 1);

    ObstructionFamily pair = mono_family(1, {{complete_graph(3, 1), 1}, {complete_graph(4, 1), 1}});
    auto pruned = prune_redundant(pair);
    REQUIRE(pruned.obstructions.size() == 1);
    CHECK(pruned.obstructions[0].vertex_count() == 3);
}

TEST_CASE("prune_redundant keeps one member of a hom-equivalent pair") {
    ColoredGraph bowtie(5, false, 1);
    bowtie.add_edge(0, 1);
    bowtie.add_edge(0, 2);
    bowtie.add_edge(1, 2);
    bowtie.add_edge(2, 3);
    bowtie.add_edge(2, 4);
    bowtie.add_edge(3, 4);
    ObstructionFamily f = mono_family(1, {{complete_graph(3, 1), 1}, {bowtie, 1}});
    auto pruned = prune_redundant(f);
    REQUIRE(pruned.obstructions.size() == 1);
    CHECK(pruned.obstructions[0].vertex_count() == 3);
}

TEST_CASE("pruning preserves the coloring problem") {
    ObstructionFamily f = mono_family(1, {{complete_graph(3, 1), 1}, {cycle_graph(5, 1), 1}});
    auto pruned = prune_redundant(f);
    oracle::Rng rng(61);
    for (int i = 0; i < 80; ++i) {
        auto g = oracle::random_graph(rng, 5, 1, 50);
        CHECK(solve_col(g, f).sat() == solve_col(g, pruned).sat());
    }
}

TEST_CASE("is_recoloring on identity and constants") {
    auto tri = triangle_family();
    CHECK(is_recoloring(Recoloring::identity(2), tri, tri));

    // Constant 1 recolors the all-colorings family to itself: every preimage
    // coloring of K_3 is itself an obstruction.
    auto all8 = all_k3_colorings_family();
    Recoloring const1{{1, 1}, 2, 2};
    CHECK(is_recoloring(const1, all8, all8));

    // But not the two-triangle family: the preimage (1,1,2) has no member.
    CHECK_FALSE(is_recoloring(const1, tri, tri));
    Recoloring swap12{{2, 1}, 2, 2};
    CHECK(is_recoloring(swap12, tri, tri));
}

TEST_CASE("compute_core leaves the triangle family alone") {
    auto [core, rho] = compute_core(triangle_family());
    CHECK(core.colors == 2);
    CHECK(core.obstructions.size() == 2);
    CHECK(rho.map == std::vector<int>{1, 2});
}

TEST_CASE("compute_core collapses the all-colorings family to one color") {
    auto [core, rho] = compute_core(all_k3_colorings_family());
    CHECK(core.colors == 1);
    REQUIRE(core.obstructions.size() == 1);
    CHECK(is_isomorphic(core.obstructions[0], mono_colored(complete_graph(3, 1), 1)));
    CHECK(rho.map == std::vector<int>{1, 1});
}

TEST_CASE("compute_core is idempotent and preserves the problem") {
    auto all8 = all_k3_colorings_family();
    auto [core, rho] = compute_core(all8);
    auto [core2, rho2] = compute_core(core);
    CHECK(core2.colors == core.colors);

    oracle::Rng rng(67);
    for (int i = 0; i < 60; ++i) {
        auto g2 = oracle::random_graph(rng, 5, 2, 50);
        ColoredGraph g1(g2.vertex_count(), false, 1);
        for (int e = 0; e < g2.edge_count(); ++e) g1.add_edge(g2.edge(e).u, g2.edge(e).v);
        CHECK(solve_col(g2, all8).sat() == solve_col(g1, core).sat());
    }
}

TEST_CASE("single-color families are cores") {
    auto [core, rho] = compute_core(mono_family(1, {{complete_graph(3, 1), 1}}));
    CHECK(core.colors == 1);
    CHECK(core.obstructions.size() == 1);
}

TEST_CASE("orientation expansion") {
    ObstructionFamily edge = mono_family(1, {{path_graph(2, 1), 1}});
    auto oriented = orient_family(edge, false);
    CHECK(oriented.obstructions.size() == 2);

    ObstructionFamily tri = mono_family(1, {{complete_graph(3, 1), 1}});
    CHECK(orient_family(tri, false).obstructions.size() == 8);
    CHECK(orient_family(tri, true).obstructions.size() == 2);

    ObstructionFamily empty;
    empty.colors = 1;
    CHECK(orient_family(empty).obstructions.empty());

    CHECK_THROWS_AS(orient_family(orient_family(tri)), Error);
}

TEST_CASE("orientation keeps the problem intact") {
    auto tri = triangle_family();
    auto oriented = orient_family(tri);
    oracle::Rng rng(71);
    for (int i = 0; i < 50; ++i) {
        auto g = oracle::random_graph(rng, 5, 2, 55);
        // Orient the input lexicographically.
        ColoredGraph og(g.vertex_count(), true, 2);
        for (int e = 0; e < g.edge_count(); ++e) og.add_edge(g.edge(e).u, g.edge(e).v);
        CHECK(solve_col(g, tri).sat() == solve_col(og, oriented).sat());
    }
}
