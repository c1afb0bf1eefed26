#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "patcol/reductions.hpp"
#include "patcol/solver.hpp"

using namespace patcol;
using namespace patcol::testing;

namespace {

const ObstructionFamily& tri() {
    static ObstructionFamily f = triangle_family();
    return f;
}

const Gadget& eq_gadget() {
    static Gadget eq = build_equality_gadget(tri(), 3);
    return eq;
}

const std::map<int, Gadget>& remote_dets() {
    static std::map<int, Gadget> dets = [] {
        auto pipe = build_determiner_pipeline(complete_graph(6, 2), tri());
        return build_remote_determiners(pipe, 3, tri());
    }();
    return dets;
}

SolveOptions heavy() {
    SolveOptions opts;
    opts.propagate = true;
    opts.probe = true;
    return opts;
}

} // namespace

TEST_CASE("col_to_csp on a triangle") {
    auto [instance, trace] = col_to_csp(complete_graph(3, 2), tri());
    CHECK(instance.variables == 3);
    // Six homomorphisms collapse to one constraint up to edge automorphisms.
    REQUIRE(instance.constraints.size() == 1);
    CHECK(instance.constraints[0].relation == "R_K3");
    CHECK(instance.pins.empty());

    auto [empty, trace2] = col_to_csp(ColoredGraph(3, false, 2), tri());
    CHECK(empty.variables == 0);
    CHECK(empty.constraints.empty());
    auto s = build_G_F(tri());
    CHECK(brute_csp_satisfiable(empty, s));
}

TEST_CASE("col_to_csp matches the solver on small graphs") {
    auto s = build_G_F(tri());
    for (int n = 1; n <= 4; ++n) {
        int slots = n * (n - 1) / 2;
        for (int bits = 0; bits < (1 << slots); ++bits) {
            ColoredGraph g(n, false, 2);
            int idx = 0;
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v, ++idx)
                    if (bits >> idx & 1) g.add_edge(u, v);
            auto [instance, trace] = col_to_csp(g, tri());
            CHECK(brute_csp_satisfiable(instance, s) == solve_col(g, tri()).sat());
        }
    }
    CHECK(check_col_to_csp(tri(), 60).all_agree());
}

TEST_CASE("csp_to_ext without sharing is a bare obstruction copy") {
    CspInstance x;
    x.variables = 3;
    x.constraints.push_back({"R_K3", {0, 1, 2}});
    auto [graph, trace] = csp_to_ext(x, tri(), eq_gadget());
    CHECK(graph.vertex_count() == 3);
    CHECK(graph.edge_count() == 3);
    CHECK(graph.colored_edge_count() == 0);
    CHECK(solve_ext(graph, tri()).sat());

    x.pins[0] = 1;
    auto [pinned, trace2] = csp_to_ext(x, tri(), eq_gadget());
    CHECK(pinned.colored_edge_count() == 1);
    CHECK(solve_ext(pinned, tri()).sat());
}

TEST_CASE("shared variables get an equality gadget") {
    CspInstance x;
    x.variables = 5;
    x.constraints.push_back({"R_K3", {0, 1, 2}});
    x.constraints.push_back({"R_K3", {0, 3, 4}});
    auto [graph, trace] = csp_to_ext(x, tri(), eq_gadget());
    // Two triangles plus one equality gadget glued over two of its edges.
    CHECK(graph.edge_count() == 3 + 3 + eq_gadget().graph.edge_count() - 2);
    auto s = build_G_F(tri());
    CHECK(solve_ext(graph, tri(), heavy()).sat() == brute_csp_satisfiable(x, s));

    // A repeated variable inside one constraint forces the self-gluing path.
    CspInstance rep;
    rep.variables = 2;
    rep.constraints.push_back({"R_K3", {0, 0, 1}});
    auto [rep_graph, rep_trace] = csp_to_ext(rep, tri(), eq_gadget());
    CHECK(solve_ext(rep_graph, tri(), heavy()).sat() == brute_csp_satisfiable(rep, s));

    // Forced unsatisfiability: pins 1 and 2 on the same variable.
    CspInstance clash;
    clash.variables = 4;
    clash.constraints.push_back({"R_K3", {0, 1, 2}});
    clash.constraints.push_back({"R_K3", {0, 1, 3}});
    clash.pins[0] = 1;
    clash.pins[1] = 1;
    // Wait for tuples where variables 0 and 1 sit on adjacent triangle edges:
    // pinning both 1 leaves the third edge 2; satisfiable, so check parity
    // against the oracle rather than a fixed verdict.
    auto [clash_graph, clash_trace] = csp_to_ext(clash, tri(), eq_gadget());
    CHECK(solve_ext(clash_graph, tri(), heavy()).sat() == brute_csp_satisfiable(clash, s));
}

TEST_CASE("csp_to_ext agrees with the brute oracle on generated instances") {
    auto report = check_csp_to_ext(tri(), eq_gadget(), 60);
    CHECK(report.total == 60);
    CHECK(report.all_agree());
}

TEST_CASE("csp_to_ext rejects unverified gadgets") {
    Gadget fake = eq_gadget();
    fake.verified = false;
    CspInstance x;
    x.variables = 1;
    CHECK_THROWS_AS(csp_to_ext(x, tri(), fake), Error);
}

TEST_CASE("ext_to_col leaves unprecolored inputs alone") {
    auto k3 = complete_graph(3, 2);
    auto [out, trace] = ext_to_col(k3, tri(), remote_dets());
    CHECK(out.vertex_count() == 3);
    CHECK(out.edge_count() == 3);
}

TEST_CASE("ext_to_col agrees on the satisfiable side") {
    ColoredGraph one = complete_graph(3, 2);
    one.set_edge_color(0, 1);
    auto [out, trace] = ext_to_col(one, tri(), remote_dets());
    CHECK(out.colored_edge_count() == 0);
    CHECK(solve_ext(one, tri()).sat());
    CHECK(solve_col(out, tri(), heavy()).sat());

    // Two same-colored precolored edges share their determiner frontier.
    ColoredGraph two = complete_graph(3, 2);
    two.set_edge_color(0, 1);
    two.set_edge_color(1, 1);
    auto [out2, trace2] = ext_to_col(two, tri(), remote_dets());
    int tdet = remote_dets().at(1).graph.vertex_count();
    CHECK(out2.vertex_count() < 3 + 2 * (tdet - 2)); // identification merged vertices
    CHECK(solve_col(out2, tri(), heavy()).sat() == solve_ext(two, tri()).sat());
}

TEST_CASE("ext_to_col without the orbit gadget misses deep unsatisfiability") {
    // The mono-precolored triangle is already violated, but erasing every
    // color lets the output escape through a non-canonical frontier pattern.
    // This is the documented gap of the orbit-free reduction; the agreement
    // machinery must surface it rather than hide it.
    ColoredGraph three = mono_colored(complete_graph(3, 2), 1);
    CHECK_FALSE(solve_ext(three, tri()).sat());
    auto [out, trace] = ext_to_col(three, tri(), remote_dets());
    CHECK(solve_col(out, tri(), heavy()).sat());
}

TEST_CASE("reduction pair checker reports disagreements") {
    auto always_sat = [](int) { return true; };
    auto sometimes = [](int i) { return i % 3 != 0; };
    auto report = check_reduction_pair(always_sat, sometimes, 9);
    CHECK(report.total == 9);
    CHECK(report.agreed == 6);
    CHECK(report.disagreements.size() == 3);

    CHECK(check_reduction_pair(always_sat, always_sat, 0).all_agree());
}

TEST_CASE("a corrupted equality gadget is caught by the round trip") {
    Gadget corrupted = eq_gadget();
    // Strip a precolored chain edge but keep claiming verified status.
    corrupted.graph.clear_edge_color(corrupted.graph.colored_edges().front());
    auto report = check_csp_to_ext(tri(), corrupted, 40);
    CHECK_FALSE(report.all_agree());
}
