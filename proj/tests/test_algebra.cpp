#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "patcol/algebra.hpp"

using namespace patcol;
using namespace patcol::testing;

namespace {

ObstructionFamily km_free_family(int clique_color_1, bool k4_mono_1) {
    // { mono-a K_3 or K_4, mono-b K_3, all colorings of K_4 } over two colors.
    ObstructionFamily f;
    f.colors = 2;
    f.obstructions.push_back(mono_colored(complete_graph(k4_mono_1 ? 4 : 3, 2), clique_color_1));
    f.obstructions.push_back(mono_colored(complete_graph(3, 2), 2));
    ColoredGraph k4 = complete_graph(4, 2);
    for (int bits = 0; bits < (1 << 6); ++bits) {
        ColoredGraph colored = k4;
        for (int e = 0; e < 6; ++e) colored.set_edge_color(e, ((bits >> e) & 1) + 1);
        f.obstructions.push_back(colored);
    }
    return f;
}

long long burnside_necklaces(int r, int k) {
    // (1/k) * sum over d | k of phi(d) * r^(k/d)
    auto phi = [](int n) {
        int result = n;
        for (int p = 2; p * p <= n; ++p) {
            if (n % p == 0) {
                while (n % p == 0) n /= p;
                result -= result / p;
            }
        }
        if (n > 1) result -= result / n;
        return result;
    };
    long long total = 0;
    for (int d = 1; d <= k; ++d) {
        if (k % d != 0) continue;
        long long power = 1;
        for (int t = 0; t < k / d; ++t) power *= r;
        total += phi(d) * power;
    }
    return total / k;
}

} // namespace

TEST_CASE("G_F of the triangle family") {
    auto s = build_G_F(triangle_family());
    CHECK(s.domain == 2);
    auto* r = s.find("R_K3");
    REQUIRE(r != nullptr);
    CHECK(r->arity == 3);
    CHECK(r->tuples.size() == 6); // non-constant triples
    for (const auto& t : r->tuples) {
        bool constant = t[0] == t[1] && t[1] == t[2];
        CHECK_FALSE(constant);
    }
    auto* s1 = s.find("S1");
    REQUIRE(s1 != nullptr);
    CHECK(s1->tuples == std::vector<std::vector<int>>{{1}});

    auto all8 = build_G_F(all_k3_colorings_family());
    CHECK(all8.find("R_K3")->tuples.empty());
}

TEST_CASE("projections are polymorphisms") {
    auto s = build_G_F(triangle_family());
    for (int k = 2; k <= 3; ++k) {
        FiniteFunction proj;
        proj.domain = 2;
        proj.arity = k;
        long long size = FiniteFunction::table_size(2, k);
        proj.table.resize(size);
        for (long long t = 0; t < size; ++t) {
            long long x = t;
            for (int pos = k - 1; pos >= 1; --pos) x /= 2;
            proj.table[t] = static_cast<int>(x % 2) + 1; // first coordinate
        }
        CHECK_FALSE(is_polymorphism(proj, s).has_value());
    }
}

TEST_CASE("violations come with a genuine witnessing matrix") {
    auto s = build_G_F(triangle_family());
    FiniteFunction f;
    f.domain = 2;
    f.arity = 2;
    f.table = {1, 1, 1, 2}; // commutative, f(1,2)=1
    auto bad = is_polymorphism(f, s);
    REQUIRE(bad.has_value());
    const auto* rel = s.find(bad->relation);
    REQUIRE(rel != nullptr);
    std::set<std::vector<int>> members(rel->tuples.begin(), rel->tuples.end());
    for (const auto& col : bad->columns) CHECK(members.count(col) == 1);
    CHECK(members.count(bad->image) == 0);

    FiniteFunction constant;
    constant.domain = 2;
    constant.arity = 2;
    constant.table = {1, 1, 1, 1};
    auto violated = is_polymorphism(constant, s);
    REQUIRE(violated.has_value());
    CHECK(violated->relation == "S2");
}

TEST_CASE("necklace counts match Burnside") {
    for (int r = 1; r <= 3; ++r)
        for (int k = 2; k <= 4; ++k) CHECK(count_necklaces(r, k) == burnside_necklaces(r, k));
}

TEST_CASE("the triangle structure has no small cyclic polymorphism") {
    auto s = build_G_F(triangle_family());
    for (int k = 2; k <= 4; ++k) {
        CHECK_FALSE(find_cyclic_polymorphism(s, k).has_value());
        CHECK_FALSE(find_cyclic_polymorphism(s, k, 10'000'000, 2).has_value());
    }
    CHECK_THROWS_AS(find_cyclic_polymorphism(s, 4, 3), Error); // budget
}

TEST_CASE("a full structure yields the least cyclic operation") {
    FiniteStructure s;
    s.domain = 2;
    FiniteStructure::Relation full;
    full.name = "R";
    full.arity = 2;
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) full.tuples.push_back({a, b});
    FiniteStructure::Relation s1{"S1", 1, {{1}}, {}, true, 1};
    FiniteStructure::Relation s2{"S2", 1, {{2}}, {}, true, 2};
    s.relations = {s1, s2, full};
    auto f = find_cyclic_polymorphism(s, 2);
    REQUIRE(f.has_value());
    // Lexicographically least with the singleton constraints: f(1,2)=1.
    CHECK(f->table == std::vector<int>{1, 1, 1, 2});
}

TEST_CASE("hardness matrices have member columns and an outside image") {
    auto family = triangle_family();
    for (int k = 2; k <= 4; ++k) {
        for (int p = 1; p <= 2; ++p) {
            auto matrix = hardness_matrix(family, k, 1, 2, p);
            CHECK(matrix.relation == "R_K3");
            CHECK(matrix.rows.size() == 3);
            for (const auto& row : matrix.rows) CHECK(row.size() == static_cast<size_t>(k));
            CHECK(matrix.columns_in_relation);
            CHECK(matrix.image_outside);
        }
    }
    // k = 2: rows (i,j), (j,i), then p-padding.
    auto m2 = hardness_matrix(family, 2, 1, 2, 2);
    CHECK(m2.rows[0] == std::vector<int>{1, 2});
    CHECK(m2.rows[1] == std::vector<int>{2, 1});
    CHECK(m2.rows[2] == std::vector<int>{2, 2});

    // Odd k: the second and third rows are rotations of the first.
    auto m3 = hardness_matrix(family, 3, 1, 2, 1);
    CHECK(m3.rows[0] == std::vector<int>{1, 2, 2});
    CHECK(m3.rows[1] == std::vector<int>{2, 2, 1});
    CHECK(m3.rows[2] == std::vector<int>{2, 1, 2});

    ObstructionFamily lonely = mono_family(2, {{complete_graph(3, 2), 1}});
    CHECK_THROWS_AS(hardness_matrix(lonely, 2, 1, 2, 2), Error);
}

TEST_CASE("classification of the clique families") {
    auto np = classify(km_free_family(1, false), 4);
    CHECK(np.verdict == Classification::NPComplete);
    CHECK(np.cross_check_consistent);
    CHECK(np.cyclic_found.size() == 3);
    for (const auto& [k, found] : np.cyclic_found) CHECK_FALSE(found);

    auto trivially = classify(km_free_family(1, true), 4);
    CHECK(trivially.verdict == Classification::TriviallyP);
    CHECK(trivially.witness_color == 1);
}

TEST_CASE("out-of-shape families are refused") {
    ObstructionFamily nonmono;
    nonmono.colors = 2;
    ColoredGraph c5 = cycle_graph(5, 2);
    for (int e = 0; e < 5; ++e) c5.set_edge_color(e, 1 + e % 2);
    nonmono.obstructions.push_back(c5);
    CHECK(classify(nonmono, 3).verdict == Classification::OutOfShape);

    ObstructionFamily path;
    path.colors = 1;
    path.obstructions.push_back(mono_colored(path_graph(3, 1), 1));
    CHECK(classify(path, 3).verdict == Classification::OutOfShape);

    // Partial K_m coloring set: one non-mono K_3 without the rest.
    ObstructionFamily partial;
    partial.colors = 2;
    ColoredGraph k3 = complete_graph(3, 2);
    k3.set_edge_color(0, 1);
    k3.set_edge_color(1, 1);
    k3.set_edge_color(2, 2);
    partial.obstructions.push_back(k3);
    CHECK(classify(partial, 3).verdict == Classification::OutOfShape);
}

TEST_CASE("degenerate families classify vacuously") {
    ObstructionFamily empty;
    empty.colors = 1;
    auto res = classify(empty, 3);
    CHECK(res.verdict == Classification::TriviallyP);
}

TEST_CASE("the clique threshold drives the verdict") {
    // With m = 3 the mono triangles themselves contain K_m, so the stated
    // trivial-P condition fires; the meaningful hardness use pairs the
    // threshold with a family closed under all K_m colorings.
    auto res3 = classify(triangle_family(), 3);
    CHECK(res3.verdict == Classification::TriviallyP);
    auto res4 = classify(triangle_family(), 4);
    CHECK(res4.verdict == Classification::NPComplete);
    CHECK(res4.cross_check_consistent);
}
