#include "patcol/canonical.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>

namespace patcol {

namespace {

constexpr int kMaxCanonicalVertices = 10;

std::vector<std::int64_t> encode_under(const ColoredGraph& g, const std::vector<int>& perm) {
    // perm[old] = new id
    std::vector<std::int64_t> code;
    code.push_back(g.vertex_count());
    code.push_back(g.oriented() ? 1 : 0);
    code.push_back(g.colors());
    code.push_back(g.vertex_colors());
    std::vector<std::array<std::int64_t, 3>> edges;
    for (int e = 0; e < g.edge_count(); ++e) {
        std::int64_t u = perm[g.edge(e).u];
        std::int64_t v = perm[g.edge(e).v];
        if (!g.oriented() && u > v) std::swap(u, v);
        edges.push_back({u, v, g.edge_color(e)});
    }
    std::sort(edges.begin(), edges.end());
    for (const auto& t : edges) {
        code.push_back(t[0]);
        code.push_back(t[1]);
        code.push_back(t[2]);
    }
    if (g.vertex_colors() > 0) {
        std::vector<std::int64_t> masks(g.vertex_count());
        for (int v = 0; v < g.vertex_count(); ++v)
            masks[perm[v]] = static_cast<std::int64_t>(g.vertex_color_mask(v));
        code.insert(code.end(), masks.begin(), masks.end());
    }
    return code;
}

void for_each_permutation(int n, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        fn(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

std::string to_key(const std::vector<std::int64_t>& code) {
    std::ostringstream out;
    for (auto x : code) out << x << ',';
    return out.str();
}

} // namespace

std::string canonical_key(const ColoredGraph& g) {
    if (g.vertex_count() > kMaxCanonicalVertices)
        fail(ErrorCode::TooLarge, "canonical form limited to " + std::to_string(kMaxCanonicalVertices) + " vertices");
    std::vector<std::int64_t> best;
    for_each_permutation(g.vertex_count(), [&](const std::vector<int>& perm) {
        auto code = encode_under(g, perm);
        if (best.empty() || code < best) best = std::move(code);
    });
    if (best.empty()) best = encode_under(g, {});
    return to_key(best);
}

ColoredGraph canonical_form(const ColoredGraph& g) {
    if (g.vertex_count() > kMaxCanonicalVertices)
        fail(ErrorCode::TooLarge, "canonical form limited to small graphs");
    std::vector<std::int64_t> best;
    std::vector<int> best_perm;
    for_each_permutation(g.vertex_count(), [&](const std::vector<int>& perm) {
        auto code = encode_under(g, perm);
        if (best.empty() || code < best) {
            best = std::move(code);
            best_perm = perm;
        }
    });
    ColoredGraph out(g.vertex_count(), g.oriented(), g.colors());
    if (g.vertex_colors() > 0) out.set_vertex_color_universe(g.vertex_colors());
    std::vector<std::array<std::int64_t, 4>> edges;
    for (int e = 0; e < g.edge_count(); ++e) {
        std::int64_t u = best_perm[g.edge(e).u];
        std::int64_t v = best_perm[g.edge(e).v];
        if (!g.oriented() && u > v) std::swap(u, v);
        edges.push_back({u, v, g.edge_color(e), e});
    }
    std::sort(edges.begin(), edges.end());
    for (const auto& t : edges) {
        int idx = out.add_edge(static_cast<int>(t[0]), static_cast<int>(t[1]));
        if (t[2] != 0) out.set_edge_color(idx, static_cast<int>(t[2]));
    }
    if (g.vertex_colors() > 0)
        for (int v = 0; v < g.vertex_count(); ++v)
            out.set_vertex_color_mask(best_perm[v], g.vertex_color_mask(v));
    return out;
}

bool is_isomorphic(const ColoredGraph& a, const ColoredGraph& b) {
    if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
    if (a.oriented() != b.oriented() || a.colors() != b.colors() || a.vertex_colors() != b.vertex_colors())
        return false;
    return canonical_key(a) == canonical_key(b);
}

std::vector<std::vector<int>> vertex_automorphisms(const ColoredGraph& g) {
    if (g.vertex_count() > kMaxCanonicalVertices)
        fail(ErrorCode::TooLarge, "automorphism search limited to small graphs");
    auto identity_code = encode_under(g, [&] {
        std::vector<int> id(g.vertex_count());
        std::iota(id.begin(), id.end(), 0);
        return id;
    }());
    std::vector<std::vector<int>> autos;
    for_each_permutation(g.vertex_count(), [&](const std::vector<int>& perm) {
        if (encode_under(g, perm) == identity_code) autos.push_back(perm);
    });
    return autos;
}

std::vector<std::vector<int>> edge_automorphisms(const ColoredGraph& g) {
    std::vector<std::vector<int>> out;
    for (const auto& perm : vertex_automorphisms(g)) {
        std::vector<int> edge_perm(g.edge_count(), -1);
        bool ok = true;
        for (int e = 0; e < g.edge_count() && ok; ++e) {
            int u = perm[g.edge(e).u];
            int v = perm[g.edge(e).v];
            int img = g.find_edge(u, v);
            if (img < 0) ok = false;
            edge_perm[e] = img;
        }
        if (ok && std::find(out.begin(), out.end(), edge_perm) == out.end()) out.push_back(edge_perm);
    }
    return out;
}

} // namespace patcol
