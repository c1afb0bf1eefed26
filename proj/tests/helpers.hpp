#pragma once

#include <functional>
#include <vector>

#include "patcol/family.hpp"
#include "patcol/graph.hpp"

namespace patcol::testing {

inline ObstructionFamily mono_family(int colors, const std::vector<std::pair<ColoredGraph, int>>& parts) {
    ObstructionFamily f;
    f.colors = colors;
    for (const auto& [g, c] : parts) f.obstructions.push_back(mono_colored(g, c));
    return f;
}

/// { mono-1 K_3, mono-2 K_3 } over two colors.
inline ObstructionFamily triangle_family() {
    return mono_family(2, {{complete_graph(3, 2), 1}, {complete_graph(3, 2), 2}});
}

/// All 2^3 colorings of K_3 over two colors.
inline ObstructionFamily all_k3_colorings_family() {
    ObstructionFamily f;
    f.colors = 2;
    for (int bits = 0; bits < 8; ++bits) {
        ColoredGraph k3 = complete_graph(3, 2);
        for (int e = 0; e < 3; ++e) k3.set_edge_color(e, ((bits >> e) & 1) + 1);
        f.obstructions.push_back(k3);
    }
    return f;
}

/// Set partitions of {0..n-1} as restricted-growth strings.
inline void for_each_partition(int n, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> rgs(n, 0);
    std::function<void(int, int)> rec = [&](int pos, int max_used) {
        if (pos == n) {
            fn(rgs);
            return;
        }
        for (int c = 0; c <= max_used + 1; ++c) {
            rgs[pos] = c;
            rec(pos + 1, std::max(max_used, c));
        }
    };
    if (n == 0) return;
    rgs[0] = 0;
    rec(1, 0);
}

} // namespace patcol::testing
