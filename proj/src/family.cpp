#include "patcol/family.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "patcol/canonical.hpp"
#include "patcol/hom.hpp"

namespace patcol {

std::optional<Violation> find_violation(const ColoredGraph& g, const ObstructionFamily& family,
                                        std::optional<int> focus_edge, std::optional<int> focus_vertex) {
    if (g.colors() != family.colors)
        fail(ErrorCode::UniverseMismatch, "graph and family color universes differ");
    if (family.vertex_colors > 0 && g.vertex_colors() != family.vertex_colors)
        fail(ErrorCode::UniverseMismatch, "graph and family vertex-color universes differ");
    HomOptions opts;
    opts.focus_edge = focus_edge;
    opts.focus_vertex = focus_vertex;
    for (size_t i = 0; i < family.obstructions.size(); ++i) {
        if (auto m = find_hom(family.obstructions[i], g, opts))
            return Violation{static_cast<int>(i), m->map};
    }
    return std::nullopt;
}

std::vector<std::string> validate(const ObstructionFamily& family) {
    std::vector<std::string> problems;
    if (family.colors < 1) problems.push_back("color universe must be positive");
    for (size_t i = 0; i < family.obstructions.size(); ++i) {
        const ColoredGraph& f = family.obstructions[i];
        std::string tag = "obstruction " + std::to_string(i);
        if (f.colors() != family.colors) problems.push_back(tag + ": color universe differs from family");
        if (f.vertex_colors() != family.vertex_colors)
            problems.push_back(tag + ": vertex color universe differs from family");
        if (!is_connected(f)) problems.push_back(tag + ": not connected");
        if (!f.totally_colored()) problems.push_back(tag + ": edge coloring is partial");
        if (f.vertex_count() == 0) problems.push_back(tag + ": empty graph");
    }
    return problems;
}

namespace {

bool maps_into(const ColoredGraph& pattern, const ColoredGraph& target) {
    return find_hom(pattern, target).has_value();
}

} // namespace

ObstructionFamily prune_redundant(const ObstructionFamily& family) {
    size_t n = family.obstructions.size();
    // Rank by size then canonical form; among hom-equivalent members the
    // least-ranked survives.
    std::vector<std::pair<std::string, size_t>> keyed(n);
    for (size_t i = 0; i < n; ++i) {
        const ColoredGraph& f = family.obstructions[i];
        std::string key = std::to_string(f.vertex_count()) + "|" + std::to_string(f.edge_count()) + "|" +
                          canonical_key(f);
        keyed[i] = {key, i};
    }
    std::vector<size_t> rank(n);
    {
        auto sorted = keyed;
        std::sort(sorted.begin(), sorted.end());
        for (size_t pos = 0; pos < n; ++pos) rank[sorted[pos].second] = pos;
    }

    std::vector<bool> drop(n, false);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n && !drop[i]; ++j) {
            if (j == i) continue;
            if (!maps_into(family.obstructions[j], family.obstructions[i])) continue;
            bool back = maps_into(family.obstructions[i], family.obstructions[j]);
            if (!back || rank[j] < rank[i]) drop[i] = true;
        }
    }
    ObstructionFamily out;
    out.colors = family.colors;
    out.vertex_colors = family.vertex_colors;
    for (size_t i = 0; i < n; ++i)
        if (!drop[i]) out.obstructions.push_back(family.obstructions[i]);
    return out;
}

bool Recoloring::surjective() const {
    std::set<int> hit(map.begin(), map.end());
    for (int c = 1; c <= target_colors; ++c)
        if (!hit.count(c)) return false;
    return true;
}

Recoloring Recoloring::identity(int colors) {
    Recoloring rho;
    rho.source_colors = rho.target_colors = colors;
    rho.map.resize(colors);
    std::iota(rho.map.begin(), rho.map.end(), 1);
    return rho;
}

ColoredGraph recolor(const ColoredGraph& g, const Recoloring& rho) {
    ColoredGraph out(g.vertex_count(), g.oriented(), rho.target_colors);
    if (g.vertex_colors() > 0) out.set_vertex_color_universe(g.vertex_colors());
    for (int e = 0; e < g.edge_count(); ++e) {
        int idx = out.add_edge(g.edge(e).u, g.edge(e).v);
        if (g.edge_colored(e)) out.set_edge_color(idx, rho.apply(g.edge_color(e)));
    }
    if (g.vertex_colors() > 0)
        for (int v = 0; v < g.vertex_count(); ++v) out.set_vertex_color_mask(v, g.vertex_color_mask(v));
    return out;
}

bool is_recoloring(const Recoloring& rho, const ObstructionFamily& source,
                   const ObstructionFamily& target) {
    if (rho.source_colors != source.colors || rho.target_colors != target.colors)
        fail(ErrorCode::UniverseMismatch, "recoloring universes do not match the families");

    // Preimage colors per target color.
    std::vector<std::vector<int>> pre(target.colors + 1);
    for (int c = 1; c <= source.colors; ++c) pre[rho.apply(c)].push_back(c);

    for (const ColoredGraph& tgt : target.obstructions) {
        int m = tgt.edge_count();
        std::vector<const std::vector<int>*> choices(m);
        bool empty = false;
        for (int e = 0; e < m; ++e) {
            choices[e] = &pre[tgt.edge_color(e)];
            if (choices[e]->empty()) empty = true;
        }
        if (empty) continue; // no preimage colorings of this member

        // Odometer over the preimage colorings.
        std::vector<int> idx(m, 0);
        while (true) {
            ColoredGraph candidate = tgt;
            candidate = [&] {
                ColoredGraph c(tgt.vertex_count(), tgt.oriented(), source.colors);
                if (tgt.vertex_colors() > 0) c.set_vertex_color_universe(tgt.vertex_colors());
                for (int e = 0; e < m; ++e) {
                    c.add_edge(tgt.edge(e).u, tgt.edge(e).v);
                    c.set_edge_color(e, (*choices[e])[idx[e]]);
                }
                if (tgt.vertex_colors() > 0)
                    for (int v = 0; v < tgt.vertex_count(); ++v)
                        c.set_vertex_color_mask(v, tgt.vertex_color_mask(v));
                return c;
            }();
            bool covered = false;
            for (const ColoredGraph& src : source.obstructions) {
                if (maps_into(src, candidate)) {
                    covered = true;
                    break;
                }
            }
            if (!covered) return false;

            int pos = m - 1;
            while (pos >= 0) {
                if (++idx[pos] < static_cast<int>(choices[pos]->size())) break;
                idx[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    return true;
}

namespace {

ObstructionFamily dedup_members(ObstructionFamily family) {
    std::set<std::string> seen;
    std::vector<ColoredGraph> kept;
    for (auto& f : family.obstructions) {
        auto key = canonical_key(f);
        if (seen.insert(key).second) kept.push_back(std::move(f));
    }
    family.obstructions = std::move(kept);
    return family;
}

} // namespace

CoreResult compute_core(const ObstructionFamily& family) {
    ObstructionFamily current = dedup_members(family);
    Recoloring total = Recoloring::identity(family.colors);

    while (true) {
        int r = current.colors;
        bool applied = false;
        // Lexicographic scan over all maps [r] -> [r]; the first non-surjective
        // recoloring wins.
        std::vector<int> map(r, 1);
        while (true) {
            Recoloring rho;
            rho.map = map;
            rho.source_colors = rho.target_colors = r;
            if (!rho.surjective() && is_recoloring(rho, current, current)) {
                // Renumber the image universe densely.
                std::set<int> image(map.begin(), map.end());
                std::map<int, int> relabel;
                for (int c : image) relabel[c] = static_cast<int>(relabel.size()) + 1;
                Recoloring shrink;
                shrink.source_colors = r;
                shrink.target_colors = static_cast<int>(image.size());
                shrink.map.resize(r);
                for (int c = 1; c <= r; ++c) shrink.map[c - 1] = relabel[rho.apply(c)];

                ObstructionFamily next;
                next.colors = shrink.target_colors;
                next.vertex_colors = current.vertex_colors;
                for (const ColoredGraph& f : current.obstructions)
                    next.obstructions.push_back(recolor(f, shrink));
                current = dedup_members(std::move(next));

                for (int c = 1; c <= total.source_colors; ++c)
                    total.map[c - 1] = shrink.apply(total.map[c - 1]);
                total.target_colors = shrink.target_colors;
                applied = true;
                break;
            }
            int pos = r - 1;
            while (pos >= 0) {
                if (++map[pos] <= r) break;
                map[pos] = 1;
                --pos;
            }
            if (pos < 0) break;
        }
        if (!applied) break;
    }
    return {current, total};
}

std::string family_fingerprint(const ObstructionFamily& family) {
    std::vector<std::string> keys;
    for (const ColoredGraph& f : family.obstructions) keys.push_back(canonical_key(f));
    std::sort(keys.begin(), keys.end());
    std::uint64_t h = 1469598103934665603ull; // FNV-1a
    auto mix = [&](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        h ^= '|';
        h *= 1099511628211ull;
    };
    mix(std::to_string(family.colors));
    mix(std::to_string(family.vertex_colors));
    for (const auto& k : keys) mix(k);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ObstructionFamily orient_family(const ObstructionFamily& family, bool dedup_iso) {
    for (const ColoredGraph& f : family.obstructions)
        if (f.oriented()) fail(ErrorCode::AlreadyOriented, "family already oriented");

    ObstructionFamily out;
    out.colors = family.colors;
    out.vertex_colors = family.vertex_colors;
    std::set<std::string> seen;
    for (const ColoredGraph& f : family.obstructions) {
        int m = f.edge_count();
        if (m > 20) fail(ErrorCode::TooLarge, "orientation expansion limited to 20 edges");
        for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
            ColoredGraph o(f.vertex_count(), true, f.colors());
            if (f.vertex_colors() > 0) o.set_vertex_color_universe(f.vertex_colors());
            for (int e = 0; e < m; ++e) {
                Edge ed = f.edge(e);
                int idx = (bits >> e) & 1 ? o.add_edge(ed.v, ed.u) : o.add_edge(ed.u, ed.v);
                o.set_edge_color(idx, f.edge_color(e));
            }
            if (f.vertex_colors() > 0)
                for (int v = 0; v < f.vertex_count(); ++v) o.set_vertex_color_mask(v, f.vertex_color_mask(v));
            if (dedup_iso) {
                auto key = canonical_key(o);
                if (!seen.insert(key).second) continue;
            }
            out.obstructions.push_back(std::move(o));
        }
    }
    return out;
}

} // namespace patcol
