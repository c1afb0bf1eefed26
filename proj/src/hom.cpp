#include "patcol/hom.hpp"

#include <algorithm>

namespace patcol {

namespace {

struct Searcher {
    const ColoredGraph& pat;
    const ColoredGraph& tgt;
    bool ignore_colors;
    bool allow_one_uncolored;
    const std::function<bool(const HomMatch&)>& visit;

    std::vector<int> order;
    std::vector<int> assign; // pattern vertex -> target vertex, -1 unset
    int open_edge = -1;
    int open_color = 0;
    bool stopped = false;

    Searcher(const ColoredGraph& p, const ColoredGraph& t, bool ignore, bool one_open,
             const std::function<bool(const HomMatch&)>& cb)
        : pat(p), tgt(t), ignore_colors(ignore), allow_one_uncolored(one_open), visit(cb),
          assign(p.vertex_count(), -1) {}

    void compute_order(const std::vector<int>& seeded) {
        std::vector<bool> placed(pat.vertex_count(), false);
        order = seeded;
        for (int v : seeded) placed[v] = true;
        while (static_cast<int>(order.size()) < pat.vertex_count()) {
            int best = -1, best_nb = -1, best_deg = -1;
            for (int v = 0; v < pat.vertex_count(); ++v) {
                if (placed[v]) continue;
                int nb = 0;
                for (const auto& arc : pat.arcs(v))
                    if (placed[arc.to]) ++nb;
                int deg = pat.degree(v);
                if (nb > best_nb || (nb == best_nb && deg > best_deg)) {
                    best = v;
                    best_nb = nb;
                    best_deg = deg;
                }
            }
            order.push_back(best);
            placed[best] = true;
        }
    }

    struct Undo {
        int vertex;
        int prev_open_edge;
        int prev_open_color;
    };

    // Constraints of pv against already placed neighbors.  Returns false and
    // leaves state untouched on failure.
    bool place(int pv, int tv, Undo& undo) {
        undo = {pv, open_edge, open_color};
        if (!ignore_colors && pat.vertex_colors() > 0) {
            std::uint64_t need = pat.vertex_color_mask(pv);
            std::uint64_t have = tgt.vertex_colors() > 0 ? tgt.vertex_color_mask(tv) : 0;
            if ((need & ~have) != 0) return false;
        }
        int new_open = open_edge, new_open_color = open_color;
        for (const auto& arc : pat.arcs(pv)) {
            if (assign[arc.to] < 0) continue;
            int te;
            if (pat.oriented())
                te = arc.forward ? tgt.find_edge(tv, assign[arc.to]) : tgt.find_edge(assign[arc.to], tv);
            else
                te = tgt.find_edge(tv, assign[arc.to]);
            if (te < 0) return false;
            if (ignore_colors) continue;
            int cp = pat.edge_color(arc.edge);
            if (cp == 0) continue;
            int ct = tgt.edge_color(te);
            if (ct == 0) {
                if (!allow_one_uncolored) return false;
                if (new_open < 0) {
                    new_open = te;
                    new_open_color = cp;
                } else if (new_open != te || new_open_color != cp) {
                    return false;
                }
            } else if (ct != cp) {
                return false;
            }
        }
        open_edge = new_open;
        open_color = new_open_color;
        assign[pv] = tv;
        return true;
    }

    void unplace(const Undo& undo) {
        assign[undo.vertex] = -1;
        open_edge = undo.prev_open_edge;
        open_color = undo.prev_open_color;
    }

    void search(size_t pos) {
        if (stopped) return;
        if (pos == order.size()) {
            HomMatch m{assign, open_edge, open_color};
            if (!visit(m)) stopped = true;
            return;
        }
        int pv = order[pos];
        for (int tv = 0; tv < tgt.vertex_count() && !stopped; ++tv) {
            Undo undo;
            if (!place(pv, tv, undo)) continue;
            search(pos + 1);
            unplace(undo);
        }
    }

    void run_with_seed(const std::vector<std::pair<int, int>>& seed) {
        std::vector<int> seeded;
        for (const auto& [pv, tv] : seed) seeded.push_back(pv);
        compute_order(seeded);
        std::vector<Undo> undos;
        bool ok = true;
        for (const auto& [pv, tv] : seed) {
            Undo u;
            if (!place(pv, tv, u)) {
                ok = false;
                break;
            }
            undos.push_back(u);
        }
        if (ok) search(seed.size());
        for (auto it = undos.rbegin(); it != undos.rend(); ++it) unplace(*it);
    }
};

void run_search(const ColoredGraph& pattern, const ColoredGraph& target, const HomOptions& opts,
                bool ignore_colors, const std::function<bool(const HomMatch&)>& visit) {
    if (pattern.vertex_count() == 0) return;
    Searcher s(pattern, target, ignore_colors, opts.allow_one_uncolored, visit);
    if (opts.focus_edge) {
        int fe = target.check_edge(*opts.focus_edge);
        Edge te = target.edge(fe);
        for (int pe = 0; pe < pattern.edge_count() && !s.stopped; ++pe) {
            Edge p = pattern.edge(pe);
            s.run_with_seed({{p.u, te.u}, {p.v, te.v}});
            if (!pattern.oriented() && !s.stopped && p.u != p.v)
                s.run_with_seed({{p.u, te.v}, {p.v, te.u}});
        }
    } else if (opts.focus_vertex) {
        int fv = target.check_vertex(*opts.focus_vertex);
        for (int pv = 0; pv < pattern.vertex_count() && !s.stopped; ++pv)
            s.run_with_seed({{pv, fv}});
    } else {
        s.run_with_seed({});
    }
}

} // namespace

std::optional<HomMatch> find_hom(const ColoredGraph& pattern, const ColoredGraph& target,
                                 const HomOptions& opts) {
    std::optional<HomMatch> found;
    run_search(pattern, target, opts, false, [&](const HomMatch& m) {
        found = m;
        return false;
    });
    return found;
}

void for_each_hom(const ColoredGraph& pattern, const ColoredGraph& target, const HomOptions& opts,
                  const std::function<bool(const HomMatch&)>& visit) {
    run_search(pattern, target, opts, false, visit);
}

void for_each_uncolored_hom(const ColoredGraph& pattern, const ColoredGraph& target,
                            const std::function<bool(const std::vector<int>&)>& visit) {
    HomOptions opts;
    run_search(pattern, target, opts, true, [&](const HomMatch& m) { return visit(m.map); });
}

} // namespace patcol
