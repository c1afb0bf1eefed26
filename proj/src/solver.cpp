#include "patcol/solver.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <stdexcept>

#include "patcol/hom.hpp"

namespace patcol {

namespace {

std::uint32_t full_mask(int colors) {
    return colors >= 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << colors) - 1);
}

class Solver {
public:
    Solver(const ColoredGraph& g, const ObstructionFamily& family, const SolveOptions& opts)
        : work_(g), family_(family), opts_(opts) {
        if (g.colors() != family.colors)
            fail(ErrorCode::UniverseMismatch, "graph and family color universes differ");
        if (family.colors > 31) fail(ErrorCode::TooLarge, "solver limited to 31 colors");
        if (family.vertex_colors > 0) {
            if (work_.vertex_colors() == 0)
                work_.set_vertex_color_universe(family.vertex_colors);
            else if (work_.vertex_colors() != family.vertex_colors)
                fail(ErrorCode::UniverseMismatch, "vertex color universes differ");
            vertex_pairs_ = family.vertex_colors / 2;
        }

        branch_edges_ = work_.uncolored_edges();
        if (!opts_.deterministic_witness) order_by_locality();
        for (int v = 0; v < work_.vertex_count() && vertex_pairs_ > 0; ++v) {
            for (int t = 0; t < vertex_pairs_; ++t) {
                std::uint64_t pair_bits = (std::uint64_t{3} << (2 * t));
                if ((work_.vertex_color_mask(v) & pair_bits) == 0) vertex_vars_.push_back({v, t});
            }
        }
        feasible_.assign(work_.edge_count(), full_mask(family.colors));
        for (const auto& [e, banned] : opts_.forbidden) {
            work_.check_edge(e);
            for (int c : banned) feasible_[e] &= ~(std::uint32_t{1} << (c - 1));
        }
    }

    ColResult run() {
        ColResult res;
        stats_ = {};
        ++stats_.violation_checks;
        if (find_violation(work_, family_)) {
            res.status = Status::UNSAT;
            res.stats = stats_;
            return res;
        }
        bool ok = true;
        if (opts_.propagate) ok = initial_propagation();
        if (ok && dfs()) {
            res.status = Status::SAT;
            res.witness = work_.edge_coloring();
            if (vertex_pairs_ > 0) {
                std::vector<std::uint64_t> masks(work_.vertex_count());
                for (int v = 0; v < work_.vertex_count(); ++v) masks[v] = work_.vertex_color_mask(v);
                res.vertex_witness = std::move(masks);
            }
            // Soundness: every SAT witness is checked before it is returned.
            if (find_violation(work_, family_))
                throw std::logic_error("solver returned a violated witness");
        } else {
            res.status = Status::UNSAT;
        }
        res.stats = stats_;
        return res;
    }

private:
    // Branch order: distance from the precolored region first (forced chains
    // complete where they start), then endpoint degree sum, then index.
    void order_by_locality() {
        std::vector<int> vdist(work_.vertex_count(), -1);
        std::vector<int> queue;
        for (int e : work_.colored_edges()) {
            for (int v : {work_.edge(e).u, work_.edge(e).v}) {
                if (vdist[v] < 0) {
                    vdist[v] = 0;
                    queue.push_back(v);
                }
            }
        }
        if (queue.empty() && work_.edge_count() > 0) {
            // No precolored region: walk outward from the first edge so the
            // search completes one block before entering the next.
            for (int v : {work_.edge(0).u, work_.edge(0).v}) {
                vdist[v] = 0;
                queue.push_back(v);
            }
        }
        for (size_t head = 0; head < queue.size(); ++head) {
            int v = queue[head];
            for (const auto& arc : work_.arcs(v)) {
                if (vdist[arc.to] < 0) {
                    vdist[arc.to] = vdist[v] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        auto layer = [&](int e) {
            int du = vdist[work_.edge(e).u], dv = vdist[work_.edge(e).v];
            if (du < 0 && dv < 0) return 1 << 20;
            if (du < 0) return dv;
            if (dv < 0) return du;
            return std::min(du, dv);
        };
        std::stable_sort(branch_edges_.begin(), branch_edges_.end(), [&](int a, int b) {
            int la = layer(a), lb = layer(b);
            if (la != lb) return la < lb;
            int da = work_.degree(work_.edge(a).u) + work_.degree(work_.edge(a).v);
            int db = work_.degree(work_.edge(b).u) + work_.degree(work_.edge(b).v);
            if (da != db) return da > db;
            return a < b;
        });
    }

    std::uint32_t bit(int color) const { return std::uint32_t{1} << (color - 1); }

    bool initial_propagation() {
        for (const ColoredGraph& obs : family_.obstructions) {
            HomOptions ho;
            ho.allow_one_uncolored = true;
            bool wiped = false;
            for_each_hom(obs, work_, ho, [&](const HomMatch& m) {
                if (m.open_edge >= 0) {
                    feasible_[m.open_edge] &= ~bit(m.open_color);
                    if (feasible_[m.open_edge] == 0) {
                        wiped = true;
                        return false;
                    }
                }
                return true;
            });
            if (wiped) return false;
        }
        return true;
    }

    // --- trail -------------------------------------------------------------

    struct Mark {
        size_t domains;
        size_t colors;
    };
    Mark mark() const { return {domain_trail_.size(), color_trail_.size()}; }

    void undo_to(const Mark& m) {
        while (color_trail_.size() > m.colors) {
            work_.clear_edge_color(color_trail_.back());
            color_trail_.pop_back();
        }
        while (domain_trail_.size() > m.domains) {
            auto [e, mask] = domain_trail_.back();
            domain_trail_.pop_back();
            feasible_[e] = mask;
        }
    }

    bool remove_color(int e, int c) {
        if (feasible_[e] & bit(c)) {
            domain_trail_.push_back({e, feasible_[e]});
            feasible_[e] &= ~bit(c);
            if (feasible_[e] == 0 && !work_.edge_colored(e)) return false;
        }
        return true;
    }

    // Prune feasible sets from almost-violations through the just-colored edge.
    bool propagate_from(int edge) {
        bool wiped = false;
        for (const ColoredGraph& obs : family_.obstructions) {
            HomOptions ho;
            ho.allow_one_uncolored = true;
            ho.focus_edge = edge;
            for_each_hom(obs, work_, ho, [&](const HomMatch& m) {
                if (m.open_edge >= 0 && !remove_color(m.open_edge, m.open_color)) {
                    wiped = true;
                    return false;
                }
                return true;
            });
            if (wiped) break;
        }
        return !wiped;
    }

    /// Color an edge, check violations through it, propagate.
    bool assign(int e, int c) {
        ++stats_.nodes;
        work_.set_edge_color(e, c);
        color_trail_.push_back(e);
        ++stats_.violation_checks;
        if (find_violation(work_, family_, e)) return false;
        if (opts_.propagate && !propagate_from(e)) return false;
        return true;
    }

    /// Assign forced (singleton-domain) edges until a fixpoint.  A budget of
    /// -1 means unlimited; otherwise the cascade stops inconclusively (still
    /// true) once the budget is consumed — used to keep probes local.
    bool cascade(long long budget = -1) {
        if (!opts_.propagate) return true;
        bool changed = true;
        while (changed) {
            changed = false;
            for (int e : branch_edges_) {
                if (work_.edge_colored(e)) continue;
                std::uint32_t dom = feasible_[e];
                if (dom == 0) return false;
                if ((dom & (dom - 1)) == 0) {
                    if (budget == 0) return true;
                    if (budget > 0) --budget;
                    int c = __builtin_ctz(dom) + 1;
                    if (!assign(e, c)) return false;
                    changed = true;
                }
            }
        }
        return true;
    }

    /// Failed-literal probing: tentatively assign each feasible color and run
    /// a bounded cascade; colors whose cascade wipes out are pruned.  Sound
    /// because only provably dead colors are removed.
    bool probe() {
        for (int pass = 0; pass < 2; ++pass) {
            bool pruned = false;
            for (int e : branch_edges_) {
                if (work_.edge_colored(e)) continue;
                std::uint32_t dom = feasible_[e];
                if ((dom & (dom - 1)) == 0) continue; // cascade handles singletons
                for (int c = 1; c <= family_.colors; ++c) {
                    if (!(dom & bit(c))) continue;
                    Mark m = mark();
                    bool ok = assign(e, c) && cascade(64);
                    undo_to(m);
                    if (!ok) {
                        if (!remove_color(e, c)) return false;
                        pruned = true;
                    }
                }
                if (!cascade()) return false;
            }
            if (!pruned) break;
        }
        return true;
    }

    int pick_edge() const {
        if (opts_.deterministic_witness || !opts_.propagate) {
            for (int e : branch_edges_)
                if (!work_.edge_colored(e)) return e;
            return -1;
        }
        int best = -1, best_count = 33;
        for (int e : branch_edges_) {
            if (work_.edge_colored(e)) continue;
            int count = __builtin_popcount(feasible_[e]);
            if (count < best_count) {
                best = e;
                best_count = count;
                if (count <= 1) break;
            }
        }
        return best;
    }

    bool dfs(int depth = 0) {
        if (!cascade()) return false;
        // Probing near the root settles the forced skeleton; deeper nodes
        // rely on the cheap cascade.
        if (opts_.probe && depth < 1 && !probe()) return false;
        int e = pick_edge();
        if (e < 0) return vertex_phase();
        for (int c = 1; c <= family_.colors; ++c) {
            if (!(feasible_[e] & bit(c))) continue;
            Mark m = mark();
            if (assign(e, c) && dfs(depth + 1)) return true;
            undo_to(m);
        }
        return false;
    }

    bool vertex_phase() {
        if (vertex_vars_.empty()) return true;
        // A vertex pair whose two sides both violate on their own can never
        // be completed; without this check the search would rediscover the
        // dead variable behind every combination of the unrelated ones.
        std::vector<std::array<bool, 2>> allowed(vertex_vars_.size());
        for (size_t i = 0; i < vertex_vars_.size(); ++i) {
            auto [v, t] = vertex_vars_[i];
            if (work_.vertex_color_mask(v) & (std::uint64_t{3} << (2 * t))) {
                allowed[i] = {true, true}; // already decided below
                continue;
            }
            bool any = false;
            for (int side = 0; side < 2; ++side) {
                std::uint64_t before = work_.vertex_color_mask(v);
                work_.set_vertex_color_mask(v, before | (std::uint64_t{1} << (2 * t + side)));
                ++stats_.violation_checks;
                allowed[i][side] = !find_violation(work_, family_, std::nullopt, v);
                work_.set_vertex_color_mask(v, before);
                any = any || allowed[i][side];
            }
            if (!any) return false;
        }
        return vertex_dfs(0, allowed);
    }

    bool vertex_dfs(size_t vpos, const std::vector<std::array<bool, 2>>& allowed) {
        if (vpos == vertex_vars_.size()) return true;
        auto [v, t] = vertex_vars_[vpos];
        if (work_.vertex_color_mask(v) & (std::uint64_t{3} << (2 * t)))
            return vertex_dfs(vpos + 1, allowed);
        for (int side = 0; side < 2; ++side) {
            if (!allowed[vpos][side]) continue;
            ++stats_.nodes;
            std::uint64_t before = work_.vertex_color_mask(v);
            work_.set_vertex_color_mask(v, before | (std::uint64_t{1} << (2 * t + side)));
            ++stats_.violation_checks;
            if (!find_violation(work_, family_, std::nullopt, v)) {
                if (vertex_dfs(vpos + 1, allowed)) return true;
            }
            work_.set_vertex_color_mask(v, before);
        }
        return false;
    }

    ColoredGraph work_;
    const ObstructionFamily& family_;
    SolveOptions opts_;
    int vertex_pairs_ = 0;
    std::vector<int> branch_edges_;
    std::vector<std::pair<int, int>> vertex_vars_;
    std::vector<std::uint32_t> feasible_;
    std::vector<std::pair<int, std::uint32_t>> domain_trail_;
    std::vector<int> color_trail_;
    SolveStats stats_;
};

} // namespace

ColResult solve_ext(const ColoredGraph& g, const ObstructionFamily& family, const SolveOptions& opts) {
    Solver solver(g, family, opts);
    return solver.run();
}

ColResult solve_col(const ColoredGraph& g, const ObstructionFamily& family, const SolveOptions& opts) {
    if (g.colored_edge_count() != 0)
        fail(ErrorCode::PinConflict, "solve_col requires an uncolored graph; use solve_ext");
    return solve_ext(g, family, opts);
}

ColResult solve_ext_pinned(const ColoredGraph& g, const ObstructionFamily& family,
                           const std::map<int, int>& pins, const SolveOptions& opts) {
    ColoredGraph pinned = g;
    for (const auto& [e, c] : pins) {
        if (pinned.edge_colored(e))
            fail(ErrorCode::PinConflict, "pin on colored edge " + std::to_string(e));
        pinned.set_edge_color(e, c);
    }
    return solve_ext(pinned, family, opts);
}

Enumeration enumerate_extensions(const ColoredGraph& g, const ObstructionFamily& family, int limit,
                                 const SolveOptions& opts) {
    if (limit <= 0) fail(ErrorCode::BadIndex, "enumeration limit must be positive");
    if (family.vertex_colors > 0)
        fail(ErrorCode::Unsupported, "enumeration is an edge-coloring oracle");
    if (g.colors() != family.colors)
        fail(ErrorCode::UniverseMismatch, "graph and family color universes differ");
    auto open = g.uncolored_edges();
    if (open.size() > 30) fail(ErrorCode::TooLarge, "more than 30 uncolored edges");

    Enumeration out;
    ColoredGraph work = g;
    if (find_violation(work, family)) return out;

    // Lexicographic DFS over edge-index-major assignments.
    std::function<bool(size_t)> dfs = [&](size_t pos) {
        if (pos == open.size()) {
            out.colorings.push_back(work.edge_coloring());
            if (static_cast<int>(out.colorings.size()) >= limit) {
                out.truncated = true;
                return false;
            }
            return true;
        }
        int e = open[pos];
        for (int c = 1; c <= family.colors; ++c) {
            auto it = opts.forbidden.find(e);
            if (it != opts.forbidden.end() && it->second.count(c)) continue;
            work.set_edge_color(e, c);
            if (!find_violation(work, family, e)) {
                if (!dfs(pos + 1)) {
                    work.clear_edge_color(e);
                    return false;
                }
            }
            work.clear_edge_color(e);
        }
        return true;
    };
    bool complete = dfs(0);
    out.truncated = !complete;
    return out;
}

} // namespace patcol
