#include "patcol/normalize.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "patcol/canonical.hpp"
#include "patcol/graph.hpp"

namespace patcol {

namespace {

// Intermediate member: oriented skeleton, per-edge original color (0 for
// edges introduced by non-edge 2-cut splits) plus positive/negative marker
// literals, and vertex-color masks.
struct Member {
    int n = 0;
    std::vector<Edge> edges;
    std::vector<int> orig;
    std::vector<std::uint64_t> pos, neg;
    std::vector<std::uint64_t> vmask;

    int edge_count() const { return static_cast<int>(edges.size()); }
};

ColoredGraph skeleton_of(const Member& m, int colors) {
    ColoredGraph g(m.n, true, colors);
    for (const Edge& e : m.edges) g.add_edge(e.u, e.v);
    return g;
}

std::string member_key(const Member& m, int marked_vertex = -1, int marked_edge = -1) {
    // Lexicographically least serialization over all vertex permutations.
    std::vector<int> perm(m.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::int64_t> best;
    do {
        std::vector<std::int64_t> code;
        std::vector<std::array<std::int64_t, 6>> es;
        for (int e = 0; e < m.edge_count(); ++e)
            es.push_back({perm[m.edges[e].u], perm[m.edges[e].v], m.orig[e],
                          static_cast<std::int64_t>(m.pos[e]), static_cast<std::int64_t>(m.neg[e]),
                          e == marked_edge ? 1 : 0});
        std::sort(es.begin(), es.end());
        for (const auto& t : es) code.insert(code.end(), t.begin(), t.end());
        std::vector<std::int64_t> vs(m.n * 2);
        for (int v = 0; v < m.n; ++v) {
            vs[2 * perm[v]] = static_cast<std::int64_t>(m.vmask[v]);
            vs[2 * perm[v] + 1] = v == marked_vertex ? 1 : 0;
        }
        code.insert(code.end(), vs.begin(), vs.end());
        if (best.empty() || code < best) best = std::move(code);
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::ostringstream out;
    out << m.n << ':';
    for (auto x : best) out << x << ',';
    return out.str();
}

Member induced(const Member& m, const std::vector<int>& vertices) {
    std::vector<int> where(m.n, -1);
    Member out;
    out.n = static_cast<int>(vertices.size());
    for (int i = 0; i < out.n; ++i) where[vertices[i]] = i;
    for (int e = 0; e < m.edge_count(); ++e) {
        int u = where[m.edges[e].u], v = where[m.edges[e].v];
        if (u < 0 || v < 0) continue;
        out.edges.push_back({u, v});
        out.orig.push_back(m.orig[e]);
        out.pos.push_back(m.pos[e]);
        out.neg.push_back(m.neg[e]);
    }
    for (int v : vertices) out.vmask.push_back(m.vmask[v]);
    return out;
}

// Loop-free quotients whose merged edges agree on the full pattern.
void quotients_of(const Member& m, const std::function<void(Member)>& emit) {
    if (m.n == 0) return;
    std::vector<int> rgs(m.n, 0);
    std::function<void(int, int)> rec = [&](int pos_i, int max_used) {
        if (pos_i == m.n) {
            int classes = max_used + 1;
            Member q;
            q.n = classes;
            q.vmask.assign(classes, 0);
            for (int v = 0; v < m.n; ++v) q.vmask[rgs[v]] |= m.vmask[v];
            std::map<std::pair<int, int>, int> seen; // (u,v) -> edge index in q
            for (int e = 0; e < m.edge_count(); ++e) {
                int u = rgs[m.edges[e].u], v = rgs[m.edges[e].v];
                if (u == v) return; // loop
                auto it = seen.find({u, v});
                if (it == seen.end()) {
                    seen[{u, v}] = q.edge_count();
                    q.edges.push_back({u, v});
                    q.orig.push_back(m.orig[e]);
                    q.pos.push_back(m.pos[e]);
                    q.neg.push_back(m.neg[e]);
                } else {
                    int idx = it->second;
                    if (q.orig[idx] != m.orig[e] || q.pos[idx] != m.pos[e] || q.neg[idx] != m.neg[e])
                        return; // clashing patterns
                }
            }
            emit(std::move(q));
            return;
        }
        for (int c = 0; c <= max_used + 1 && c < m.n; ++c) {
            rgs[pos_i] = c;
            rec(pos_i + 1, std::max(max_used, c));
        }
    };
    rgs[0] = 0;
    rec(1, 0);
}

struct Pipeline {
    const NormalizeOptions& opts;
    int colors0;
    std::vector<Member> members;
    std::set<std::string> member_keys;
    std::set<std::string> event_keys;
    std::set<std::string> processed_pairs; // member key + pair signature
    int marker_pairs = 0;
    int vertex_pairs = 0;
    NormalizeResult* result;

    explicit Pipeline(const NormalizeOptions& o, int c0, NormalizeResult* r)
        : opts(o), colors0(c0), result(r) {}

    bool exhausted = false;
    bool vertex_exhausted = false;

    void note(const std::string& line) { result->transcript.push_back(line); }

    bool add_member(Member m) {
        if (m.n > opts.max_member_vertices)
            fail(ErrorCode::TooLarge, "normal-form member exceeds vertex budget");
        auto key = member_key(m);
        if (!member_keys.insert(key).second) return false;
        members.push_back(std::move(m));
        return true;
    }

    void add_with_quotients(Member m) {
        bool fresh = add_member(m);
        if (!fresh) return;
        quotients_of(m, [&](Member q) {
            if (add_member(std::move(q))) ++result->quotient_members;
        });
    }

    bool ensure_markers(int count) {
        if (marker_pairs + count <= std::min(opts.max_marker_pairs, 62)) return true;
        if (opts.splits_only) {
            if (!exhausted) note("marker-pair budget exhausted; stopping splits");
            exhausted = true;
            return false;
        }
        fail(ErrorCode::TooLarge,
             "marker-pair budget exceeded; this family's normal form is not materializable at desk scale");
    }

    int fresh_marker_pair() { return marker_pairs++; }

    int fresh_vertex_pair() {
        if (vertex_pairs >= opts.max_vertex_pairs || vertex_pairs >= 31)
            fail(ErrorCode::TooLarge, "vertex-pair budget exceeded");
        return vertex_pairs++;
    }

    // --- 1-cut phase -------------------------------------------------------

    bool split_one_cut(size_t idx) {
        const Member m = members[idx];
        ColoredGraph sk = skeleton_of(m, std::max(colors0, 1));
        if (m.n < 3 || !is_connected(sk)) return false;
        auto cuts = cut_structure(sk);
        if (cuts.cut_vertices.empty()) return false;
        const auto& cut = cuts.cut_vertices.front(); // least cut vertex
        int v = cut.removed[0];

        Member g1 = induced(m, cut.side1);
        Member g2 = induced(m, cut.side2);
        int v1 = static_cast<int>(std::find(cut.side1.begin(), cut.side1.end(), v) - cut.side1.begin());
        int v2 = static_cast<int>(std::find(cut.side2.begin(), cut.side2.end(), v) - cut.side2.begin());

        std::string k1 = member_key(g1, v1), k2 = member_key(g2, v2);
        if (k2 < k1) std::swap(k1, k2);
        std::string event = "1cut|" + k1 + "|" + k2;
        if (event_keys.count(event)) {
            members.erase(members.begin() + static_cast<long>(idx));
            rebuild_keys();
            ++result->one_cut_events;
            note("one-cut split deduplicated (n=" + std::to_string(m.n) + ")");
            return true;
        }
        if (vertex_pairs >= std::min(opts.max_vertex_pairs, 31)) {
            if (opts.splits_only) {
                if (!vertex_exhausted) note("vertex-pair budget exhausted; leaving remaining one-cuts unsplit");
                vertex_exhausted = true;
                return false;
            }
            fail(ErrorCode::TooLarge, "vertex-pair budget exceeded");
        }
        event_keys.insert(event);
        members.erase(members.begin() + static_cast<long>(idx));
        rebuild_keys();
        ++result->one_cut_events;
        int p = fresh_vertex_pair();
        g1.vmask[v1] |= std::uint64_t{1} << (2 * p);
        g2.vmask[v2] |= std::uint64_t{1} << (2 * p + 1);
        Member clash;
        clash.n = 1;
        clash.vmask = {(std::uint64_t{1} << (2 * p)) | (std::uint64_t{1} << (2 * p + 1))};
        note("one-cut split n=" + std::to_string(m.n) + " at vertex " + std::to_string(v) +
             ", vertex pair +" + std::to_string(p));
        add_with_quotients(std::move(g1));
        add_with_quotients(std::move(g2));
        add_member(std::move(clash));
        return true;
    }

    // --- 2-cut phase -------------------------------------------------------

    bool split_two_cut(size_t idx) {
        if (exhausted) return false;
        Member m = members[idx];
        ColoredGraph sk = skeleton_of(m, std::max(colors0, 1));
        if (m.n < 4 || !is_connected(sk)) return false;
        auto cuts = cut_structure(sk);
        std::string mkey = member_key(m);
        for (const auto& cut : cuts.two_cuts) {
            int v = cut.removed[0], w = cut.removed[1];
            std::string pair_sig = mkey + "#" + std::to_string(v) + "," + std::to_string(w);
            if (processed_pairs.count(pair_sig)) continue;
            processed_pairs.insert(pair_sig);

            int v1 = static_cast<int>(std::find(cut.side1.begin(), cut.side1.end(), v) - cut.side1.begin());
            int w1 = static_cast<int>(std::find(cut.side1.begin(), cut.side1.end(), w) - cut.side1.begin());
            int v2 = static_cast<int>(std::find(cut.side2.begin(), cut.side2.end(), v) - cut.side2.begin());
            int w2 = static_cast<int>(std::find(cut.side2.begin(), cut.side2.end(), w) - cut.side2.begin());
            Member g1 = induced(m, cut.side1);
            Member g2 = induced(m, cut.side2);

            bool has_vw = false;
            int cut_edge1 = -1, cut_edge2 = -1;
            for (int e = 0; e < g1.edge_count(); ++e)
                if ((g1.edges[e].u == v1 && g1.edges[e].v == w1) || (g1.edges[e].u == w1 && g1.edges[e].v == v1))
                    cut_edge1 = e;
            for (int e = 0; e < g2.edge_count(); ++e)
                if ((g2.edges[e].u == v2 && g2.edges[e].v == w2) || (g2.edges[e].u == w2 && g2.edges[e].v == v2))
                    cut_edge2 = e;
            has_vw = cut_edge1 >= 0;

            TwoCutRecord record{mkey, m.n, v, w, has_vw, false};

            if (has_vw) {
                std::string k1 = member_key(g1, -1, cut_edge1), k2 = member_key(g2, -1, cut_edge2);
                if (k2 < k1) std::swap(k1, k2);
                std::string event = "2cutE|" + k1 + "|" + k2;
                if (event_keys.count(event)) {
                    members.erase(members.begin() + static_cast<long>(idx));
                    rebuild_keys();
                    record.deduplicated = true;
                    result->two_cuts.push_back(record);
                    note("two-cut (edge) deduplicated n=" + std::to_string(m.n));
                    return true;
                }
                if (!ensure_markers(1)) return false;
                event_keys.insert(event);
                members.erase(members.begin() + static_cast<long>(idx));
                rebuild_keys();
                int p = fresh_marker_pair();
                g1.pos[cut_edge1] |= std::uint64_t{1} << p;
                g2.neg[cut_edge2] |= std::uint64_t{1} << p;
                result->two_cuts.push_back(record);
                note("two-cut (edge) split n=" + std::to_string(m.n) + " at {" + std::to_string(v) + "," +
                     std::to_string(w) + "}, marker pair +" + std::to_string(p));
                add_with_quotients(std::move(g1));
                add_with_quotients(std::move(g2));
                return true;
            }

            // Non-edge cut: keep m, add both orientations of the new edge.
            auto with_edge = [](Member base, int a, int b, std::uint64_t posbit, std::uint64_t negbit) {
                base.edges.push_back({a, b});
                base.orig.push_back(0);
                base.pos.push_back(posbit);
                base.neg.push_back(negbit);
                return base;
            };
            Member f1 = with_edge(g1, v1, w1, 0, 0);
            Member f2 = with_edge(g2, v2, w2, 0, 0);
            Member b1 = with_edge(g1, w1, v1, 0, 0);
            Member b2 = with_edge(g2, w2, v2, 0, 0);
            auto pair_key = [&](const Member& a, const Member& b) {
                std::string ka = member_key(a, -1, a.edge_count() - 1);
                std::string kb = member_key(b, -1, b.edge_count() - 1);
                if (kb < ka) std::swap(ka, kb);
                return ka + "~" + kb;
            };
            std::string kf = pair_key(f1, f2), kb2 = pair_key(b1, b2);
            if (kb2 < kf) std::swap(kf, kb2);
            std::string event = "2cutN|" + kf + "|" + kb2;
            if (event_keys.count(event)) {
                record.deduplicated = true;
                result->two_cuts.push_back(record);
                note("two-cut (non-edge) deduplicated n=" + std::to_string(m.n));
                return true;
            }
            if (!ensure_markers(2)) return false;
            event_keys.insert(event);
            int p = fresh_marker_pair();
            int q = fresh_marker_pair();
            f1.pos.back() = std::uint64_t{1} << p;
            f2.neg.back() = std::uint64_t{1} << p;
            b1.pos.back() = std::uint64_t{1} << q;
            b2.neg.back() = std::uint64_t{1} << q;
            result->two_cuts.push_back(record);
            note("two-cut (non-edge) split n=" + std::to_string(m.n) + " at {" + std::to_string(v) + "," +
                 std::to_string(w) + "}, marker pairs +" + std::to_string(p) + ",+" + std::to_string(q));
            add_with_quotients(std::move(f1));
            add_with_quotients(std::move(f2));
            add_with_quotients(std::move(b1));
            add_with_quotients(std::move(b2));
            return true;
        }
        return false;
    }

    void rebuild_keys() {
        member_keys.clear();
        for (const Member& m : members) member_keys.insert(member_key(m));
    }

    void run_splits() {
        bool progress = true;
        while (progress && !exhausted) {
            progress = false;
            for (size_t i = 0; i < members.size(); ++i) {
                if (split_one_cut(i)) {
                    progress = true;
                    break;
                }
            }
            if (progress) continue;
            for (size_t i = 0; i < members.size(); ++i) {
                if (split_two_cut(i)) {
                    progress = true;
                    break;
                }
            }
        }
    }

    // --- completion + powerset ---------------------------------------------

    ObstructionFamily materialize() {
        int k = marker_pairs;
        long long palette = static_cast<long long>(colors0) << k;
        if (palette > (1 << 24)) fail(ErrorCode::TooLarge, "powerset palette too large");

        // Count completions first.
        long long total = 0;
        for (const Member& m : members) {
            long long copies = 1;
            for (int e = 0; e < m.edge_count(); ++e) {
                int undecided = k - __builtin_popcountll(m.pos[e] | m.neg[e]);
                long long choices = (m.orig[e] == 0 ? colors0 : 1) * (1LL << undecided);
                copies *= choices;
                if (copies > opts.max_obstructions) break;
            }
            total += copies;
            if (total > opts.max_obstructions)
                fail(ErrorCode::TooLarge,
                     "negation completion would materialize more than " +
                         std::to_string(opts.max_obstructions) + " obstructions");
        }

        ObstructionFamily out;
        out.colors = static_cast<int>(palette);
        out.vertex_colors = 2 * vertex_pairs;
        std::set<std::string> seen;
        for (const Member& m : members) {
            // Odometer over per-edge (original, marker-subset) choices.
            std::vector<std::vector<int>> choices(m.edge_count());
            for (int e = 0; e < m.edge_count(); ++e) {
                std::uint64_t decided = m.pos[e] | m.neg[e];
                std::vector<std::uint64_t> free_bits;
                for (int b = 0; b < k; ++b)
                    if (!(decided >> b & 1)) free_bits.push_back(std::uint64_t{1} << b);
                std::vector<int> origs;
                if (m.orig[e] == 0)
                    for (int c = 1; c <= colors0; ++c) origs.push_back(c);
                else
                    origs.push_back(m.orig[e]);
                for (int o : origs) {
                    for (std::uint64_t sub = 0;; ++sub) {
                        std::uint64_t mask = m.pos[e];
                        for (size_t b = 0; b < free_bits.size(); ++b)
                            if (sub >> b & 1) mask |= free_bits[b];
                        choices[e].push_back(palette_color(o, mask, k));
                        if (sub + 1 >= (std::uint64_t{1} << free_bits.size())) break;
                    }
                }
            }
            std::vector<size_t> pick(m.edge_count(), 0);
            while (true) {
                ColoredGraph g(m.n, true, out.colors);
                if (out.vertex_colors > 0) g.set_vertex_color_universe(out.vertex_colors);
                for (int e = 0; e < m.edge_count(); ++e) {
                    g.add_edge(m.edges[e].u, m.edges[e].v);
                    g.set_edge_color(e, choices[e][pick[e]]);
                }
                if (out.vertex_colors > 0)
                    for (int v = 0; v < m.n; ++v) g.set_vertex_color_mask(v, m.vmask[v]);
                if (seen.insert(canonical_key(g)).second) out.obstructions.push_back(std::move(g));

                int pos_i = m.edge_count() - 1;
                while (pos_i >= 0) {
                    if (++pick[pos_i] < choices[pos_i].size()) break;
                    pick[pos_i] = 0;
                    --pos_i;
                }
                if (pos_i < 0) break;
                if (m.edge_count() == 0) break;
            }
        }
        return out;
    }
};

} // namespace

int palette_size(int original_colors, int marker_pairs) { return original_colors << marker_pairs; }

int palette_color(int orig, std::uint64_t markers, int marker_pairs) {
    return static_cast<int>((static_cast<std::uint64_t>(orig - 1) << marker_pairs) + markers + 1);
}

int palette_original(int color, int marker_pairs) { return ((color - 1) >> marker_pairs) + 1; }

std::uint64_t palette_markers(int color, int marker_pairs) {
    return static_cast<std::uint64_t>(color - 1) & ((std::uint64_t{1} << marker_pairs) - 1);
}

NormalizeResult normalize(const ObstructionFamily& family, const NormalizeOptions& opts) {
    auto problems = validate(family);
    if (!problems.empty()) fail(ErrorCode::UniverseMismatch, "invalid family: " + problems.front());
    for (const ColoredGraph& f : family.obstructions)
        if (!f.oriented()) fail(ErrorCode::Unsupported, "normalize expects an oriented family");
    if (family.vertex_colors != 0)
        fail(ErrorCode::Unsupported, "normalize expects a plain edge-colored family");

    NormalizeResult result;
    result.original_colors = family.colors;

    Pipeline pipe(opts, family.colors, &result);
    for (const ColoredGraph& f : family.obstructions) {
        Member m;
        m.n = f.vertex_count();
        m.vmask.assign(m.n, 0);
        for (int e = 0; e < f.edge_count(); ++e) {
            m.edges.push_back(f.edge(e));
            m.orig.push_back(f.edge_color(e));
            m.pos.push_back(0);
            m.neg.push_back(0);
        }
        pipe.add_with_quotients(std::move(m));
    }
    result.transcript.insert(result.transcript.begin(),
                             "quotient closure added " + std::to_string(result.quotient_members) + " members");

    pipe.run_splits();
    result.marker_pairs = pipe.marker_pairs;
    result.vertex_pairs = pipe.vertex_pairs;
    result.transcript.push_back("splits done: " + std::to_string(pipe.marker_pairs) + " marker pairs, " +
                                std::to_string(pipe.vertex_pairs) + " vertex pairs, " +
                                std::to_string(pipe.members.size()) + " members");

    if (opts.splits_only) return result;
    result.family = pipe.materialize();
    result.transcript.push_back("powerset palette " + std::to_string(result.family.colors) + " colors, " +
                                std::to_string(result.family.obstructions.size()) + " obstructions");
    return result;
}

ColoredGraph lift_input(const ColoredGraph& g, const NormalizeResult& norm) {
    if (g.colored_edge_count() != 0)
        fail(ErrorCode::Unsupported, "lift_input expects an uncolored input");
    ColoredGraph out(g.vertex_count(), true, norm.family.colors);
    if (norm.family.vertex_colors > 0) out.set_vertex_color_universe(norm.family.vertex_colors);
    for (int e = 0; e < g.edge_count(); ++e) {
        Edge ed = g.edge(e);
        if (g.oriented())
            out.add_edge(ed.u, ed.v);
        else
            out.add_edge(std::min(ed.u, ed.v), std::max(ed.u, ed.v));
    }
    return out;
}

} // namespace patcol
