#include "patcol/algebra.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <set>

#include "patcol/canonical.hpp"
#include "patcol/hom.hpp"

namespace patcol {

const FiniteStructure::Relation* FiniteStructure::find(const std::string& name) const {
    for (const auto& rel : relations)
        if (rel.name == name) return &rel;
    return nullptr;
}

namespace {

bool is_clique_shape(const ColoredGraph& g) {
    int n = g.vertex_count();
    return n >= 2 && g.edge_count() == n * (n - 1) / 2;
}

bool is_cycle_shape(const ColoredGraph& g) {
    int n = g.vertex_count();
    if (n < 3 || g.edge_count() != n) return false;
    for (int v = 0; v < n; ++v)
        if (g.degree(v) != 2) return false;
    return is_connected(g);
}

ColoredGraph underlying(const ColoredGraph& g) {
    ColoredGraph shape(g.vertex_count(), g.oriented(), g.colors());
    for (int e = 0; e < g.edge_count(); ++e) shape.add_edge(g.edge(e).u, g.edge(e).v);
    return shape;
}

int clique_number(const ColoredGraph& g) {
    int n = g.vertex_count();
    int best = n > 0 ? 1 : 0;
    std::vector<int> members;
    std::function<void(int)> grow = [&](int start) {
        best = std::max(best, static_cast<int>(members.size()));
        for (int v = start; v < n; ++v) {
            bool adjacent_to_all = true;
            for (int u : members)
                if (g.find_edge(u, v) < 0 && g.find_edge(v, u) < 0) adjacent_to_all = false;
            if (!adjacent_to_all) continue;
            members.push_back(v);
            grow(v + 1);
            members.pop_back();
        }
    };
    grow(0);
    return best;
}

} // namespace

FiniteStructure build_G_F(const ObstructionFamily& family) {
    auto problems = validate(family);
    if (!problems.empty()) fail(ErrorCode::UniverseMismatch, "invalid family: " + problems.front());
    FiniteStructure s;
    s.domain = family.colors;

    for (int i = 1; i <= family.colors; ++i) {
        FiniteStructure::Relation rel;
        rel.name = "S" + std::to_string(i);
        rel.arity = 1;
        rel.tuples = {{i}};
        rel.singleton = true;
        rel.singleton_value = i;
        s.relations.push_back(std::move(rel));
    }

    std::set<std::string> seen;
    for (const ColoredGraph& f : family.obstructions) {
        ColoredGraph shape = canonical_form(underlying(f));
        auto key = canonical_key(shape);
        if (!seen.insert(key).second) continue;
        FiniteStructure::Relation rel;
        if (is_clique_shape(shape))
            rel.name = "R_K" + std::to_string(shape.vertex_count());
        else if (is_cycle_shape(shape))
            rel.name = "R_C" + std::to_string(shape.vertex_count());
        else
            rel.name = "R_G" + std::to_string(seen.size() - 1);
        rel.arity = shape.edge_count();
        rel.shape = shape;

        if (rel.arity > 16) fail(ErrorCode::TooLarge, "relation arity beyond the enumeration guard");
        long long total = 1;
        for (int e = 0; e < rel.arity; ++e) {
            total *= family.colors;
            if (total > (1 << 22)) fail(ErrorCode::TooLarge, "relation tuple enumeration too large");
        }
        std::vector<int> coloring(rel.arity, 1);
        while (true) {
            ColoredGraph colored = shape;
            for (int e = 0; e < rel.arity; ++e) colored.set_edge_color(e, coloring[e]);
            if (!find_violation(colored, family)) rel.tuples.push_back(coloring);
            int pos = rel.arity - 1;
            while (pos >= 0) {
                if (++coloring[pos] <= family.colors) break;
                coloring[pos] = 1;
                --pos;
            }
            if (pos < 0) break;
            if (rel.arity == 0) break;
        }
        s.relations.push_back(std::move(rel));
    }
    return s;
}

long long FiniteFunction::table_size(int domain, int arity) {
    long long size = 1;
    for (int i = 0; i < arity; ++i) {
        size *= domain;
        if (size > (1LL << 40)) fail(ErrorCode::TooLarge, "function table too large");
    }
    return size;
}

int FiniteFunction::apply(const std::vector<int>& args) const {
    long long index = 0;
    for (int a : args) index = index * domain + (a - 1);
    return table.at(index);
}

std::optional<PolymorphismViolation> is_polymorphism(const FiniteFunction& f,
                                                     const FiniteStructure& s) {
    if (f.domain != s.domain) fail(ErrorCode::UniverseMismatch, "function and structure domains differ");
    int k = f.arity;
    for (const auto& rel : s.relations) {
        size_t count = rel.tuples.size();
        if (count == 0) continue;
        long long combos = 1;
        for (int t = 0; t < k; ++t) {
            combos *= static_cast<long long>(count);
            if (combos > (1LL << 26)) fail(ErrorCode::TooLarge, "polymorphism check too large");
        }
        std::set<std::vector<int>> members(rel.tuples.begin(), rel.tuples.end());
        std::vector<size_t> pick(k, 0);
        std::vector<int> args(k), image(rel.arity);
        while (true) {
            for (int row = 0; row < rel.arity; ++row) {
                for (int t = 0; t < k; ++t) args[t] = rel.tuples[pick[t]][row];
                image[row] = f.apply(args);
            }
            if (!members.count(image)) {
                PolymorphismViolation bad;
                bad.relation = rel.name;
                for (int t = 0; t < k; ++t) bad.columns.push_back(rel.tuples[pick[t]]);
                bad.image = image;
                return bad;
            }
            int pos = k - 1;
            while (pos >= 0) {
                if (++pick[pos] < count) break;
                pick[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    }
    return std::nullopt;
}

namespace {

/// Necklace classes: class id per tuple index, ordered by first occurrence.
struct NecklaceIndex {
    std::vector<int> class_of;   // tuple index -> class
    long long classes = 0;
    long long tuples = 0;
};

NecklaceIndex necklace_index(int domain, int k) {
    NecklaceIndex idx;
    idx.tuples = FiniteFunction::table_size(domain, k);
    if (idx.tuples > (1LL << 24)) fail(ErrorCode::TooLarge, "tuple space too large for necklace indexing");
    idx.class_of.assign(idx.tuples, -1);
    std::vector<int> tuple(k);
    for (long long t = 0; t < idx.tuples; ++t) {
        if (idx.class_of[t] >= 0) continue;
        long long x = t;
        for (int pos = k - 1; pos >= 0; --pos) {
            tuple[pos] = static_cast<int>(x % domain);
            x /= domain;
        }
        int cls = static_cast<int>(idx.classes++);
        for (int r = 0; r < k; ++r) {
            long long index = 0;
            for (int pos = 0; pos < k; ++pos) index = index * domain + tuple[(pos + r) % k];
            idx.class_of[index] = cls;
        }
    }
    return idx;
}

std::optional<FiniteFunction> search_block(const FiniteStructure& s, int k, const NecklaceIndex& idx,
                                           int first_value, long long classes) {
    // Enumerate class-value assignments with the first class pinned.
    std::vector<int> values(classes, 1);
    values[0] = first_value;
    while (true) {
        FiniteFunction f;
        f.domain = s.domain;
        f.arity = k;
        f.table.resize(idx.tuples);
        for (long long t = 0; t < idx.tuples; ++t) f.table[t] = values[idx.class_of[t]];
        if (!is_polymorphism(f, s)) return f;
        long long pos = classes - 1;
        while (pos >= 1) {
            if (++values[pos] <= s.domain) break;
            values[pos] = 1;
            --pos;
        }
        if (pos < 1) break;
    }
    return std::nullopt;
}

} // namespace

long long count_necklaces(int domain, int k) { return necklace_index(domain, k).classes; }

std::optional<FiniteFunction> find_cyclic_polymorphism(const FiniteStructure& s, int k,
                                                       long long budget, int threads) {
    if (k < 2) fail(ErrorCode::BadIndex, "cyclic operations need arity >= 2");
    NecklaceIndex idx = necklace_index(s.domain, k);
    long long candidates = 1;
    for (long long c = 0; c < idx.classes; ++c) {
        candidates *= s.domain;
        if (candidates > budget)
            fail(ErrorCode::TooLarge, "cyclic polymorphism search above the candidate budget");
    }

    if (threads <= 1 || s.domain == 1) {
        for (int first = 1; first <= s.domain; ++first)
            if (auto f = search_block(s, k, idx, first, idx.classes)) return f;
        return std::nullopt;
    }
    // Blocks by the first class value; the earliest block with a hit holds
    // the lexicographically least witness.
    std::vector<std::future<std::optional<FiniteFunction>>> futures;
    for (int first = 1; first <= s.domain; ++first)
        futures.push_back(std::async(std::launch::async,
                                     [&s, k, &idx, first] { return search_block(s, k, idx, first, idx.classes); }));
    std::optional<FiniteFunction> found;
    for (auto& fut : futures) {
        auto res = fut.get();
        if (!found && res) found = res;
    }
    return found;
}

HardnessMatrix hardness_matrix(const ObstructionFamily& family, int k, int i, int j, int p) {
    if (k < 2) fail(ErrorCode::BadIndex, "matrices start at arity 2");
    if (i == j) fail(ErrorCode::BadIndex, "the split colors must differ");
    for (int c : {i, j, p})
        if (c < 1 || c > family.colors) fail(ErrorCode::UniverseMismatch, "color out of range");

    FiniteStructure s = build_G_F(family);
    // The refuting relation: a graph shape with a forbidden mono-p coloring.
    const FiniteStructure::Relation* refuting = nullptr;
    for (const auto& rel : s.relations) {
        if (rel.singleton || rel.arity < 3) continue;
        std::vector<int> mono(rel.arity, p);
        if (std::find(rel.tuples.begin(), rel.tuples.end(), mono) == rel.tuples.end()) {
            refuting = &rel;
            break;
        }
    }
    if (!refuting)
        fail(ErrorCode::HypothesisUnmet,
             "no relation refutes color " + std::to_string(p) + "; the family lacks a mono obstruction");

    int m = k / 2; // split width; (k - 1) / 2 when odd
    if (k % 2 == 1) m = (k - 1) / 2;
    int l = refuting->arity;

    HardnessMatrix out;
    out.relation = refuting->name;
    out.p = p;
    out.m = m;
    auto row_of = [&](const std::vector<int>& pattern) { return pattern; };
    if (k % 2 == 0) {
        std::vector<int> row1, row2;
        for (int t = 0; t < k; ++t) row1.push_back(t < m ? i : j);
        for (int t = 0; t < k; ++t) row2.push_back(t < m ? j : i);
        out.rows.push_back(row_of(row1));
        out.rows.push_back(row_of(row2));
        for (int r = 2; r < l; ++r) out.rows.push_back(std::vector<int>(k, p));
    } else {
        std::vector<int> row1, row2, row3;
        for (int t = 0; t < k; ++t) row1.push_back(t < m ? i : j);
        for (int t = 0; t < k; ++t) row2.push_back(t < m + 1 ? j : i);
        row3.push_back(j);
        for (int t = 0; t < m; ++t) row3.push_back(i);
        for (int t = 0; t < m; ++t) row3.push_back(j);
        out.rows.push_back(row_of(row1));
        out.rows.push_back(row_of(row2));
        out.rows.push_back(row_of(row3));
        for (int r = 3; r < l; ++r) out.rows.push_back(std::vector<int>(k, p));
    }

    std::set<std::vector<int>> members(refuting->tuples.begin(), refuting->tuples.end());
    out.columns_in_relation = true;
    for (int t = 0; t < k; ++t) {
        std::vector<int> column;
        for (const auto& row : out.rows) column.push_back(row[t]);
        if (!members.count(column)) out.columns_in_relation = false;
    }
    out.image_outside = !members.count(std::vector<int>(l, p));
    return out;
}

ClassificationResult classify(const ObstructionFamily& family, int m) {
    ClassificationResult res;
    if (m < 3) {
        res.detail = "threshold below 3";
        return res;
    }
    auto problems = validate(family);
    if (!problems.empty()) {
        res.detail = "invalid family: " + problems.front();
        return res;
    }

    // Shape: colorings of odd cycles or cliques; long cycles monochromatic;
    // a non-mono K_m coloring drags in all of them.
    bool any_nonmono_km = false;
    for (const ColoredGraph& f : family.obstructions) {
        ColoredGraph shape = underlying(f);
        bool clique = is_clique_shape(shape) && shape.vertex_count() >= 3;
        bool odd_cycle = is_cycle_shape(shape) && shape.vertex_count() % 2 == 1;
        if (!clique && !odd_cycle) {
            res.detail = "an obstruction is neither an odd cycle nor a clique";
            return res;
        }
        bool mono = true;
        for (int e = 1; e < f.edge_count(); ++e)
            if (f.edge_color(e) != f.edge_color(0)) mono = false;
        if (!clique && !mono) {
            res.detail = "a colored cycle is not monochromatic";
            return res;
        }
        if (clique && shape.vertex_count() == m && !mono) any_nonmono_km = true;
    }
    if (any_nonmono_km) {
        std::set<std::string> present;
        for (const ColoredGraph& f : family.obstructions)
            if (f.vertex_count() == m && is_clique_shape(underlying(f)))
                present.insert(canonical_key(f));
        long long expected = 1;
        for (int e = 0; e < m * (m - 1) / 2; ++e) {
            expected *= family.colors;
            if (expected > (1 << 22)) fail(ErrorCode::TooLarge, "K_m coloring check too large");
        }
        std::set<std::string> all;
        ColoredGraph km = complete_graph(m, family.colors);
        std::vector<int> coloring(km.edge_count(), 1);
        while (true) {
            ColoredGraph colored = km;
            for (int e = 0; e < km.edge_count(); ++e) colored.set_edge_color(e, coloring[e]);
            all.insert(canonical_key(colored));
            int pos = km.edge_count() - 1;
            while (pos >= 0) {
                if (++coloring[pos] <= family.colors) break;
                coloring[pos] = 1;
                --pos;
            }
            if (pos < 0) break;
        }
        if (present != all) {
            res.detail = "a non-monochromatic K_m coloring is present but not all of them are";
            return res;
        }
    }

    // Trivial-P witness: a color whose mono obstructions all contain K_m.
    for (int i = 1; i <= family.colors; ++i) {
        bool all_contain = true;
        for (const ColoredGraph& f : family.obstructions) {
            bool mono_i = f.edge_count() > 0;
            for (int e = 0; e < f.edge_count(); ++e)
                if (f.edge_color(e) != i) mono_i = false;
            if (mono_i && clique_number(f) < m) all_contain = false;
        }
        if (all_contain) {
            res.verdict = Classification::TriviallyP;
            res.witness_color = i;
            res.detail = "all monochromatic obstructions of color " + std::to_string(i) + " contain K_" +
                         std::to_string(m);
            return res;
        }
    }

    res.verdict = Classification::NPComplete;
    res.detail = "every color has a K_" + std::to_string(m) + "-free monochromatic obstruction";
    FiniteStructure s = build_G_F(family);
    for (int k = 2; k <= 4; ++k) {
        try {
            bool found = find_cyclic_polymorphism(s, k).has_value();
            res.cyclic_found[k] = found;
            if (found) res.cross_check_consistent = false;
        } catch (const Error&) {
            // Budget exceeded: the cross-check is skipped for this arity.
        }
    }
    return res;
}

} // namespace patcol
