#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patcol/family.hpp"

namespace patcol {

/// The finite relational structure on the color set: one relation per
/// distinct obstruction underlying graph (tuples are the free colorings of
/// its edges in canonical edge order) plus unary singletons.
struct FiniteStructure {
    int domain = 0;
    struct Relation {
        std::string name;
        int arity = 0;
        std::vector<std::vector<int>> tuples;
        /// Underlying graph for graph relations; empty for singletons.
        ColoredGraph shape;
        bool singleton = false;
        int singleton_value = 0;
    };
    std::vector<Relation> relations;

    const Relation* find(const std::string& name) const;
};

FiniteStructure build_G_F(const ObstructionFamily& family);

/// A finite operation domain^k -> domain as a flat table in mixed-radix
/// (first argument most significant).
struct FiniteFunction {
    int domain = 0;
    int arity = 0;
    std::vector<int> table;

    int apply(const std::vector<int>& args) const;
    static long long table_size(int domain, int arity);
};

struct PolymorphismViolation {
    std::string relation;
    std::vector<std::vector<int>> columns; // k tuples of the relation
    std::vector<int> image;                // f applied row-wise, not in the relation
};

/// Check the preservation condition over every relation and every k-column
/// matrix; reports the first witnessing matrix on failure.
std::optional<PolymorphismViolation> is_polymorphism(const FiniteFunction& f,
                                                     const FiniteStructure& s);

/// Enumerate functions constant on rotation classes of tuples (necklaces) in
/// lexicographic order; first preserved one wins.  Guarded by a candidate
/// budget.
std::optional<FiniteFunction> find_cyclic_polymorphism(const FiniteStructure& s, int k,
                                                       long long budget = 10'000'000,
                                                       int threads = 1);

long long count_necklaces(int domain, int k);

/// The refutation matrix for a hypothetical cyclic operation of arity k that
/// maps the split (i..i, j..j) row pattern to p: all columns lie in the
/// K_m-free mono-p relation while the image row is constant p and outside it.
struct HardnessMatrix {
    std::vector<std::vector<int>> rows; // l rows of width k
    std::string relation;               // the refuting relation's name
    int p = 0;
    int m = 0;
    bool columns_in_relation = false;
    bool image_outside = false;
};

HardnessMatrix hardness_matrix(const ObstructionFamily& family, int k, int i, int j, int p);

enum class Classification { TriviallyP, NPComplete, OutOfShape };

struct ClassificationResult {
    Classification verdict = Classification::OutOfShape;
    std::string detail;
    /// Trivial-P witness color, if any.
    int witness_color = 0;
    /// Cross-check: cyclic polymorphism search results for k = 2..4.
    std::map<int, bool> cyclic_found;
    bool cross_check_consistent = true;
};

/// Shape test plus the clique-threshold criterion; NP-complete verdicts are
/// cross-checked by the small-arity cyclic polymorphism search.
ClassificationResult classify(const ObstructionFamily& family, int m);

} // namespace patcol
