#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "patcol/algebra.hpp"
#include "patcol/family.hpp"
#include "patcol/gadgets.hpp"

namespace patcol {

/// A relational instance over the signature of G_F.
struct CspInstance {
    int variables = 0;
    struct Constraint {
        std::string relation;
        std::vector<int> tuple; // variable indices, 0-based
    };
    std::vector<Constraint> constraints;
    std::map<int, int> pins; // variable -> color
};

/// How a reduction transformed its input; enough to replay correspondences
/// in round-trip tests.
struct ReductionTrace {
    std::string input_fingerprint;
    std::string output_fingerprint;
    std::map<int, std::vector<int>> variable_edges;   // variable -> output edges
    std::vector<std::vector<int>> constraint_edges;   // constraint -> copy edges
    std::map<int, int> precolored_copy;               // input edge -> copy ordinal
};

/// One variable per edge; one constraint per homomorphism from an
/// obstruction shape, deduplicated up to the shape's edge automorphisms.
std::pair<CspInstance, ReductionTrace> col_to_csp(const ColoredGraph& g,
                                                  const ObstructionFamily& family);

/// Disjoint obstruction copies per constraint, equality gadgets in a star
/// per shared variable, pins as precolored edges.
std::pair<ColoredGraph, ReductionTrace> csp_to_ext(const CspInstance& x,
                                                   const ObstructionFamily& family,
                                                   const Gadget& equality);

/// Glue a remote determiner copy onto every precolored edge, identify the
/// precolored sets across copies of the same determiner, erase all colors.
std::pair<ColoredGraph, ReductionTrace> ext_to_col(const ColoredGraph& x,
                                                   const ObstructionFamily& family,
                                                   const std::map<int, Gadget>& determiners);

/// Exhaustive assignment check of a CSP instance against the structure.
bool brute_csp_satisfiable(const CspInstance& x, const FiniteStructure& s);

struct AgreementReport {
    int total = 0;
    int agreed = 0;
    std::vector<std::string> disagreements;

    bool all_agree() const { return total == agreed; }
};

/// Run `count` instances through two deciders and report disagreements.
AgreementReport check_reduction_pair(const std::function<bool(int)>& left,
                                     const std::function<bool(int)>& right, int count,
                                     const std::function<std::string(int)>& describe = {});

/// Deterministic counter-generated instances for the three reductions.
AgreementReport check_col_to_csp(const ObstructionFamily& family, int count);
AgreementReport check_csp_to_ext(const ObstructionFamily& family, const Gadget& equality, int count);
AgreementReport check_ext_to_col(const ObstructionFamily& family,
                                 const std::map<int, Gadget>& determiners, int count);

/// The counter-based generators behind the checkers (also used by tests).
ColoredGraph generated_graph(std::uint64_t index, int max_vertices, int colors);
CspInstance generated_csp(std::uint64_t index, const FiniteStructure& structure, int max_variables);
ColoredGraph generated_partial(std::uint64_t index, int max_vertices, int colors, int max_pins);

} // namespace patcol
