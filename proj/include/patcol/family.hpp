#pragma once

#include <optional>
#include <string>
#include <vector>

#include "patcol/graph.hpp"

namespace patcol {

/// A finite list of totally edge-colored connected graphs over a shared color
/// universe.  vertex_colors is 0 except for normal-form outputs, where colors
/// come in complementary pairs (2t-1, 2t) and a total assignment picks exactly
/// one color of each pair per vertex.
struct ObstructionFamily {
    int colors = 1;
    int vertex_colors = 0;
    std::vector<ColoredGraph> obstructions;
};

struct Violation {
    int obstruction = -1;
    std::vector<int> hom; // obstruction vertex -> g vertex
};

/// A color-matched homomorphism from some family member into g whose image
/// edges are all colored.  Members are tried in family order; the search is
/// deterministic.  With a focus, only matches through that edge (or vertex)
/// are sought.
std::optional<Violation> find_violation(const ColoredGraph& g, const ObstructionFamily& family,
                                        std::optional<int> focus_edge = std::nullopt,
                                        std::optional<int> focus_vertex = std::nullopt);

/// Report-style validation: disconnected or partially colored obstructions,
/// universe mismatches.  Empty result means valid.
std::vector<std::string> validate(const ObstructionFamily& family);

/// Drop members implied by another member mapping color-matched into them.
/// The result defines the same coloring problem.
ObstructionFamily prune_redundant(const ObstructionFamily& family);

/// A color map transporting freeness between families.
struct Recoloring {
    std::vector<int> map; // 1-indexed: map[c-1] is the image of color c
    int source_colors = 0;
    int target_colors = 0;

    int apply(int color) const { return map.at(color - 1); }
    bool surjective() const;
    static Recoloring identity(int colors);
};

ColoredGraph recolor(const ColoredGraph& g, const Recoloring& rho);

/// Finite check of the recoloring property: every preimage coloring of a
/// target member must admit some source member mapping in.
bool is_recoloring(const Recoloring& rho, const ObstructionFamily& source,
                   const ObstructionFamily& target);

struct CoreResult {
    ObstructionFamily family;
    Recoloring recoloring; // original universe -> core universe
};

/// Shrink along non-surjective self-recolorings (lexicographic search order)
/// until the family is a core; images are deduplicated by canonical form and
/// the universe is renumbered to the colors actually hit.
CoreResult compute_core(const ObstructionFamily& family);

/// Replace every member by all orientations of it; defines the equivalent
/// oriented problem.
ObstructionFamily orient_family(const ObstructionFamily& family, bool dedup_iso = true);

/// Stable content hash (member order independent); gadget files carry it so
/// verification can refuse a family swap.
std::string family_fingerprint(const ObstructionFamily& family);

} // namespace patcol
