#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patcol/family.hpp"

namespace patcol {

/// The edge-amalgamation normal form: quotient closure, 1-cut splitting with
/// fresh vertex-color pairs, 2-cut splitting with fresh edge-marker pairs,
/// negation completion, and the final powerset recoloring.
///
/// The output palette is structured: a color encodes one original color plus
/// a subset of the introduced edge markers.  Patterns whose marker literals
/// are undecided get materialized into all completions, so the result is a
/// plain totally-colored family again; families whose completion exceeds the
/// budget are rejected with TooLarge (the C_5-style families blow up here).
struct NormalizeOptions {
    int max_obstructions = 4096;
    int max_marker_pairs = 16;
    int max_vertex_pairs = 30;
    int max_member_vertices = 8;
    /// Run the quotient and splitting phases only and skip materialization;
    /// the returned family is empty but the transcript and the split records
    /// are complete.  Budget exhaustion stops splitting instead of failing.
    bool splits_only = false;
};

struct TwoCutRecord {
    std::string member_key; // canonical key of the member when processed
    int member_vertices = 0;
    int v = 0;
    int w = 0;
    bool edge_case = false;
    bool deduplicated = false; // an isomorphic split had fired before
};

struct NormalizeResult {
    ObstructionFamily family;
    int original_colors = 0;
    int marker_pairs = 0; // palette size = original_colors * 2^marker_pairs
    int vertex_pairs = 0;
    std::vector<std::string> transcript;
    std::vector<TwoCutRecord> two_cuts;
    int quotient_members = 0;
    int one_cut_events = 0;
};

NormalizeResult normalize(const ObstructionFamily& family, const NormalizeOptions& opts = {});

/// Palette helpers for the structured powerset colors.
int palette_size(int original_colors, int marker_pairs);
int palette_color(int orig, std::uint64_t markers, int marker_pairs);
int palette_original(int color, int marker_pairs);
std::uint64_t palette_markers(int color, int marker_pairs);

/// Lift an uncolored input of the original problem onto the normalized one:
/// orient edges low-to-high and widen the palette.  Vertex assignments stay
/// open for the solver.
ColoredGraph lift_input(const ColoredGraph& g, const NormalizeResult& norm);

} // namespace patcol
