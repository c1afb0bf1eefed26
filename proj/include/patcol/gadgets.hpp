#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "patcol/family.hpp"
#include "patcol/graph.hpp"
#include "patcol/solver.hpp"

namespace patcol {

enum class GadgetKind { BaseH, Ci, DNegI, Determiner, RemoteDeterminer, Hij, GijChain, Equality };

const char* gadget_kind_name(GadgetKind k);
std::optional<GadgetKind> gadget_kind_from_name(const std::string& name);

/// Compositional safety evidence.  Leaves are either a monochromatically
/// precolored longest-cycle-or-clique with uncolored edges (the base
/// observation), a trivially safe bare edge, or a verified D^{not-i}
/// construction whose safety is lemma-backed; internal nodes amalgamate
/// along edges declared safe in their children.
struct SafetyCertificate {
    struct Node {
        enum class Kind { MonoBase, FreeEdge, DNegLemma, Amalgam, RemoteStep };
        Kind kind = Kind::MonoBase;
        // Leaves: the partially colored base and its mono color.
        ColoredGraph base;
        int mono_color = 0;
        std::vector<int> base_safe_edges; // uncolored edges of the leaf base
        // Internal nodes: children by index (post-order; root is last).
        int left = -1;
        int right = -1;
        // Safe edges of this node's composed graph in final-gadget indices.
        std::vector<int> safe_edges;
        bool simultaneous = false; // safe along all safe_edges at once
    };
    std::vector<Node> nodes;

    const Node& root() const { return nodes.back(); }
};

/// Structural validity of the derivation tree (leaf base shapes against the
/// family, gluing bookkeeping).  Semantic safety is probed by falsify_safety.
std::vector<std::string> check_certificate(const SafetyCertificate& cert,
                                           const ObstructionFamily& family);

struct Gadget {
    GadgetKind kind = GadgetKind::Determiner;
    ColoredGraph graph;
    std::map<std::string, int> distinguished;    // label -> edge index
    std::map<std::string, int> marked_vertices;  // label -> vertex (BaseH's x)
    std::string family_fingerprint;
    std::optional<SafetyCertificate> safety;
    int color = 0;  // i
    int color2 = 0; // j for pair gadgets
    int d = 0;      // remoteness / chain length
    bool verified = false;

    int distinguished_edge(const std::string& label) const;
};

/// The color an edge is forced to when every free extension agrees, checked
/// by pin queries.  Used across the builders.
struct VerificationCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerificationReport {
    std::vector<VerificationCheck> checks;
    SolveStats stats;
    bool all_pass = false;
};

/// Delete edges in ascending order while the graph stays uncolorable;
/// the result is edge-minimal (every deletion becomes colorable).
ColoredGraph minimize_uncolorable(const ColoredGraph& witness, const ObstructionFamily& family);

/// Minimal uncolorable graph minus its first edge, plus the vertex x whose
/// incident edges must see every color in every free coloring.
Gadget build_base_H(const ColoredGraph& witness, const ObstructionFamily& family);

/// Greedily color x-incident edges away from i while extensions survive; the
/// first stuck edge is forced to i.
Gadget build_C_i(const Gadget& base, int i, const ObstructionFamily& family);

/// Ground cycle/clique with C^i copies attached at one endpoint of the
/// distinguished edge; every free extension avoids i on it.
Gadget build_D_neg_i(const Gadget& ci, int i, const ObstructionFamily& family);

/// Glue all D^{not-j} over their distinguished edges, merging the uncovered
/// endpoints; the resulting edge is forced to i.
Gadget build_determiner(int i, const ObstructionFamily& family, const std::map<int, Gadget>& dnegs);

/// Push the precolored edges to distance >= d by replacing each with a glued
/// determiner copy of its color.
Gadget make_remote(const Gadget& det, int d, const std::map<int, Gadget>& dets,
                   const ObstructionFamily& family);

/// Restrict an edge to colors {i, j} by gluing one-missing-edge mono grounds
/// for every other color.
Gadget build_H_ij(int i, int j, const ObstructionFamily& family);

/// Chain of d blocks forbidding (i at one end, j at the other), every other
/// end pair achievable, ends at distance >= d.
Gadget build_G_ij_chain(int i, int j, int d, const ObstructionFamily& family);

/// Two distinguished edges forced to equal colors, all equal pairs
/// achievable.  d below every obstruction size downgrades the certificate to
/// per-edge safety.
Gadget build_equality_gadget(const ObstructionFamily& family, int d);

/// Kind-appropriate battery: pin queries, structural checks, remoteness,
/// certificate shape.  Full extension enumeration replaces pin queries when
/// at most 16 edges are uncolored.
VerificationReport verify_gadget(const Gadget& g, const ObstructionFamily& family, int threads = 1);

struct SafetyCounterexample {
    std::string description;
    ColoredGraph host;          // the catalog graph, totally colored
    std::vector<int> host_edges;
    std::vector<int> gadget_edges;
};

/// Bounded search for a safety violation: glue catalog graphs (cliques and
/// cycles up to `bound` vertices plus obstruction shapes, under all free
/// colorings) onto the declared-safe edges and test extendability.
std::optional<SafetyCounterexample> falsify_safety(const Gadget& g, const ObstructionFamily& family,
                                                   int bound);

/// Convenience drivers for the full determiner pipeline from a witness.
struct DeterminerPipeline {
    Gadget base;
    std::map<int, Gadget> cis;
    std::map<int, Gadget> dnegs;
    std::map<int, Gadget> determiners;
};

DeterminerPipeline build_determiner_pipeline(const ColoredGraph& witness,
                                             const ObstructionFamily& family);

std::map<int, Gadget> build_remote_determiners(const DeterminerPipeline& pipeline, int d,
                                               const ObstructionFamily& family);

/// The library ships an uncolorable witness for the two-color triangle
/// family (the classical complete graph on six vertices); other families
/// need a user-supplied witness.
std::optional<ColoredGraph> default_witness(const ObstructionFamily& family);

int max_obstruction_vertices(const ObstructionFamily& family);

} // namespace patcol
