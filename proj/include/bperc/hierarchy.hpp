#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bperc/droplet_events.hpp"
#include "bperc/dynamics.hpp"
#include "bperc/lattice.hpp"
#include "bperc/numerics.hpp"

namespace bperc {

// Rooted out-tree of nested rectangles recording how a droplet grew. Vertex 0
// is the root; each vertex stores its children and the buffer-selection label
// of the edge arriving from its parent (all-zero for the root itself).
struct Hierarchy {
    struct Vertex {
        Rect rect;
        std::vector<int> children;
        XLabel xlabel;
    };
    std::vector<Vertex> vertices;

    const Rect& root_rect() const { return vertices.at(0).rect; }
    bool is_leaf(int u) const { return vertices.at(u).children.empty(); }
    int height() const;  // vertices on the longest root-to-leaf path
};

// Deterministic construction from an internally filled droplet; the result
// passes check_good and check_satisfied on the same input.
// Requires is_internally_filled(a, r) and long(r) <= log(1/q)/(2q).
Hierarchy build_hierarchy(const Config& a, const Rect& r, const Constants& k);

struct ConditionViolation {
    std::string condition;  // "a".."i"
    int vertex = -1;
    int child = -1;  // vertex index for edge conditions, else -1
    std::string detail;
};

struct GoodReport {
    bool good = false;
    std::vector<ConditionViolation> violations;
};

GoodReport check_good(const Hierarchy& h, const Constants& k);

// Root-to-leaf path taking at each split the child of larger short side
// (ties: lexicographically smaller corner). Returned as (parent, child) pairs.
std::vector<std::pair<int, int>> trunk(const Hierarchy& h);

struct EventWitness {
    std::string event;      // "seed", "D1", "D2"
    std::string condition;  // "j", "k", "l"
    int vertex = -1;
    int child = -1;
    bool decreasing = false;  // witness must be infection-free rather than infected
    bool ok = false;
    std::string detail;
    std::vector<Site> sites;
};

struct SatisfactionCertificate {
    bool satisfied = false;
    std::vector<EventWitness> witnesses;
    std::vector<std::pair<int, int>> trunk_edges;
    std::vector<std::string> failures;
};

// Re-derives the witness of every event from (h, a) alone, re-checks each
// witness independently, and certifies that all witness sets are pairwise
// disjoint.
SatisfactionCertificate check_satisfied(const Hierarchy& h, const Config& a);

struct HierarchyStats {
    int v = 0;  // vertices
    int s = 0;  // seeds (leaves)
    int m = 0;  // large seeds: long >= 1/(3 sqrt q)
    int h = 0;  // height
    long long X = 0;            // sum of seed semi-perimeters
    long long up_phi_sum = 0;   // sum of phi over trunk vertices with short >= B/q
    double weight = 1.0;
};

HierarchyStats stats(const Hierarchy& h, const Constants& k);

// exp(16 (N + M log phi(R))); requires N >= M >= 1.
double weighted_count_bound(int n_vertices, int m_seeds, const Rect& r);

// Exhaustive pod search. Without u: true iff some rectangle S with
// dim(S) <= sum of seed dims satisfies
//   sum over single-child edges of U(R_v, R_u) >= U(S, R) - 2 (s-1) q g(sqrt q).
// With u: the two-pod variant with S1 inside rect(u) and S2 between rect(u)
// and R. Rejects seed dimension sums above 64 per axis.
bool verify_pod_inequality(const Hierarchy& h, double q, std::optional<int> u = std::nullopt);

void to_json(nlohmann::json& j, const Hierarchy& h);
Hierarchy hierarchy_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const GoodReport& r);
void to_json(nlohmann::json& j, const SatisfactionCertificate& c);
void to_json(nlohmann::json& j, const HierarchyStats& s);

}  // namespace bperc
