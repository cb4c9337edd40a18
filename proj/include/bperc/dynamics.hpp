#pragma once

#include <optional>
#include <vector>

#include "bperc/lattice.hpp"

namespace bperc {

// One synchronous round: every site of the domain with at least two infected
// lattice neighbours becomes infected. Sites outside the domain never count.
Config step(const Config& c);

// Least fixed point of step, computed with a queue and per-site neighbour
// counters (O(area) amortized).
Config closure(const Config& c);

// closure(A cap R) within the sub-domain R.
Config closure_in(const Config& a, const Rect& r);

bool is_internally_filled(const Config& a, const Rect& r);

enum class Axis { X, Y };

// First index j with lines j, j+1 of R both empty of A. Axis::X scans
// columns (the "vertical double gap"); Axis::Y scans rows. Width/height 1
// rectangles have no adjacent pair and yield nullopt.
std::optional<int> double_gap(const Config& a, const Rect& r, Axis axis);

// crossed(A, R, d): no double gap perpendicular to d, and the extreme line of
// R in direction d is occupied. Direction::PlusX is "crossed left to right".
bool crossed(const Config& a, const Rect& r, Direction from);

// Greedy minimal percolating subset: drop sites in lexicographic (row-major)
// order whenever the remainder still fills R.
std::vector<Site> minimal_percolating_subset(const Config& a, const Rect& r);

struct SpanSplit {
    Rect s1, s2;
    std::vector<Site> witness1, witness2;
};

// The final merge of the rectangles process run on a minimal percolating
// subset of A in R: [s1 cup s2] = R with disjoint witnesses filling each part.
SpanSplit disjoint_span_split(const Config& a, const Rect& r);

// Merge tree of the rectangles process. Leaves are single infected sites;
// every rectangle in the history is internally filled by the input sites.
struct MergeTree {
    struct Node {
        Rect rect;
        int child1 = -1;  // -1 for leaves
        int child2 = -1;
    };
    std::vector<Node> nodes;
    std::vector<int> roots;  // final components

    std::vector<Site> component_sites(int node) const;
};

MergeTree rectangles_process(const std::vector<Site>& sites);

// Aizenman-Lebowitz witness: an internally filled rectangle with
// k <= long <= 2k, from the merge history. Requires closure(A) = domain.
Rect al_witness(const Config& a, int k);

}  // namespace bperc
