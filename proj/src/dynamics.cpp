#include "bperc/dynamics.hpp"

#include <algorithm>
#include <deque>

namespace bperc {

namespace {

int infected_neighbours(const Config& c, int x, int y) {
    return (int)c.at(x + 1, y) + (int)c.at(x - 1, y) + (int)c.at(x, y + 1) +
           (int)c.at(x, y - 1);
}

int interval_distance(int lo1, int hi1, int lo2, int hi2) {
    if (lo2 > hi1) return lo2 - hi1;
    if (lo1 > hi2) return lo1 - hi2;
    return 0;
}

int rect_l1_distance(const Rect& a, const Rect& b) {
    return interval_distance(a.x_lo, a.x_hi, b.x_lo, b.x_hi) +
           interval_distance(a.y_lo, a.y_hi, b.y_lo, b.y_hi);
}

Rect bounding_box(const Rect& a, const Rect& b) {
    return Rect{std::min(a.x_lo, b.x_lo), std::max(a.x_hi, b.x_hi),
                std::min(a.y_lo, b.y_lo), std::max(a.y_hi, b.y_hi)};
}

}  // namespace

Config step(const Config& c) {
    Config out = c;
    const Rect& d = c.domain();
    for (int y = d.y_lo; y <= d.y_hi; ++y)
        for (int x = d.x_lo; x <= d.x_hi; ++x)
            if (!c.at(x, y) && infected_neighbours(c, x, y) >= 2) out.set(x, y, true);
    return out;
}

Config closure(const Config& c) {
    const Rect& d = c.domain();
    const int w = d.width(), h = d.height();
    Config out = c;
    std::vector<std::uint8_t> counts((std::size_t)w * h, 0);
    std::deque<Site> queue;

    auto idx = [&](int x, int y) { return (std::size_t)(y - d.y_lo) * w + (x - d.x_lo); };
    auto bump = [&](int x, int y) {
        if (x < d.x_lo || x > d.x_hi || y < d.y_lo || y > d.y_hi) return;
        if (out.at(x, y)) return;
        if (++counts[idx(x, y)] == 2) queue.push_back(Site{x, y});
    };

    for (int y = d.y_lo; y <= d.y_hi; ++y)
        for (int x = d.x_lo; x <= d.x_hi; ++x)
            if (out.at(x, y)) {
                bump(x + 1, y);
                bump(x - 1, y);
                bump(x, y + 1);
                bump(x, y - 1);
            }

    while (!queue.empty()) {
        Site v = queue.front();
        queue.pop_front();
        if (out.at(v)) continue;
        out.set(v, true);
        bump(v.x + 1, v.y);
        bump(v.x - 1, v.y);
        bump(v.x, v.y + 1);
        bump(v.x, v.y - 1);
    }
    return out;
}

Config closure_in(const Config& a, const Rect& r) {
    if (!a.domain().contains(r))
        throw std::invalid_argument("bperc: closure_in requires R within the domain");
    Config sub(r);
    for (int y = r.y_lo; y <= r.y_hi; ++y)
        for (int x = r.x_lo; x <= r.x_hi; ++x)
            if (a.at(x, y)) sub.set(x, y, true);
    return closure(sub);
}

bool is_internally_filled(const Config& a, const Rect& r) {
    return closure_in(a, r).count() == r.area();
}

std::optional<int> double_gap(const Config& a, const Rect& r, Axis axis) {
    auto line_empty = [&](int i) {
        if (axis == Axis::X) {
            for (int y = r.y_lo; y <= r.y_hi; ++y)
                if (a.at(i, y)) return false;
        } else {
            for (int x = r.x_lo; x <= r.x_hi; ++x)
                if (a.at(x, i)) return false;
        }
        return true;
    };
    const int lo = axis == Axis::X ? r.x_lo : r.y_lo;
    const int hi = axis == Axis::X ? r.x_hi : r.y_hi;
    bool prev = hi >= lo && line_empty(lo);
    for (int i = lo; i < hi; ++i) {
        bool next = line_empty(i + 1);
        if (prev && next) return i;
        prev = next;
    }
    return std::nullopt;
}

bool crossed(const Config& a, const Rect& r, Direction from) {
    const Axis scan = (from == Direction::PlusX || from == Direction::MinusX) ? Axis::X : Axis::Y;
    if (double_gap(a, r, scan)) return false;
    switch (from) {
        case Direction::PlusX: {
            for (int y = r.y_lo; y <= r.y_hi; ++y)
                if (a.at(r.x_hi, y)) return true;
            return false;
        }
        case Direction::MinusX: {
            for (int y = r.y_lo; y <= r.y_hi; ++y)
                if (a.at(r.x_lo, y)) return true;
            return false;
        }
        case Direction::PlusY: {
            for (int x = r.x_lo; x <= r.x_hi; ++x)
                if (a.at(x, r.y_hi)) return true;
            return false;
        }
        default: {
            for (int x = r.x_lo; x <= r.x_hi; ++x)
                if (a.at(x, r.y_lo)) return true;
            return false;
        }
    }
}

std::vector<Site> minimal_percolating_subset(const Config& a, const Rect& r) {
    if (!is_internally_filled(a, r))
        throw std::invalid_argument("bperc: minimal_percolating_subset requires a filling config");
    Config cur(r);
    for (int y = r.y_lo; y <= r.y_hi; ++y)
        for (int x = r.x_lo; x <= r.x_hi; ++x)
            if (a.at(x, y)) cur.set(x, y, true);
    for (const Site& v : cur.sites()) {
        cur.set(v, false);
        if (closure(cur).count() != r.area()) cur.set(v, true);
    }
    return cur.sites();
}

std::vector<Site> MergeTree::component_sites(int node) const {
    std::vector<Site> out;
    std::vector<int> stack{node};
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        const Node& n = nodes[(std::size_t)u];
        if (n.child1 < 0) {
            out.push_back(Site{n.rect.x_lo, n.rect.y_lo});
        } else {
            stack.push_back(n.child1);
            stack.push_back(n.child2);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

MergeTree rectangles_process(const std::vector<Site>& sites) {
    MergeTree tree;
    std::vector<Site> sorted = sites;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> active;
    for (const Site& v : sorted) {
        tree.nodes.push_back({Rect{v.x, v.x, v.y, v.y}, -1, -1});
        active.push_back((int)tree.nodes.size() - 1);
    }

    // Merge the first (in lowest-lex-corner order) pair of components whose
    // rectangles are within graph distance 2; two internally filled
    // rectangles that close fill their bounding box, so every history
    // rectangle stays internally filled by its component's sites.
    while (true) {
        std::sort(active.begin(), active.end(), [&](int i, int j) {
            return rect_less(tree.nodes[(std::size_t)i].rect, tree.nodes[(std::size_t)j].rect);
        });
        bool merged = false;
        for (std::size_t i = 0; i + 1 < active.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < active.size(); ++j) {
                const Rect& ri = tree.nodes[(std::size_t)active[i]].rect;
                const Rect& rj = tree.nodes[(std::size_t)active[j]].rect;
                if (rect_l1_distance(ri, rj) <= 2) {
                    tree.nodes.push_back({bounding_box(ri, rj), active[i], active[j]});
                    active.erase(active.begin() + (long)j);
                    active.erase(active.begin() + (long)i);
                    active.push_back((int)tree.nodes.size() - 1);
                    merged = true;
                    break;
                }
            }
        }
        if (!merged) break;
    }
    tree.roots = active;
    return tree;
}

SpanSplit disjoint_span_split(const Config& a, const Rect& r) {
    if (r.long_side() < 2)
        throw std::invalid_argument("bperc: disjoint_span_split requires long(R) >= 2");
    std::vector<Site> minimal = minimal_percolating_subset(a, r);
    MergeTree tree = rectangles_process(minimal);
    if (tree.roots.size() != 1 || tree.nodes[(std::size_t)tree.roots[0]].child1 < 0)
        throw std::logic_error("bperc: rectangles process did not end in a single merge");
    const MergeTree::Node& root = tree.nodes[(std::size_t)tree.roots[0]];
    int c1 = root.child1, c2 = root.child2;
    if (!rect_less(tree.nodes[(std::size_t)c1].rect, tree.nodes[(std::size_t)c2].rect))
        std::swap(c1, c2);
    SpanSplit split;
    split.s1 = tree.nodes[(std::size_t)c1].rect;
    split.s2 = tree.nodes[(std::size_t)c2].rect;
    split.witness1 = tree.component_sites(c1);
    split.witness2 = tree.component_sites(c2);
    return split;
}

Rect al_witness(const Config& a, int k) {
    const Rect& d = a.domain();
    if (k < 1 || k > d.long_side())
        throw std::invalid_argument("bperc: al_witness requires 1 <= k <= long(domain)");
    if (closure(a).count() != d.area())
        throw std::invalid_argument("bperc: al_witness requires a percolating config");
    MergeTree tree = rectangles_process(a.sites());
    if (tree.roots.size() != 1)
        throw std::logic_error("bperc: percolating config produced several components");
    // Walk down to a minimal rectangle of long side >= k; its children are
    // strictly below k, so a merge gap of at most 2 keeps it within 2k.
    int u = tree.roots[0];
    while (true) {
        const MergeTree::Node& n = tree.nodes[(std::size_t)u];
        if (n.child1 < 0) break;
        const Rect& r1 = tree.nodes[(std::size_t)n.child1].rect;
        const Rect& r2 = tree.nodes[(std::size_t)n.child2].rect;
        bool ok1 = r1.long_side() >= k, ok2 = r2.long_side() >= k;
        if (ok1 && ok2)
            u = rect_less(r1, r2) ? n.child1 : n.child2;
        else if (ok1)
            u = n.child1;
        else if (ok2)
            u = n.child2;
        else
            break;
    }
    return tree.nodes[(std::size_t)u].rect;
}

}  // namespace bperc
