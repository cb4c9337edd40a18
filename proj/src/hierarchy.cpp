#include "bperc/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace bperc {

namespace {

int d_max(const Rect& s, const Rect& r) { return side_distances(s, r).max(); }

// A buffer in a given direction is non-empty iff the shifted copy of S
// clipped to R sticks out of S.
std::array<bool, 4> buffer_mask(const Rect& s, const Rect& r) {
    std::array<bool, 4> in_z{};
    in_z[(int)Direction::PlusX] =
        std::max(s.x_lo + 2, s.x_hi + 1) <= std::min(s.x_hi + 2, r.x_hi);
    in_z[(int)Direction::MinusX] =
        std::max(r.x_lo, s.x_lo - 2) <= std::min(s.x_hi - 2, s.x_lo - 1);
    in_z[(int)Direction::PlusY] =
        std::max(s.y_lo + 2, s.y_hi + 1) <= std::min(s.y_hi + 2, r.y_hi);
    in_z[(int)Direction::MinusY] =
        std::max(r.y_lo, s.y_lo - 2) <= std::min(s.y_hi - 2, s.y_lo - 1);
    return in_z;
}

int masked_norm(const Rect& s, const Rect& r, const XLabel& x) {
    const auto in_z = buffer_mask(s, r);
    int n = 0;
    for (Direction d : kDirections)
        if (in_z[(int)d]) n += x[d];
    return n;
}

Config clip(const Config& a, const Rect& keep, const Rect* exclude = nullptr) {
    Config out(a.domain());
    for (const Site& v : a.sites())
        if (keep.contains(v) && (!exclude || !exclude->contains(v))) out.set(v, true);
    return out;
}

// Local growth moves from S inside R: one or two units on a single side, or
// one unit on two adjacent sides. Every infected site within reach of S
// produces exactly one of these moves as the closure of S plus that site.
std::vector<Rect> growth_candidates(const Rect& s, const Rect& r) {
    std::vector<Rect> out;
    auto push = [&](int dxlo, int dxhi, int dylo, int dyhi) {
        Rect c{s.x_lo - dxlo, s.x_hi + dxhi, s.y_lo - dylo, s.y_hi + dyhi};
        if (r.contains(c)) out.push_back(c);
    };
    for (int step : {1, 2}) {
        push(0, step, 0, 0);
        push(0, 0, 0, step);
        push(step, 0, 0, 0);
        push(0, 0, step, 0);
    }
    push(0, 1, 0, 1);
    push(0, 1, 1, 0);
    push(1, 0, 0, 1);
    push(1, 0, 1, 0);
    return out;
}

// Greedy local maximality: accept a move while the enlarged rectangle is
// still internally filled by the scope and keeps distance >= f from R. At
// the fixed point every infected site within reach of S would push some side
// distance below f, which pins d(S, R) into [f, f + 2).
Rect grow_maximal(const Config& scope, Rect s, const Rect& r, double f) {
    bool progress = true;
    while (progress) {
        progress = false;
        for (const Rect& cand : growth_candidates(s, r)) {
            if (d_max(cand, r) < f) continue;
            if (!is_internally_filled(scope, cand)) continue;
            s = cand;
            progress = true;
            break;
        }
    }
    return s;
}

struct Builder {
    Hierarchy h;
    const Constants& k;
    double q;
    double leaf_threshold;

    explicit Builder(const Constants& k_) : k(k_), q(k_.q()), leaf_threshold(1.0 / std::sqrt(k_.q())) {}

    int add(const Rect& rect) {
        h.vertices.push_back({rect, {}, {}});
        return (int)h.vertices.size() - 1;
    }

    // {larger-short-side first}; ties by corner order, matching the trunk rule.
    static std::pair<Rect, Rect> order_split(const Rect& a, const Rect& b) {
        if (a.short_side() > b.short_side()) return {a, b};
        if (b.short_side() > a.short_side()) return {b, a};
        return rect_less(a, b) ? std::make_pair(a, b) : std::make_pair(b, a);
    }

    int build(const Config& scope, const Rect& rect) {
        const int u = add(rect);
        if (rect.short_side() <= leaf_threshold) return u;

        const double f = f_R(rect, k);
        // Descend through span splits until the smaller-offset part keeps
        // distance >= f from the boundary of rect.
        std::vector<std::pair<Rect, Rect>> chain;  // (chosen part, sibling)
        Rect t = rect;
        while (d_max(t, rect) < f) {
            if (t.long_side() < 2)
                throw std::logic_error("bperc: growth chain exhausted before reaching distance f");
            SpanSplit sp = disjoint_span_split(scope, t);
            Rect chosen = sp.s1, sibling = sp.s2;
            if (d_max(sp.s2, rect) < d_max(sp.s1, rect)) std::swap(chosen, sibling);
            chain.push_back({chosen, sibling});
            t = chosen;
        }

        if (d_max(t, rect) <= 2.0 * f) {
            // Grow the final part to a locally maximal filled rectangle at
            // distance >= f and hang its hierarchy below rect.
            const Rect s = grow_maximal(scope, t, rect, f);
            const Config inner = clip(scope, s);
            const int v = build(inner, s);
            h.vertices[u].children = {v};
            if (h.vertices[v].children.size() == 1) {
                // The buffer-selection label: all non-empty buffers, minus
                // the widest side when some infected site sits within reach.
                XLabel ones;
                for (Direction d : kDirections) ones[d] = 1;
                const FrameSpec all(s, rect, ones);
                bool occupied = false;
                for (const Site& w : frame(all).square)
                    if (scope.at(w)) {
                        occupied = true;
                        break;
                    }
                const auto in_z = buffer_mask(s, rect);
                XLabel x;
                for (Direction d : kDirections) x[d] = in_z[(int)d] ? 1 : 0;
                if (occupied) {
                    const SideDistances sd = side_distances(s, rect);
                    Direction widest = Direction::PlusX;
                    for (Direction d : kDirections)
                        if (sd[d] > sd[widest]) widest = d;
                    if (!(sd[widest] >= f && sd[widest] < f + 2))
                        throw std::logic_error("bperc: maximal rectangle escaped the expected band");
                    x[widest] = 0;
                }
                h.vertices[v].xlabel = x;
            }
            return u;
        }

        if (chain.size() == 1) {
            // Split directly below rect.
            auto [s1, s2] = order_split(chain[0].first, chain[0].second);
            const int v1 = build(clip(scope, s1), s1);
            const int v2 = build(clip(scope, s2, &s1), s2);
            h.vertices[u].children = {v1, v2};
            return u;
        }

        // Intermediate rectangle (the next-to-last part of the chain) with
        // the split below it.
        const Rect s = chain[chain.size() - 2].first;
        const int v = add(s);
        h.vertices[u].children = {v};
        if (s.short_side() <= leaf_threshold) return u;  // keep it a seed
        auto [s1, s2] = order_split(chain.back().first, chain.back().second);
        const int w1 = build(clip(scope, s1), s1);
        const int w2 = build(clip(scope, s2, &s1), s2);
        h.vertices[v].children = {w1, w2};
        return u;
    }
};

}  // namespace

Hierarchy build_hierarchy(const Config& a, const Rect& r, const Constants& k) {
    k.validate();
    const double q = k.q();
    if (!(q < 1.0) || r.long_side() > std::log(1.0 / q) / (2.0 * q))
        throw std::invalid_argument("bperc: droplet too long for these parameters");
    if (!is_internally_filled(a, r))
        throw std::invalid_argument("bperc: droplet is not internally filled");
    Builder b(k);
    b.build(clip(a, r), r);
    return b.h;
}

int Hierarchy::height() const {
    std::function<int(int)> depth = [&](int u) {
        int best = 0;
        for (int v : vertices[u].children) best = std::max(best, depth(v));
        return best + 1;
    };
    return vertices.empty() ? 0 : depth(0);
}

GoodReport check_good(const Hierarchy& h, const Constants& k) {
    k.validate();
    GoodReport rep;
    rep.good = true;
    auto add = [&](const char* cond, int u, int v, std::string detail) {
        rep.good = false;
        rep.violations.push_back({cond, u, v, std::move(detail)});
    };
    if (h.vertices.empty()) {
        add("a", -1, -1, "hierarchy has no root");
        return rep;
    }
    const double q = k.q();
    const double leaf_threshold = 1.0 / std::sqrt(q);
    for (int u = 0; u < (int)h.vertices.size(); ++u) {
        const auto& vu = h.vertices[u];
        if (vu.children.size() > 2) add("b", u, -1, "out-degree above two");
        const bool leaf = vu.children.empty();
        if (leaf != (vu.rect.short_side() <= leaf_threshold))
            add("e", u, -1,
                leaf ? "leaf with short side above the seed threshold"
                     : "internal vertex at or below the seed threshold");
        const double f = f_R(vu.rect, k);
        for (int v : vu.children) {
            const auto& vv = h.vertices[v];
            if (!(vu.rect.contains(vv.rect) && vv.rect != vu.rect))
                add("c", u, v, "child rectangle not properly nested");
            const int d = d_max(vv.rect, vu.rect);
            if (vu.children.size() == 1 && d > 2.0 * f)
                add("f", u, v, "single child too far from its parent");
            if ((vu.children.size() == 2 || vv.children.size() == 1) && d < f)
                add("g", u, v, "child too close to its parent");
            const bool single_single = vu.children.size() == 1 && vv.children.size() == 1;
            if (single_single) {
                const auto in_z = buffer_mask(vv.rect, vu.rect);
                int z = 0;
                for (bool b : in_z) z += b;
                bool within = true;
                for (Direction dir : kDirections)
                    if (vv.xlabel[dir] == 1 && !in_z[(int)dir]) within = false;
                const int norm = masked_norm(vv.rect, vu.rect, vv.xlabel);
                const bool case_full = norm == z;
                const bool case_short = norm == z - 1 && f <= d && d < f + 2;
                if (!within || !(case_full || case_short))
                    add("h", u, v, "buffer selection inconsistent with the gap width");
            } else if (!vv.xlabel.all_zero()) {
                add("i", u, v, "buffer selection on an edge that must be unlabelled");
            }
        }
        if (vu.children.size() == 2) {
            Config c(vu.rect);
            for (int v : vu.children) {
                const Rect& rv = h.vertices[v].rect;
                if (!vu.rect.contains(rv)) continue;  // already reported under (c)
                for (int y = rv.y_lo; y <= rv.y_hi; ++y)
                    for (int x = rv.x_lo; x <= rv.x_hi; ++x) c.set(x, y, true);
            }
            if (closure(c).count() != vu.rect.area())
                add("d", u, -1, "children do not jointly span their parent");
        }
    }
    return rep;
}

std::vector<std::pair<int, int>> trunk(const Hierarchy& h) {
    std::vector<std::pair<int, int>> out;
    if (h.vertices.empty()) return out;
    int u = 0;
    while (!h.vertices[u].children.empty()) {
        const auto& ch = h.vertices[u].children;
        int next = ch[0];
        if (ch.size() == 2) {
            const Rect& a = h.vertices[ch[0]].rect;
            const Rect& b = h.vertices[ch[1]].rect;
            if (b.short_side() > a.short_side() ||
                (b.short_side() == a.short_side() && rect_less(b, a)))
                next = ch[1];
        }
        out.push_back({u, next});
        u = next;
    }
    return out;
}

SatisfactionCertificate check_satisfied(const Hierarchy& h, const Config& a) {
    SatisfactionCertificate cert;
    if (h.vertices.empty()) {
        cert.failures.push_back("hierarchy has no root");
        return cert;
    }
    cert.trunk_edges = trunk(h);
    std::vector<int> trunk_next(h.vertices.size(), -1);
    for (auto [u, v] : cert.trunk_edges) trunk_next[u] = v;

    // Scopes mirror the construction: the trunk-rule child of a split owns
    // the infected sites of its rectangle, the sibling owns the rest; a
    // single child owns the sites inside its rectangle. Witnesses drawn from
    // disjoint scopes are disjoint by construction, and each is re-checked
    // below on its own.
    std::function<void(int, const Config&)> rec = [&](int u, const Config& scope) {
        const auto& vu = h.vertices[u];
        if (vu.children.empty()) {
            EventWitness w;
            w.event = "seed";
            w.condition = "j";
            w.vertex = u;
            w.sites = clip(scope, vu.rect).sites();
            Config seed(vu.rect);
            for (const Site& s : w.sites) seed.set(s, true);
            w.ok = closure(seed).count() == vu.rect.area();
            if (!w.ok) {
                w.detail = "seed rectangle not filled by its witness sites";
                cert.failures.push_back("seed at vertex " + std::to_string(u) + " not filled");
            }
            cert.witnesses.push_back(std::move(w));
            return;
        }
        if (vu.children.size() == 1) {
            const int v = vu.children[0];
            const Rect& rv = h.vertices[v].rect;
            const bool on_trunk = trunk_next[u] == v;
            std::vector<Site> frame_sites;
            bool frame_ok = true;
            if (!h.vertices[v].xlabel.all_zero()) {
                try {
                    frame_sites = frame(FrameSpec(rv, vu.rect, h.vertices[v].xlabel)).square;
                } catch (const std::exception& e) {
                    frame_ok = false;
                    cert.failures.push_back("edge " + std::to_string(u) + "->" +
                                            std::to_string(v) + ": " + e.what());
                }
            }
            Config frame_mask(vu.rect);
            for (const Site& s : frame_sites) frame_mask.set(s, true);

            EventWitness w;
            w.event = on_trunk ? "D2" : "D1";
            w.condition = on_trunk ? "l" : "k";
            w.vertex = u;
            w.child = v;
            for (const Site& s : scope.sites())
                if (vu.rect.contains(s) && !rv.contains(s) && !frame_mask.at(s))
                    w.sites.push_back(s);
            Config grown(vu.rect);
            for (int y = rv.y_lo; y <= rv.y_hi; ++y)
                for (int x = rv.x_lo; x <= rv.x_hi; ++x) grown.set(x, y, true);
            for (const Site& s : w.sites) grown.set(s, true);
            w.ok = frame_ok && closure(grown).count() == vu.rect.area();
            if (!w.ok) {
                w.detail = "witness sites outside the frame do not grow the child to the parent";
                cert.failures.push_back("growth event on edge " + std::to_string(u) + "->" +
                                        std::to_string(v) + " fails");
            }
            cert.witnesses.push_back(std::move(w));

            if (on_trunk) {
                EventWitness dw;
                dw.event = "D2";
                dw.condition = "l";
                dw.vertex = u;
                dw.child = v;
                dw.decreasing = true;
                dw.sites = frame_sites;
                dw.ok = frame_ok;
                for (const Site& s : frame_sites)
                    if (a.at(s)) {
                        dw.ok = false;
                        break;
                    }
                if (!dw.ok) {
                    dw.detail = "frame is not infection-free";
                    cert.failures.push_back("frame on trunk edge " + std::to_string(u) + "->" +
                                            std::to_string(v) + " is occupied");
                }
                cert.witnesses.push_back(std::move(dw));
            }
            rec(v, clip(scope, rv));
            return;
        }
        // Split: trunk-rule child first, per the construction's ownership.
        int cv = vu.children[0], cw = vu.children[1];
        const Rect& ra = h.vertices[cv].rect;
        const Rect& rb = h.vertices[cw].rect;
        if (rb.short_side() > ra.short_side() ||
            (rb.short_side() == ra.short_side() && rect_less(rb, ra)))
            std::swap(cv, cw);
        const Rect& rv = h.vertices[cv].rect;
        const Rect& rw = h.vertices[cw].rect;
        rec(cv, clip(scope, rv));
        rec(cw, clip(scope, rw, &rv));
    };
    rec(0, clip(a, h.root_rect()));

    // Pairwise disjointness across every witness set.
    std::vector<std::pair<Site, int>> owned;
    for (int i = 0; i < (int)cert.witnesses.size(); ++i)
        for (const Site& s : cert.witnesses[i].sites) owned.push_back({s, i});
    std::sort(owned.begin(), owned.end(),
              [](const auto& a_, const auto& b_) { return a_.first < b_.first; });
    bool disjoint = true;
    for (std::size_t i = 1; i < owned.size(); ++i)
        if (owned[i].first == owned[i - 1].first && owned[i].second != owned[i - 1].second) {
            disjoint = false;
            cert.failures.push_back("site (" + std::to_string(owned[i].first.x) + "," +
                                    std::to_string(owned[i].first.y) +
                                    ") appears in two witness sets");
        }

    cert.satisfied = disjoint;
    for (const auto& w : cert.witnesses) cert.satisfied = cert.satisfied && w.ok;
    return cert;
}

HierarchyStats stats(const Hierarchy& h, const Constants& k) {
    k.validate();
    HierarchyStats out;
    const double q = k.q();
    out.v = (int)h.vertices.size();
    out.h = h.height();
    const double large = 1.0 / (3.0 * std::sqrt(q));
    for (const auto& vtx : h.vertices) {
        if (!vtx.children.empty()) continue;
        ++out.s;
        out.X += vtx.rect.phi();
        if (vtx.rect.long_side() >= large) ++out.m;
    }
    const auto tr = trunk(h);
    std::vector<int> trunk_vertices{0};
    for (auto [u, v] : tr) trunk_vertices.push_back(v);
    for (int u : trunk_vertices)
        if (h.vertices[u].rect.short_side() >= k.B / q) out.up_phi_sum += h.vertices[u].rect.phi();
    for (const auto& vtx : h.vertices) {
        if (vtx.children.size() != 1) continue;
        const int v = vtx.children[0];
        const int norm = masked_norm(h.vertices[v].rect, vtx.rect, h.vertices[v].xlabel);
        if (norm > 0) out.weight *= std::pow(1.0 / f_R(vtx.rect, k), norm);
    }
    return out;
}

double weighted_count_bound(int n_vertices, int m_seeds, const Rect& r) {
    if (!(n_vertices >= m_seeds && m_seeds >= 1))
        throw std::invalid_argument("bperc: weighted count bound requires N >= M >= 1");
    return std::exp(16.0 * (n_vertices + m_seeds * std::log((double)r.phi())));
}

bool verify_pod_inequality(const Hierarchy& h, double q, std::optional<int> u) {
    if (!(q > 0)) throw std::invalid_argument("bperc: pod check requires q > 0");
    if (h.vertices.empty()) throw std::invalid_argument("bperc: empty hierarchy");
    if (u && (*u < 0 || *u >= (int)h.vertices.size()))
        throw std::invalid_argument("bperc: pod vertex out of range");
    long long sw = 0, sh = 0;
    int seeds = 0;
    for (const auto& vtx : h.vertices)
        if (vtx.children.empty()) {
            ++seeds;
            sw += vtx.rect.width();
            sh += vtx.rect.height();
        }
    if (sw > 64 || sh > 64)
        throw std::invalid_argument("bperc: seed dimensions too large for exhaustive pod search");

    double lhs = 0.0;
    for (const auto& vtx : h.vertices)
        if (vtx.children.size() == 1) {
            const auto& child = h.vertices[vtx.children[0]];
            lhs += U(child.rect, vtx.rect, q);
        }
    const double slack = 2.0 * (seeds - 1) * q * g(std::sqrt(q));
    const double budget = lhs + slack + 1e-9;
    const Rect& root = h.root_rect();
    auto place = [](const Rect& base, long long w, long long hh) {
        return make_rect(base.x_lo, base.x_lo + (int)w - 1, base.y_lo, base.y_lo + (int)hh - 1);
    };

    if (!u) {
        const long long wmax = std::min<long long>(sw, root.width());
        const long long hmax = std::min<long long>(sh, root.height());
        // U shrinks as the pod grows, so the largest admissible pod is
        // checked first and almost always decides.
        for (long long w = wmax; w >= 1; --w)
            for (long long hh = hmax; hh >= 1; --hh)
                if (U(place(root, w, hh), root, q) <= budget) return true;
        return false;
    }

    const Rect& ru = h.vertices[*u].rect;
    const long long w2_hi = std::min<long long>(root.width(), ru.width() + sw - 1);
    const long long h2_hi = std::min<long long>(root.height(), ru.height() + sh - 1);
    for (long long w2 = ru.width(); w2 <= w2_hi; ++w2) {
        const long long w1 = std::min<long long>(ru.width(), sw - (w2 - ru.width()));
        if (w1 < 1) continue;
        for (long long h2 = ru.height(); h2 <= h2_hi; ++h2) {
            const long long h1 = std::min<long long>(ru.height(), sh - (h2 - ru.height()));
            if (h1 < 1) continue;
            const double val = U(place(ru, w1, h1), ru, q) + U(place(root, w2, h2), root, q);
            if (val <= budget) return true;
        }
    }
    return false;
}

void to_json(nlohmann::json& j, const Hierarchy& h) {
    nlohmann::json verts = nlohmann::json::array();
    for (const auto& v : h.vertices)
        verts.push_back({{"rect", v.rect}, {"children", v.children}, {"x", v.xlabel}});
    nlohmann::json tr = nlohmann::json::array();
    for (auto [a, b] : trunk(h)) tr.push_back({a, b});
    j = nlohmann::json{
        {"root_rect", h.root_rect()}, {"vertices", std::move(verts)}, {"trunk", std::move(tr)}};
}

Hierarchy hierarchy_from_json(const nlohmann::json& j) {
    Hierarchy h;
    const auto& verts = j.at("vertices");
    if (!verts.is_array() || verts.empty())
        throw std::invalid_argument("bperc: hierarchy needs at least one vertex");
    for (const auto& jv : verts) {
        Hierarchy::Vertex v;
        v.rect = jv.at("rect").get<Rect>();
        v.children = jv.value("children", std::vector<int>{});
        if (jv.contains("x")) v.xlabel = jv.at("x").get<XLabel>();
        h.vertices.push_back(std::move(v));
    }
    const int n = (int)h.vertices.size();
    std::vector<int> parents(n, 0);
    for (const auto& v : h.vertices) {
        if (v.children.size() > 2)
            throw std::invalid_argument("bperc: hierarchy vertex with more than two children");
        for (int c : v.children) {
            if (c < 0 || c >= n) throw std::invalid_argument("bperc: hierarchy child out of range");
            ++parents[c];
        }
    }
    if (parents[0] != 0) throw std::invalid_argument("bperc: hierarchy root has a parent");
    for (int i = 1; i < n; ++i)
        if (parents[i] != 1)
            throw std::invalid_argument("bperc: hierarchy is not a tree rooted at vertex 0");
    if (j.contains("root_rect") && j.at("root_rect").get<Rect>() != h.root_rect())
        throw std::invalid_argument("bperc: stated root rectangle disagrees with vertex 0");
    return h;
}

void to_json(nlohmann::json& j, const GoodReport& r) {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& c : r.violations)
        v.push_back({{"condition", c.condition},
                     {"vertex", c.vertex},
                     {"child", c.child},
                     {"detail", c.detail}});
    j = nlohmann::json{{"good", r.good}, {"violations", std::move(v)}};
}

void to_json(nlohmann::json& j, const SatisfactionCertificate& c) {
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& w : c.witnesses) {
        nlohmann::json sites = nlohmann::json::array();
        for (const Site& s : w.sites) sites.push_back({s.x, s.y});
        ws.push_back({{"event", w.event},
                      {"condition", w.condition},
                      {"vertex", w.vertex},
                      {"child", w.child},
                      {"decreasing", w.decreasing},
                      {"ok", w.ok},
                      {"detail", w.detail},
                      {"sites", std::move(sites)}});
    }
    nlohmann::json tr = nlohmann::json::array();
    for (auto [a, b] : c.trunk_edges) tr.push_back({a, b});
    j = nlohmann::json{{"satisfied", c.satisfied},
                       {"witnesses", std::move(ws)},
                       {"trunk", std::move(tr)},
                       {"failures", c.failures}};
}

void to_json(nlohmann::json& j, const HierarchyStats& s) {
    j = nlohmann::json{{"v", s.v}, {"s", s.s},           {"m", s.m},
                       {"h", s.h}, {"X", s.X},           {"up_phi_sum", s.up_phi_sum},
                       {"weight", s.weight}};
}

}  // namespace bperc
