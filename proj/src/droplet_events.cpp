#include "bperc/droplet_events.hpp"

#include <algorithm>
#include <stdexcept>

namespace bperc {

FrameSpec::FrameSpec(const Rect& s_, const Rect& r_, const XLabel& x_) : s(s_), r(r_), x(x_) {
    if (!r.contains(s)) throw std::invalid_argument("bperc: frame requires S within R");
    if (s.short_side() < 2)
        throw std::invalid_argument("bperc: frame requires short(S) >= 2");
    for (Direction d : kDirections)
        if (x[d] != 0 && x[d] != 1)
            throw std::invalid_argument("bperc: buffer selections must be 0 or 1");
}

Buffers buffers(const FrameSpec& spec) {
    Buffers out;
    for (Direction d : kDirections) {
        const int dx = 2 * dir_dx(d), dy = 2 * dir_dy(d);
        // Sites of R \ S whose pre-image under the shift lies in S, i.e. the
        // shifted copy of S clipped to R, minus S itself.
        const int x_lo = std::max(spec.s.x_lo + dx, spec.r.x_lo);
        const int x_hi = std::min(spec.s.x_hi + dx, spec.r.x_hi);
        const int y_lo = std::max(spec.s.y_lo + dy, spec.r.y_lo);
        const int y_hi = std::min(spec.s.y_hi + dy, spec.r.y_hi);
        auto& sites = out.per_direction[(int)d];
        for (int y = y_lo; y <= y_hi; ++y)
            for (int x = x_lo; x <= x_hi; ++x)
                if (!spec.s.contains(Site{x, y})) sites.push_back({x, y});
        if (!sites.empty()) {
            out.in_Z[(int)d] = true;
            ++out.z;
        }
    }
    return out;
}

Frame frame(const FrameSpec& spec) {
    const Buffers buf = buffers(spec);
    Config mask(spec.r);
    Frame out;
    for (Direction d : kDirections) {
        if (spec.x[d] != 1 || !buf.in_Z[(int)d]) continue;  // selections mask to non-empty buffers
        if (d == Direction::PlusX || d == Direction::MinusX)
            ++out.x_count;
        else
            ++out.y_count;
        for (const Site& v : buf.per_direction[(int)d]) mask.set(v.x, v.y, true);
    }
    // Corner sites with two selected-buffer neighbours join the frame.
    std::vector<Site> extra;
    for (int y = spec.r.y_lo; y <= spec.r.y_hi; ++y)
        for (int x = spec.r.x_lo; x <= spec.r.x_hi; ++x) {
            if (mask.at(x, y) || spec.s.contains(Site{x, y})) continue;
            int nb = mask.at(x + 1, y) + mask.at(x - 1, y) + mask.at(x, y + 1) + mask.at(x, y - 1);
            if (nb >= 2) extra.push_back({x, y});
        }
    out.square = mask.sites();
    out.square.insert(out.square.end(), extra.begin(), extra.end());
    std::sort(out.square.begin(), out.square.end());
    return out;
}

namespace {

Config frame_mask(const FrameSpec& spec) {
    Config mask(spec.r);
    for (const Site& v : frame(spec).square) mask.set(v.x, v.y, true);
    return mask;
}

}  // namespace

bool event_D1(const Config& a, const FrameSpec& spec) {
    const Config mask = frame_mask(spec);
    Config seed(spec.r);
    for (int y = spec.s.y_lo; y <= spec.s.y_hi; ++y)
        for (int x = spec.s.x_lo; x <= spec.s.x_hi; ++x) seed.set(x, y, true);
    for (int y = spec.r.y_lo; y <= spec.r.y_hi; ++y)
        for (int x = spec.r.x_lo; x <= spec.r.x_hi; ++x)
            if (a.at(x, y) && !spec.s.contains(Site{x, y}) && !mask.at(x, y)) seed.set(x, y, true);
    return closure(seed).count() == spec.r.area();
}

bool event_D2(const Config& a, const FrameSpec& spec) {
    const Config mask = frame_mask(spec);
    for (const Site& v : mask.sites())
        if (a.at(v.x, v.y)) return false;
    return event_D1(a, spec);
}

const char* criticality_name(Criticality c) {
    switch (c) {
        case Criticality::OneCritical: return "one-critical";
        case Criticality::TwoCritical: return "two-critical";
        case Criticality::Neither: return "neither";
        case Criticality::BothImpossible: return "both-impossible";
    }
    return "?";
}

Criticality criticality(const Rect& r, const Constants& k) {
    k.validate();
    const double q = k.q();
    const double a = r.short_side(), b = r.long_side();
    if (k.L1 <= a && a <= k.B / q && b <= 3.0 * std::exp(2.0 * k.B) / q)
        return Criticality::OneCritical;
    if (a > k.B / q && b <= std::log(1.0 / q) / (2.0 * q)) return Criticality::TwoCritical;
    // With these constants, can any rectangle land in either class?
    const bool one_possible = k.L1 <= k.B / q;
    const bool two_possible = 2.0 * k.B < std::log(1.0 / q);
    if (!one_possible && !two_possible) return Criticality::BothImpossible;
    return Criticality::Neither;
}

BoundReport cor_key_bound(const FrameSpec& spec, int j, const Constants& k) {
    k.validate();
    if (j != 1 && j != 2) throw std::invalid_argument("bperc: criticality index must be 1 or 2");
    const double q = k.q();
    const double f = f_R(spec.r, k);
    const int s = spec.r.width() - spec.s.width();
    const int t = spec.r.height() - spec.s.height();
    const Criticality want = j == 1 ? Criticality::OneCritical : Criticality::TwoCritical;
    const int norm = frame(spec).norm();
    const double log_value = 9.0 * std::log(k.C) + norm * std::log(k.delta / f) -
                             Q(spec.s, spec.r, q) + 4.0 * spec.r.phi() * q;

    BoundReport rep;
    rep.formula = "frame_event";
    rep.inputs = {{"spec", spec}, {"j", j}, {"constants", k}, {"norm_x", norm}, {"f", f}};
    rep.preconditions = {{"rect_criticality_matches_j", criticality(spec.r, k) == want},
                         {"s_le_4f", s <= 4.0 * f},
                         {"t_le_4f", t <= 4.0 * f}};
    rep.valid = true;
    for (const auto& [name, held] : rep.preconditions) rep.valid = rep.valid && held;
    rep.log_value = log_value;
    rep.value = std::exp(log_value);
    rep.vacuous = !(rep.value < 1.0);
    rep.branch = criticality_name(criticality(spec.r, k));
    return rep;
}

void to_json(nlohmann::json& j, const XLabel& x) {
    j = nlohmann::json::object();
    for (Direction d : kDirections) j[dir_name(d)] = x[d];
}

void from_json(const nlohmann::json& j, XLabel& x) {
    for (Direction d : kDirections) x[d] = j.value(dir_name(d), 0);
}

void to_json(nlohmann::json& j, const FrameSpec& spec) {
    j = nlohmann::json{{"s", spec.s}, {"r", spec.r}, {"x", spec.x}};
}

FrameSpec frame_spec_from_json(const nlohmann::json& j) {
    return FrameSpec(j.at("s").get<Rect>(), j.at("r").get<Rect>(), j.at("x").get<XLabel>());
}

}  // namespace bperc
