#include "bperc/lattice.hpp"

#include <algorithm>

namespace bperc {

const char* dir_name(Direction d) {
    switch (d) {
        case Direction::PlusX: return "+x";
        case Direction::PlusY: return "+y";
        case Direction::MinusX: return "-x";
        default: return "-y";
    }
}

Direction dir_from_name(const std::string& name) {
    for (Direction d : kDirections)
        if (name == dir_name(d)) return d;
    throw std::invalid_argument("bperc: unknown direction '" + name + "'");
}

SideDistances side_distances(const Rect& s, const Rect& r) {
    if (!r.contains(s)) throw std::invalid_argument("bperc: side_distances requires S within R");
    SideDistances out;
    out.d[(int)Direction::PlusX] = r.x_hi - s.x_hi;
    out.d[(int)Direction::MinusX] = s.x_lo - r.x_lo;
    out.d[(int)Direction::PlusY] = r.y_hi - s.y_hi;
    out.d[(int)Direction::MinusY] = s.y_lo - r.y_lo;
    return out;
}

Config::Config(const Rect& domain) : domain_(domain) {
    if (!domain.well_formed()) throw std::invalid_argument("bperc: empty domain");
    bits_.assign(((std::size_t)domain.area() + 63) / 64, 0);
}

void Config::set(int x, int y, bool value) {
    if (!domain_.contains(Site{x, y}))
        throw std::invalid_argument("bperc: site outside domain");
    std::size_t i = index(x, y);
    std::uint64_t mask = std::uint64_t{1} << (i & 63);
    bool present = bits_[i >> 6] & mask;
    if (present == value) return;
    bits_[i >> 6] ^= mask;
    count_ += value ? 1 : -1;
}

std::vector<Site> Config::sites() const {
    std::vector<Site> out;
    out.reserve((std::size_t)count_);
    for (int y = domain_.y_lo; y <= domain_.y_hi; ++y)
        for (int x = domain_.x_lo; x <= domain_.x_hi; ++x)
            if (at(x, y)) out.push_back(Site{x, y});
    return out;
}

long long Config::count_in(const Rect& r) const {
    long long n = 0;
    int x0 = std::max(r.x_lo, domain_.x_lo), x1 = std::min(r.x_hi, domain_.x_hi);
    int y0 = std::max(r.y_lo, domain_.y_lo), y1 = std::min(r.y_hi, domain_.y_hi);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (at(x, y)) ++n;
    return n;
}

void to_json(nlohmann::json& j, const Rect& r) {
    j = nlohmann::json::array({r.x_lo, r.x_hi, r.y_lo, r.y_hi});
}

void from_json(const nlohmann::json& j, Rect& r) {
    if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("bperc: rectangle JSON must be [x_lo,x_hi,y_lo,y_hi]");
    r = make_rect(j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>());
}

void to_json(nlohmann::json& j, const Config& c) {
    nlohmann::json infected = nlohmann::json::array();
    for (const Site& v : c.sites()) infected.push_back({v.x, v.y});
    j = nlohmann::json{{"domain", c.domain()}, {"infected", std::move(infected)}};
}

Config config_from_json(const nlohmann::json& j) {
    Rect domain = j.at("domain").get<Rect>();
    Config c(domain);
    for (const auto& site : j.at("infected")) {
        if (!site.is_array() || site.size() != 2)
            throw std::invalid_argument("bperc: infected sites must be [x,y] pairs");
        c.set(site[0].get<int>(), site[1].get<int>(), true);
    }
    return c;
}

}  // namespace bperc
