#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

namespace bperc {

struct Site {
    int x = 0;
    int y = 0;

    friend bool operator==(const Site&, const Site&) = default;
    friend auto operator<=>(const Site&, const Site&) = default;
};

// Closed integer box [x_lo,x_hi] x [y_lo,y_hi]. Dimension order is
// (width, height) everywhere.
struct Rect {
    int x_lo = 0;
    int x_hi = 0;
    int y_lo = 0;
    int y_hi = 0;

    bool well_formed() const { return x_lo <= x_hi && y_lo <= y_hi; }

    int width() const { return x_hi - x_lo + 1; }
    int height() const { return y_hi - y_lo + 1; }
    std::pair<int, int> dims() const { return {width(), height()}; }
    int short_side() const { return width() < height() ? width() : height(); }
    int long_side() const { return width() > height() ? width() : height(); }
    int phi() const { return width() + height(); }
    long long area() const { return (long long)width() * height(); }

    bool contains(Site v) const {
        return v.x >= x_lo && v.x <= x_hi && v.y >= y_lo && v.y <= y_hi;
    }
    bool contains(const Rect& s) const {
        return s.x_lo >= x_lo && s.x_hi <= x_hi && s.y_lo >= y_lo && s.y_hi <= y_hi;
    }

    friend bool operator==(const Rect&, const Rect&) = default;
};

inline Rect make_rect(int x_lo, int x_hi, int y_lo, int y_hi) {
    Rect r{x_lo, x_hi, y_lo, y_hi};
    if (!r.well_formed()) throw std::invalid_argument("bperc: empty rectangle");
    return r;
}

// Lower-left-corner-then-upper-corner ordering, used for all deterministic
// tie-breaking.
inline bool rect_less(const Rect& a, const Rect& b) {
    if (a.x_lo != b.x_lo) return a.x_lo < b.x_lo;
    if (a.y_lo != b.y_lo) return a.y_lo < b.y_lo;
    if (a.x_hi != b.x_hi) return a.x_hi < b.x_hi;
    return a.y_hi < b.y_hi;
}

enum class Direction : int { PlusX = 0, PlusY = 1, MinusX = 2, MinusY = 3 };

inline constexpr std::array<Direction, 4> kDirections = {
    Direction::PlusX, Direction::PlusY, Direction::MinusX, Direction::MinusY};

inline constexpr int dir_dx(Direction d) {
    switch (d) {
        case Direction::PlusX: return 1;
        case Direction::MinusX: return -1;
        default: return 0;
    }
}

inline constexpr int dir_dy(Direction d) {
    switch (d) {
        case Direction::PlusY: return 1;
        case Direction::MinusY: return -1;
        default: return 0;
    }
}

inline constexpr Direction dir_opposite(Direction d) {
    switch (d) {
        case Direction::PlusX: return Direction::MinusX;
        case Direction::MinusX: return Direction::PlusX;
        case Direction::PlusY: return Direction::MinusY;
        default: return Direction::PlusY;
    }
}

const char* dir_name(Direction d);
Direction dir_from_name(const std::string& name);

struct RectMetrics {
    std::pair<int, int> dims;
    int phi;
    int short_side;
    int long_side;
};

inline RectMetrics rect_metrics(const Rect& r) {
    return {r.dims(), r.phi(), r.short_side(), r.long_side()};
}

// Per-side gaps |r_j - s_j| between a rectangle and an enclosing one.
struct SideDistances {
    std::array<int, 4> d{};  // indexed by Direction

    int operator[](Direction dir) const { return d[(int)dir]; }
    int max() const {
        int m = d[0];
        for (int i = 1; i < 4; ++i) m = d[i] > m ? d[i] : m;
        return m;
    }
};

SideDistances side_distances(const Rect& s, const Rect& r);

// Dense bit-grid of infected sites over a rectangular domain.
class Config {
  public:
    explicit Config(const Rect& domain);

    const Rect& domain() const { return domain_; }
    long long count() const { return count_; }

    bool at(int x, int y) const {
        if (x < domain_.x_lo || x > domain_.x_hi || y < domain_.y_lo || y > domain_.y_hi)
            return false;
        std::size_t i = index(x, y);
        return (bits_[i >> 6] >> (i & 63)) & 1u;
    }
    bool at(Site v) const { return at(v.x, v.y); }

    void set(int x, int y, bool value);
    void set(Site v, bool value) { set(v.x, v.y, value); }

    // Infected sites in row-major (y, then x) order.
    std::vector<Site> sites() const;

    long long count_in(const Rect& r) const;

    friend bool operator==(const Config& a, const Config& b) {
        return a.domain_ == b.domain_ && a.bits_ == b.bits_;
    }

  private:
    std::size_t index(int x, int y) const {
        return (std::size_t)(y - domain_.y_lo) * domain_.width() + (x - domain_.x_lo);
    }

    Rect domain_;
    std::vector<std::uint64_t> bits_;
    long long count_ = 0;
};

void to_json(nlohmann::json& j, const Rect& r);
void from_json(const nlohmann::json& j, Rect& r);
void to_json(nlohmann::json& j, const Config& c);
Config config_from_json(const nlohmann::json& j);

}  // namespace bperc
