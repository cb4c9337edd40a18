#pragma once

#include <vector>

#include "bperc/dynamics.hpp"
#include "bperc/lattice.hpp"
#include "bperc/numerics.hpp"

namespace bperc {

// Which buffers of S in R are selected; 0/1 per direction.
struct XLabel {
    std::array<int, 4> x{};  // indexed by Direction

    int operator[](Direction d) const { return x[(int)d]; }
    int& operator[](Direction d) { return x[(int)d]; }
    bool all_zero() const { return x[0] == 0 && x[1] == 0 && x[2] == 0 && x[3] == 0; }

    friend bool operator==(const XLabel&, const XLabel&) = default;
};

struct FrameSpec {
    Rect s, r;
    XLabel x;

    FrameSpec(const Rect& s_, const Rect& r_, const XLabel& x_);
};

struct Buffers {
    std::array<std::vector<Site>, 4> per_direction;  // indexed by Direction
    std::array<bool, 4> in_Z{};                      // buffer non-empty
    int z = 0;
};

Buffers buffers(const FrameSpec& spec);

struct Frame {
    std::vector<Site> square;       // the x-frame of S in R
    int x_count = 0, y_count = 0;   // selected non-empty horizontal/vertical buffers
    int norm() const { return x_count + y_count; }
};

Frame frame(const FrameSpec& spec);

// D1: closure of S together with the infected sites of R outside the filled
// frame equals R. D2 additionally requires the frame itself to be empty.
bool event_D1(const Config& a, const FrameSpec& spec);
bool event_D2(const Config& a, const FrameSpec& spec);

enum class Criticality { OneCritical, TwoCritical, Neither, BothImpossible };

const char* criticality_name(Criticality c);

Criticality criticality(const Rect& r, const Constants& k);

void to_json(nlohmann::json& j, const XLabel& x);
void from_json(const nlohmann::json& j, XLabel& x);
void to_json(nlohmann::json& j, const FrameSpec& spec);
FrameSpec frame_spec_from_json(const nlohmann::json& j);

}  // namespace bperc
