#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "bperc/lattice.hpp"

namespace bperc {

struct FrameSpec;

// Model parameters. B, C, delta and the L_i are stand-ins for the
// "sufficiently large/small" constants of the bound statements; defaults are
// documented placeholders and every evaluator reports which precondition
// inequalities actually held under the configured values.
struct Constants {
    double p = 0.1;
    double B = 5.0;
    double C = 50.0;
    double delta = 0.05;
    double L1 = 1e3, L2 = 1e4, L3 = 1e5, L4 = 1e6, L5 = 1e7, L6 = 1e8;

    double q() const { return -std::log1p(-p); }
    void validate() const;  // p in (0,1), delta < 1 < B <= C <= L1 <= ... <= L6
};

void to_json(nlohmann::json& j, const Constants& k);
void from_json(const nlohmann::json& j, Constants& k);

double beta(double u);
double g(double z);

// Integral of g over [lo, hi]; hi may be infinity. Adaptive Simpson with a
// geometric subdivision toward the logarithmic singularity at 0 and an
// exponential tail bound beyond z = 40.
double g_integral(double lo, double hi);

// Integral of g over (0, inf); equals pi^2/18.
double lambda();

// Minimal cost of an increasing path from (ax, ay) to (bx, by) under the
// differential form g(y)dx + g(x)dy. Grid dynamic programming with exact
// diagonal segments, refined until successive values differ by < tol.
double W(double ax, double ay, double bx, double by, double tol = 1e-7);

double U(const Rect& s, const Rect& r, double q);
double Q(const Rect& s, const Rect& r, double q);

// Closed form of U/q for the nested case long(S) <= short(R); the
// independent oracle for the path optimizer.
double U_diagonal_closed_form(const Rect& s, const Rect& r, double q);

// Lower bound on U/q for long(S) <= short(R); the O(phi(S)) constant of the
// statement is exposed as c0.
double U_lower_bound(const Rect& s, const Rect& r, double q, double c0 = 1.0);

double f_R(const Rect& r, const Constants& k);
double J(const Rect& r, const Constants& k);

struct BoundReport {
    std::string formula;
    double value = std::numeric_limits<double>::quiet_NaN();  // probability bound
    double log_value = std::numeric_limits<double>::quiet_NaN();
    bool vacuous = true;  // value >= 1 (or not computable)
    bool valid = false;   // all preconditions held
    std::string branch;
    std::vector<std::pair<std::string, bool>> preconditions;
    nlohmann::json inputs;
};

void to_json(nlohmann::json& j, const BoundReport& r);

BoundReport droplet_bound(const Rect& r, const Constants& k);
BoundReport seeds_bound(const Rect& r, const Constants& k);
// {no vertical double gap, crossed left to right}
std::pair<BoundReport, BoundReport> crossing_bounds(const Rect& r, const Constants& k);
BoundReport cor_key_bound(const FrameSpec& spec, int j, const Constants& k);

struct LeavingDiagonalReport {
    bool valid = false;  // L1*a <= b <= B/q
    bool holds = false;
    double lhs = 0, rhs = 0;
    std::vector<std::pair<std::string, bool>> preconditions;
};

LeavingDiagonalReport leaving_diagonal_check(int a, int b, const Constants& k);

struct PcLowerBound {
    double q_star = 0, p_star = 0;
    bool vacuous = true;
    double union_count = 0;     // n^2 (log n)^3
    double exponent = 0;        // -2*lambda/q* + (4e^4 + L6)/sqrt(q*), NaN when vacuous
    double crossover_log_n = 0; // q* > 0 iff log n exceeds this
};

PcLowerBound pc_lower_bound(long long n, const Constants& k);

void to_json(nlohmann::json& j, const LeavingDiagonalReport& r);
void to_json(nlohmann::json& j, const PcLowerBound& r);

}  // namespace bperc
