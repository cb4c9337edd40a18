#include "bperc/numerics.hpp"

#include <algorithm>
#include <functional>

namespace bperc {

void Constants::validate() const {
    if (!(p > 0 && p < 1)) throw std::invalid_argument("bperc: p must lie in (0,1)");
    if (!(delta < 1 && 1 < B && B <= C && C <= L1 && L1 <= L2 && L2 <= L3 && L3 <= L4 &&
          L4 <= L5 && L5 <= L6))
        throw std::invalid_argument("bperc: constants must satisfy delta < 1 < B <= C <= L1 <= ... <= L6");
    if (!(delta > 0)) throw std::invalid_argument("bperc: delta must be positive");
}

void to_json(nlohmann::json& j, const Constants& k) {
    j = nlohmann::json{{"p", k.p},   {"B", k.B},   {"C", k.C},   {"delta", k.delta},
                       {"L1", k.L1}, {"L2", k.L2}, {"L3", k.L3}, {"L4", k.L4},
                       {"L5", k.L5}, {"L6", k.L6}};
}

void from_json(const nlohmann::json& j, Constants& k) {
    Constants defaults;
    k.p = j.value("p", defaults.p);
    k.B = j.value("B", defaults.B);
    k.C = j.value("C", defaults.C);
    k.delta = j.value("delta", defaults.delta);
    k.L1 = j.value("L1", defaults.L1);
    k.L2 = j.value("L2", defaults.L2);
    k.L3 = j.value("L3", defaults.L3);
    k.L4 = j.value("L4", defaults.L4);
    k.L5 = j.value("L5", defaults.L5);
    k.L6 = j.value("L6", defaults.L6);
    k.validate();
}

double beta(double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("bperc: beta requires u in [0,1]");
    return 0.5 * (u + std::sqrt(u * (4.0 - 3.0 * u)));
}

double g(double z) {
    if (!(z > 0.0)) throw std::invalid_argument("bperc: g requires z > 0");
    return -std::log(beta(-std::expm1(-z)));
}

namespace {

// Adaptive Simpson with a fixed per-call absolute tolerance.
double adapt_simpson(const std::function<double(double)>& fn, double a, double m, double b,
                     double fa, double fm, double fb, double whole, double eps, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = fn(lm), frm = fn(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    return adapt_simpson(fn, a, lm, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adapt_simpson(fn, m, rm, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double integrate(const std::function<double(double)>& fn, double a, double b, double eps) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = fn(a), fm = fn(m), fb = fn(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adapt_simpson(fn, a, m, b, fa, fm, fb, whole, eps, 48);
}

constexpr double kHead = 1.0 / 64.0;  // dyadic subdivision below this point
constexpr double kTailCut = 60.0;     // integral beyond this is < 1e-52

}  // namespace

double g_integral(double lo, double hi) {
    if (!(lo >= 0.0) || std::isnan(hi)) throw std::invalid_argument("bperc: bad integration range");
    if (hi <= lo) return 0.0;
    const auto fn = [](double z) { return g(z); };
    double total = 0.0;

    // Head: dyadic intervals toward the log singularity at 0.
    double head_hi = std::min(hi, kHead);
    if (lo < head_hi) {
        double b = head_hi;
        while (b > lo && b > 3e-18) {
            double a = std::max(lo, 0.5 * b);
            total += integrate(fn, a, b, 1e-14);
            b = a;
        }
        if (b > lo) {
            // Remainder below 3e-18: g(z) = -log z / 2 + O(sqrt z).
            total += 0.5 * (b * (1.0 - std::log(b)) - (lo > 0 ? lo * (1.0 - std::log(lo)) : 0.0));
        }
    }

    // Regular part.
    double reg_lo = std::max(lo, kHead);
    double reg_hi = std::min(hi, kTailCut);
    if (reg_hi > reg_lo) total += integrate(fn, reg_lo, reg_hi, 1e-12);

    // g(z) <= 2 e^{-2z} out here, so the discarded tail beyond the cut is
    // below e^{-120}; nothing to add.
    return total;
}

double lambda() {
    static const double value = g_integral(0.0, std::numeric_limits<double>::infinity());
    return value;
}

namespace {

// One staircase DP at a fixed grid pitch. Grid values are absolute multiples
// of h plus the four endpoint coordinates, so the diagonal x = y is made of
// exact grid segments wherever the box crosses it.
double W_grid(double ax, double ay, double bx, double by, int n) {
    const double lo = std::min(ax, ay), hi = std::max(bx, by);
    const double h = (hi - lo) / n;
    std::vector<double> master{ax, ay, bx, by};
    for (long long kk = (long long)std::floor(lo / h) - 1;; ++kk) {
        double v = kk * h;
        if (v >= hi) break;
        if (v > lo) master.push_back(v);
    }
    std::sort(master.begin(), master.end());
    master.erase(std::unique(master.begin(), master.end()), master.end());

    std::vector<double> xs, ys;
    for (double v : master) {
        if (v >= ax && v <= bx) xs.push_back(v);
        if (v >= ay && v <= by) ys.push_back(v);
    }
    // Position of each x grid value inside ys (for diagonal moves).
    std::vector<int> diag_y(xs.size(), -1);
    {
        std::size_t j = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            while (j < ys.size() && ys[j] < xs[i]) ++j;
            if (j < ys.size() && ys[j] == xs[i]) diag_y[i] = (int)j;
        }
    }

    std::vector<double> gx(xs.size()), gy(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) gx[i] = g(xs[i]);
    for (std::size_t j = 0; j < ys.size(); ++j) gy[j] = g(ys[j]);

    // Cost of an exact diagonal segment over [xs[i-1], xs[i]] is
    // 2 * integral of g; composite Simpson on the short cell is plenty.
    std::vector<double> diag_cost(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (diag_y[i] >= 0 && diag_y[i - 1] == diag_y[i] - 1) {
            const double a = xs[i - 1], b = xs[i], m = 0.5 * (a + b);
            const double s1 = (m - a) / 6.0 * (g(a) + 4.0 * g(0.5 * (a + m)) + g(m));
            const double s2 = (b - m) / 6.0 * (g(m) + 4.0 * g(0.5 * (m + b)) + g(b));
            diag_cost[i] = 2.0 * (s1 + s2);
        }
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(xs.size(), inf), cur(xs.size(), inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        prev[i] = prev[i - 1] + gy[0] * (xs[i] - xs[i - 1]);
    for (std::size_t j = 1; j < ys.size(); ++j) {
        const double dy = ys[j] - ys[j - 1];
        cur[0] = prev[0] + gx[0] * dy;
        for (std::size_t i = 1; i < xs.size(); ++i) {
            double best = cur[i - 1] + gy[j] * (xs[i] - xs[i - 1]);
            double up = prev[i] + gx[i] * dy;
            if (up < best) best = up;
            if (diag_cost[i] > 0.0 && diag_y[i] == (int)j && diag_y[i - 1] == (int)j - 1) {
                double dd = prev[i - 1] + diag_cost[i];
                if (dd < best) best = dd;
            }
            cur[i] = best;
        }
        std::swap(prev, cur);
    }
    return prev.back();
}

}  // namespace

double W(double ax, double ay, double bx, double by, double tol) {
    if (!(ax > 0 && ay > 0)) throw std::invalid_argument("bperc: W requires positive coordinates");
    if (!(ax <= bx && ay <= by))
        throw std::invalid_argument("bperc: W requires a <= b componentwise");
    if (ax == bx && ay == by) return 0.0;
    if (ax == bx) return g(ax) * (by - ay);
    if (ay == by) return g(ay) * (bx - ax);
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = 512; n <= (1 << 13); n *= 2) {
        double val = W_grid(ax, ay, bx, by, n);
        if (!std::isnan(prev) && std::fabs(val - prev) < tol) return val;
        prev = val;
    }
    return prev;
}

double U(const Rect& s, const Rect& r, double q) {
    if (!r.contains(s)) throw std::invalid_argument("bperc: U requires S within R");
    if (!(q > 0)) throw std::invalid_argument("bperc: U requires q > 0");
    return W(q * s.width(), q * s.height(), q * r.width(), q * r.height());
}

double Q(const Rect& s, const Rect& r, double q) {
    if (!r.contains(s)) throw std::invalid_argument("bperc: Q requires S within R");
    const int ds = r.width() - s.width(), dt = r.height() - s.height();
    double out = 0.0;
    if (ds > 0) out += ds * g(q * s.height());
    if (dt > 0) out += dt * g(q * s.width());
    return out;
}

double U_diagonal_closed_form(const Rect& s, const Rect& r, double q) {
    const double a = r.short_side(), b = r.long_side();
    const double c = s.short_side(), d = s.long_side();
    if (!(d <= a))
        throw std::invalid_argument("bperc: closed form requires long(S) <= short(R)");
    return (d - c) * g(d * q) + (2.0 / q) * g_integral(d * q, a * q) + (b - a) * g(a * q);
}

double U_lower_bound(const Rect& s, const Rect& r, double q, double c0) {
    const double a = r.short_side(), b = r.long_side();
    const double phi_s = s.phi();
    return (2.0 / q) * g_integral(0.0, a * q) + (b - a) * g(a * q) -
           0.5 * phi_s * std::log(1.0 + 1.0 / (phi_s * q)) - c0 * phi_s;
}

double f_R(const Rect& r, const Constants& k) {
    const double q = k.q();
    const double s = r.short_side();
    if (s <= k.B / q) return k.delta * std::sqrt(s);
    return k.delta / std::sqrt(q) * std::exp(s * q);
}

double J(const Rect& r, const Constants& k) {
    const double q = k.q();
    const double a = r.short_side(), b = r.long_side();
    return (2.0 / q) * g_integral(0.0, a * q) + (b - a) * g(a * q);
}

void to_json(nlohmann::json& j, const BoundReport& r) {
    nlohmann::json pre = nlohmann::json::object();
    for (const auto& [name, held] : r.preconditions) pre[name] = held;
    j = nlohmann::json{{"formula", r.formula},
                       {"value", r.value},
                       {"log_value", r.log_value},
                       {"vacuous", r.vacuous},
                       {"valid", r.valid},
                       {"branch", r.branch},
                       {"preconditions", std::move(pre)},
                       {"inputs", r.inputs}};
}

namespace {

BoundReport make_report(std::string formula, nlohmann::json inputs,
                        std::vector<std::pair<std::string, bool>> pre, double log_value,
                        std::string branch = "") {
    BoundReport rep;
    rep.formula = std::move(formula);
    rep.inputs = std::move(inputs);
    rep.preconditions = std::move(pre);
    rep.valid = true;
    for (const auto& [name, held] : rep.preconditions) rep.valid = rep.valid && held;
    rep.log_value = log_value;
    rep.value = std::exp(log_value);
    rep.vacuous = !(rep.value < 1.0);
    rep.branch = std::move(branch);
    return rep;
}

}  // namespace

BoundReport droplet_bound(const Rect& r, const Constants& k) {
    k.validate();
    const double q = k.q();
    const double b = r.long_side();
    const double b_lo = 3.0 * std::exp(2.0 * k.B) / q;
    const double b_hi = std::log(1.0 / q) / (2.0 * q);
    const double branch1 = 2.0 * lambda() / q + std::pow(q, -0.75);
    const double branch2 = J(r, k) - k.L6 / std::sqrt(q);
    const bool first = branch1 <= branch2;
    return make_report(
        "droplet",
        {{"rect", r}, {"constants", k}, {"branch_lambda", branch1}, {"branch_J", branch2}},
        {{"b_ge_3e2B_over_q", b >= b_lo}, {"b_le_log_over_2q", b <= b_hi}},
        -std::min(branch1, branch2), first ? "lambda" : "J");
}

BoundReport seeds_bound(const Rect& r, const Constants& k) {
    k.validate();
    const double q = k.q();
    const double a = r.short_side();
    const double phi = r.phi();
    return make_report("seeds", {{"rect", r}, {"constants", k}},
                       {{"ap_le_delta", a * k.p <= k.delta}},
                       phi * (std::log(3.0) - g(a * q)));
}

std::pair<BoundReport, BoundReport> crossing_bounds(const Rect& r, const Constants& k) {
    k.validate();
    const double q = k.q();
    const double a = r.width(), b = r.height();  // dim(R) = (a, b)
    BoundReport no_gap = make_report("no_vertical_double_gap", {{"rect", r}, {"constants", k}},
                                     {}, -(a - 1.0) * g(b * q));
    BoundReport cross = make_report("crossed_left_to_right", {{"rect", r}, {"constants", k}},
                                    {}, -a * g(b * q));
    return {no_gap, cross};
}

LeavingDiagonalReport leaving_diagonal_check(int a, int b, const Constants& k) {
    k.validate();
    const double q = k.q();
    LeavingDiagonalReport rep;
    rep.preconditions = {{"L1_a_le_b", k.L1 * a <= b}, {"b_le_B_over_q", b <= k.B / q},
                         {"a_positive", a >= 1}};
    rep.valid = true;
    for (const auto& [name, held] : rep.preconditions) rep.valid = rep.valid && held;
    rep.lhs = (2.0 / q) * g_integral(a * q, b * q);
    rep.rhs = (b - a) * (g(a * q) + g(b * q)) - 4.0 * k.C * b;
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

PcLowerBound pc_lower_bound(long long n, const Constants& k) {
    if (n < 2) throw std::invalid_argument("bperc: pc_lower_bound requires n >= 2");
    const double lam = lambda();
    const double big = 4.0 * std::exp(4.0) + k.L6;
    const double logn = std::log((double)n);
    PcLowerBound out;
    out.q_star = lam / logn - big / std::pow(logn, 1.5);
    out.p_star = -std::expm1(-out.q_star);
    out.vacuous = !(out.q_star > 0.0);
    out.union_count = (double)n * n * std::pow(logn, 3.0);
    out.exponent = out.vacuous ? std::numeric_limits<double>::quiet_NaN()
                               : -2.0 * lam / out.q_star + big / std::sqrt(out.q_star);
    out.crossover_log_n = (big / lam) * (big / lam);
    return out;
}

void to_json(nlohmann::json& j, const LeavingDiagonalReport& r) {
    nlohmann::json pre = nlohmann::json::object();
    for (const auto& [name, held] : r.preconditions) pre[name] = held;
    j = nlohmann::json{{"valid", r.valid}, {"holds", r.holds}, {"lhs", r.lhs}, {"rhs", r.rhs},
                       {"preconditions", std::move(pre)}};
}

void to_json(nlohmann::json& j, const PcLowerBound& r) {
    j = nlohmann::json{{"q_star", r.q_star},
                       {"p_star", r.p_star},
                       {"vacuous", r.vacuous},
                       {"union_count", r.union_count},
                       {"exponent", r.exponent},
                       {"crossover_log_n", r.crossover_log_n}};
}

}  // namespace bperc
