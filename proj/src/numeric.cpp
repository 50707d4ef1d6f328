#include "linkadapt/numeric.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace linkadapt {

namespace {

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double simpson_recurse(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                       double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                        double abs_tol) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw std::domain_error("adaptive_simpson: non-finite bounds");
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson(fa, fm, fb, b - a);
    const double tol = std::max(abs_tol, rel_tol * std::abs(whole));
    return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, 48);
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

namespace {

double sinc_sq_core(double a, double b, double rel_tol) {
    if (a >= b) return 0.0;
    auto f = [](double u) {
        const double s = sinc(u);
        return s * s;
    };
    const int n_seg = static_cast<int>(std::ceil(b - a));
    const double seg = (b - a) / n_seg;
    double total = 0.0;
    for (int k = 0; k < n_seg; ++k) {
        const double lo = a + k * seg;
        const double hi = k + 1 == n_seg ? b : a + (k + 1) * seg;
        total += adaptive_simpson(f, lo, hi, rel_tol, 1e-14);
    }
    return total;
}

} // namespace

double sinc_sq_integral(double a, double b, double rel_tol) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw std::domain_error("sinc_sq_integral: non-finite bounds");
    if (a > b) std::swap(a, b);
    if (a == b) return 0.0;

    constexpr double kTailStart = 1e4;
    // Far tails: sin^2(pi u)/(pi u)^2 averages to 1/(2 pi^2 u^2).
    auto tail = [](double lo, double hi) { return (1.0 / lo - 1.0 / hi) / (2.0 * M_PI * M_PI); };
    if (a >= kTailStart) return tail(a, b);
    if (b <= -kTailStart) return tail(-b, -a);

    double total = 0.0;
    if (a < -kTailStart) {
        total += tail(kTailStart, -a);
        a = -kTailStart;
    }
    if (b > kTailStart) {
        total += tail(kTailStart, b);
        b = kTailStart;
    }
    total += sinc_sq_core(a, b, rel_tol);
    return total;
}

double exp_integral_ei(double x) {
    if (!(x < 0.0)) throw std::domain_error("exp_integral_ei: argument must be negative");

    const double ax = -x;
    if (ax < 5.0) {
        // Ei(x) = euler_gamma + ln|x| + sum_k x^k / (k k!)
        constexpr double kEulerGamma = 0.57721566490153286060651209;
        double sum = 0.0;
        double term = 1.0;
        for (int k = 1; k <= 200; ++k) {
            term *= x / k;
            const double add = term / k;
            sum += add;
            if (std::abs(add) < 1e-12 * (std::abs(sum) + 1e-300)) break;
        }
        return kEulerGamma + std::log(ax) + sum;
    }

    // Ei(x) = -E1(-x); modified Lentz continued fraction for E1(z), z = -x > 0:
    // E1(z) = exp(-z) * 1/(z+1- 1/(z+3- 4/(z+5- 9/(...))))
    const double z = ax;
    const double tiny = 1e-300;
    double b = z + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 400; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-12) break;
    }
    const double e1 = std::exp(-z) * h;
    return -e1;
}

} // namespace linkadapt
