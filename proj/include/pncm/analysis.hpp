#ifndef PNCM_ANALYSIS_HPP
#define PNCM_ANALYSIS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace pncm {

/// Gaussian tail probability Q(x) = erfc(x / sqrt(2)) / 2.
inline double q_func(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("q_func: non-finite argument");
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

namespace detail {

inline double clamp_prob(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

inline int square_axis(int m) {
    if (m != 4 && m != 16 && m != 64 && m != 256)
        throw std::invalid_argument("square QAM size " + std::to_string(m) +
                                    " unsupported (supported: 4, 16, 64, 256)");
    return static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
}

/// 1 - (1 - pre * Q(arg))^2, the two-axis composition used by all the
/// square-grid SER expressions.
inline double two_axis_ser(double pre, double arg) {
    double p = pre * q_func(arg);
    return clamp_prob(1.0 - (1.0 - p) * (1.0 - p));
}

} // namespace detail

/// Generic nearest-neighbor union bound 4 Q(sqrt(2 d^2 / N0)), clamped to a
/// probability.  Valid for any uniform-grid constellation.
inline double ser_upper(double d2_over_n0) {
    if (!(d2_over_n0 >= 0.0))
        throw std::invalid_argument("ser_upper: d^2/N0 must be >= 0");
    return detail::clamp_prob(4.0 * q_func(std::sqrt(2.0 * d2_over_n0)));
}

/// Exact square M-QAM SER as a function of d^2/N0.
inline double ser_square_exact_distance(int m, double d2_over_n0) {
    if (!(d2_over_n0 >= 0.0))
        throw std::invalid_argument("ser_square_exact_distance: d^2/N0 must be >= 0");
    int l = detail::square_axis(m);
    return detail::two_axis_ser(2.0 * (l - 1) / l, std::sqrt(2.0 * d2_over_n0));
}

/// Exact square M-QAM SER at average SNR, using the unit roll-off relation
/// 2 d^2 / N0 = 3 gamma / (M - 1).
inline double ser_square_exact(int m, double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("ser_square_exact: gamma must be >= 0");
    int l = detail::square_axis(m);
    return detail::two_axis_ser(2.0 * (l - 1) / l, std::sqrt(3.0 * gamma / (m - 1)));
}

/// BER sandwich from a symbol error rate: an erroneous symbol carries at
/// least one and at most log2(M) wrong bits.
inline std::pair<double, double> ber_bounds(double ps, int m) {
    if (!(ps >= 0.0 && ps <= 1.0)) throw std::invalid_argument("ber_bounds: ps outside [0, 1]");
    return {ps / std::log2(static_cast<double>(m)), ps};
}

/// SER of the superposed signal at the relay: square formula with 2L-1
/// substituted for L.  Ignores coded-symbol repetition, so it approximates.
inline double ser_superposed(int m, double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("ser_superposed: gamma must be >= 0");
    int l = detail::square_axis(m);
    return detail::two_axis_ser(4.0 * (l - 1) / (2.0 * l - 1.0), std::sqrt(3.0 * gamma / (m - 1)));
}

/// Distance-form SER upper bound under a same-modulation interferer whose
/// worst-case alignment shrinks the decision distance by (L-1) d'.
/// Arguments are sqrt(2 d^2 / N0) and sqrt(2 d'^2 / N0).
inline double ser_opp_upper_distance(double d_arg, double dprime_arg, int axis_count) {
    if (!(d_arg >= 0.0) || !(dprime_arg >= 0.0))
        throw std::invalid_argument("ser_opp_upper_distance: arguments must be >= 0");
    if (axis_count < 2) throw std::invalid_argument("ser_opp_upper_distance: axis count < 2");
    double f = std::max(0.0, d_arg - (axis_count - 1) * dprime_arg);
    return detail::clamp_prob(4.0 * q_func(f));
}

/// Intended / interference SNR pair at an opportunistic listener.
struct SnrPair {
    double gamma = 0.0;    // average SNR of the intended signal (linear)
    double gamma_i = 0.0;  // average SNR of the interference signal (linear)
    int m = 4;             // square QAM size
};

/// Interference-reduced Q argument: alpha = 0 none, 1 worst case, 1/2 average.
inline double f_alpha(const SnrPair& s, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("f_alpha: alpha outside [0, 1]");
    if (!(s.gamma >= 0.0) || !(s.gamma_i >= 0.0))
        throw std::invalid_argument("f_alpha: SNRs must be >= 0");
    int l = detail::square_axis(s.m);
    return std::max(0.0, std::sqrt(3.0 * s.gamma / (s.m - 1)) -
                             alpha * (l - 1) * std::sqrt(3.0 * s.gamma_i / (s.m - 1)));
}

/// Listener SER: g(0) is the interference-free lower bound, g(1) the upper
/// bound, g(1/2) the equal-probable-symbols approximation.
inline double g_alpha(const SnrPair& s, double alpha) {
    int l = detail::square_axis(s.m);
    return detail::two_axis_ser(2.0 * (l - 1) / l, f_alpha(s, alpha));
}

/// Approximate listener BER assuming one bit error per erroneous symbol.
inline double ber_opp_approx(const SnrPair& s) {
    return g_alpha(s, 0.5) / std::log2(static_cast<double>(s.m));
}

/// Invert the interference-free BER lower bound g(0)/log2(M) = target for the
/// average SNR.  Monotone bisection; the forward evaluation of the result
/// matches the target to 1e-9 relative.
inline double solve_snr_for_ber_lower_bound(int m, double target_ber) {
    int l = detail::square_axis(m);
    double k = std::log2(static_cast<double>(m));
    double plateau = 1.0 - std::pow(1.0 - static_cast<double>(l - 1) / l, 2.0);
    if (!(target_ber > 0.0) || target_ber > plateau / k)
        throw std::invalid_argument("solve_snr_for_ber_lower_bound: target outside (0, " +
                                    std::to_string(plateau / k) + "]");
    auto f = [&](double g) { return ser_square_exact(m, g) / k; };
    if (target_ber == plateau / k) return 0.0;

    double lo = 0.0, hi = 1.0;
    while (f(hi) > target_ber) {
        hi *= 2.0;
        if (hi > 1e15)
            throw std::invalid_argument("solve_snr_for_ber_lower_bound: target unreachable");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > target_ber ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace pncm

#endif // PNCM_ANALYSIS_HPP
