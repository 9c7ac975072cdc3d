#ifndef PNCM_RATE_ADAPT_HPP
#define PNCM_RATE_ADAPT_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pncm/analysis.hpp"
#include "pncm/channel.hpp"
#include "pncm/constellation.hpp"
#include "pncm/mapping.hpp"

namespace pncm {

/// One rung of the adaptive-modulation ladder.
struct RateMod {
    std::string_view id;
    int bits_per_symbol;
    ModKind kind;
    int m;
    int axis;             // points per axis (L, or bounding L' for cross)
    double kappa;         // Es / d^2 on the unit-spacing grid
    double phase2_overhead; // coded-stream bit expansion when relaying (cross > 1)
};

/// BPSK through 256-QAM with strictly increasing bits per symbol.
inline const std::array<RateMod, 7>& modulation_ladder() {
    static const std::array<RateMod, 7> ladder = [] {
        auto mk = [](std::string_view id, int bits, ModKind kind, int m) {
            Constellation c = make_constellation(kind, m);
            MappingTable t = build_mapping_table(c);
            return RateMod{id, bits, kind, m, c.per_axis, 1.0 / (c.scale * c.scale),
                           coded_stream_overhead(t)};
        };
        return std::array<RateMod, 7>{
            mk("bpsk", 1, ModKind::Pam, 2),       mk("qpsk", 2, ModKind::QamSquare, 4),
            mk("qam16", 4, ModKind::QamSquare, 16), mk("qam32", 5, ModKind::QamCross, 32),
            mk("qam64", 6, ModKind::QamSquare, 64), mk("qam128", 7, ModKind::QamCross, 128),
            mk("qam256", 8, ModKind::QamSquare, 256)};
    }();
    return ladder;
}

// ---------------------------------------------------------------------------
// per-link BER upper bounds (bit error rate bounded by symbol error rate)

/// Point-to-point BER upper bound at average SNR gamma (linear).
inline double p2p_ber_bound(const RateMod& mod, double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("p2p_ber_bound: SNR must be >= 0");
    double arg = std::sqrt(2.0 * gamma / mod.kappa);
    switch (mod.kind) {
    case ModKind::Pam:
        return detail::clamp_prob(2.0 * (mod.m - 1) / mod.m * q_func(arg));
    case ModKind::QamSquare:
        return ser_square_exact(mod.m, gamma);
    case ModKind::QamCross:
        return detail::clamp_prob(4.0 * q_func(arg));
    }
    return 1.0;
}

/// Relay bound for the superposed signal: the square expression with 2L-1
/// substituted for L; cross shapes fall back to the grid union bound, which
/// holds because adjacent superposed points carry distinct coded symbols.
inline double relay_ber_bound(const RateMod& mod, double gamma) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("relay_ber_bound: SNR must be >= 0");
    double arg = std::sqrt(2.0 * gamma / mod.kappa);
    switch (mod.kind) {
    case ModKind::Pam:
        return detail::clamp_prob(2.0 * (2.0 * mod.m - 2.0) / (2.0 * mod.m - 1.0) * q_func(arg));
    case ModKind::QamSquare:
        return ser_superposed(mod.m, gamma);
    case ModKind::QamCross:
        return detail::clamp_prob(4.0 * q_func(arg));
    }
    return 1.0;
}

/// Opportunistic-listener bound under a same-modulation interferer at average
/// SNR gamma_i: worst-case alignment shrinks the decision distance by
/// (axis - 1) interferer spacings.
inline double listener_ber_bound(const RateMod& mod, double gamma, double gamma_i) {
    if (!(gamma >= 0.0) || !(gamma_i >= 0.0))
        throw std::invalid_argument("listener_ber_bound: SNRs must be >= 0");
    double arg = std::sqrt(2.0 * gamma / mod.kappa);
    double arg_i = std::sqrt(2.0 * gamma_i / mod.kappa);
    switch (mod.kind) {
    case ModKind::Pam: {
        double f = std::max(0.0, arg - (mod.m - 1) * arg_i);
        return detail::clamp_prob(2.0 * (mod.m - 1) / mod.m * q_func(f));
    }
    case ModKind::QamSquare:
        return g_alpha(SnrPair{gamma, gamma_i, mod.m}, 1.0);
    case ModKind::QamCross:
        return ser_opp_upper_distance(arg, arg_i, mod.axis);
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// modulation selection

using BerBoundFn = std::function<double(const RateMod&)>;

/// Highest ladder index whose every bound meets the ceiling, or nullopt.
/// `cap` restricts the search to rungs at or below a given index.
inline std::optional<int> select_modulation_index(const std::vector<BerBoundFn>& bounds,
                                                  double ber_max,
                                                  int cap = static_cast<int>(modulation_ladder().size()) - 1) {
    if (bounds.empty())
        throw std::invalid_argument("select_modulation: no BER constraints supplied");
    const auto& ladder = modulation_ladder();
    cap = std::min(cap, static_cast<int>(ladder.size()) - 1);
    for (int i = cap; i >= 0; --i) {
        bool ok = true;
        for (const auto& fn : bounds)
            if (fn(ladder[static_cast<std::size_t>(i)]) > ber_max) {
                ok = false;
                break;
            }
        if (ok) return i;
    }
    return std::nullopt;
}

inline std::optional<RateMod> select_modulation(const std::vector<BerBoundFn>& bounds,
                                                double ber_max) {
    auto idx = select_modulation_index(bounds, ber_max);
    if (!idx) return std::nullopt;
    return modulation_ladder()[static_cast<std::size_t>(*idx)];
}

/// Equal received power at a common receiver: the stronger transmitter backs
/// off to match the weaker; neither output exceeds p_max.
inline std::pair<double, double> equalize_power(double p1_dbm, double gain1, double p2_dbm,
                                                double gain2, double p_max_dbm) {
    if (!(gain1 > 0.0) || !(gain2 > 0.0))
        throw std::invalid_argument("equalize_power: gains must be > 0");
    double r1 = p1_dbm + linear_to_db(gain1);
    double r2 = p2_dbm + linear_to_db(gain2);
    double target = std::min(r1, r2);
    double p1 = std::min(p1_dbm - (r1 - target), p_max_dbm);
    double p2 = std::min(p2_dbm - (r2 - target), p_max_dbm);
    return {p1, p2};
}

// ---------------------------------------------------------------------------
// topology and schemes

/// Side of the near source on which its listener sits.  The toward-relay
/// placement makes the direct source-destination path shorten as the
/// listener distance grows, matching the observed direct-transmission trend.
enum class ListenerPlacement { TowardRelay, AwayFromRelay };

/// Collinear layout: relay at the origin, sources on opposite sides, each
/// destination at d_listener from the far-side source.
struct Topology {
    double d_s1_relay = 187.5;
    double d_s2_relay = 187.5;
    double d_listener = 0.0;
    ListenerPlacement placement = ListenerPlacement::TowardRelay;

    double x_d1() const {
        return placement == ListenerPlacement::TowardRelay ? d_s2_relay - d_listener
                                                           : d_s2_relay + d_listener;
    }
    double x_d2() const {
        return placement == ListenerPlacement::TowardRelay ? -d_s1_relay + d_listener
                                                           : -d_s1_relay - d_listener;
    }
    double s1_relay() const { return d_s1_relay; }
    double s2_relay() const { return d_s2_relay; }
    double relay_d1() const { return std::abs(x_d1()); }
    double relay_d2() const { return std::abs(x_d2()); }
    double s2_d1() const { return d_listener; }
    double s1_d2() const { return d_listener; }
    double s1_d1() const { return std::abs(x_d1() + d_s1_relay); }
    double s2_d2() const { return std::abs(d_s2_relay - x_d2()); }
};

inline Topology draw_topology(double d_listener, ListenerPlacement placement, Rng& rng) {
    std::uniform_real_distribution<double> dist(125.0, 250.0);
    Topology t;
    t.d_s1_relay = dist(rng);
    t.d_s2_relay = dist(rng);
    t.d_listener = d_listener;
    t.placement = placement;
    return t;
}

struct RateParams {
    double p_max_dbm = 10.0;
    double noise_dbm = -108.0;
    double rician_k_db = 5.0;
    double ber_max = 1e-3;
    double symbol_rate = 0.5e6;   // 1 MHz bandwidth, unit roll-off raised cosine
    double packet_bits = 1000.0;
    bool realized_snr = false;    // gate on per-phase faded SNR instead of the path-loss average
    double min_distance_m = 1.0;  // clamp for co-located nodes
};

enum class Scheme { Pnc, Cnc, FourPhase, Direct };

inline const char* scheme_name(Scheme s) {
    switch (s) {
    case Scheme::Pnc: return "pnc";
    case Scheme::Cnc: return "cnc";
    case Scheme::FourPhase: return "fourphase";
    case Scheme::Direct: return "direct";
    }
    return "?";
}

struct PhasePlan {
    std::string_view label;
    int mod_index = -1;         // ladder index, -1 when infeasible
    double duration_s = 0.0;
};

struct SchemeResult {
    Scheme scheme = Scheme::Pnc;
    bool feasible = false;
    std::vector<PhasePlan> phases;
    double throughput_bps = 0.0;
};

struct TrialResult {
    std::uint64_t seed = 0;
    Topology topology;
    std::array<SchemeResult, 4> schemes;  // pnc, cnc, fourphase, direct
};

namespace detail {

struct LinkEval {
    const RateParams& params;
    Rng& rng;

    double h2() { return params.realized_snr ? std::norm(rician_sample(params.rician_k_db, rng)) : 1.0; }
    double gain(double distance) {
        return h2() * path_gain(std::max(distance, params.min_distance_m));
    }
    double snr(double p_dbm, double gain_lin) {
        return db_to_linear(p_dbm + linear_to_db(gain_lin) - params.noise_dbm);
    }
    double snr_at(double p_dbm, double distance) { return snr(p_dbm, gain(distance)); }
};

inline double phase_duration(const RateParams& p, double bits, int mod_index) {
    return bits / (p.symbol_rate * modulation_ladder()[static_cast<std::size_t>(mod_index)].bits_per_symbol);
}

inline SchemeResult finish(Scheme scheme, const RateParams& p, std::vector<PhasePlan> phases) {
    SchemeResult r;
    r.scheme = scheme;
    r.phases = std::move(phases);
    r.feasible = true;
    double total = 0.0;
    for (const auto& ph : r.phases) {
        if (ph.mod_index < 0) r.feasible = false;
        total += ph.duration_s;
    }
    r.throughput_bps = r.feasible ? 2.0 * p.packet_bits / total : 0.0;
    return r;
}

} // namespace detail

/// Plans one scheme on one topology draw.  The relay forwards on the
/// constellation fixed by its receive phase and only downgrades when its own
/// downlink cannot carry that rate, so downlink conditions never raise the
/// forwarded modulation above the uplink choice.
inline SchemeResult scheme_throughput(Scheme scheme, const Topology& topo,
                                      const RateParams& params, Rng& rng) {
    detail::LinkEval link{params, rng};
    const double B = params.packet_bits;
    const double ber_max = params.ber_max;
    std::vector<PhasePlan> phases;

    auto plan = [&](std::string_view label, const std::vector<BerBoundFn>& bounds,
                    int cap = static_cast<int>(modulation_ladder().size()) - 1,
                    double bits = -1.0) {
        auto idx = select_modulation_index(bounds, ber_max, cap);
        PhasePlan ph;
        ph.label = label;
        ph.mod_index = idx.value_or(-1);
        if (idx) ph.duration_s = detail::phase_duration(params, bits < 0 ? B : bits, *idx);
        phases.push_back(ph);
        return idx;
    };

    switch (scheme) {
    case Scheme::Pnc: {
        double g1 = link.gain(topo.s1_relay());
        double g2 = link.gain(topo.s2_relay());
        auto [p1, p2] = equalize_power(params.p_max_dbm, g1, params.p_max_dbm, g2,
                                       params.p_max_dbm);
        double snr_relay = link.snr(p1, g1);
        double snr_d1 = link.snr_at(p2, topo.s2_d1());
        double snr_d1_i = link.snr_at(p1, topo.s1_d1());
        double snr_d2 = link.snr_at(p1, topo.s1_d2());
        double snr_d2_i = link.snr_at(p2, topo.s2_d2());
        auto m1 = plan("sources->relay",
                       {[&](const RateMod& m) { return relay_ber_bound(m, snr_relay); },
                        [&](const RateMod& m) { return listener_ber_bound(m, snr_d1, snr_d1_i); },
                        [&](const RateMod& m) { return listener_ber_bound(m, snr_d2, snr_d2_i); }});
        if (!m1) {
            phases.push_back({"relay->destinations", -1, 0.0});
            return detail::finish(scheme, params, std::move(phases));
        }
        double coded_bits =
            B * modulation_ladder()[static_cast<std::size_t>(*m1)].phase2_overhead;
        double snr_b1 = link.snr_at(params.p_max_dbm, topo.relay_d1());
        double snr_b2 = link.snr_at(params.p_max_dbm, topo.relay_d2());
        plan("relay->destinations",
             {[&](const RateMod& m) { return p2p_ber_bound(m, snr_b1); },
              [&](const RateMod& m) { return p2p_ber_bound(m, snr_b2); }},
             *m1, coded_bits);
        break;
    }
    case Scheme::Cnc: {
        double snr_a_r = link.snr_at(params.p_max_dbm, topo.s1_relay());
        double snr_a_o = link.snr_at(params.p_max_dbm, topo.s1_d2());
        auto ma = plan("s1->relay", {[&](const RateMod& m) { return p2p_ber_bound(m, snr_a_r); },
                                     [&](const RateMod& m) { return p2p_ber_bound(m, snr_a_o); }});
        double snr_b_r = link.snr_at(params.p_max_dbm, topo.s2_relay());
        double snr_b_o = link.snr_at(params.p_max_dbm, topo.s2_d1());
        auto mb = plan("s2->relay", {[&](const RateMod& m) { return p2p_ber_bound(m, snr_b_r); },
                                     [&](const RateMod& m) { return p2p_ber_bound(m, snr_b_o); }});
        double snr_c1 = link.snr_at(params.p_max_dbm, topo.relay_d1());
        double snr_c2 = link.snr_at(params.p_max_dbm, topo.relay_d2());
        if (ma && mb) {
            plan("relay->destinations",
                 {[&](const RateMod& m) { return p2p_ber_bound(m, snr_c1); },
                  [&](const RateMod& m) { return p2p_ber_bound(m, snr_c2); }},
                 std::min(*ma, *mb));
        } else {
            phases.push_back({"relay->destinations", -1, 0.0});
        }
        break;
    }
    case Scheme::FourPhase: {
        double snr_u1 = link.snr_at(params.p_max_dbm, topo.s1_relay());
        auto mu1 = plan("s1->relay", {[&](const RateMod& m) { return p2p_ber_bound(m, snr_u1); }});
        double snr_d1 = link.snr_at(params.p_max_dbm, topo.relay_d1());
        if (mu1)
            plan("relay->d1", {[&](const RateMod& m) { return p2p_ber_bound(m, snr_d1); }}, *mu1);
        else
            phases.push_back({"relay->d1", -1, 0.0});
        double snr_u2 = link.snr_at(params.p_max_dbm, topo.s2_relay());
        auto mu2 = plan("s2->relay", {[&](const RateMod& m) { return p2p_ber_bound(m, snr_u2); }});
        double snr_d2 = link.snr_at(params.p_max_dbm, topo.relay_d2());
        if (mu2)
            plan("relay->d2", {[&](const RateMod& m) { return p2p_ber_bound(m, snr_d2); }}, *mu2);
        else
            phases.push_back({"relay->d2", -1, 0.0});
        break;
    }
    case Scheme::Direct: {
        double snr1 = link.snr_at(params.p_max_dbm, topo.s1_d1());
        plan("s1->d1", {[&](const RateMod& m) { return p2p_ber_bound(m, snr1); }});
        double snr2 = link.snr_at(params.p_max_dbm, topo.s2_d2());
        plan("s2->d2", {[&](const RateMod& m) { return p2p_ber_bound(m, snr2); }});
        break;
    }
    }
    return detail::finish(scheme, params, std::move(phases));
}

/// One random topology draw evaluated under all four schemes, each with its
/// own fading substream.
inline TrialResult run_trial(double d_listener, ListenerPlacement placement,
                             const RateParams& params, std::uint64_t seed) {
    TrialResult tr;
    tr.seed = seed;
    Rng topo_rng = make_rng(seed, 100);
    tr.topology = draw_topology(d_listener, placement, topo_rng);
    const std::array<Scheme, 4> all = {Scheme::Pnc, Scheme::Cnc, Scheme::FourPhase,
                                       Scheme::Direct};
    for (std::size_t i = 0; i < all.size(); ++i) {
        Rng rng = make_rng(seed, 200 + i);
        tr.schemes[i] = scheme_throughput(all[i], tr.topology, params, rng);
    }
    return tr;
}

struct ThroughputRow {
    double d_listener = 0.0;
    Scheme scheme = Scheme::Pnc;
    long n_trials = 0;
    double mean_throughput_bps = 0.0;
    double ci95_bps = 0.0;
};

/// Monte Carlo over topology (and optionally fading) randomness: one row per
/// (listener distance, scheme) with the sample mean and its 95% interval.
inline std::vector<ThroughputRow> run_experiment(const std::vector<double>& distances,
                                                 long n_seeds, ListenerPlacement placement,
                                                 const RateParams& params,
                                                 std::uint64_t base_seed) {
    if (n_seeds < 1) throw std::invalid_argument("run_experiment: n_seeds < 1");
    std::vector<ThroughputRow> rows;
    for (std::size_t di = 0; di < distances.size(); ++di) {
        double d = distances[di];
        std::array<double, 4> sum{};
        std::array<double, 4> sum2{};
        for (long s = 0; s < n_seeds; ++s) {
            std::uint64_t trial_seed =
                mix_seed(base_seed, di * 1000003ULL + static_cast<std::uint64_t>(s));
            TrialResult tr = run_trial(d, placement, params, trial_seed);
            for (std::size_t i = 0; i < 4; ++i) {
                double t = tr.schemes[i].throughput_bps;
                sum[i] += t;
                sum2[i] += t * t;
            }
        }
        for (std::size_t i = 0; i < 4; ++i) {
            ThroughputRow r;
            r.d_listener = d;
            r.scheme = static_cast<Scheme>(i);
            r.n_trials = n_seeds;
            r.mean_throughput_bps = sum[i] / n_seeds;
            double var = std::max(0.0, sum2[i] / n_seeds - r.mean_throughput_bps * r.mean_throughput_bps);
            r.ci95_bps = 1.96 * std::sqrt(var / n_seeds);
            rows.push_back(r);
        }
    }
    return rows;
}

} // namespace pncm

#endif // PNCM_RATE_ADAPT_HPP
