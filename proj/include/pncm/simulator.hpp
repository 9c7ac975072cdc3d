#ifndef PNCM_SIMULATOR_HPP
#define PNCM_SIMULATOR_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pncm/analysis.hpp"
#include "pncm/channel.hpp"
#include "pncm/constellation.hpp"
#include "pncm/mapping.hpp"

namespace pncm {

struct ErrorStats {
    long long n_symbols = 0;
    long long n_symbol_errors = 0;
    long long n_bits = 0;
    long long n_bit_errors = 0;

    double ser() const { return n_symbols ? static_cast<double>(n_symbol_errors) / n_symbols : 0.0; }
    double ber() const { return n_bits ? static_cast<double>(n_bit_errors) / n_bits : 0.0; }

    /// Normal-approximation binomial std of the SER / BER estimate.
    double ser_sigma() const {
        double p = ser();
        return n_symbols ? std::sqrt(p * (1.0 - p) / n_symbols) : 0.0;
    }
    double ber_sigma() const {
        double p = ber();
        return n_bits ? std::sqrt(p * (1.0 - p) / n_bits) : 0.0;
    }
};

struct SimConfig {
    ModKind kind = ModKind::QamSquare;
    int m = 16;
    Labeling labeling = Labeling::Gray;
    long long n_symbols = 10000;
    double snr_db = 10.0;          // average SNR of the intended signal
    double power_ratio_db = 20.0;  // intended / interference power ratio
    std::uint64_t seed = 1;
};

namespace detail {

/// Per-dimension noise variance for an average SNR on a given constellation:
/// sigma^2 = Es / (2 gamma), which reproduces the standard Q arguments
/// (sqrt(3 gamma / (M-1)) for square QAM, sqrt(2 gamma) for BPSK).
inline double noise_variance(const Constellation& c, double gamma_linear) {
    if (!(gamma_linear > 0.0)) throw std::invalid_argument("noise_variance: SNR must be > 0");
    return c.avg_energy / (2.0 * gamma_linear);
}

/// Nearest index on a 1-D grid with positions 2a - (n-1); exact half-down
/// rounding matches the lowest-index tie-break of the linear scan.
inline int slice_axis(double u, int n) {
    int a = static_cast<int>(std::ceil((u + (n - 1)) * 0.5 - 0.5));
    return a < 0 ? 0 : (a >= n ? n - 1 : a);
}

/// Minimum-distance decision specialized for grid constellations; falls back
/// to the full scan only when the sliced cell is a cross-shape hole.
inline int slice_index(const Constellation& c, cpoint y) {
    if (c.kind == ModKind::Pam) return slice_axis(y.real() / c.scale, c.size);
    int i = slice_axis(y.real() / c.scale, c.per_axis);
    int q = slice_axis(y.imag() / c.scale, c.per_axis);
    int idx = c.index_at_grid(i, q);
    return idx >= 0 ? idx : demodulate(c, y);
}

inline int bit_diff(std::uint32_t a, std::uint32_t b) {
    return std::popcount(a ^ b);
}

} // namespace detail

/// Single point-to-point hop: uniform symbols, AWGN at the configured average
/// SNR, minimum-distance decisions, symbol and bit error counting.
inline ErrorStats run_point_to_point(const SimConfig& cfg) {
    if (cfg.n_symbols < 1) throw std::invalid_argument("run_point_to_point: n_symbols < 1");
    Constellation c = make_constellation(cfg.kind, cfg.m, cfg.labeling);
    double sigma2 = detail::noise_variance(c, db_to_linear(cfg.snr_db));
    double sigma = std::sqrt(sigma2);

    Rng rng = make_rng(cfg.seed, 0);
    std::uniform_int_distribution<int> sym(0, c.size - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ErrorStats st;
    for (long long n = 0; n < cfg.n_symbols; ++n) {
        int tx = sym(rng);
        cpoint y = c.points[static_cast<std::size_t>(tx)] +
                   cpoint(gauss(rng) * sigma, gauss(rng) * sigma);
        int rx = detail::slice_index(c, y);
        st.n_symbols++;
        st.n_bits += c.label_bits;
        if (rx != tx) {
            st.n_symbol_errors++;
            st.n_bit_errors += detail::bit_diff(c.labels[static_cast<std::size_t>(tx)],
                                                c.labels[static_cast<std::size_t>(rx)]);
        }
    }
    return st;
}

/// First communication phase at the relay: two equal-power synchronous
/// sources, minimum-distance decision over the (extended) superposed grid,
/// errors counted on the coded symbol.  snr_db is the per-source SNR.
inline ErrorStats run_relay_phase1(const SimConfig& cfg) {
    if (cfg.n_symbols < 1) throw std::invalid_argument("run_relay_phase1: n_symbols < 1");
    Constellation c = make_constellation(cfg.kind, cfg.m, cfg.labeling);
    MappingTable table = build_mapping_table(c);
    double sigma = std::sqrt(detail::noise_variance(c, db_to_linear(cfg.snr_db)));

    const int side = table.superposed.grid_side;
    Rng rng = make_rng(cfg.seed, 1);
    std::uniform_int_distribution<int> sym(0, c.size - 1);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ErrorStats st;
    for (long long n = 0; n < cfg.n_symbols; ++n) {
        int s1 = sym(rng), s2 = sym(rng);
        cpoint y = c.points[static_cast<std::size_t>(s1)] +
                   c.points[static_cast<std::size_t>(s2)] +
                   cpoint(gauss(rng) * sigma, gauss(rng) * sigma);
        int pos;
        if (c.kind == ModKind::Pam) {
            pos = detail::slice_axis(y.real() / c.scale, side);
        } else {
            int l = detail::slice_axis(y.real() / c.scale, side);
            int l2 = detail::slice_axis(y.imag() / c.scale, side);
            pos = l * side + l2;
        }
        int decided = table.coded[static_cast<std::size_t>(pos)];
        int truth = coded_of_pair(table, s1, s2);
        st.n_symbols++;
        st.n_bits += table.coded_word_bits;
        if (decided != truth) {
            st.n_symbol_errors++;
            st.n_bit_errors += detail::bit_diff(static_cast<std::uint32_t>(decided),
                                                static_cast<std::uint32_t>(truth));
        }
    }
    return st;
}

/// Opportunistic listener during the first phase: intended signal plus a
/// same-modulation interferer at the configured power ratio with a fresh
/// uniform phase per symbol, plus AWGN.
inline ErrorStats run_opportunistic(const SimConfig& cfg) {
    if (cfg.n_symbols < 1) throw std::invalid_argument("run_opportunistic: n_symbols < 1");
    if (cfg.kind != ModKind::QamSquare)
        throw std::invalid_argument("run_opportunistic: square QAM only");
    Constellation c = make_constellation(cfg.kind, cfg.m, cfg.labeling);
    double sigma = std::sqrt(detail::noise_variance(c, db_to_linear(cfg.snr_db)));
    double interf_amp = std::sqrt(1.0 / db_to_linear(cfg.power_ratio_db));

    Rng rng = make_rng(cfg.seed, 2);
    std::uniform_int_distribution<int> sym(0, c.size - 1);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ErrorStats st;
    for (long long n = 0; n < cfg.n_symbols; ++n) {
        int tx = sym(rng);
        int iv = sym(rng);
        double ph = phase(rng);
        cpoint rot(std::cos(ph), std::sin(ph));
        cpoint y = c.points[static_cast<std::size_t>(tx)] +
                   c.points[static_cast<std::size_t>(iv)] * rot * interf_amp +
                   cpoint(gauss(rng) * sigma, gauss(rng) * sigma);
        int rx = detail::slice_index(c, y);
        st.n_symbols++;
        st.n_bits += c.label_bits;
        if (rx != tx) {
            st.n_symbol_errors++;
            st.n_bit_errors += detail::bit_diff(c.labels[static_cast<std::size_t>(tx)],
                                                c.labels[static_cast<std::size_t>(rx)]);
        }
    }
    return st;
}

/// End-to-end exchange configuration.  Infinite SNR fields model noiseless
/// links.
struct EndToEndConfig {
    ModKind kind = ModKind::QamSquare;
    int m = 4;
    Labeling labeling = Labeling::Gray;
    long long n_symbols = 10000;
    double uplink_snr_db = std::numeric_limits<double>::infinity();    // per-source, at the relay
    double downlink_snr_db = std::numeric_limits<double>::infinity();  // relay -> each destination
    double overhear_snr_db = std::numeric_limits<double>::infinity();  // source -> nearby listener
    double overhear_ratio_db = std::numeric_limits<double>::infinity();// intended/interference at listener
    std::uint64_t seed = 1;
};

struct EndToEndStats {
    ErrorStats dest1;  // recovers source 1's symbols
    ErrorStats dest2;  // recovers source 2's symbols
};

namespace detail {

inline double sigma_or_zero(const Constellation& c, double snr_db) {
    if (std::isinf(snr_db)) return 0.0;
    return std::sqrt(noise_variance(c, db_to_linear(snr_db)));
}

/// Serialize coded indices into words of coded_word_bits, re-chunk into
/// label_bits-wide words, and map each onto the constellation point whose
/// label equals the word.
inline std::vector<int> repack_coded_to_symbols(const MappingTable& t,
                                                const std::vector<int>& coded) {
    const Constellation& c = t.base();
    std::vector<int> label_to_index(static_cast<std::size_t>(1) << c.label_bits, 0);
    for (int i = 0; i < c.size; ++i)
        label_to_index[c.labels[static_cast<std::size_t>(i)]] = i;

    std::vector<bool> bits;
    bits.reserve(coded.size() * static_cast<std::size_t>(t.coded_word_bits));
    for (int w : coded)
        for (int b = t.coded_word_bits - 1; b >= 0; --b)
            bits.push_back((w >> b) & 1);
    while (bits.size() % static_cast<std::size_t>(c.label_bits) != 0) bits.push_back(false);

    std::vector<int> symbols;
    symbols.reserve(bits.size() / static_cast<std::size_t>(c.label_bits));
    for (std::size_t off = 0; off < bits.size(); off += static_cast<std::size_t>(c.label_bits)) {
        std::uint32_t w = 0;
        for (int b = 0; b < c.label_bits; ++b) w = (w << 1) | (bits[off + static_cast<std::size_t>(b)] ? 1u : 0u);
        symbols.push_back(label_to_index[w]);
    }
    return symbols;
}

/// Inverse of repack_coded_to_symbols; nullopt marks coded words whose bits
/// do not form a valid coded symbol (possible after channel errors).
inline std::vector<std::optional<int>> unpack_symbols_to_coded(const MappingTable& t,
                                                               const std::vector<int>& symbols,
                                                               std::size_t n_coded) {
    const Constellation& c = t.base();
    std::vector<bool> bits;
    bits.reserve(symbols.size() * static_cast<std::size_t>(c.label_bits));
    for (int s : symbols) {
        std::uint32_t lab = c.labels[static_cast<std::size_t>(s)];
        for (int b = c.label_bits - 1; b >= 0; --b) bits.push_back((lab >> b) & 1);
    }
    std::vector<std::optional<int>> coded;
    coded.reserve(n_coded);
    const int ax = t.bounding_axis;
    const int half_bits = t.coded_word_bits / 2;
    for (std::size_t k = 0; k < n_coded; ++k) {
        std::size_t off = k * static_cast<std::size_t>(t.coded_word_bits);
        if (off + static_cast<std::size_t>(t.coded_word_bits) > bits.size()) {
            coded.push_back(std::nullopt);
            continue;
        }
        std::uint32_t w = 0;
        for (int b = 0; b < t.coded_word_bits; ++b) w = (w << 1) | (bits[off + static_cast<std::size_t>(b)] ? 1u : 0u);
        if (t.base().kind == ModKind::QamCross) {
            std::uint32_t c1 = w >> half_bits;
            std::uint32_t c2 = w & ((1u << half_bits) - 1u);
            if (c1 >= static_cast<std::uint32_t>(ax) || c2 >= static_cast<std::uint32_t>(ax)) {
                coded.push_back(std::nullopt);
                continue;
            }
            coded.push_back(static_cast<int>(c1) * ax + static_cast<int>(c2));
        } else {
            coded.push_back(static_cast<int>(w) < t.coded_alphabet_size
                                ? std::optional<int>(static_cast<int>(w))
                                : std::nullopt);
        }
    }
    return coded;
}

} // namespace detail

/// Full two-phase exchange: relay decision on the superposed signal, coded
/// broadcast (bit-repacked for cross shapes), opportunistic overhearing under
/// interference, and expected-symbol decode at both destinations.
inline EndToEndStats run_end_to_end(const EndToEndConfig& cfg) {
    if (cfg.n_symbols < 1) throw std::invalid_argument("run_end_to_end: n_symbols < 1");
    Constellation c = make_constellation(cfg.kind, cfg.m, cfg.labeling);
    MappingTable table = build_mapping_table(c);

    const int side = table.superposed.grid_side;
    double sig_up = detail::sigma_or_zero(c, cfg.uplink_snr_db);
    double sig_down = detail::sigma_or_zero(c, cfg.downlink_snr_db);
    double sig_ov = detail::sigma_or_zero(c, cfg.overhear_snr_db);
    double interf_amp = std::isinf(cfg.overhear_ratio_db)
                            ? 0.0
                            : std::sqrt(1.0 / db_to_linear(cfg.overhear_ratio_db));

    Rng rng = make_rng(cfg.seed, 3);
    std::uniform_int_distribution<int> sym(0, c.size - 1);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const long long n = cfg.n_symbols;
    std::vector<int> s1(static_cast<std::size_t>(n)), s2(static_cast<std::size_t>(n));
    std::vector<int> relay_coded(static_cast<std::size_t>(n));
    std::vector<int> ov1(static_cast<std::size_t>(n)), ov2(static_cast<std::size_t>(n));

    for (long long k = 0; k < n; ++k) {
        std::size_t i = static_cast<std::size_t>(k);
        s1[i] = sym(rng);
        s2[i] = sym(rng);

        // relay decision on the superposed signal
        cpoint y = c.points[static_cast<std::size_t>(s1[i])] +
                   c.points[static_cast<std::size_t>(s2[i])] +
                   cpoint(gauss(rng) * sig_up, gauss(rng) * sig_up);
        int pos;
        if (c.kind == ModKind::Pam) {
            pos = detail::slice_axis(y.real() / c.scale, side);
        } else {
            pos = detail::slice_axis(y.real() / c.scale, side) * side +
                  detail::slice_axis(y.imag() / c.scale, side);
        }
        relay_coded[i] = table.coded[static_cast<std::size_t>(pos)];

        // opportunistic overhearing: destination 1 hears source 2 while
        // source 1 interferes, and vice versa
        auto overhear = [&](int wanted, int interferer) {
            double ph = phase(rng);
            cpoint rot(std::cos(ph), std::sin(ph));
            cpoint z = c.points[static_cast<std::size_t>(wanted)] +
                       c.points[static_cast<std::size_t>(interferer)] * rot * interf_amp +
                       cpoint(gauss(rng) * sig_ov, gauss(rng) * sig_ov);
            return detail::slice_index(c, z);
        };
        ov1[i] = overhear(s2[i], s1[i]);
        ov2[i] = overhear(s1[i], s2[i]);
    }

    // second phase: broadcast the coded stream on the original constellation
    std::vector<int> tx_syms = detail::repack_coded_to_symbols(table, relay_coded);
    auto receive_coded = [&](std::uint64_t stream) {
        Rng drng = make_rng(cfg.seed, stream);
        std::normal_distribution<double> g2(0.0, 1.0);
        std::vector<int> rx;
        rx.reserve(tx_syms.size());
        for (int s : tx_syms) {
            cpoint z = c.points[static_cast<std::size_t>(s)] +
                       cpoint(g2(drng) * sig_down, g2(drng) * sig_down);
            rx.push_back(detail::slice_index(c, z));
        }
        return detail::unpack_symbols_to_coded(table, rx, static_cast<std::size_t>(n));
    };
    auto coded_at_d1 = receive_coded(4);
    auto coded_at_d2 = receive_coded(5);

    EndToEndStats out;
    for (long long k = 0; k < n; ++k) {
        std::size_t i = static_cast<std::size_t>(k);
        auto score = [&](ErrorStats& st, const std::optional<int>& coded, int known, int truth) {
            std::optional<int> dec;
            if (coded) dec = decode_expected(table, *coded, known);
            st.n_symbols++;
            st.n_bits += c.label_bits;
            // decode failures count as fully erroneous symbols
            int got = dec ? *dec : -1;
            if (got != truth) {
                st.n_symbol_errors++;
                st.n_bit_errors +=
                    dec ? detail::bit_diff(c.labels[static_cast<std::size_t>(truth)],
                                           c.labels[static_cast<std::size_t>(got)])
                        : c.label_bits;
            }
        };
        score(out.dest1, coded_at_d1[i], ov1[i], s1[i]);
        score(out.dest2, coded_at_d2[i], ov2[i], s2[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// sweep rows

struct BerSweepRow {
    std::string scenario;  // "p2p" or "relay"
    int m = 0;
    double snr_db = 0.0;
    long long n_symbols = 0;
    std::uint64_t seed = 0;
    double ser = 0.0, ber = 0.0;
    double ser_ci95 = 0.0;
    double analytic_ser = 0.0;  // exact p2p SER or superposed approximation
};

struct OppSweepRow {
    int m = 0;
    double snr_db = 0.0;
    double ratio_db = 0.0;
    long long n_symbols = 0;
    std::uint64_t seed = 0;
    double ber = 0.0;
    double ber_ci95 = 0.0;
    double ber_lower = 0.0;   // g(0)/log2 M
    double ser_upper = 0.0;   // g(1)
    double ber_approx = 0.0;  // g(1/2)/log2 M
};

inline std::vector<BerSweepRow> sweep_ber(const SimConfig& base, const std::string& scenario,
                                          const std::vector<double>& snr_grid) {
    std::vector<BerSweepRow> rows;
    for (double snr : snr_grid) {
        SimConfig cfg = base;
        cfg.snr_db = snr;
        cfg.seed = mix_seed(base.seed, rows.size());
        ErrorStats st = scenario == "relay" ? run_relay_phase1(cfg) : run_point_to_point(cfg);
        BerSweepRow r;
        r.scenario = scenario;
        r.m = cfg.m;
        r.snr_db = snr;
        r.n_symbols = cfg.n_symbols;
        r.seed = cfg.seed;
        r.ser = st.ser();
        r.ber = st.ber();
        r.ser_ci95 = 1.96 * st.ser_sigma();
        double gamma = db_to_linear(snr);
        if (cfg.kind == ModKind::QamSquare)
            r.analytic_ser = scenario == "relay" ? ser_superposed(cfg.m, gamma)
                                                 : ser_square_exact(cfg.m, gamma);
        else
            r.analytic_ser = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<OppSweepRow> sweep_opportunistic(const SimConfig& base,
                                                    const std::vector<double>& ratio_grid) {
    std::vector<OppSweepRow> rows;
    for (double ratio : ratio_grid) {
        SimConfig cfg = base;
        cfg.power_ratio_db = ratio;
        cfg.seed = mix_seed(base.seed, rows.size());
        ErrorStats st = run_opportunistic(cfg);
        SnrPair s{db_to_linear(cfg.snr_db), db_to_linear(cfg.snr_db - ratio), cfg.m};
        OppSweepRow r;
        r.m = cfg.m;
        r.snr_db = cfg.snr_db;
        r.ratio_db = ratio;
        r.n_symbols = cfg.n_symbols;
        r.seed = cfg.seed;
        r.ber = st.ber();
        r.ber_ci95 = 1.96 * st.ber_sigma();
        r.ber_lower = g_alpha(s, 0.0) / std::log2(static_cast<double>(cfg.m));
        r.ser_upper = g_alpha(s, 1.0);
        r.ber_approx = ber_opp_approx(s);
        rows.push_back(r);
    }
    return rows;
}

} // namespace pncm

#endif // PNCM_SIMULATOR_HPP
