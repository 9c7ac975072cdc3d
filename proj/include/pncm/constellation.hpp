#ifndef PNCM_CONSTELLATION_HPP
#define PNCM_CONSTELLATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace pncm {

using cpoint = std::complex<double>;

enum class ModKind { Pam, QamSquare, QamCross };
enum class Labeling { Binary, Gray };

/// Uniform-grid constellation: points sit on the integer lattice
/// {..,-3,-1,1,3,..} per axis (neighbor half-distance 1) scaled by a single
/// energy factor.  Cross shapes occupy a bounding LxL grid with holes.
struct Constellation {
    ModKind kind = ModKind::Pam;
    Labeling labeling = Labeling::Binary;
    int size = 0;          // alphabet size M
    int per_axis = 0;      // points per axis L (PAM: M; cross: bounding L')
    int label_bits = 0;    // ceil(log2 M)
    double scale = 1.0;    // grid unit -> amplitude; equals half-distance d
    double avg_energy = 1.0;

    std::vector<cpoint> points;                 // by symbol index
    std::vector<std::uint32_t> labels;          // by symbol index
    std::vector<std::array<int, 2>> axis;       // symbol index -> (i, q) grid indices (PAM: q = 0)
    std::vector<int> grid_to_index;             // (i * per_axis + q) -> symbol index, -1 for holes

    /// Half-distance between neighboring points, in amplitude units.
    double spacing() const { return scale; }

    int index_at_grid(int i, int q) const {
        if (i < 0 || i >= per_axis || q < 0 || q >= per_axis) return -1;
        if (kind == ModKind::Pam) return q == 0 ? grid_to_index[static_cast<std::size_t>(i)] : -1;
        return grid_to_index[static_cast<std::size_t>(i) * per_axis + q];
    }
};

namespace detail {

inline std::uint32_t gray_code(std::uint32_t n) { return n ^ (n >> 1); }

inline int int_log2(int n) {
    int b = 0;
    while ((1 << b) < n) ++b;
    return b;
}

inline double grid_coord(int a, int n) { return 2.0 * a - (n - 1); }

inline bool cross_hole(int m, int lp, int i, int q) {
    switch (m) {
    case 8:   // 3x3 minus the center
        return i == 1 && q == 1;
    case 32:  // 6x6 minus the four corner points
        return (i == 0 || i == lp - 1) && (q == 0 || q == lp - 1);
    case 128: // 12x12 minus four 2x2 corner blocks
        return (i <= 1 || i >= lp - 2) && (q <= 1 || q >= lp - 2);
    default:
        return false;
    }
}

} // namespace detail

inline const char* mod_kind_name(ModKind k) {
    switch (k) {
    case ModKind::Pam: return "pam";
    case ModKind::QamSquare: return "qam";
    case ModKind::QamCross: return "qam";
    }
    return "?";
}

inline Constellation make_constellation(ModKind kind, int m,
                                        Labeling labeling = Labeling::Binary,
                                        double avg_energy = 1.0) {
    if (!(avg_energy > 0.0))
        throw std::invalid_argument("constellation: avg_energy must be > 0");

    Constellation c;
    c.kind = kind;
    c.size = m;

    switch (kind) {
    case ModKind::Pam:
        if (m != 2 && m != 4 && m != 8 && m != 16)
            throw std::invalid_argument("unsupported PAM size " + std::to_string(m) +
                                        " (supported: 2, 4, 8, 16)");
        c.per_axis = m;
        break;
    case ModKind::QamSquare:
        if (m != 4 && m != 16 && m != 64 && m != 256)
            throw std::invalid_argument("unsupported square QAM size " + std::to_string(m) +
                                        " (supported: 4, 16, 64, 256)");
        c.per_axis = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
        break;
    case ModKind::QamCross:
        if (m != 8 && m != 32 && m != 128)
            throw std::invalid_argument("unsupported cross QAM size " + std::to_string(m) +
                                        " (supported: 8, 32, 128)");
        c.per_axis = (m == 8) ? 3 : (m == 32) ? 6 : 12;
        break;
    }

    // Gray labels are per-axis reflected codes; they exist for PAM and square
    // QAM only. Cross shapes always carry binary row-major labels.
    c.labeling = (kind == ModKind::QamCross) ? Labeling::Binary : labeling;
    c.label_bits = detail::int_log2(m);

    const int lp = c.per_axis;
    c.grid_to_index.assign(static_cast<std::size_t>(lp) * lp, -1);

    if (kind == ModKind::Pam) {
        for (int i = 0; i < m; ++i) {
            c.points.emplace_back(detail::grid_coord(i, m), 0.0);
            c.axis.push_back({i, 0});
            std::uint32_t lab = (c.labeling == Labeling::Gray)
                                    ? detail::gray_code(static_cast<std::uint32_t>(i))
                                    : static_cast<std::uint32_t>(i);
            c.labels.push_back(lab);
        }
        // PAM reuses the 2-D grid map with q fixed at 0
        c.grid_to_index.assign(static_cast<std::size_t>(m), -1);
        for (int i = 0; i < m; ++i) c.grid_to_index[i] = i;
        c.per_axis = m;
    } else {
        const int axis_bits = detail::int_log2(lp);
        for (int i = 0; i < lp; ++i) {
            for (int q = 0; q < lp; ++q) {
                if (kind == ModKind::QamCross && detail::cross_hole(m, lp, i, q)) continue;
                int idx = static_cast<int>(c.points.size());
                c.points.emplace_back(detail::grid_coord(i, lp), detail::grid_coord(q, lp));
                c.axis.push_back({i, q});
                c.grid_to_index[static_cast<std::size_t>(i) * lp + q] = idx;
                std::uint32_t lab;
                if (kind == ModKind::QamCross || c.labeling == Labeling::Binary) {
                    lab = (kind == ModKind::QamCross)
                              ? static_cast<std::uint32_t>(idx)
                              : (static_cast<std::uint32_t>(i) << axis_bits) |
                                    static_cast<std::uint32_t>(q);
                } else {
                    lab = (detail::gray_code(static_cast<std::uint32_t>(i)) << axis_bits) |
                          detail::gray_code(static_cast<std::uint32_t>(q));
                }
                c.labels.push_back(lab);
            }
        }
    }

    double raw = 0.0;
    for (const auto& p : c.points) raw += std::norm(p);
    raw /= static_cast<double>(c.points.size());
    c.scale = std::sqrt(avg_energy / raw);
    for (auto& p : c.points) p *= c.scale;
    c.avg_energy = avg_energy;
    return c;
}

inline cpoint modulate(const Constellation& c, int index) {
    if (index < 0 || index >= c.size)
        throw std::out_of_range("modulate: symbol index " + std::to_string(index) +
                                " outside [0, " + std::to_string(c.size) + ")");
    return c.points[static_cast<std::size_t>(index)];
}

/// Minimum-distance decision; ties go to the lowest index.
inline int demodulate(const Constellation& c, cpoint y) {
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag()))
        throw std::invalid_argument("demodulate: non-finite sample");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < c.size; ++i) {
        double d = std::norm(y - c.points[static_cast<std::size_t>(i)]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

inline std::string bits_of(const Constellation& c, int index) {
    if (index < 0 || index >= c.size)
        throw std::out_of_range("bits_of: symbol index out of range");
    std::string s(static_cast<std::size_t>(c.label_bits), '0');
    std::uint32_t lab = c.labels[static_cast<std::size_t>(index)];
    for (int b = 0; b < c.label_bits; ++b)
        if (lab & (1u << (c.label_bits - 1 - b))) s[static_cast<std::size_t>(b)] = '1';
    return s;
}

/// "pam4", "qam16", "qam32", plus the aliases "bpsk" (2-PAM) and "qpsk" (4-QAM).
inline std::pair<ModKind, int> parse_modulation_id(std::string id) {
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (id == "bpsk") return {ModKind::Pam, 2};
    if (id == "qpsk") return {ModKind::QamSquare, 4};
    auto split = [&](const std::string& prefix) -> int {
        if (id.rfind(prefix, 0) != 0) return -1;
        try {
            std::size_t pos = 0;
            int v = std::stoi(id.substr(prefix.size()), &pos);
            if (pos != id.size() - prefix.size()) return -1;
            return v;
        } catch (const std::exception&) {
            return -1;
        }
    };
    if (int v = split("pam"); v > 0) return {ModKind::Pam, v};
    if (int v = split("qam"); v > 0) {
        if (v == 8 || v == 32 || v == 128) return {ModKind::QamCross, v};
        return {ModKind::QamSquare, v};
    }
    throw std::invalid_argument("unknown modulation id '" + id +
                                "' (expected pam2/4/8/16, qam4/16/64/256, qam8/32/128, bpsk, qpsk)");
}

inline Constellation make_constellation(const std::string& id,
                                        Labeling labeling = Labeling::Binary,
                                        double avg_energy = 1.0) {
    auto [kind, m] = parse_modulation_id(id);
    return make_constellation(kind, m, labeling, avg_energy);
}

} // namespace pncm

#endif // PNCM_CONSTELLATION_HPP
