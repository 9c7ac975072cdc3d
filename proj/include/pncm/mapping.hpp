#ifndef PNCM_MAPPING_HPP
#define PNCM_MAPPING_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pncm/constellation.hpp"

namespace pncm {

/// Point set of all pairwise sums x1 + x2 of two identical constellations.
/// For cross shapes the grid covers the full extended (2L'-1)^2 lattice;
/// positions no ordered pair of real points can reach have an empty
/// origin-pair list.
struct SuperposedConstellation {
    Constellation base;
    int axis_count = 0;     // L (or L' for cross): points per axis of the single-signal grid
    int grid_side = 0;      // 2*axis_count - 1 superposed positions per axis (1 axis for PAM)
    std::vector<cpoint> points;                              // by grid position
    std::vector<std::array<int, 2>> grid;                    // position -> (l, l2) (PAM: l2 = 0)
    std::vector<std::vector<std::array<int, 2>>> origin_pairs; // ordered (s1, s2) index pairs

    std::size_t position_count() const { return points.size(); }
    std::size_t reachable_count() const {
        std::size_t n = 0;
        for (const auto& v : origin_pairs)
            if (!v.empty()) ++n;
        return n;
    }
    int position_of(int l, int l2) const {
        return base.kind == ModKind::Pam ? l : l * grid_side + l2;
    }
};

/// Coded symbol for one superposed PAM grid position: index j maps to j mod M.
inline int coded_symbol_pam(int grid_index, int m) {
    if (grid_index < 0 || grid_index > 2 * (m - 1))
        throw std::out_of_range("coded_symbol_pam: grid index " + std::to_string(grid_index) +
                                " outside [0, " + std::to_string(2 * (m - 1)) + "]");
    return grid_index % m;
}

/// Coded symbol for one superposed QAM grid position: componentwise mod L.
inline std::array<int, 2> coded_symbol_qam(int l, int l2, int axis_count) {
    if (l < 0 || l > 2 * (axis_count - 1) || l2 < 0 || l2 > 2 * (axis_count - 1))
        throw std::out_of_range("coded_symbol_qam: grid index out of range");
    return {l % axis_count, l2 % axis_count};
}

/// Bounding LxL square grid containing the constellation.  Square inputs come
/// back unchanged; cross inputs gain non-transmittable fill-in points that
/// exist for coded-symbol arithmetic only.
inline std::pair<int, Constellation> extend_to_square(const Constellation& c) {
    if (c.kind == ModKind::Pam)
        throw std::invalid_argument("extend_to_square: applies to QAM constellations");
    if (c.kind == ModKind::QamSquare) return {c.per_axis, c};

    Constellation ext;
    ext.kind = ModKind::QamSquare;
    ext.labeling = Labeling::Binary;
    ext.per_axis = c.per_axis;
    ext.size = c.per_axis * c.per_axis;
    ext.label_bits = 2 * detail::int_log2(c.per_axis);
    ext.scale = c.scale;        // same lattice spacing as the real points
    ext.grid_to_index.assign(static_cast<std::size_t>(ext.per_axis) * ext.per_axis, -1);
    for (int i = 0; i < ext.per_axis; ++i) {
        for (int q = 0; q < ext.per_axis; ++q) {
            int idx = static_cast<int>(ext.points.size());
            ext.points.emplace_back(detail::grid_coord(i, ext.per_axis) * c.scale,
                                    detail::grid_coord(q, ext.per_axis) * c.scale);
            ext.axis.push_back({i, q});
            ext.grid_to_index[static_cast<std::size_t>(i) * ext.per_axis + q] = idx;
            ext.labels.push_back(static_cast<std::uint32_t>(idx));
        }
    }
    double raw = 0.0;
    for (const auto& p : ext.points) raw += std::norm(p);
    ext.avg_energy = raw / static_cast<double>(ext.points.size());
    return {c.per_axis, ext};
}

inline SuperposedConstellation superpose(const Constellation& c) {
    SuperposedConstellation sp;
    sp.base = c;
    if (c.kind == ModKind::Pam) {
        sp.axis_count = c.size;
        sp.grid_side = 2 * c.size - 1;
        sp.points.resize(static_cast<std::size_t>(sp.grid_side));
        sp.grid.resize(static_cast<std::size_t>(sp.grid_side));
        sp.origin_pairs.resize(static_cast<std::size_t>(sp.grid_side));
        for (int j = 0; j < sp.grid_side; ++j) {
            sp.points[static_cast<std::size_t>(j)] =
                cpoint(2.0 * j - 2.0 * (c.size - 1), 0.0) * c.scale;
            sp.grid[static_cast<std::size_t>(j)] = {j, 0};
        }
        for (int s1 = 0; s1 < c.size; ++s1)
            for (int s2 = 0; s2 < c.size; ++s2)
                sp.origin_pairs[static_cast<std::size_t>(s1 + s2)].push_back({s1, s2});
        return sp;
    }

    const int lp = c.per_axis;
    sp.axis_count = lp;
    sp.grid_side = 2 * lp - 1;
    const std::size_t n = static_cast<std::size_t>(sp.grid_side) * sp.grid_side;
    sp.points.resize(n);
    sp.grid.resize(n);
    sp.origin_pairs.resize(n);
    for (int l = 0; l < sp.grid_side; ++l) {
        for (int l2 = 0; l2 < sp.grid_side; ++l2) {
            std::size_t pos = static_cast<std::size_t>(l) * sp.grid_side + l2;
            sp.points[pos] = cpoint(2.0 * l - 2.0 * (lp - 1), 2.0 * l2 - 2.0 * (lp - 1)) * c.scale;
            sp.grid[pos] = {l, l2};
        }
    }
    for (int s1 = 0; s1 < c.size; ++s1) {
        for (int s2 = 0; s2 < c.size; ++s2) {
            auto a = c.axis[static_cast<std::size_t>(s1)];
            auto b = c.axis[static_cast<std::size_t>(s2)];
            std::size_t pos = static_cast<std::size_t>(a[0] + b[0]) * sp.grid_side + (a[1] + b[1]);
            sp.origin_pairs[pos].push_back({s1, s2});
        }
    }
    return sp;
}

enum class MappingRule { Modular, XorLabels };

/// Superposed-point -> coded-symbol table.  Coded indices are packed as
/// c1 * axis_count + c2 for QAM, which for square shapes coincides with the
/// original symbol index, so the relay can retransmit on the same
/// constellation without translation.
struct MappingTable {
    SuperposedConstellation superposed;
    std::vector<int> coded;            // by superposed grid position
    int coded_alphabet_size = 0;       // M (PAM/square) or L'^2 (cross)
    int bounding_axis = 0;             // L' (equals L for PAM/square)
    int coded_word_bits = 0;           // serialized width of one coded symbol
    MappingRule rule = MappingRule::Modular;
    std::size_t build_ops = 0;         // grid positions touched during construction

    Constellation extended;            // == base for PAM/square
    std::vector<int> original_to_extended;
    std::vector<int> extended_to_original;

    const Constellation& base() const { return superposed.base; }
    bool is_extension_only(int extended_index) const {
        return extended_to_original[static_cast<std::size_t>(extended_index)] < 0;
    }
};

inline MappingTable build_mapping_table(const Constellation& c,
                                        MappingRule rule = MappingRule::Modular) {
    if (rule == MappingRule::XorLabels && c.kind == ModKind::QamCross)
        throw std::invalid_argument("build_mapping_table: xor rule is defined for PAM and "
                                    "square QAM labels only");
    MappingTable t;
    t.rule = rule;
    t.superposed = superpose(c);
    t.bounding_axis = t.superposed.axis_count;

    if (c.kind == ModKind::Pam || c.kind == ModKind::QamSquare) {
        t.extended = c;
        t.coded_alphabet_size = c.size;
        t.coded_word_bits = c.label_bits;
        t.original_to_extended.resize(static_cast<std::size_t>(c.size));
        t.extended_to_original.resize(static_cast<std::size_t>(c.size));
        for (int i = 0; i < c.size; ++i) {
            t.original_to_extended[static_cast<std::size_t>(i)] = i;
            t.extended_to_original[static_cast<std::size_t>(i)] = i;
        }
    } else {
        auto [lp, ext] = extend_to_square(c);
        t.extended = std::move(ext);
        t.coded_alphabet_size = lp * lp;
        t.coded_word_bits = 2 * detail::int_log2(lp);
        t.original_to_extended.resize(static_cast<std::size_t>(c.size));
        t.extended_to_original.assign(static_cast<std::size_t>(lp) * lp, -1);
        for (int i = 0; i < c.size; ++i) {
            auto a = c.axis[static_cast<std::size_t>(i)];
            int e = t.extended.index_at_grid(a[0], a[1]);
            t.original_to_extended[static_cast<std::size_t>(i)] = e;
            t.extended_to_original[static_cast<std::size_t>(e)] = i;
        }
    }

    t.coded.resize(t.superposed.position_count());
    t.build_ops = 0;
    const int ax = t.bounding_axis;
    for (std::size_t pos = 0; pos < t.superposed.position_count(); ++pos) {
        auto [l, l2] = t.superposed.grid[pos];
        int value;
        if (rule == MappingRule::Modular) {
            value = (c.kind == ModKind::Pam)
                        ? coded_symbol_pam(l, c.size)
                        : coded_symbol_qam(l, l2, ax)[0] * ax + coded_symbol_qam(l, l2, ax)[1];
        } else {
            // Negative control: XOR of the labels of the first ordered origin
            // pair. Superposed points with conflicting pair XORs are exactly
            // where this labeling becomes ambiguous.
            const auto& pairs = t.superposed.origin_pairs[pos];
            if (pairs.empty()) {
                value = 0;
            } else {
                auto [s1, s2] = pairs.front();
                value = static_cast<int>(c.labels[static_cast<std::size_t>(s1)] ^
                                         c.labels[static_cast<std::size_t>(s2)]);
            }
        }
        t.coded[pos] = value;
        ++t.build_ops;
    }
    return t;
}

/// C(s1, s2): coded index for an ordered pair of original symbols.
inline int coded_of_pair(const MappingTable& t, int s1, int s2) {
    const Constellation& c = t.base();
    if (s1 < 0 || s1 >= c.size || s2 < 0 || s2 >= c.size)
        throw std::out_of_range("coded_of_pair: symbol index out of range");
    auto a = c.axis[static_cast<std::size_t>(s1)];
    auto b = c.axis[static_cast<std::size_t>(s2)];
    int pos = t.superposed.position_of(a[0] + b[0], a[1] + b[1]);
    return t.coded[static_cast<std::size_t>(pos)];
}

/// Expected-symbol decode at a destination that knows one of the two inputs.
/// Returns nullopt when the arithmetic lands on a non-transmittable extension
/// point, which signals a corrupted coded symbol (cross shapes only).
inline std::optional<int> decode_expected(const MappingTable& t, int coded, int known) {
    const Constellation& c = t.base();
    if (coded < 0 || coded >= t.coded_alphabet_size)
        throw std::out_of_range("decode_expected: coded index out of range");
    if (known < 0 || known >= c.size)
        throw std::out_of_range("decode_expected: known symbol index out of range");

    if (c.kind == ModKind::Pam) {
        int m = c.size;
        return ((coded - known) % m + m) % m;
    }
    const int ax = t.bounding_axis;
    auto ka = c.axis[static_cast<std::size_t>(known)];
    int c1 = coded / ax, c2 = coded % ax;
    int e1 = ((c1 - ka[0]) % ax + ax) % ax;
    int e2 = ((c2 - ka[1]) % ax + ax) % ax;
    int ext_idx = t.extended.index_at_grid(e1, e2);
    int orig = t.extended_to_original[static_cast<std::size_t>(ext_idx)];
    if (orig < 0) return std::nullopt;
    return orig;
}

struct ExclusiveLawReport {
    bool pairwise_ok = true;   // both equal-decodability conditions over all ordered pairs
    bool window_ok = true;     // every M-consecutive / LxL / L'xL' window carries distinct codes
    std::string counterexample;

    bool ok() const { return pairwise_ok && window_ok; }
};

/// Brute-force check of unique decodability plus its geometric window form.
inline ExclusiveLawReport verify_exclusive_law(const MappingTable& t) {
    ExclusiveLawReport rep;
    const Constellation& c = t.base();
    const int m = c.size;

    std::vector<int> seen(static_cast<std::size_t>(t.coded_alphabet_size), -1);
    for (int fixed = 0; fixed < m && rep.pairwise_ok; ++fixed) {
        // condition 1: s2 fixed, coded must be injective in s1
        std::fill(seen.begin(), seen.end(), -1);
        for (int s1 = 0; s1 < m; ++s1) {
            int code = coded_of_pair(t, s1, fixed);
            int& slot = seen[static_cast<std::size_t>(code)];
            if (slot >= 0) {
                rep.pairwise_ok = false;
                std::ostringstream os;
                os << "C(" << slot << ", " << fixed << ") = C(" << s1 << ", " << fixed
                   << ") = " << code;
                rep.counterexample = os.str();
                break;
            }
            slot = s1;
        }
        if (!rep.pairwise_ok) break;
        // condition 2: s1 fixed, coded must be injective in s2
        std::fill(seen.begin(), seen.end(), -1);
        for (int s2 = 0; s2 < m; ++s2) {
            int code = coded_of_pair(t, fixed, s2);
            int& slot = seen[static_cast<std::size_t>(code)];
            if (slot >= 0) {
                rep.pairwise_ok = false;
                std::ostringstream os;
                os << "C(" << fixed << ", " << slot << ") = C(" << fixed << ", " << s2
                   << ") = " << code;
                rep.counterexample = os.str();
                break;
            }
            slot = s2;
        }
    }

    const int ax = t.bounding_axis;
    const int side = t.superposed.grid_side;
    if (c.kind == ModKind::Pam) {
        for (int start = 0; start + m <= side && rep.window_ok; ++start) {
            std::fill(seen.begin(), seen.end(), -1);
            for (int j = start; j < start + m; ++j) {
                int code = t.coded[static_cast<std::size_t>(j)];
                if (seen[static_cast<std::size_t>(code)] >= 0) {
                    rep.window_ok = false;
                    std::ostringstream os;
                    os << "window [" << start << ", " << start + m - 1 << "] repeats code "
                       << code;
                    if (rep.counterexample.empty()) rep.counterexample = os.str();
                    break;
                }
                seen[static_cast<std::size_t>(code)] = j;
            }
        }
    } else {
        for (int sl = 0; sl + ax <= side && rep.window_ok; ++sl) {
            for (int sl2 = 0; sl2 + ax <= side && rep.window_ok; ++sl2) {
                std::fill(seen.begin(), seen.end(), -1);
                for (int l = sl; l < sl + ax && rep.window_ok; ++l) {
                    for (int l2 = sl2; l2 < sl2 + ax; ++l2) {
                        int code = t.coded[static_cast<std::size_t>(l) * side + l2];
                        if (seen[static_cast<std::size_t>(code)] >= 0) {
                            rep.window_ok = false;
                            std::ostringstream os;
                            os << "window at (" << sl << ", " << sl2 << ") repeats code "
                               << code;
                            if (rep.counterexample.empty()) rep.counterexample = os.str();
                            break;
                        }
                        seen[static_cast<std::size_t>(code)] = 1;
                    }
                }
            }
        }
    }
    return rep;
}

/// Serialized bit width of the coded stream relative to the source stream.
/// Square shapes repack one-to-one; cross shapes cost 2*ceil(log2 L')/log2 M.
inline double coded_stream_overhead(const MappingTable& t) {
    return static_cast<double>(t.coded_word_bits) / static_cast<double>(t.base().label_bits);
}

} // namespace pncm

#endif // PNCM_MAPPING_HPP
