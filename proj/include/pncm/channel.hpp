#ifndef PNCM_CHANNEL_HPP
#define PNCM_CHANNEL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace pncm {

using Rng = std::mt19937_64;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// splitmix64 step, used to derive independent substreams from one trial seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(mix_seed(seed, stream));
}

/// Thermal noise power in dBm over a receiver bandwidth.
inline double noise_power_dbm(double density_dbm_hz, double noise_figure_db, double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("noise_power: bandwidth must be > 0");
    return density_dbm_hz + noise_figure_db + 10.0 * std::log10(bandwidth_hz);
}

/// Fourth-power distance law, linear average power gain.
inline double path_gain(double distance_m) {
    if (!(distance_m > 0.0)) throw std::invalid_argument("path_gain: distance must be > 0");
    double r2 = distance_m * distance_m;
    return 1.0 / (r2 * r2);
}

/// Unit-mean Rician flat-fading gain: fixed line-of-sight component with a
/// uniformly random phase plus circular complex Gaussian scatter.
inline std::complex<double> rician_sample_linear(double k_linear, Rng& rng) {
    if (!(k_linear >= 0.0)) throw std::invalid_argument("rician: K must be >= 0");
    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    double theta = uni(rng);
    std::complex<double> los(std::cos(theta), std::sin(theta));
    std::complex<double> scatter(gauss(rng), gauss(rng));
    double a = std::sqrt(k_linear / (k_linear + 1.0));
    double b = std::sqrt(1.0 / (k_linear + 1.0));
    return a * los + b * scatter;
}

inline std::complex<double> rician_sample(double k_db, Rng& rng) {
    return rician_sample_linear(db_to_linear(k_db), rng);
}

/// Adds independent Gaussian noise of the given per-dimension variance.
inline void apply_awgn(std::span<std::complex<double>> samples, double sigma2, Rng& rng) {
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("apply_awgn: variance must be >= 0");
    if (sigma2 == 0.0) return;
    std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2));
    for (auto& s : samples) s += std::complex<double>(gauss(rng), gauss(rng));
}

/// One directed link: transmit power, fourth-power path loss, unit-mean
/// fading, and a fixed noise floor.
struct LinkBudget {
    double p_tx_dbm = 0.0;
    double distance_m = 1.0;
    double rician_k_db = 5.0;
    double p_noise_dbm = -108.0;

    double average_snr_db() const {
        if (!(distance_m > 0.0)) throw std::invalid_argument("LinkBudget: distance must be > 0");
        return p_tx_dbm + linear_to_db(path_gain(distance_m)) - p_noise_dbm;
    }
    double realized_snr_db(double h2) const {
        return p_tx_dbm + linear_to_db(h2 * path_gain(distance_m)) - p_noise_dbm;
    }
    double draw_snr_db(Rng& rng) const {
        return realized_snr_db(std::norm(rician_sample(rician_k_db, rng)));
    }
};

} // namespace pncm

#endif // PNCM_CHANNEL_HPP
