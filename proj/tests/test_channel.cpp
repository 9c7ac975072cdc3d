#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "pncm/channel.hpp"

using namespace pncm;

TEST_CASE("noise power assembly") {
    CHECK(noise_power_dbm(-174.0, 6.0, 1e6) == Catch::Approx(-108.0).margin(1e-12));
    CHECK(noise_power_dbm(-174.0, 0.0, 1.0) == Catch::Approx(-174.0).margin(1e-12));
    CHECK(noise_power_dbm(-174.0, 6.0, 2e6) == Catch::Approx(-105.0).margin(0.01));
    CHECK_THROWS_AS(noise_power_dbm(-174.0, 6.0, 0.0), std::invalid_argument);
}

TEST_CASE("fourth-power path gain") {
    CHECK(path_gain(1.0) == 1.0);
    CHECK(path_gain(10.0) == Catch::Approx(1e-4).epsilon(1e-12));
    CHECK(path_gain(250.0) == Catch::Approx(2.56e-10).epsilon(1e-12));
    CHECK_THROWS_AS(path_gain(0.0), std::invalid_argument);
    CHECK_THROWS_AS(path_gain(-1.0), std::invalid_argument);
}

TEST_CASE("rician fading limits and unit mean power") {
    Rng rng = make_rng(11);

    // large K: pure line of sight, unit magnitude
    for (int i = 0; i < 100; ++i)
        CHECK(std::abs(rician_sample(200.0, rng)) == Catch::Approx(1.0).margin(1e-8));

    // K = 0 linear: Rayleigh, unit mean power
    double acc = 0.0;
    const int n_ray = 200000;
    for (int i = 0; i < n_ray; ++i) acc += std::norm(rician_sample_linear(0.0, rng));
    CHECK(acc / n_ray == Catch::Approx(1.0).margin(0.015));

    // K = 5 dB: unit mean power over one million draws
    acc = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) acc += std::norm(rician_sample(5.0, rng));
    CHECK(acc / n == Catch::Approx(1.0).margin(0.005));

    CHECK_THROWS_AS(rician_sample_linear(-1.0, rng), std::invalid_argument);
}

TEST_CASE("awgn injection") {
    Rng rng = make_rng(12);
    std::vector<std::complex<double>> v(8, {1.0, -2.0});
    auto orig = v;
    apply_awgn(v, 0.0, rng);
    CHECK(v == orig);

    const int n = 1000000;
    std::vector<std::complex<double>> z(n, {0.0, 0.0});
    const double sigma2 = 0.37;
    apply_awgn(z, sigma2, rng);
    double mean_re = 0.0, var = 0.0;
    for (auto& s : z) {
        mean_re += s.real();
        var += s.real() * s.real() + s.imag() * s.imag();
    }
    mean_re /= n;
    var /= 2.0 * n;  // per-dimension
    CHECK(var == Catch::Approx(sigma2).epsilon(0.01));
    CHECK(std::abs(mean_re) < 3.0 * std::sqrt(sigma2 / n));

    CHECK_THROWS_AS(apply_awgn(z, -0.1, rng), std::invalid_argument);
}

TEST_CASE("dB arithmetic matches linear computation") {
    Rng rng = make_rng(13);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int i = 0; i < 500; ++i) {
        double p_dbm = u(rng), g_db = u(rng), n_dbm = u(rng);
        double via_db = db_to_linear(p_dbm + g_db - n_dbm);
        double direct = db_to_linear(p_dbm) * db_to_linear(g_db) / db_to_linear(n_dbm);
        CHECK(via_db == Catch::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("link budget snr") {
    LinkBudget link{10.0, 250.0, 5.0, -108.0};
    // 10 dBm - 95.92 dB path loss + 108 dBm noise floor
    CHECK(link.average_snr_db() ==
          Catch::Approx(10.0 + linear_to_db(2.56e-10) + 108.0).margin(1e-9));
    CHECK(link.realized_snr_db(1.0) == Catch::Approx(link.average_snr_db()).margin(1e-12));
    CHECK(link.realized_snr_db(2.0) ==
          Catch::Approx(link.average_snr_db() + linear_to_db(2.0)).margin(1e-9));
}

TEST_CASE("seed substreams are deterministic and distinct") {
    CHECK(mix_seed(1, 0) == mix_seed(1, 0));
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    Rng a = make_rng(5, 3), b = make_rng(5, 3), c = make_rng(5, 4);
    CHECK(a() == b());
    CHECK(a() != c());
}
