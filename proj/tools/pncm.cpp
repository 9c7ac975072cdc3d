// pncm: constellation mapping, error-rate analysis, and rate-adaptation
// experiments for denoise-and-forward physical-layer network coding.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pncm/analysis.hpp"
#include "pncm/channel.hpp"
#include "pncm/constellation.hpp"
#include "pncm/csv.hpp"
#include "pncm/mapping.hpp"
#include "pncm/rate_adapt.hpp"
#include "pncm/simulator.hpp"
#include "pncm/version.hpp"

namespace {

struct OutputTarget {
    std::string path;  // empty = stdout
    std::ofstream file;

    std::ostream& open() {
        if (path.empty()) return std::cout;
        file.open(path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
        return file;
    }
    void finish(const pncm::Manifest& manifest) {
        if (path.empty()) return;
        if (!file) throw std::runtime_error("failed writing output file '" + path + "'");
        file.close();
        manifest.write(path + ".manifest");
    }
};

pncm::Labeling parse_labeling(const std::string& s) {
    if (s == "binary") return pncm::Labeling::Binary;
    if (s == "gray") return pncm::Labeling::Gray;
    throw std::invalid_argument("labeling must be 'binary' or 'gray'");
}

void add_common(CLI::App* cmd, std::string& out, std::uint64_t& seed) {
    cmd->add_option("--out", out, "write CSV here instead of stdout (also emits <out>.manifest)");
    cmd->add_option("--seed", seed, "base seed for all random draws");
    cmd->set_config("--config", "", "read options from a key=value file (e.g. a run manifest)");
}

pncm::Manifest base_manifest(const std::string& subcommand, const std::string& out,
                             std::uint64_t seed) {
    pncm::Manifest m;
    m.note("pncm run manifest (version " + std::string(pncm::version) + ")");
    m.note("reproduce with: pncm " + subcommand + " --config <this file>");
    m.set("seed", seed);
    if (!out.empty()) m.set("out", out);
    return m;
}

int cmd_table(const std::string& mod, const std::string& labeling, double energy,
              OutputTarget& target) {
    pncm::Constellation c = pncm::make_constellation(mod, parse_labeling(labeling), energy);
    auto& os = target.open();
    pncm::CsvWriter csv(os);
    csv.header({"index", "re", "im", "bits"});
    for (int i = 0; i < c.size; ++i) {
        csv.cell(i);
        csv.cell(c.points[static_cast<std::size_t>(i)].real());
        csv.cell(c.points[static_cast<std::size_t>(i)].imag());
        csv.cell(pncm::bits_of(c, i));
        csv.end_row();
    }
    pncm::Manifest m = base_manifest("table", target.path, 0);
    m.set("mod", mod);
    m.set("labeling", labeling);
    m.set("energy", energy);
    target.finish(m);
    return 0;
}

std::string coded_bits_string(const pncm::MappingTable& t, int coded) {
    std::string s(static_cast<std::size_t>(t.coded_word_bits), '0');
    for (int b = 0; b < t.coded_word_bits; ++b)
        if (coded & (1 << (t.coded_word_bits - 1 - b))) s[static_cast<std::size_t>(b)] = '1';
    return s;
}

int cmd_map(const std::string& mod, const std::string& rule_name, OutputTarget& target) {
    pncm::MappingRule rule = rule_name == "xor" ? pncm::MappingRule::XorLabels
                                                : pncm::MappingRule::Modular;
    pncm::Constellation c = pncm::make_constellation(mod);
    pncm::MappingTable t = pncm::build_mapping_table(c, rule);
    auto& os = target.open();
    pncm::CsvWriter csv(os);
    csv.header({"l", "l2", "re", "im", "reachable", "coded_index", "coded_bits"});
    for (std::size_t pos = 0; pos < t.superposed.position_count(); ++pos) {
        auto [l, l2] = t.superposed.grid[pos];
        csv.cell(l);
        if (c.kind == pncm::ModKind::Pam)
            csv.cell("");
        else
            csv.cell(l2);
        csv.cell(t.superposed.points[pos].real());
        csv.cell(t.superposed.points[pos].imag());
        csv.cell(t.superposed.origin_pairs[pos].empty() ? 0 : 1);
        csv.cell(t.coded[pos]);
        csv.cell(coded_bits_string(t, t.coded[pos]));
        csv.end_row();
    }
    pncm::Manifest m = base_manifest("map", target.path, 0);
    m.set("mod", mod);
    m.set("mapping", rule_name);
    target.finish(m);
    return 0;
}

int cmd_verify(const std::string& mod, const std::string& rule_name) {
    pncm::MappingRule rule = rule_name == "xor" ? pncm::MappingRule::XorLabels
                                                : pncm::MappingRule::Modular;
    pncm::Constellation c = pncm::make_constellation(mod);
    pncm::MappingTable t = pncm::build_mapping_table(c, rule);
    pncm::ExclusiveLawReport rep = pncm::verify_exclusive_law(t);
    if (rep.ok()) {
        std::cout << mod << " " << rule_name << ": exclusive law holds ("
                  << t.superposed.position_count() << " superposed points, coded alphabet "
                  << t.coded_alphabet_size << ")\n";
        return 0;
    }
    std::cout << mod << " " << rule_name << ": exclusive law VIOLATED: " << rep.counterexample
              << "\n";
    return 2;
}

int cmd_analytic(const std::string& mod, double snr_db, double isnr_db, OutputTarget& target) {
    auto [kind, m] = pncm::parse_modulation_id(mod);
    if (kind != pncm::ModKind::QamSquare)
        throw std::invalid_argument("analytic: square QAM sizes only (qpsk, qam4/16/64/256)");
    double gamma = pncm::db_to_linear(snr_db);
    double gamma_i = pncm::db_to_linear(isnr_db);
    pncm::SnrPair s{gamma, gamma_i, m};
    double k = std::log2(static_cast<double>(m));
    double d2_over_n0 = 1.5 * gamma / (m - 1);

    auto& os = target.open();
    pncm::CsvWriter csv(os);
    csv.header({"m", "snr_db", "isnr_db", "ser_union_bound", "ser_exact", "ber_lower",
                "ber_upper", "ser_superposed", "listener_ser_lower", "listener_ser_approx",
                "listener_ser_upper", "listener_ber_approx"});
    csv.cell(m);
    csv.cell(snr_db);
    csv.cell(isnr_db);
    csv.cell(pncm::ser_upper(d2_over_n0));
    double ps = pncm::ser_square_exact(m, gamma);
    csv.cell(ps);
    auto [lo, hi] = pncm::ber_bounds(ps, m);
    csv.cell(lo);
    csv.cell(hi);
    csv.cell(pncm::ser_superposed(m, gamma));
    csv.cell(pncm::g_alpha(s, 0.0));
    csv.cell(pncm::g_alpha(s, 0.5));
    csv.cell(pncm::g_alpha(s, 1.0));
    csv.cell(pncm::g_alpha(s, 0.5) / k);
    csv.end_row();

    pncm::Manifest man = base_manifest("analytic", target.path, 0);
    man.set("mod", mod);
    man.set("snr-db", snr_db);
    man.set("isnr-db", isnr_db);
    target.finish(man);
    return 0;
}

int cmd_ber(const std::string& mod, const std::string& scenario, const std::string& snr_grid,
            long long symbols, const std::string& labeling, std::uint64_t seed,
            OutputTarget& target) {
    if (scenario != "p2p" && scenario != "relay")
        throw std::invalid_argument("ber: scenario must be 'p2p' or 'relay'");
    auto [kind, m] = pncm::parse_modulation_id(mod);
    pncm::SimConfig cfg;
    cfg.kind = kind;
    cfg.m = m;
    cfg.labeling = parse_labeling(labeling);
    cfg.n_symbols = symbols;
    cfg.seed = seed;
    auto rows = pncm::sweep_ber(cfg, scenario, pncm::parse_grid(snr_grid));

    auto& os = target.open();
    pncm::CsvWriter csv(os);
    csv.header({"scenario", "m", "snr_db", "n_symbols", "seed", "ser", "ber", "ser_ci95",
                "analytic_ser"});
    for (const auto& r : rows) {
        csv.cell(r.scenario);
        csv.cell(r.m);
        csv.cell(r.snr_db);
        csv.cell(r.n_symbols);
        csv.cell(r.seed);
        csv.cell(r.ser);
        csv.cell(r.ber);
        csv.cell(r.ser_ci95);
        csv.cell(r.analytic_ser);
        csv.end_row();
    }
    pncm::Manifest man = base_manifest("ber", target.path, seed);
    man.set("mod", mod);
    man.set("scenario", scenario);
    man.set("snr-db", snr_grid);
    man.set("symbols", symbols);
    man.set("labeling", labeling);
    target.finish(man);
    return 0;
}

int cmd_opp_ber(const std::string& mod, const std::string& ratio_grid, long long symbols,
                double target_ber, double snr_db_opt, bool have_snr, std::uint64_t seed,
                OutputTarget& target) {
    auto [kind, m] = pncm::parse_modulation_id(mod);
    if (kind != pncm::ModKind::QamSquare)
        throw std::invalid_argument("opp-ber: square QAM sizes only");
    double snr_db = have_snr
                        ? snr_db_opt
                        : pncm::linear_to_db(pncm::solve_snr_for_ber_lower_bound(m, target_ber));
    pncm::SimConfig cfg;
    cfg.kind = kind;
    cfg.m = m;
    cfg.labeling = pncm::Labeling::Gray;
    cfg.n_symbols = symbols;
    cfg.snr_db = snr_db;
    cfg.seed = seed;
    auto rows = pncm::sweep_opportunistic(cfg, pncm::parse_grid(ratio_grid));

    auto& os = target.open();
    pncm::CsvWriter csv(os);
    csv.header({"m", "snr_db", "ratio_db", "n_symbols", "seed", "ber", "ber_ci95", "ber_lower",
                "ser_upper", "ber_approx"});
    for (const auto& r : rows) {
        csv.cell(r.m);
        csv.cell(r.snr_db);
        csv.cell(r.ratio_db);
        csv.cell(r.n_symbols);
        csv.cell(r.seed);
        csv.cell(r.ber);
        csv.cell(r.ber_ci95);
        csv.cell(r.ber_lower);
        csv.cell(r.ser_upper);
        csv.cell(r.ber_approx);
        csv.end_row();
    }
    pncm::Manifest man = base_manifest("opp-ber", target.path, seed);
    man.set("mod", mod);
    man.set("ratio-db", ratio_grid);
    man.set("symbols", symbols);
    if (have_snr)
        man.set("snr-db", snr_db);
    else
        man.set("target-ber", target_ber);
    target.finish(man);
    return 0;
}

int cmd_throughput(const std::string& dist_grid, long seeds, double p_max, double density,
                   double nf, double bw, double k_db, double ber_max, double packet_bits,
                   double symbol_rate, const std::string& placement_name,
                   const std::string& snr_basis, std::uint64_t seed, OutputTarget& target) {
    pncm::RateParams params;
    params.p_max_dbm = p_max;
    params.noise_dbm = pncm::noise_power_dbm(density, nf, bw);
    params.rician_k_db = k_db;
    params.ber_max = ber_max;
    params.packet_bits = packet_bits;
    params.symbol_rate = symbol_rate;
    if (snr_basis == "realized")
        params.realized_snr = true;
    else if (snr_basis != "average")
        throw std::invalid_argument("throughput: --snr-basis must be 'average' or 'realized'");
    pncm::ListenerPlacement placement;
    if (placement_name == "toward")
        placement = pncm::ListenerPlacement::TowardRelay;
    else if (placement_name == "away")
        placement = pncm::ListenerPlacement::AwayFromRelay;
    else
        throw std::invalid_argument("throughput: --placement must be 'toward' or 'away'");

    auto rows = pncm::run_experiment(pncm::parse_grid(dist_grid), seeds, placement, params, seed);
    auto& os = target.open();
    pncm::CsvWriter csv(os);
    csv.header({"distance_m", "scheme", "n_trials", "mean_throughput_bps", "ci95_bps"});
    for (const auto& r : rows) {
        csv.cell(r.d_listener);
        csv.cell(pncm::scheme_name(r.scheme));
        csv.cell(r.n_trials);
        csv.cell(r.mean_throughput_bps);
        csv.cell(r.ci95_bps);
        csv.end_row();
    }
    pncm::Manifest man = base_manifest("throughput", target.path, seed);
    man.set("dist", dist_grid);
    man.set("seeds", static_cast<long long>(seeds));
    man.set("p-max-dbm", p_max);
    man.set("noise-density-dbm-hz", density);
    man.set("noise-figure-db", nf);
    man.set("bandwidth-hz", bw);
    man.set("k-db", k_db);
    man.set("ber-max", ber_max);
    man.set("packet-bits", packet_bits);
    man.set("symbol-rate", symbol_rate);
    man.set("placement", placement_name);
    man.set("snr-basis", snr_basis);
    target.finish(man);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Constellation mapping and rate adaptation for denoise-and-forward "
                 "physical-layer network coding"};
    app.set_version_flag("--version", pncm::version);
    app.require_subcommand(1);

    // table
    auto* table = app.add_subcommand("table", "print a constellation as CSV (index, re, im, bits)");
    std::string t_mod = "qam16", t_lab = "gray", t_out;
    double t_energy = 1.0;
    std::uint64_t t_seed = 1;
    table->add_option("--mod", t_mod, "modulation id (pam4, qam16, qam32, bpsk, qpsk, ...)");
    table->add_option("--labeling", t_lab, "bit labeling: gray or binary");
    table->add_option("--energy", t_energy, "average symbol energy");
    add_common(table, t_out, t_seed);

    // map
    auto* mapc = app.add_subcommand(
        "map", "print the superposed constellation and coded symbols as CSV");
    std::string m_mod = "qam16", m_rule = "modular", m_out;
    std::uint64_t m_seed = 1;
    mapc->add_option("--mod", m_mod, "modulation id");
    mapc->add_option("--mapping", m_rule, "coded-symbol rule: modular or xor");
    add_common(mapc, m_out, m_seed);

    // verify
    auto* verify = app.add_subcommand(
        "verify", "check the exclusive law; exit 2 with a counterexample on violation");
    std::string v_mod = "qam16", v_rule = "modular", v_out;
    std::uint64_t v_seed = 1;
    verify->add_option("--mod", v_mod, "modulation id");
    verify->add_option("--mapping", v_rule, "coded-symbol rule: modular or xor");
    add_common(verify, v_out, v_seed);

    // analytic
    auto* analytic = app.add_subcommand(
        "analytic", "closed-form SER/BER bounds and approximations as CSV");
    std::string a_mod = "qam16", a_out;
    double a_snr = 20.0, a_isnr = 0.0;
    std::uint64_t a_seed = 1;
    analytic->add_option("--mod", a_mod, "square QAM id");
    analytic->add_option("--snr-db", a_snr, "intended-signal average SNR (dB)");
    analytic->add_option("--isnr-db", a_isnr, "interference average SNR (dB)");
    add_common(analytic, a_out, a_seed);

    // ber
    auto* ber = app.add_subcommand(
        "ber", "Monte Carlo point-to-point or relay phase-1 error rates over an SNR grid");
    std::string b_mod = "qam16", b_scn = "p2p", b_grid = "10:20:2", b_lab = "gray", b_out;
    long long b_symbols = 100000;
    std::uint64_t b_seed = 1;
    ber->add_option("--mod", b_mod, "modulation id");
    ber->add_option("--scenario", b_scn, "p2p or relay");
    ber->add_option("--snr-db", b_grid, "SNR grid, dB (value or start:stop:step)");
    ber->add_option("--symbols", b_symbols, "symbols per grid point");
    ber->add_option("--labeling", b_lab, "bit labeling: gray or binary");
    add_common(ber, b_out, b_seed);

    // opp-ber
    auto* opp = app.add_subcommand(
        "opp-ber", "Monte Carlo BER at an opportunistic listener over a power-ratio grid");
    std::string o_mod = "qam16", o_grid = "0:40:5", o_out;
    long long o_symbols = 1000000;
    double o_target = 1e-3, o_snr = 0.0;
    std::uint64_t o_seed = 1;
    opp->add_option("--mod", o_mod, "square QAM id");
    opp->add_option("--ratio-db", o_grid, "intended/interference power ratio grid, dB");
    opp->add_option("--symbols", o_symbols, "symbols per grid point");
    opp->add_option("--target-ber", o_target,
                    "solve the intended SNR so the interference-free BER lower bound equals this");
    auto* o_snr_opt =
        opp->add_option("--snr-db", o_snr, "fix the intended SNR (dB) instead of solving");
    add_common(opp, o_out, o_seed);

    // throughput
    auto* thr = app.add_subcommand(
        "throughput", "rate-adaptive throughput comparison over random topologies");
    std::string th_grid = "0:250:25", th_place = "toward", th_basis = "average", th_out;
    long th_seeds = 1000;
    double th_pmax = 10.0, th_density = -174.0, th_nf = 6.0, th_bw = 1e6, th_k = 5.0;
    double th_bermax = 1e-3, th_bits = 1000.0, th_rs = 0.5e6;
    std::uint64_t th_seed = 1;
    thr->add_option("--dist", th_grid, "listener distance grid, m (value or start:stop:step)");
    thr->add_option("--seeds", th_seeds, "random topology draws per distance");
    thr->add_option("--p-max-dbm", th_pmax, "maximum transmit power (dBm)");
    thr->add_option("--noise-density-dbm-hz", th_density, "noise power density (dBm/Hz)");
    thr->add_option("--noise-figure-db", th_nf, "receiver noise figure (dB)");
    thr->add_option("--bandwidth-hz", th_bw, "receiver bandwidth (Hz)");
    thr->add_option("--k-db", th_k, "Rician K factor (dB)");
    thr->add_option("--ber-max", th_bermax, "BER ceiling for modulation selection");
    thr->add_option("--packet-bits", th_bits, "packet size (bits)");
    thr->add_option("--symbol-rate", th_rs, "symbol rate (symbols/s)");
    thr->add_option("--placement", th_place,
                    "listener side relative to its source: toward or away (from the relay)");
    thr->add_option("--snr-basis", th_basis,
                    "modulation selection on 'average' (path loss) or 'realized' (faded) SNR");
    add_common(thr, th_out, th_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (table->parsed()) {
            OutputTarget out{t_out, {}};
            return cmd_table(t_mod, t_lab, t_energy, out);
        }
        if (mapc->parsed()) {
            OutputTarget out{m_out, {}};
            return cmd_map(m_mod, m_rule, out);
        }
        if (verify->parsed()) return cmd_verify(v_mod, v_rule);
        if (analytic->parsed()) {
            OutputTarget out{a_out, {}};
            return cmd_analytic(a_mod, a_snr, a_isnr, out);
        }
        if (ber->parsed()) {
            OutputTarget out{b_out, {}};
            return cmd_ber(b_mod, b_scn, b_grid, b_symbols, b_lab, b_seed, out);
        }
        if (opp->parsed()) {
            OutputTarget out{o_out, {}};
            return cmd_opp_ber(o_mod, o_grid, o_symbols, o_target, o_snr, o_snr_opt->count() > 0,
                               o_seed, out);
        }
        if (thr->parsed()) {
            OutputTarget out{th_out, {}};
            return cmd_throughput(th_grid, th_seeds, th_pmax, th_density, th_nf, th_bw, th_k,
                                  th_bermax, th_bits, th_rs, th_place, th_basis, th_seed, out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
