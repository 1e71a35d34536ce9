// Runs every acceptance criterion on the reference config and prints one PASS/FAIL line each.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "specshape/allocator.hpp"
#include "specshape/ber.hpp"
#include "specshape/config.hpp"
#include "specshape/link_budget.hpp"
#include "specshape/report.hpp"
#include "specshape/selftest.hpp"

using namespace specshape;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Verdict()>& check) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("[%s] C%d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double z_score(const BerPoint& p) {
    return (p.ber - p.theory) / std::sqrt(p.theory * (1 - p.theory) / static_cast<double>(p.bits));
}

const ReproConfig& config() {
    static const ReproConfig cfg = load_config(SPECSHAPE_REPRO_CONFIG);
    return cfg;
}

const FigureBundle& ber_figure() {
    static const FigureBundle b = make_ber_figure(config(), "dme");
    return b;
}

struct Row {
    std::string label;
    double d_intf = 0, ebn0 = 0, ber = 0, theory = 0;
    long long bits = 0, errors = 0;
};

std::vector<Row> ber_rows(const FigureBundle& b) {
    std::vector<Row> out;
    for (const auto& r : b.table("ber").rows) {
        out.push_back({r[0], std::stod(r[3]), std::stod(r[4]), std::stod(r[5]), std::stod(r[10]), std::stoll(r[6]),
                       std::stoll(r[7])});
    }
    return out;
}

Verdict c1() {
    const auto cmp = compare_solvers(1000, 20240607);
    std::ostringstream d;
    d << cmp.profiles << " profiles, active-set mismatches " << cmp.active_set_mismatches << ", max |dP|/P_T "
      << cmp.max_power_gap << " (tol 1e-9), " << fmt("%.3f", cmp.seconds) << " s (limit 10 s)";
    return {cmp.profiles == 1000 && cmp.active_set_mismatches == 0 && cmp.max_power_gap <= 1e-9 && cmp.seconds < 10.0,
            d.str()};
}

Verdict c2() {
    const double f = dme_pair_mean_power_factor(PulseTrainSpec::dme());
    return {std::abs(f - 0.22018) <= 1e-4, fmt("factor %.10f", f) + " vs 0.22018 +- 1e-4"};
}

Verdict c3() {
    const auto& cfg = config();
    const auto grid = cfg.make_grid();
    const auto a = solve_waterfill(scenario_request(cfg.scenario("dme"), grid, 1.0));
    const auto eligible = grid.usable_indices();
    std::ostringstream d;
    d << "n_active " << a.n_active << " of " << eligible.size() << " eligible; exact set equality required";
    return {a.active_indices() == eligible, d.str()};
}

Verdict c4() {
    const auto& cfg = config();
    const auto a = solve_waterfill(scenario_request(cfg.scenario("rect"), cfg.make_grid(), 1.0));
    std::ostringstream d;
    d << "n_active " << a.n_active << " (target 14, tolerance +-2), indices";
    for (int n : a.active_indices()) d << ' ' << n;
    return {std::abs(a.n_active - 14) <= 2, d.str()};
}

Verdict c5() {
    std::ostringstream d;
    bool ok = true;
    int shaped = 0;
    for (const auto& r : ber_rows(ber_figure())) {
        if (r.label != "shaped") continue;
        ++shaped;
        BerPoint p;
        p.ber = r.ber;
        p.theory = r.theory;
        p.bits = r.bits;
        const bool in = p.within_3sigma() && r.bits >= 1'000'000 && r.errors >= 100;
        ok = ok && in;
        d << fmt(" Eb/N0 %.2f dB:", r.ebn0) << fmt(" ber %.3g", r.ber) << fmt(" theory %.3g", r.theory)
          << fmt(" z %.1f", z_score(p)) << (in ? "" : "*") << ';';
    }
    return {ok && shaped == 6, std::to_string(shaped) + " points, all within 3 sigma required;" + d.str()};
}

Verdict c6() {
    const auto rows = ber_rows(ber_figure());
    std::vector<Row> top;  // flat point at the highest Eb/N0 for each interferer distance
    for (const auto& r : rows) {
        if (r.label != "flat") continue;
        bool replaced = false;
        for (auto& t : top) {
            if (t.d_intf == r.d_intf) {
                if (r.ebn0 > t.ebn0) t = r;
                replaced = true;
            }
        }
        if (!replaced) top.push_back(r);
    }
    std::sort(top.begin(), top.end(), [](const Row& a, const Row& b) { return a.d_intf > b.d_intf; });
    std::ostringstream d;
    bool ok = top.size() >= 2;
    for (std::size_t i = 0; i < top.size(); ++i) {
        const double ratio = top[i].ber / top[i].theory;
        ok = ok && ratio >= 10.0;
        if (i > 0) ok = ok && top[i].ber > top[i - 1].ber;
        d << fmt(" d_intf %.0f km:", top[i].d_intf / 1e3) << fmt(" ber %.3g", top[i].ber)
          << fmt(" = %.3g x AWGN;", ratio);
    }
    return {ok, "top Eb/N0 point, need >= 10x AWGN and worse at smaller d_intf;" + d.str()};
}

Verdict c7() {
    const auto& cfg = config();
    std::ostringstream d;
    bool ok = true;
    for (const auto& [group, expected] : {std::pair<std::string, double>{"dme", 1.0}, {"rect", 3.0}}) {
        const auto b = make_k_sweep_ber_figure(cfg, group);
        const auto& s = b.manifest.at("summary");
        const auto& minimal = s.at("minimal_attaining_k");
        const bool hit = !minimal.is_null() && minimal.get<double>() == expected;
        ok = ok && hit;
        d << ' ' << group << ": attaining K " << s.at("attaining_k").dump() << ", minimal "
          << (minimal.is_null() ? "none" : minimal.dump()) << " (expected " << expected << "), max |z| per K";
        for (const auto& row : b.table("summary").rows) d << ' ' << row[0] << ':' << fmt("%.3g", std::stod(row[4]));
        d << ';';
    }
    return {ok, "K grid " + nlohmann::json(cfg.allocator.k_values).dump() + ";" + d.str()};
}

Verdict c8() {
    const auto b = make_capacity_figure(config());
    double se = std::nan("");
    for (const auto& r : b.table("capacity").rows) {
        if (r[0] == "dme" && std::stod(r[1]) == 1.0) se = std::stod(r[4]);
    }
    double flat = std::nan("");
    for (const auto& r : b.table("reference").rows) {
        if (r[0] == "flat_computed" && r[1] == "dme") flat = std::stod(r[2]);
    }
    std::ostringstream d;
    d << fmt("SE %.4f bit/s/Hz", se) << " vs 6.42 +- 0.15; ratio to published 6.04 reference " << fmt("%.4f", se / 6.04)
      << fmt(", computed flat baseline %.4f", flat) << fmt(" (ratio %.4f)", se / flat);
    return {std::abs(se - 6.42) <= 0.15, d.str()};
}

// Property suites, condensed from the unit tests.
Verdict c9() {
    std::ostringstream d;
    bool ok = true;
    auto note = [&](const std::string& name, bool pass, const std::string& what) {
        ok = ok && pass;
        d << ' ' << name << (pass ? " ok" : " FAILED") << " (" << what << ");";
    };

    {  // Parseval for the DME pair
        const auto spec = PulseTrainSpec::dme();
        const double pi = std::numbers::pi;
        const double te = oracle::simpson([&](double t) { return std::pow(dme_pair_time(spec, t), 2); }, 0.0,
                                          2 * spec.delta_t_s, 40000);
        auto s2 = [&](double f) {
            const double c = std::cos(pi * f * spec.delta_t_s);
            return 8 * pi * spec.peak_power_w / spec.beta * std::exp(-4 * pi * pi * f * f / spec.beta) * c * c;
        };
        const double lim = std::sqrt(60.0 * spec.beta) / (2 * pi);
        const double fe = oracle::simpson(s2, -lim, lim, 400000);
        const auto psd = analytic_psd(spec, train_mean_power(spec));
        const double total = psd.band_power(psd.support_lo(), psd.support_hi());
        const double e1 = std::abs(te / fe - 1);
        const double e2 = std::abs(total / train_mean_power(spec) - 1);
        note("parseval", e1 <= 1e-6 && e2 <= 1e-6, "rel err " + fmt("%.2g", std::max(e1, e2)) + ", tol 1e-6");
    }
    {  // Refinement consistency of the subcarrier integrals
        const auto coarse = build_grid(64, 1e6);
        SubcarrierGrid fine;
        fine.n_subcarriers = 128;
        fine.total_bandwidth_hz = 1e6;
        fine.spacing_hz = coarse.spacing_hz / 2;
        for (int n = 1; n <= 64; ++n) {
            fine.centers_hz.push_back(coarse.center(n) - coarse.spacing_hz / 4);
            fine.centers_hz.push_back(coarse.center(n) + coarse.spacing_hz / 4);
        }
        double worst = 0.0;
        for (const auto& spec : {PulseTrainSpec::dme(500e3), PulseTrainSpec::rectangular(-500e3)}) {
            const auto psd = analytic_psd(spec, 1e-13);
            const auto a = integrate_interference(coarse, {psd});
            const auto b = integrate_interference(fine, {psd});
            for (int n = 1; n <= 64; ++n) {
                const double kids = b.interference_w[2 * n - 2] + b.interference_w[2 * n - 1];
                worst = std::max(worst, std::abs(a.interference_w[n - 1] - kids) / std::max(kids, 1e-300));
            }
        }
        note("refinement", worst <= 1e-9, "max rel err " + fmt("%.2g", worst) + ", tol 1e-9");
    }
    {  // Scale covariance and KKT on random instances
        std::mt19937_64 rng(31);
        int kkt_fail = 0, scale_fail = 0;
        for (int t = 0; t < 300; ++t) {
            const auto req = random_request(rng);
            const auto a = solve_waterfill(req);
            if (!check_kkt(a, req).ok) ++kkt_fail;
            auto s = req;
            const double c = 1e3;
            s.total_power_w *= c;
            for (double& v : s.profile.interference_w) v *= c;
            s.profile.noise_density_w_per_hz *= c;
            s.profile.noise_per_subcarrier_w *= c;
            const auto b = solve_waterfill(s);
            bool same = b.active == a.active;
            for (std::size_t n = 0; same && n < a.powers_w.size(); ++n) {
                same = std::abs(b.powers_w[n] - c * a.powers_w[n]) <= 1e-9 * s.total_power_w;
            }
            if (!same) ++scale_fail;
        }
        note("kkt", kkt_fail == 0, std::to_string(kkt_fail) + "/300 violations");
        note("scale-covariance", scale_fail == 0, std::to_string(scale_fail) + "/300 violations");
    }
    {  // Determinism and CI honesty of the Monte-Carlo engine
        const auto& cfg = config();
        auto s = cfg.scenario("dme");
        s.d_tx_rx_m = 150e3;
        const auto sys = make_shaped_system(s, cfg.make_grid(), 1.0, cfg.ber.oversampling);
        StoppingRule rule;
        rule.min_bits = 200'000;
        rule.max_bits = 800'000;
        const auto a = run_ber_point(sys, rule, 9, 0, 1);
        const auto b = run_ber_point(sys, rule, 9, 0, 2);
        const auto c = run_ber_point(sys, rule, 9, 0, 1);
        note("determinism", a.errors == b.errors && a.bits == b.bits && a.errors == c.errors,
             "threads 1 and 2, repeated seed");

        auto quiet = s;
        quiet.interferers.clear();
        quiet.d_tx_rx_m = 180e3;
        const auto qsys = make_shaped_system(quiet, cfg.make_grid(), 1.0, 1);
        StoppingRule small;
        small.min_bits = 60'000;
        small.max_bits = 240'000;
        int covered = 0;
        for (int run = 0; run < 100; ++run) {
            const auto p = run_ber_point(qsys, small, 5000 + run, 0);
            if (std::abs(p.ber - p.theory) <= p.ci95) ++covered;
        }
        note("ci-honesty", covered >= 90, std::to_string(covered) + "/100 CI95 cover the exact BER, need >= 90");
    }
    return {ok, d.str()};
}

}  // namespace

int main() {
    std::printf("reference config %s (hash %s)\n", SPECSHAPE_REPRO_CONFIG, config().hash().c_str());
    report(1, "solver-oracle equivalence", c1);
    report(2, "DME mean-power factor", c2);
    report(3, "DME flankers activate every eligible subcarrier", c3);
    report(4, "rectangular flankers leave 14 subcarriers", c4);
    report(5, "shaped system attains AWGN under DME (K = 1)", c5);
    report(6, "fixed-band baseline shows an interference floor", c6);
    report(7, "minimal AWGN-attaining K", c7);
    report(8, "spectral efficiency at 60 km / 60 km", c8);
    report(9, "property suites", c9);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
