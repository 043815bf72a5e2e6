// depol: command-line front end for the depolarization simulator.
//
// Subcommands:
//   depol algebra-check --n-max N
//   depol evolve -c config.json -o out/
//   depol sphere -c config.json -o out/
//   depol calibrate -c config.json -o out/
//   depol micro-validate -c config.json -o out/
//
// Exit codes: 0 pass, 1 invariant violation, 2 regime/fit warning.
// DEPOL_THREADS caps parallelism; outputs are byte-identical for any
// thread count.

#include "depol/algebra.hpp"
#include "depol/lindblad.hpp"
#include "depol/metrics.hpp"
#include "depol/micro.hpp"
#include "depol/sphere.hpp"
#include "depol/threading.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace depol;

namespace {

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " +
                                 e.what());
    }
    return j;
}

void write_file(const fs::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);  // LF endings everywhere
    out << contents;
}

DepolarizerRates parse_rates(const json& j) {
    const json& r = j.at("rates");
    return {r.at("gamma").get<double>(), r.at("gamma0").get<double>()};
}

TwoModeState parse_state(const json& s, int n_max) {
    const std::string type = s.at("type").get<std::string>();
    if (type == "fock")
        return fock_state(s.at("N").get<int>(), s.at("k").get<int>());
    if (type == "su2_coherent")
        return su2_coherent_state(
            s.at("N").get<int>(), s.at("theta").get<double>(),
            s.at("phi").get<double>(), s.at("psi").get<double>());
    if (type == "two_mode_coherent") {
        auto ap = s.at("alpha_plus").get<std::vector<double>>();
        auto am = s.at("alpha_minus").get<std::vector<double>>();
        TwoModeState st =
            two_mode_coherent_state({ap.at(0), ap.at(1)}, {am.at(0), am.at(1)},
                                    n_max);
        if (st.discarded_weight > 1e-6)
            std::fprintf(stderr,
                         "warning: coherent-state truncation discards "
                         "weight %.3g beyond n_max=%d\n",
                         st.discarded_weight, n_max);
        return st;
    }
    if (type == "mixed") {
        std::vector<std::pair<double, TwoModeState>> parts;
        for (const json& c : s.at("components"))
            parts.emplace_back(c.at("weight").get<double>(),
                               parse_state(c.at("state"), n_max));
        return mixed_state(parts);
    }
    throw std::runtime_error("unknown initial_state type: " + type);
}

std::vector<double> parse_time_grid(const json& j) {
    const json& g = j.at("time_grid");
    const std::string kind = g.at("kind").get<std::string>();
    const double t0 = g.at("t_min").get<double>();
    const double t1 = g.at("t_max").get<double>();
    const int n = g.at("points").get<int>();
    if (n < 2 || t1 <= t0)
        throw std::runtime_error("time_grid must be strictly increasing");
    std::vector<double> times(n);
    for (int i = 0; i < n; ++i) {
        const double u = double(i) / double(n - 1);
        if (kind == "log")
            times[i] = t0 * std::pow(t1 / t0, u);
        else if (kind == "linear")
            times[i] = t0 + (t1 - t0) * u;
        else
            throw std::runtime_error("time_grid.kind must be linear or log");
    }
    return times;
}

int cmd_algebra_check(int n_max, bool inject_fault) {
    if (n_max > 16) {
        std::fprintf(stderr, "algebra-check: n_max capped at 16\n");
        return 1;
    }
    double comm = 0.0, casimir = 0.0, ladder = 0.0;
    for (int N = 0; N <= n_max; ++N) {
        StokesMatrices s = stokes_matrices(N);
        if (inject_fault && N == n_max && N > 0) s.S3(0, 0) += 1e-6;
        const cplx i2(0.0, 2.0);
        comm = std::max(comm, (s.S1 * s.S2 - s.S2 * s.S1 - i2 * s.S3).norm());
        comm = std::max(comm, (s.S2 * s.S3 - s.S3 * s.S2 - i2 * s.S1).norm());
        comm = std::max(comm, (s.S3 * s.S1 - s.S1 * s.S3 - i2 * s.S2).norm());
        casimir = std::max(
            casimir, (s.S1 * s.S1 + s.S2 * s.S2 + s.S3 * s.S3 -
                      double(N) * double(N + 2) *
                          Mat::Identity(N + 1, N + 1))
                         .norm());
        ladder = std::max(ladder, (s.Splus - (s.S1 + cplx(0, 1) * s.S2)).norm());
    }
    const bool pass = comm <= 1e-12 && casimir <= 1e-10 && ladder <= 1e-12;
    json report = {{"n_max", n_max},
                   {"max_commutator_residual", comm},
                   {"max_casimir_residual", casimir},
                   {"max_ladder_residual", ladder},
                   {"pass", pass}};
    std::printf("%s\n", report.dump(2).c_str());
    return pass ? 0 : 1;
}

int cmd_evolve(const json& cfg, const fs::path& out_dir) {
    const DepolarizerRates rates = parse_rates(cfg);
    const int n_max = cfg.at("n_max").get<int>();
    const TwoModeState initial = parse_state(cfg.at("initial_state"), n_max);
    const std::vector<double> times = parse_time_grid(cfg);

    const std::size_t n = times.size();
    std::vector<std::array<double, 6>> rows(n);  // s0..s3, dop, purity
    parallel_for(n, [&](std::size_t i) {
        const TwoModeState st = evolve(initial, times[i], rates);
        const auto s = stokes_moments(st);
        rows[i] = {s[0], s[1], s[2], s[3], degree_of_polarization(st),
                   purity(st)};
    });

    std::string csv = "t,s0,s1,s2,s3,dop,purity\n";
    for (std::size_t i = 0; i < n; ++i) {
        csv += fmt17(times[i]);
        for (double v : rows[i]) csv += "," + fmt17(v);
        csv += "\n";
    }
    write_file(out_dir / "trajectory.csv", csv);

    json summary;
    summary["rates"] = {{"gamma", rates.gamma}, {"gamma0", rates.gamma0}};
    const double r_xy = coherence_rate(1, rates);
    summary["predicted"] = {{"r_xy", r_xy}, {"r_z", 2.0 * r_xy}};
    const char* names[3] = {"s1", "s2", "s3"};
    for (int c = 0; c < 3; ++c) {
        std::vector<double> mags;
        for (std::size_t i = 0; i < n; ++i) mags.push_back(std::abs(rows[i][c + 1]));
        bool positive = true;
        for (double v : mags) positive &= v > 0.0;
        if (!positive || n < 4) continue;
        const DecayFit fit = fit_decay_rate(times, mags);
        summary["fitted"][names[c]] = {{"rate", fit.rate},
                                       {"residual", fit.residual},
                                       {"exponential", fit.exponential}};
    }
    write_file(out_dir / "summary.json", summary.dump(2) + "\n");

    // Column-level invariants double as a self-check.
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i][4] < 0.0 || rows[i][4] > 1.0 + 1e-9) return 1;
        if (std::abs(rows[i][0] - rows[0][0]) > 1e-9) return 1;
    }
    return 0;
}

int cmd_sphere(const json& cfg, const fs::path& out_dir) {
    const DepolarizerRates rates = parse_rates(cfg);
    const int n_max = cfg.at("n_max").get<int>();
    const TwoModeState initial = parse_state(cfg.at("initial_state"), n_max);
    const std::vector<double> times = parse_time_grid(cfg);
    const json& outputs = cfg.at("outputs");
    const int s_max = outputs.at("sphere").at("s_max").get<int>();
    const bool want_grid =
        outputs.at("sphere").value("grid", true);
    const SphereGrid grid = SphereGrid::build(std::max(s_max, n_max));

    const MultipoleCoefficients c0 = state_multipoles(initial, grid);

    struct Snapshot {
        TwoModeState state;
        MultipoleCoefficients oracle, analytic;
        double discrepancy = 0.0;
    };
    std::vector<Snapshot> snaps(times.size());
    parallel_for(times.size(), [&](std::size_t i) {
        Snapshot& s = snaps[i];
        s.state = evolve(initial, times[i], rates);
        s.oracle = state_multipoles(s.state, grid);
        s.analytic = propagate_multipoles(c0, times[i], rates);
        for (const auto& [key, a] : s.analytic.entries)
            s.discrepancy = std::max(
                s.discrepancy,
                std::abs(a - s.oracle.at(key.S2 / 2.0, key.m2 / 2.0,
                                         key.mp2 / 2.0)));
    });

    json mj;
    mj["times"] = json::array();
    for (std::size_t i = 0; i < times.size(); ++i) {
        json entry;
        entry["t"] = times[i];
        entry["max_discrepancy"] = snaps[i].discrepancy;
        entry["measure"] =
            depolarization_measure(c0, rates, {}, times[i]);
        json list = json::array();
        for (const auto& [key, a] : snaps[i].analytic.entries) {
            const cplx o = snaps[i].oracle.at(key.S2 / 2.0, key.m2 / 2.0,
                                              key.mp2 / 2.0);
            list.push_back({{"S", key.S2 / 2.0},
                            {"m", key.m2 / 2.0},
                            {"mp", key.mp2 / 2.0},
                            {"analytic", {a.real(), a.imag()}},
                            {"oracle", {o.real(), o.imag()}}});
        }
        entry["coefficients"] = list;
        mj["times"].push_back(entry);

        if (want_grid) {
            std::string csv = "theta,phi,q\n";
            // psi-integrated Q marginal: diagonal blocks only.
            Eigen::MatrixXd q =
                Eigen::MatrixXd::Zero(grid.n_theta(), grid.n_phi());
            for (const auto& [key, rho] : snaps[i].state.blocks)
                if (key.first == key.second) q += su2_q_sphere(rho, grid);
            for (std::size_t a = 0; a < grid.n_theta(); ++a)
                for (std::size_t b = 0; b < grid.n_phi(); ++b)
                    csv += fmt17(grid.theta[a]) + "," + fmt17(grid.phi[b]) +
                           "," + fmt17(q(a, b)) + "\n";
            char name[32];
            std::snprintf(name, sizeof name, "sphere_%03zu.csv", i);
            write_file(out_dir / name, csv);
        }
    }
    write_file(out_dir / "multipoles.json", mj.dump(2) + "\n");

    double worst = 0.0;
    for (const auto& s : snaps) worst = std::max(worst, s.discrepancy);
    return worst <= 1e-7 ? 0 : 1;
}

int cmd_calibrate(const json& cfg, const fs::path& out_dir) {
    const DepolarizerRates rates = parse_rates(cfg);
    const int n_max = cfg.at("n_max").get<int>();
    const TwoModeState initial = parse_state(cfg.at("initial_state"), n_max);
    const std::vector<double> times = parse_time_grid(cfg);
    const SphereGrid grid = SphereGrid::build(n_max);

    std::vector<MultipoleCoefficients> series(times.size() + 1);
    series[0] = state_multipoles(initial, grid);
    parallel_for(times.size(), [&](std::size_t i) {
        series[i + 1] =
            state_multipoles(evolve(initial, times[i], rates), grid);
    });
    std::vector<double> all_times(1, 0.0);
    all_times.insert(all_times.end(), times.begin(), times.end());

    const Calibration cal = calibrate_exponents(all_times, series, rates);
    json report;
    report["k2"] = cal.has_k2 ? json(cal.k2) : json(nullptr);
    report["k1"] = cal.has_k1 ? json(cal.k1) : json(nullptr);
    report["residual"] = cal.residual;
    report["note"] =
        "k-values calibrated against the exact Fock evolution; the "
        "in-text one-photon rate constants quoted alongside the source "
        "equations are inconsistent with these factors and are not used.";
    write_file(out_dir / "kappa.json", report.dump(2) + "\n");
    const bool ok = (!cal.has_k2 || std::abs(cal.k2 - 8.0) <= 1e-6) &&
                    (!cal.has_k1 || std::abs(cal.k1 - 4.0) <= 1e-6);
    return ok ? 0 : 1;
}

int cmd_micro_validate(const json& cfg, const fs::path& out_dir) {
    const std::uint64_t seed = cfg.value("seed", std::uint64_t(0));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uphase(0.0, 2.0 * M_PI);

    std::vector<AtomConfig> atoms;
    for (const json& a : cfg.at("atoms")) {
        AtomConfig atom;
        atom.g_abs = a.at("g_abs").get<double>();
        atom.detuning = a.at("detuning").get<double>();
        atom.gamma_a = a.at("gamma_a").get<double>();
        atom.nbar = a.at("nbar").get<double>();
        atom.phase = a.contains("phase") ? a.at("phase").get<double>()
                                         : uphase(rng);
        atoms.push_back(atom);
    }
    const json micro = cfg.value("micro", json::object());
    const int n_max = micro.value("n_max", 1);

    bool all_zero = true;
    for (const AtomConfig& a : atoms) all_zero &= a.g_abs == 0.0;

    json report;
    report["seed"] = seed;
    report["phases"] = json::array();
    for (const AtomConfig& a : atoms) report["phases"].push_back(a.phase);

    int code = 0;
    if (all_zero) {
        report["gamma_predicted"] = 0.0;
        report["rate_fitted"] = 0.0;
        report["ratio"] = "both-zero";
        report["residual"] = 0.0;
    } else {
        std::vector<double> times;
        if (micro.contains("sim_times")) {
            times = micro.at("sim_times").get<std::vector<double>>();
        } else {
            times = default_sim_times(atoms);
            if (micro.contains("window")) {
                const double scale = micro.at("window").get<double>() / 0.3;
                for (double& t : times) t *= scale;
            }
        }
        const AdiabaticReport r = validate_adiabatic(atoms, n_max, times);
        report["gamma_effective"] = effective_gamma(atoms);
        report["gamma_predicted"] = r.predicted_rate;
        report["rate_fitted"] = r.fitted_rate;
        report["ratio"] = r.ratio;
        report["residual"] = r.fit_residual;
        report["regime_ok"] = r.regime_ok;
        if (!r.regime_ok || !r.exponential)
            code = 2;
        else if (r.ratio < 0.7 || r.ratio > 1.3)
            code = 1;
    }
    write_file(out_dir / "micro_report.json", report.dump(2) + "\n");
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum light depolarization simulator"};
    app.require_subcommand(1);

    int n_max = 4;
    bool inject_fault = false;
    CLI::App* alg = app.add_subcommand("algebra-check",
                                       "verify the su(2) Stokes algebra");
    alg->add_option("--n-max", n_max, "largest photon-number block");
    alg->add_flag("--inject-fault", inject_fault,
                  "negative control: corrupt one matrix entry")
        ->group("");  // test mode, hidden

    std::string config_path, out_path = ".";
    for (const char* name : {"evolve", "sphere", "calibrate", "micro-validate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "scenario JSON")
            ->required();
        sub->add_option("-o,--out", out_path, "output directory");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (alg->parsed()) return cmd_algebra_check(n_max, inject_fault);
        const json cfg = load_json(config_path);
        const fs::path out_dir(out_path);
        fs::create_directories(out_dir);
        if (app.got_subcommand("evolve")) return cmd_evolve(cfg, out_dir);
        if (app.got_subcommand("sphere")) return cmd_sphere(cfg, out_dir);
        if (app.got_subcommand("calibrate")) return cmd_calibrate(cfg, out_dir);
        if (app.got_subcommand("micro-validate"))
            return cmd_micro_validate(cfg, out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
