// SPDX-License-Identifier: Apache-2.0
//
// Acceptance run: one PASS/FAIL line per criterion. Pass --full to repeat the
// sweep and ordering criteria on the 0.01 m grid.

#include <fdacov/fdacov.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

using namespace fdacov;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail)
{
    std::printf("criterion %2d %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::vector<FrequencyPlan> default_plans(const Scenario& s)
{
    std::vector<FrequencyPlan> out;
    for (Scheme sc : all_schemes)
        out.push_back(make_plan(s, sc, 1));
    return out;
}

void focus_peak(const Scenario& s)
{
    const auto g = s.geometry();
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (const auto& plan : default_plans(s)) {
        const auto map = evaluate_grid(g, plan, s.bob, s.grid);
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < map.values.size(); ++i)
            if (map.valid[i] && map.values[i] > best) {
                best = map.values[i];
                arg = i;
            }
        const bool here = map.focus_index && arg == *map.focus_index &&
                          std::abs(map.values[*map.focus_index] - 1.0) <= 1e-9;
        ok = ok && here;
        detail += std::string(to_string(plan.scheme)) + ": max " + fmt(best) + " at (" +
                  fmt(map.spec.x(arg % map.nx)) + "," + fmt(map.spec.y(arg / map.nx)) + ") focus " +
                  (map.focus_index ? fmt(map.values[*map.focus_index]) : "none") + "; ";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail += "runtime " + fmt(secs) + " s (target < 30 s)";
    report(1, ok && secs < 30.0, detail);
}

const SweepRow& row(const std::vector<SweepRow>& rows, double value, Scheme scheme)
{
    for (const auto& r : rows)
        if (r.value == value && r.scheme == scheme)
            return r;
    throw std::logic_error("missing sweep row");
}

void trends(const Scenario& base, const std::vector<std::uint64_t>& seeds, const std::string& tag)
{
    const std::vector<Scheme> schemes(all_schemes.begin(), all_schemes.end());

    const std::vector<double> ns{16, 32, 64};
    const auto by_n = sweep(base, SweepParameter::n_antennas, ns, schemes, seeds);
    bool ok2 = true;
    std::string d2;
    for (Scheme sc : schemes) {
        d2 += std::string(to_string(sc)) + ":";
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const double f = row(by_n, ns[i], sc).mean_fraction;
            d2 += " " + fmt(f);
            if (i > 0 && !(f < row(by_n, ns[i - 1], sc).mean_fraction))
                ok2 = false;
        }
        d2 += "; ";
    }
    report(2, ok2, tag + d2);

    const std::vector<double> fs{0.25e6, 0.5e6, 1e6, 2e6};
    const auto by_f = sweep(base, SweepParameter::f_delta, fs, schemes, seeds);
    const auto g = base.geometry();
    const auto probe = evaluate_grid(g, lpa_plan(g), base.bob, base.grid);
    const double quantum = 1.0 / static_cast<double>(probe.valid_count);

    bool ok3 = true;
    std::string d3;
    double lo = 1.0, hi = 0.0;
    for (double f : fs) {
        lo = std::min(lo, row(by_f, f, Scheme::lpa).mean_fraction);
        hi = std::max(hi, row(by_f, f, Scheme::lpa).mean_fraction);
    }
    const bool lpa_flat = hi - lo <= quantum * (1.0 + 1e-9);
    ok3 = ok3 && lpa_flat;
    d3 += "lpa spread " + fmt(hi - lo) + " (quantum " + fmt(quantum) + "); ";
    double best_reduction = -1e300;
    Scheme best_scheme = Scheme::lpa;
    for (Scheme sc : {Scheme::linear_fda, Scheme::random_fda, Scheme::optimized_fda}) {
        d3 += std::string(to_string(sc)) + ":";
        bool nonincreasing = true;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const double f = row(by_f, fs[i], sc).mean_fraction;
            d3 += " " + fmt(f);
            if (i > 0 && f > row(by_f, fs[i - 1], sc).mean_fraction)
                nonincreasing = false;
        }
        const double first = row(by_f, fs.front(), sc).mean_fraction;
        const double reduction = (first - row(by_f, fs.back(), sc).mean_fraction) / first;
        d3 += std::string(nonincreasing ? "" : " (increases)") + " reduction " + fmt(reduction) + "; ";
        ok3 = ok3 && nonincreasing;
        if (reduction > best_reduction) {
            best_reduction = reduction;
            best_scheme = sc;
        }
    }
    ok3 = ok3 && best_scheme == Scheme::random_fda;
    d3 += "largest reduction: " + std::string(to_string(best_scheme));
    report(3, ok3, tag + d3);

    const double lpa = row(by_f, 1e6, Scheme::lpa).mean_fraction;
    const double lin = row(by_f, 1e6, Scheme::linear_fda).mean_fraction;
    const double rnd = row(by_f, 1e6, Scheme::random_fda).mean_fraction;
    report(4, rnd < lin && lin < lpa,
           tag + "random " + fmt(rnd) + " (" + std::to_string(seeds.size()) + " seeds), linear " + fmt(lin) +
               ", lpa " + fmt(lpa));
}

void hessian(const Scenario& s)
{
    const auto g = s.geometry();
    bool ok = true;
    std::string detail;
    for (const auto& plan : default_plans(s)) {
        const auto h = hessian_consistency(g, plan, s.bob, {1e-4, 1e-6});
        ok = ok && h.max_deviation <= 1e-4;
        detail += std::string(to_string(plan.scheme)) + " " + fmt(h.max_deviation) + "; ";
    }
    report(5, ok, detail + "tolerance 1e-4");
}

void optimizer(const Scenario& s)
{
    const auto g = s.geometry();
    const double h = s.f_delta_hz / 2.0;
    UniformSource rng(2024);
    double worst_grad = 0.0;
    for (int p = 0; p < 10; ++p) {
        std::vector<double> x(g.size());
        for (double& v : x)
            v = rng.open(-h, h);
        const auto og = objective_and_gradient(g, s.bob, x);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double step = 1e-4 * h;
            auto xp = x, xm = x;
            xp[k] += step;
            xm[k] -= step;
            const double fd = (objective_and_gradient(g, s.bob, xp).value - objective_and_gradient(g, s.bob, xm).value) /
                              (2.0 * step);
            num = std::max(num, std::abs(fd - og.gradient[k]));
            den = std::max(den, std::abs(og.gradient[k]));
        }
        worst_grad = std::max(worst_grad, num / den);
    }
    const bool ok_a = worst_grad <= 1e-5;

    const ArrayGeometry g8(8, s.carrier_hz);
    double oracle = 0.0;
    std::vector<double> v(8);
    for (unsigned mask = 0; mask < 256; ++mask) {
        for (std::size_t k = 0; k < 8; ++k)
            v[k] = (mask >> k) & 1u ? h : -h;
        oracle = std::max(oracle, objective_and_gradient(g8, s.bob, v).value);
    }
    const auto r8 = optimize_offsets(g8, s.bob, h, s.f_delta_hz, s.solver);
    const double rel8 = std::abs(r8.objective - oracle) / oracle;
    const bool ok_b = rel8 <= 1e-6;

    bool ok_c = true;
    for (std::size_t n : {8u, 16u, 32u, 64u})
        for (double f : {0.25e6, 0.5e6, 1e6, 2e6}) {
            const auto r = optimize_offsets(ArrayGeometry(n, s.carrier_hz), s.bob, f / 2.0, f, s.solver);
            ok_c = ok_c && r.objective >= r.start_objectives.at(0) && r.objective >= r.start_objectives.at(1);
        }
    report(6, ok_a && ok_b && ok_c,
           "(a) max gradient rel error " + fmt(worst_grad) + "; (b) N=8 rel gap " + fmt(rel8) +
               "; (c) objective >= zero and clipped-linear starts on 16 cases: " + (ok_c ? "yes" : "no"));
}

void covertness()
{
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double y = std::pow(10.0, -8.0 + 9.0 * i / 999.0);
        worst = std::max(worst, std::abs(xi(xi_inv(y)) - y));
    }
    const double eps[] = {0.1, 0.5, 1.0};
    const std::uint64_t ls[] = {10, 100, 1000};
    const double sw[] = {1e-10, 1e-9, 1e-8};
    const double pt[] = {0.01, 0.1, 1.0};
    auto q = [&](int a, int b, int c, int d) { return detection_threshold({eps[a], ls[b], sw[c], pt[d]}); };
    bool lattice = true;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d) {
                    const double here = q(a, b, c, d);
                    if (a < 2) lattice = lattice && here < q(a + 1, b, c, d);
                    if (b < 2) lattice = lattice && here > q(a, b + 1, c, d);
                    if (c < 2) lattice = lattice && here < q(a, b, c + 1, d);
                    if (d < 2) lattice = lattice && here > q(a, b, c, d + 1);
                }
    bool exact = true;
    for (double snr : {0.1, 1.976174250578086, 10.0, 1e3})
        for (std::uint64_t L : {1u, 100u, 10000u})
            exact = exact && covert_rate(snr, L, 0.5).rate == std::log2(1.0 + snr);
    report(7, worst <= 1e-10 && lattice && exact,
           "round-trip max abs error " + fmt(worst) + "; lattice " + (lattice ? "ok" : "broken") +
               "; delta=0.5 rate exact: " + (exact ? "yes" : "no"));
}

void rate_identity(const Scenario& s, const LinkBudget& budget)
{
    const auto g = s.geometry();
    bool ok = true;
    std::string detail;
    for (const auto& plan : default_plans(s)) {
        const auto map = evaluate_grid(g, plan, s.bob, s.grid);
        const auto region = extract_noncovert(map, s.threshold);
        const auto mc = monte_carlo_rate(map, region, budget, 100000, 7);
        const double expected = mc.rate_outside * (1.0 - region.area_fraction);
        const double z = std::abs(mc.mean_rate - expected) / mc.std_error;
        ok = ok && z <= 3.0;
        detail += std::string(to_string(plan.scheme)) + " " + fmt(mc.mean_rate) + " vs " + fmt(expected) + " (" +
                  fmt(z) + " SE); ";
    }
    report(8, ok, detail);
}

void inner_product(const Scenario& s)
{
    const auto g = s.geometry();
    const double beta = path_gain(g, s.bob.r);
    double worst = 0.0;
    for (const auto& plan : default_plans(s)) {
        const auto w = mrt_weights(channel_vector(g, plan, s.bob, PhaseReference::absolute));
        UniformSource rng(77);
        for (int i = 0; i < 200; ++i) {
            const auto c = CartesianPoint{rng.open(s.grid.x_min, s.grid.x_max), rng.open(s.grid.y_min, s.grid.y_max)};
            const auto p = cartesian_to_polar(c);
            const double direct = beampattern_at(g, plan, s.bob, p);
            const double route = static_cast<double>(g.size()) * beta * beta *
                                 beam_gain(channel_vector(g, plan, p, PhaseReference::absolute), w);
            worst = std::max(worst, std::abs(direct - route) / direct);
        }
    }
    report(9, worst <= 1e-12, "max rel error " + fmt(worst) + " over 800 points");
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void determinism()
{
    const std::string small =
        " -q -s grid.x_max_m=12 -s grid.y_max_m=12 -s grid.step_m=0.2 -s geometry.n_antennas=32"
        " -s sweep.n_values=16,32 -s sweep.f_delta_values_hz=5e5,1e6 -s sweep.seeds=1,2,3 -s mc.n_samples=20000";
    const std::vector<std::string> subs{"heatmap", "region", "sweep-n", "sweep-fdelta", "rate", "optimize", "selftest"};
    const auto root = fs::temp_directory_path() / "fdacov_acceptance";
    fs::remove_all(root);
    bool ok = true;
    std::size_t files = 0;
    std::string detail;
    for (const auto& sub : subs) {
        std::vector<fs::path> dirs;
        for (int run = 0; run < 2; ++run) {
            const auto dir = root / (sub + "_" + std::to_string(run));
            fs::create_directories(dir);
            const std::string cmd = std::string(FDACOV_CLI_PATH) + " " + sub + small + " -o " + dir.string() +
                                    " > " + (dir / "stdout.txt").string();
            if (std::system(cmd.c_str()) != 0) {
                ok = false;
                detail += sub + " exited nonzero; ";
            }
            dirs.push_back(dir);
        }
        for (const auto& e : fs::directory_iterator(dirs[0])) {
            ++files;
            if (slurp(e.path()) != slurp(dirs[1] / e.path().filename())) {
                ok = false;
                detail += sub + "/" + e.path().filename().string() + " differs; ";
            }
        }
    }
    fs::remove_all(root);
    report(10, ok, detail + std::to_string(subs.size()) + " subcommands, " + std::to_string(files) +
                       " files compared byte for byte");
}

} // namespace

int main(int argc, char** argv)
{
    bool full = false;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--full")
            full = true;
        else {
            std::cerr << "usage: acceptance [--full]\n";
            return 2;
        }
    }

    const ExperimentConfig cfg;
    const Scenario s = scenario(cfg);
    const auto budget = link_budget(cfg);

    focus_peak(s);
    if (full) {
        Scenario fine = s;
        fine.grid.step = 0.01;
        fine.grid.max_points = 20'000'000;
        trends(fine, cfg.seeds, "[0.01 m grid] ");
    } else {
        trends(s, cfg.seeds, "");
    }
    hessian(s);
    optimizer(s);
    covertness();
    rate_identity(s, budget);
    inner_product(s);
    determinism();

    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
