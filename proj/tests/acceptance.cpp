// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "floquet_dce/bandoracle.hpp"
#include "floquet_dce/perturbation.hpp"
#include "floquet_dce/phenom.hpp"
#include "floquet_dce/scenarios.hpp"

using namespace fdce;

namespace {

const double g0 = 1.0 / std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
    double budget = 0.0;  // seconds; 0 = none
};

void note(Outcome& o, bool ok, const char* fmt, double a = 0, double b = 0, double c = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += buf;
    if (!ok) {
        o.pass = false;
        o.detail += " [x]";
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const CheckResult* check_named(const ScenarioReport& r, const std::string& prefix)
{
    for (const auto& c : r.checks)
        if (c.expectation.descriptor.rfind(prefix, 0) == 0) return &c;
    return nullptr;
}

ModelParams lab(double w0p, double f0, double g)
{
    ModelParams p;
    p.omega0 = 1.0 + w0p;
    p.Omega = 2.0;
    p.omegaB = 1.0;
    p.B = 1.0;
    p.f0 = f0;
    p.g = g;
    return p;
}

Outcome c1()
{
    Outcome o{true, "", 1.0};
    const double f0 = 0.2, gm = 1.0 / std::numbers::pi;
    const auto s = phenom_stationary(f0, gm);
    const auto n = phenom_stationary_numeric(f0, gm);
    const bool ok = s && n;
    note(o, ok && std::abs(s->second - 0.321966) < 5e-7, "closed form +-%.9f", ok ? s->second : NAN);
    note(o, ok && std::abs(*n - s->second) < 1e-9, "bisection differs by %.2e", ok ? std::abs(*n - s->second) : NAN);
    note(o, ok && std::abs(s->first + s->second) == 0.0, "symmetric pair");
    return o;
}

Outcome scenario_outcome(const std::string& name, double budget, const std::vector<std::string>& keys)
{
    Outcome o{true, "", budget};
    const ScenarioReport r = run_scenario(name);
    for (const auto& k : keys) {
        const CheckResult* c = check_named(r, k);
        if (!c) {
            note(o, false, ("missing check: " + k).c_str());
            continue;
        }
        note(o, c->pass, (k + " " + c->measured.dump()).c_str());
    }
    note(o, r.pass(), "all %g scenario checks pass", double(r.checks.size()));
    note(o, r.warnings.empty(), "%g warnings", double(r.warnings.size()));
    return o;
}

Outcome c4()
{
    Outcome o;
    const ReducedParams base{0.0, 0.0, 0.2, g0, 1.0};
    for (double w0 : {0.05, 0.10, 0.15}) {
        const ReducedParams rp = at_omega(base, w0);
        std::vector<Root> amp;
        for (const Root& r : solve_roots(rp, kFirstSheets).roots)
            if (r.stability == Stability::amplifying) amp.push_back(r);
        if (amp.empty()) {
            note(o, false, "no amplifying root at w0'=%.2f", w0);
            continue;
        }
        double prev = INFINITY, d400 = INFINITY;
        bool mono = true;
        for (int N : {100, 200, 400}) {
            const auto ev = diagonalize_restricted(build_restricted_floquet_matrix(rp, make_band(N, g0)));
            double worst = 0.0;
            for (const Root& r : amp) {
                double d = INFINITY;
                for (cplx e : ev) d = std::min(d, std::abs(e - r.z));
                worst = std::max(worst, d);
            }
            // below 1e-12 the comparison is at the roundoff floor
            if (worst > prev + 1e-12) mono = false;
            prev = worst;
            d400 = worst;
        }
        note(o, d400 < 1e-2 && mono, "w0'=%.2f: distance %.2e at N=400, non-increasing in N", w0, d400);
    }
    ReducedParams f{0.0, 0.0, 0.0, g0, 1.0};
    const double im = g0 * g0 / std::sqrt(1 - 2 * g0 * g0);
    const DecayFit fit = fit_cavity_decay(expand(f, 2.0), make_band(100, g0));
    note(o, fit.accepted && std::abs(fit.rate - 2 * im) < 0.05 * 2 * im, "decay fit %.6f vs 2 Im z' %.6f (R2 %.6f)",
         fit.rate, 2 * im, fit.r2);
    return o;
}

Outcome c5()
{
    Outcome o;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-3.0, 3.0);

    double sum = 0, prod = 0, refl = 0;
    for (int i = 0; i < 2000; ++i) {
        const cplx z(u(rng), u(rng));
        if (std::abs(z.imag()) < 1e-6) continue;
        const cplx a = sigma(z, g0, Sheet::I), b = sigma(z, g0, Sheet::II);
        const double s = std::max(1.0, std::abs(z));
        sum = std::max(sum, std::abs(a + b - 2 * g0 * g0 * z) / s);
        prod = std::max(prod, std::abs(a * b - std::pow(g0, 4)) / (s * s));
        refl = std::max(refl, std::abs(sigma(-z, g0, Sheet::I) + a) / s);
    }
    for (double x = -0.99; x < 1.0; x += 0.01)
        refl = std::max(refl, std::abs(sigma(-x, g0, Sheet::I) + sigma(x, g0, Sheet::II)));
    note(o, sum < 1e-12 && prod < 1e-12 && refl < 1e-12, "sigma sum %.1e, product %.1e, reflection %.1e", sum, prod,
         refl);

    double pair = 0;
    int npair = 0;
    const std::vector<SheetPair> sheets{kPhysicalSheets, kFirstSheets, {Sheet::I, Sheet::II}, {Sheet::II, Sheet::I}};
    for (double wb : {0.0, -0.75})
        for (double w0 = 0.05; w0 < 2.2; w0 += 0.15)
            for (SheetPair sp : sheets) {
                const ReducedParams rp{w0, wb, 0.2, g0, 1.0};
                for (const Root& r : solve_roots(rp, sp).roots) {
                    if (r.z.imag() == 0.0) continue;
                    pair = std::max(pair, std::abs(dispersion_value(-r.z, rp, swap(sp))));
                    ++npair;
                }
            }
    note(o, pair < 1e-10 && npair > 0, "+- pairing |D(-z')| %.1e over %g roots", pair, npair);

    double sym = 0;
    for (int i = 0; i < 30; ++i) {
        const ReducedParams rp{u(rng), u(rng) / 6, std::abs(u(rng)) / 10, std::abs(u(rng)) / 6, 1.0};
        sym = std::max(sym, symplectic_residual(build_restricted_floquet_matrix(rp, make_band(5 + 13 * i, rp.g, rp.omegaBp))));
    }
    note(o, sym < 1e-14, "JLJ - L^T residual %.1e", sym);

    double recip = 0, det = 0;
    std::uniform_real_distribution<double> v(0.0, 1.0);
    for (int i = 0; i < 6; ++i) {
        ModelParams p = lab(1.5 * v(rng) - 0.3, 0.3 * v(rng), 0.5 * v(rng));
        p.omegaB = 1.0 - 0.5 * v(rng);
        const FloquetExponentSet fe = monodromy_exponents(p, make_band(6, p.g, reduce(p).omegaBp));
        recip = std::max(recip, fe.pairing_error);
        det = std::max(det, fe.det_error);
    }
    note(o, recip < 1e-8 && det < 1e-8, "monodromy reciprocal pairing %.1e, |det-1| %.1e", recip, det);

    const ModelParams p = lab(1.5, 0.2, g0);
    const Propagation pr = propagate_fundamental(p, make_band(100, g0), 50 * 2 * std::numbers::pi / p.Omega);
    note(o, pr.drift < 1e-8, "drift over 50 periods %.1e (N=100, w0'=1.5, %g steps)", pr.drift, double(pr.steps));
    return o;
}

Outcome c6()
{
    Outcome o;
    double err[2];
    int i = 0;
    for (double f0 : {0.05, 0.025}) {
        const ReducedParams rp{0.5, 0.0, f0, g0, 1.0};
        const cplx z2 = perturb_creation(rp).zbar2;
        const auto roots = solve_roots(rp, kPhysicalSheets, {z2}).roots;
        err[i++] = roots.size() == 1 ? std::abs(roots[0].z - z2) : NAN;
    }
    const double ratio = err[0] / err[1];
    note(o, ratio >= 12 && ratio <= 20, "error ratio %.4f (errors %.3e, %.3e)", ratio, err[0], err[1]);

    // diagnostics (not pass conditions): the formula freezes sigma at the bare
    // frequency, so with coupling the error tends to a constant as f0 -> 0
    {
        const ReducedParams bare{0.5, 0.0, 0.0, g0, 1.0};
        const cplx z2 = perturb_creation(bare).zbar2;
        const auto r = solve_roots(bare, kPhysicalSheets, {z2}).roots;
        double off = NAN;
        for (const Root& x : r)
            if (x.kind == ModeKind::creation && std::abs(x.z - z2) < 0.1) off = std::abs(x.z - z2);
        note(o, true, "f0=0 offset |z0 - zbar2| %.3e", off);
        double e0[2];
        int k = 0;
        for (double f0 : {0.05, 0.025}) {
            const ReducedParams rp{0.5, 0.0, f0, 0.0, 1.0};
            const cplx z = perturb_creation(rp).zbar2;
            const auto s0 = solve_roots(rp, kPhysicalSheets, {z}).roots;
            e0[k++] = s0.size() == 1 ? std::abs(s0[0].z - z) : NAN;
        }
        note(o, true, "g=0 ratio %.2f", e0[0] / e0[1]);
    }

    double dec = 0;
    for (double wb : {0.0, -0.75})
        for (double w0 = 0.05; w0 < 2.5; w0 += 0.01) {
            try {
                const PerturbativeResult r = perturb_creation({w0, wb, 0.2, g0, 1.0});
                dec = std::max(dec, std::abs(r.zbar2.imag() - r.im_dissipation - r.im_multimode));
            }
            catch (const NearDegenerateError&) {
            }
        }
    note(o, dec < 1e-12, "Im decomposition residual %.1e", dec);
    return o;
}

Outcome c7()
{
    Outcome o;
    const ReducedParams rp{0.0, 0.0, 0.0, g0, 1.0};
    const double exact = g0 * g0 / std::sqrt(1 - 2 * g0 * g0);
    const auto roots = solve_roots(rp, kPhysicalSheets).roots;
    const Root* dec = nullptr;
    for (const Root& r : roots)
        // double root here (both factors vanish): Newton is only linear, so Re z' ~ 1e-11
        if (r.stability == Stability::decaying && std::abs(r.z.real()) < 1e-8) dec = &r;
    note(o, dec && std::abs(dec->z - cplx(0, exact)) < 1e-9, "Newton root %.12f i vs %.12f i",
         dec ? dec->z.imag() : NAN, exact);
    const DecayFit fit = fit_cavity_decay(expand(rp, 2.0), make_band(100, g0));
    note(o, fit.accepted && std::abs(0.5 * fit.rate - exact) < 0.05 * exact, "time-domain Im %.6f (R2 %.6f)",
         0.5 * fit.rate, fit.r2);
    return o;
}

}  // namespace

int main()
{
    struct Item {
        int id;
        std::function<Outcome()> run;
    };
    const std::vector<Item> items{
        {1, c1},
        {2, [] {
             return scenario_outcome("fig4", 60,
                                     {"exceptional: resonance bifurcation", "exceptional: parametric bifurcation",
                                      "stationary: |Im z'|"});
         }},
        {3, [] {
             return scenario_outcome("fig5", 120,
                                     {"exceptional: multimode bifurcation", "stationary: nonlocal stationary point",
                                      "mode: band amplitude"});
         }},
        {4, c4},
        {5, c5},
        {6, c6},
        {7, c7},
        {8, [] { return scenario_outcome("freq-reduction", 0, {"amplifying branch", "no amplifying branch"}); }},
    };
    int failed = 0;
    for (const auto& it : items) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = it.run();
        }
        catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double t = seconds_since(t0);
        if (o.budget > 0 && t > o.budget) {
            o.pass = false;
            o.detail += "; over the runtime budget";
        }
        if (!o.pass) ++failed;
        std::printf("%s criterion %d (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", it.id, t, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
