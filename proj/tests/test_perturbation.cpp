#include <doctest.h>

#include <cmath>
#include <numbers>

#include "floquet_dce/dispersion.hpp"
#include "floquet_dce/perturbation.hpp"

using namespace fdce;

namespace {
const double g0 = 1.0 / std::numbers::pi;
}

TEST_CASE("zero drive gives the bare Friedrichs value")
{
    const ReducedParams rp{0.4, -0.2, 0.0, g0, 1.0};
    const PerturbativeResult r = perturb_creation(rp);
    CHECK(std::abs(r.zbar2 - (0.4 + sigma(cplx(0.6, 0.0), g0, Sheet::II))) < 1e-15);
}

TEST_CASE("uncoupled limit")
{
    const ReducedParams rp{0.5, 0.0, 0.2, 0.0, 1.0};
    const PerturbativeResult r = perturb_creation(rp);
    CHECK(std::abs(r.zbar2 - 0.46) < 1e-15);
    CHECK(std::abs(r.zbar2 - std::sqrt(0.21)) == doctest::Approx(0.0017).epsilon(0.02));
    CHECK(std::abs(perturb_annihilation(rp) + 0.46) < 1e-15);
}

TEST_CASE("dissipation and multimode amplification coexist")
{
    // omega0' = 0.2 rather than the window edge 0.25, where |w0' - wB'| = 1
    // puts the dissipative argument on the branch point and its Im vanishes.
    const ReducedParams rp{0.2, -0.75, 0.2, g0, 1.0};
    const PerturbativeResult r = perturb_creation(rp);
    CHECK(r.im_dissipation > 0.0);
    CHECK(r.im_multimode < 0.0);
    const PerturbativeResult edge = perturb_creation({0.25, -0.75, 0.2, g0, 1.0});
    CHECK(std::abs(edge.im_dissipation) < 1e-15);
    CHECK(edge.im_multimode < 0.0);
}

TEST_CASE("decomposition identity and sign of the multimode term")
{
    for (double wb : {0.0, -0.4, -0.75, -1.2})
        for (double w0 = 0.05; w0 < 2.5; w0 += 0.05) {
            const ReducedParams rp{w0, wb, 0.2, g0, 1.0};
            PerturbativeResult r;
            try {
                r = perturb_creation(rp);
            }
            catch (const NearDegenerateError&) {
                continue;
            }
            CHECK(std::abs(r.zbar2.imag() - (r.im_dissipation + r.im_multimode)) < 1e-12);
            if (std::abs(w0 + wb) < 1.0) CHECK(r.im_multimode <= 0.0);
        }
}

TEST_CASE("fourth-order convergence to the exact root without coupling")
{
    double err[2];
    int i = 0;
    for (double f0 : {0.05, 0.025}) {
        const ReducedParams rp{0.5, 0.0, f0, 0.0, 1.0};
        const cplx z2 = perturb_creation(rp).zbar2;
        const SolveResult s = solve_roots(rp, kPhysicalSheets, {z2});
        REQUIRE(s.roots.size() == 1);
        err[i++] = std::abs(s.roots[0].z - z2);
    }
    const double ratio = err[0] / err[1];
    CHECK(ratio >= 12.0);
    CHECK(ratio <= 20.0);
}

TEST_CASE("with coupling the error is dominated by the frozen self-energy")
{
    // zbar2 evaluates sigma at w0' instead of at the self-consistent root, so
    // even at f0 -> 0 it misses the Friedrichs root by sII(z0) - sII(w0').
    const ReducedParams r0{0.5, 0.0, 0.0, g0, 1.0};
    const cplx z0 = solve_roots(r0, kPhysicalSheets, {perturb_creation(r0).zbar2}).roots.at(0).z;
    const cplx shift = sigma(z0, g0, Sheet::II) - sigma(0.5, g0, Sheet::II);
    CHECK(std::abs(z0 - perturb_creation(r0).zbar2 - shift) < 1e-12);
    double prev = 0.0;
    for (double f0 : {0.05, 0.025, 0.0125}) {
        const ReducedParams rp{0.5, 0.0, f0, g0, 1.0};
        const cplx z2 = perturb_creation(rp).zbar2;
        const cplx z = solve_roots(rp, kPhysicalSheets, {z2}).roots.at(0).z;
        const double err = std::abs(z - z2);
        CHECK(err == doctest::Approx(std::abs(shift)).epsilon(0.02));
        // the f0-dependent part of the error is second order, not fourth
        const double part = std::abs(z - z2 - shift);
        if (prev > 0.0) CHECK(prev / part == doctest::Approx(4.0).epsilon(0.05));
        prev = part;
    }
}

TEST_CASE("near-degenerate denominator")
{
    // 2 w0' + sII(w0'-wB') - sII(w0'+wB') vanishes at w0' = 0 for wB' = 0
    CHECK_THROWS_AS(perturb_creation({0.0, 0.0, 0.2, g0, 1.0}), NearDegenerateError);
}

TEST_CASE("window intervals from band membership")
{
    WindowIntervals w = window_intervals(-0.75);
    CHECK(w.amp_lo == doctest::Approx(0.25));
    CHECK(w.amp_hi == doctest::Approx(1.75));
    CHECK(w.both_lo == 0.0);
    CHECK(w.both_hi == doctest::Approx(0.25));

    w = window_intervals(0.0);
    CHECK(w.amp_lo == doctest::Approx(1.0));
    CHECK(w.amp_hi == doctest::Approx(1.0));

    w = window_intervals(-2.0);
    CHECK(w.both_lo >= w.both_hi);
    CHECK_THROWS_AS(window_intervals(0.5), std::invalid_argument);

    CHECK(perturb_window_report({1.0, -0.75, 0.2, g0, 1.0}) == WindowClass::amplification_window);
    CHECK(perturb_window_report({0.1, -0.75, 0.2, g0, 1.0}) == WindowClass::both_resonant);
    CHECK(perturb_window_report({2.0, -0.75, 0.2, g0, 1.0}) == WindowClass::off_resonant);
    CHECK(to_string(WindowClass::both_resonant) == "both-resonant");
}
