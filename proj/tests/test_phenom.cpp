#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "floquet_dce/dispersion.hpp"
#include "floquet_dce/phenom.hpp"

using namespace fdce;

namespace {
const double gamma0 = 1.0 / std::numbers::pi;
}

TEST_CASE("comparison-model eigenvalues")
{
    auto [zm, zp] = phenom_eigenvalues({0.0, 0.2, gamma0});
    CHECK(std::abs(zm - cplx(0, -0.2)) < 1e-15);
    CHECK(zp.imag() == doctest::Approx(0.518310).epsilon(1e-6));
    CHECK(zp.real() == 0.0);

    std::tie(zm, zp) = phenom_eigenvalues({0.3, 0.0, 0.0});
    CHECK(std::abs(zm - 0.3) < 1e-15);
    CHECK(std::abs(zp + 0.3) < 1e-15);

    std::tie(zm, zp) = phenom_eigenvalues({50.0, 0.2, gamma0});
    CHECK(zm.imag() == doctest::Approx(gamma0 / 2).epsilon(1e-12));
    CHECK(zp.imag() == doctest::Approx(gamma0 / 2).epsilon(1e-12));

    CHECK_THROWS_AS(phenom_eigenvalues({0.0, 0.2, -1.0}), std::invalid_argument);
}

TEST_CASE("stationary points")
{
    auto s = phenom_stationary(0.2, gamma0);
    REQUIRE(s);
    CHECK(s->second == doctest::Approx(0.321966).epsilon(1e-6));
    CHECK(s->first == -s->second);
    s = phenom_stationary(0.2, 0.0);
    CHECK(s->second == doctest::Approx(0.2));
    s = phenom_stationary(0.2, 0.8);
    CHECK(s->second == doctest::Approx(0.447214).epsilon(1e-6));
    CHECK_FALSE(phenom_stationary(0.0, gamma0));
}

TEST_CASE("stationary points are zeros of Im z'_-")
{
    for (double f0 : {0.05, 0.2, 0.7})
        for (double gm : {0.0, 0.1, gamma0, 0.8}) {
            const auto s = phenom_stationary(f0, gm);
            const auto n = phenom_stationary_numeric(f0, gm);
            REQUIRE(s);
            REQUIRE(n);
            CHECK(std::abs(phenom_eigenvalues({s->second, f0, gm}).first.imag()) < 1e-12);
            CHECK(std::abs(phenom_eigenvalues({s->first, f0, gm}).first.imag()) < 1e-12);
            CHECK(std::abs(*n - s->second) < 1e-9);
        }
    CHECK_FALSE(phenom_stationary_numeric(0.0, gamma0));
}

TEST_CASE("bifurcation edges")
{
    auto e = phenom_bifurcation_edges(0.2, gamma0);
    CHECK(e.second == doctest::Approx(0.359155).epsilon(1e-6));
    CHECK(e.first == -e.second);
    CHECK(phenom_bifurcation_edges(0.2, 0.0).second == 0.2);
    CHECK(phenom_bifurcation_edges(0.0, 0.5).second == 0.25);
}

TEST_CASE("trace of the comparison generator")
{
    for (double w = -2.0; w <= 2.0; w += 0.01) {
        const auto [a, b] = phenom_eigenvalues({w, 0.2, gamma0});
        CHECK(std::abs(a.imag() + b.imag() - gamma0) < 1e-14);
    }
}

TEST_CASE("csv export")
{
    const std::string csv = phenom_csv({-0.5, 0.0, 0.5}, 0.2, gamma0);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "omega0_prime,branch,re_z,im_z");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 6);
}

TEST_CASE("flat-band limit of the microscopic model")
{
    // Band far wider than the features: sigma_II ~ i gamma/2 on both arguments,
    // so D ~ (z - i gamma/2)^2 - w0^2 + f0^2.  Note this is not the comparison
    // model's splitting (f0 + gamma/2); only the large-detuning plateau agrees.
    const double f0 = 0.2, B = 100.0;
    const double gr = std::sqrt(gamma0 / (2.0 * B));
    for (double w0 : {0.0, 0.1, 0.4}) {
        const ReducedParams rp{w0 / B, 0.0, f0 / B, gr, B};
        const cplx split = std::sqrt(cplx(w0 * w0 - f0 * f0, 0.0));
        const cplx limit = cplx(0, gamma0 / 2) + split;
        const SolveResult r = solve_roots(rp, kPhysicalSheets, {limit / B});
        REQUIRE(r.roots.size() == 1);
        CHECK(std::abs(B * r.roots[0].z - limit) < 0.1 * std::abs(limit));
        if (w0 > phenom_bifurcation_edges(f0, gamma0).second) {
            const auto ph = phenom_eigenvalues({w0, f0, gamma0});
            CHECK(std::abs(B * r.roots[0].z.imag() - ph.first.imag()) < 0.1 * ph.first.imag());
        }
    }
}
