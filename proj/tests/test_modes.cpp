#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "floquet_dce/bandoracle.hpp"
#include "floquet_dce/io.hpp"
#include "floquet_dce/modes.hpp"

using namespace fdce;

namespace {
const double g0 = 1.0 / std::numbers::pi;
const cplx I(0.0, 1.0);

Root root_near(const ReducedParams& rp, SheetPair sp, cplx guess)
{
    const SolveResult r = solve_roots(rp, sp, {guess});
    REQUIRE(r.roots.size() == 1);
    return r.roots[0];
}
}  // namespace

TEST_CASE("amplitude ratios in the uncoupled limit")
{
    const ReducedParams rp{0.5, 0.0, 0.2, 0.0, 1.0};
    const Root r = root_near(rp, kPhysicalSheets, -0.45);
    CHECK(r.kind == ModeKind::annihilation);
    const AmplitudeRatios a = amplitude_ratios(r, rp);
    CHECK(std::abs(a.annihilation - I * 0.208713) < 1e-6);
    CHECK_FALSE(a.decoupled);

    const ReducedParams u{0.5, 0.0, 0.0, 0.0, 1.0};
    const AmplitudeRatios d = amplitude_ratios(root_near(u, kPhysicalSheets, -0.5), u);
    CHECK(d.decoupled);
    CHECK(d.annihilation == cplx(0.0, 0.0));
    CHECK(std::isnan(d.creation.real()));

    // the ratio vanishes continuously with the drive
    const ReducedParams s{0.5, 0.0, 1e-6, 0.0, 1.0};
    CHECK(std::abs(amplitude_ratios(root_near(s, kPhysicalSheets, -0.5), s).annihilation) < 1e-5);
}

TEST_CASE("paired roots have mirrored ratios")
{
    // creation ratio of (-z', swapped sheets) equals minus the annihilation ratio of z'
    for (double wb : {0.0, -0.75})
        for (double w0 : {0.2, 0.6, 1.3})
            for (SheetPair sp : {kPhysicalSheets, kFirstSheets, SheetPair{Sheet::I, Sheet::II}}) {
                const ReducedParams rp{w0, wb, 0.2, g0, 1.0};
                for (const Root& x : solve_roots(rp, sp).roots) {
                    if (x.z.imag() == 0.0) continue;
                    const Root p = classify(-x.z, swap(sp), rp);
                    const cplx rc = amplitude_ratios(p, rp).creation;
                    const cplx ra = amplitude_ratios(x, rp).annihilation;
                    CHECK(std::abs(rc + ra) < 1e-10 * std::max(1.0, std::abs(ra)));
                }
            }
}

TEST_CASE("normalisation product: closed forms")
{
    ReducedParams rp{0.5, 0.0, 0.2, 0.0, 1.0};
    const Root zb = root_near(rp, kPhysicalSheets, 0.45);
    CHECK(std::abs(normalization_product(zb, rp).real() - 1.0455447) < 1e-7);
    CHECK(std::abs(normalization_product(zb, rp) - (zb.z + 0.5) / (2.0 * zb.z)) < 1e-14);
    // the annihilation root is normalised through its creation partner
    const Root z = root_near(rp, kPhysicalSheets, -0.45);
    CHECK(std::abs(normalization_product(z, rp) - normalization_product(zb, rp)) < 1e-14);

    rp.f0 = 0.0;
    CHECK(std::abs(normalization_product(root_near(rp, kPhysicalSheets, 0.5), rp) - 1.0) < 1e-15);

    // undriven, coupled: [1 - dsigma/dz]^-1 on the minus argument.  (At
    // omega0' = 0 both factors vanish together and the ratio F2/F1 is 0/0.)
    const ReducedParams f{0.3, 0.0, 0.0, g0, 1.0};
    const Root fr = root_near(f, kPhysicalSheets, 0.3 + sigma(0.3, g0, Sheet::II));
    REQUIRE(fr.kind == ModeKind::creation);
    REQUIRE(std::abs(factor_minus(fr.z, f, fr.sheets)) < 1e-12);
    const cplx expect = 1.0 / (1.0 - sigma_derivative(fr.z, g0, Sheet::II));
    CHECK(std::abs(normalization_product(fr, f) - expect) < 1e-14);
}

TEST_CASE("normalisation product at an exceptional point")
{
    // g = 0: the bracket is 2 zbar'/(zbar' + w0'), which vanishes at the EP
    const ReducedParams rp{0.2, 0.0, 0.2, 0.0, 1.0};
    Root r = classify(0.0, kPhysicalSheets, rp);
    r.kind = ModeKind::creation;
    CHECK_THROWS_AS(normalization_product(r, rp), DegenerateModeError);
}

TEST_CASE("normalisation against discretised eigenvectors")
{
    // Bound states outside the band are eigenvectors of the finite matrix.
    for (double f0 : {0.0, 0.2}) {
        const ReducedParams rp{1.5, 0.0, f0, g0, 1.0};
        const Root zb = root_near(rp, kFirstSheets, 1.52);
        REQUIRE(zb.kind == ModeKind::creation);
        const cplx exact = normalization_product(zb, rp);
        double prev = 1.0;
        for (int N : {100, 400}) {
            const MatrixXc L = build_restricted_floquet_matrix(rp, make_band(N, g0));
            const double err = std::abs(discrete_norm_product(L, zb.z) - exact);
            CHECK(err < 1e-2);
            CHECK(err <= prev + 1e-12);
            prev = err;
        }
    }
}

TEST_CASE("band kernels match the discrete eigenvector")
{
    const int N = 400;
    const ReducedParams rp{1.5, 0.0, 0.2, g0, 1.0};
    const DiscretizedBand band = make_band(N, g0);
    const MatrixXc L = build_restricted_floquet_matrix(rp, band);
    const Root z = root_near(rp, kFirstSheets, -1.52);
    cplx ev;
    const VectorXc v = eigenvector_near(L, z.z, &ev);
    CHECK(std::abs(ev - z.z) < 1e-6);

    const auto amps = band_amplitudes(z, rp, band.k);
    REQUIRE(amps.size() == size_t(N));
    const double dk = std::sqrt(std::numbers::pi / N);
    const int n = N + 1;
    double worst = 0.0;
    for (int j = 0; j < N; ++j) {
        const cplx bp = v(1 + j) / v(0), bm = v(n + 1 + j) / v(n);
        worst = std::max(worst, std::abs(bp - amps[j].c_plus * dk) / std::abs(amps[j].c_plus * dk));
        worst = std::max(worst, std::abs(bm - amps[j].c_minus * dk) / std::abs(amps[j].c_minus * dk));
    }
    CHECK(worst < 1e-2);
    // and the cavity ratio is the discrete one
    CHECK(std::abs(v(n) / v(0) - amplitude_ratios(z, rp).annihilation) < 1e-2);
}

TEST_CASE("band amplitudes")
{
    const auto k = midpoint_kgrid(400);
    CHECK(k.size() == 400);
    CHECK(k[0] == doctest::Approx(std::numbers::pi / 800));

    const ReducedParams g_zero{0.5, 0.0, 0.2, 0.0, 1.0};
    CHECK(band_amplitudes(root_near(g_zero, kPhysicalSheets, 0.45), g_zero, k).empty());

    // a narrow resonance peaks where cos k meets Re(z' + wB')
    const ReducedParams rp{0.3, 0.0, 0.0, 0.1, 1.0};
    const Root r = root_near(rp, kPhysicalSheets, -0.3);
    const auto fine = midpoint_kgrid(4000);
    const auto amps = band_amplitudes(r, rp, fine);
    size_t best = 0;
    for (size_t j = 0; j < amps.size(); ++j)
        if (std::abs(amps[j].c_plus) > std::abs(amps[best].c_plus)) best = j;
    CHECK(std::abs(fine[best] - std::acos(r.z.real())) < 0.02);

    // a grid point on the pole is flagged
    bool flag = false;
    Root on;
    on.z = std::cos(k[10]);
    on.sheets = kPhysicalSheets;
    band_amplitudes(on, rp, k, &flag);
    CHECK(flag);
}

TEST_CASE("mode json")
{
    const ReducedParams rp{0.5, 0.0, 0.2, g0, 1.0};
    const Root r = solve_roots(rp, kPhysicalSheets).roots.at(0);
    const ModeCoefficients m = mode_coefficients(r, rp, midpoint_kgrid(16));
    const nlohmann::json j = mode_to_json(m);
    CHECK(j.at("schema_version") == kSchemaVersion);
    CHECK(j.at("band").size() == 16);
    const ModeCoefficients back = mode_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.root.z == m.root.z);
    CHECK(back.root.sheets == m.root.sheets);
    CHECK(back.norm_product == m.norm_product);
    CHECK(back.ratios.annihilation == m.ratios.annihilation);
    REQUIRE(back.band.size() == m.band.size());
    for (size_t i = 0; i < m.band.size(); ++i) {
        CHECK(back.band[i].c_plus == m.band[i].c_plus);
        CHECK(back.band[i].c_minus == m.band[i].c_minus);
    }
    CHECK(mode_to_json(back) == j);

    const ReducedParams g_zero{0.5, 0.0, 0.2, 0.0, 1.0};
    const ModeCoefficients e = mode_coefficients(root_near(g_zero, kPhysicalSheets, 0.45), g_zero, midpoint_kgrid(8));
    CHECK(mode_to_json(e).at("band").empty());

    const auto path = (std::filesystem::temp_directory_path() / "fdce_mode_test.json").string();
    export_mode(m, path);
    CHECK(mode_from_json(nlohmann::json::parse(read_text_file(path))).root.z == m.root.z);
    std::remove(path.c_str());
}
