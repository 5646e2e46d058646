#include "floquet_dce/bandoracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "floquet_dce/io.hpp"

namespace fdce {

namespace {

bool by_re_im(cplx a, cplx b)
{
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

double drift_of(const MatrixXc& X)
{
    const int m = static_cast<int>(X.rows()) / 2;
    const MatrixXc J = symplectic_metric(m).cast<cplx>();
    return (X.transpose() * J * X - J).cwiseAbs().rowwise().sum().maxCoeff();
}

double inf_norm(const MatrixXc& X) { return X.cwiseAbs().rowwise().sum().maxCoeff(); }

// Lab-frame generator pieces: L(t) = diag(A0, -A0) + f(t) c r^T.
struct LabSystem {
    Eigen::MatrixXd A0;
    Eigen::VectorXd c, r;
};

LabSystem lab_system(const ModelParams& p, const DiscretizedBand& band)
{
    const ReducedParams rp = reduce(p);
    if (band.N < 1 || std::abs(band.omegaBp - rp.omegaBp) > 1e-12 || std::abs(band.g - rp.g) > 1e-12)
        throw std::invalid_argument("band was not discretised for these parameters");
    const int n = band.N + 1;
    LabSystem s;
    s.A0 = Eigen::MatrixXd::Zero(n, n);
    s.A0(0, 0) = -p.omega0;
    for (int j = 0; j < band.N; ++j) {
        const double w = 0.5 * p.Omega + p.B * band.omegas[j];
        const double gb = p.B * band.gbar[j];
        s.A0(0, j + 1) = s.A0(j + 1, 0) = -gb;
        s.A0(j + 1, j + 1) = -w;
    }
    s.c = Eigen::VectorXd::Zero(2 * n);
    s.r = Eigen::VectorXd::Zero(2 * n);
    s.c(0) = -2.0;
    s.c(n) = 2.0;
    s.r(0) = s.r(n) = 1.0;
    return s;
}

}  // namespace

Eigen::MatrixXd symplectic_metric(int m)
{
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    J.topRightCorner(m, m).setIdentity();
    J.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
    return J;
}

MatrixXc build_restricted_floquet_matrix(const ReducedParams& rp, const DiscretizedBand& band)
{
    const int n = band.N + 1;
    MatrixXc L = MatrixXc::Zero(2 * n, 2 * n);
    L(0, 0) = -rp.omega0p;
    L(n, n) = rp.omega0p;
    for (int j = 1; j <= band.N; ++j) {
        const double gb = band.gbar[j - 1], w = band.omegas[j - 1];
        L(0, j) = L(j, 0) = -gb;
        L(j, j) = -w;
        L(n, n + j) = L(n + j, n) = gb;
        L(n + j, n + j) = w;
    }
    L(0, n) = L(n, 0) = cplx(0.0, -rp.f0);
    return L;
}

double symplectic_residual(const MatrixXc& L)
{
    const MatrixXc J = symplectic_metric(static_cast<int>(L.rows()) / 2).cast<cplx>();
    return inf_norm(J * L * J - L.transpose());
}

std::vector<cplx> diagonalize_restricted(const MatrixXc& L)
{
    Eigen::ComplexEigenSolver<MatrixXc> es(L, false);
    if (es.info() != Eigen::Success) throw EigensolverError("dense eigensolver did not converge");
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), by_re_im);
    return ev;
}

double pm_pairing_error(const std::vector<cplx>& ev)
{
    double worst = 0.0;
    for (cplx z : ev) {
        double best = std::numeric_limits<double>::infinity();
        for (cplx w : ev) best = std::min(best, std::abs(z + w));
        worst = std::max(worst, best);
    }
    return worst;
}

VectorXc eigenvector_near(const MatrixXc& L, cplx z, cplx* eigenvalue)
{
    const int m = static_cast<int>(L.rows());
    // a tiny offset keeps the shifted matrix invertible when z is already exact
    const cplx shift = z + cplx(1e-10, 1e-10) * std::max(1.0, std::abs(z));
    Eigen::PartialPivLU<MatrixXc> lu(L - shift * MatrixXc::Identity(m, m));
    VectorXc x = VectorXc::Ones(m);
    for (int it = 0; it < 4; ++it) {
        x = lu.solve(x);
        x /= x.norm();
    }
    if (eigenvalue) *eigenvalue = x.dot(L * x);  // Rayleigh quotient, x normalised
    return x;
}

cplx discrete_norm_product(const MatrixXc& L, cplx zbar)
{
    const int n = static_cast<int>(L.rows()) / 2;
    const VectorXc vb = eigenvector_near(L, zbar);
    const VectorXc v = eigenvector_near(L, -zbar);
    cplx sym = 0.0;
    for (int j = 0; j < n; ++j) sym += vb(n + j) * v(j) - vb(j) * v(n + j);
    return vb(n) * v(0) / sym;
}

Propagation propagate_fundamental(const ModelParams& p, const DiscretizedBand& band, double t_end,
                                  const PropagatorOptions& opt, const std::vector<double>& sample_times)
{
    validate(p);
    if (!(t_end > 0.0)) throw std::invalid_argument("propagation needs t_end > 0");
    if (opt.steps_per_period < 1) throw std::invalid_argument("steps_per_period must be positive");
    const LabSystem sys = lab_system(p, band);
    const int n = static_cast<int>(sys.A0.rows()), m = 2 * n;

    // Work in the eigenbasis of the undriven part, where it is diagonal and the
    // drive is a rank-one update handled by Sherman-Morrison.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sys.A0);
    const Eigen::MatrixXd& Q = es.eigenvectors();
    Eigen::VectorXd d(m);
    d << es.eigenvalues(), -es.eigenvalues();
    Eigen::VectorXd ct(m), rt(m);
    ct << Q.transpose() * sys.c.head(n), Q.transpose() * sys.c.tail(n);
    rt << Q.transpose() * sys.r.head(n), Q.transpose() * sys.r.tail(n);
    VectorXc t0 = VectorXc::Zero(m);
    t0.head(n) = Q.row(0).transpose().cast<cplx>();

    const cplx I(0.0, 1.0);
    MatrixXc X = MatrixXc::Identity(m, m);

    // plain complex products; std::complex operator* carries inf/nan recovery
    // that dominates the inner loops
    auto mul = [](cplx a, cplx b) {
        return cplx(a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real());
    };
    std::vector<cplx> e(m), dc(m), du(m);
    auto cayley = [&](double t_mid, double tau) {
        const double h = 0.5 * tau;
        const cplx alpha = I * h * p.f0 * std::sin(p.Omega * t_mid + p.theta);
        cplx denom = 1.0;
        for (int i = 0; i < m; ++i) {
            const cplx dinv = 1.0 / cplx(1.0, -h * d(i));
            e[i] = dinv * cplx(1.0, h * d(i));
            dc[i] = dinv * ct(i);
            du[i] = -alpha * dc[i];
            denom += rt(i) * du[i];
        }
        // column by column: x <- (D + u r^T)^-1 (x + i h d x + alpha c r^T x), D = 1 - i h d, u = -alpha c
        for (int j = 0; j < m; ++j) {
            cplx* x = X.col(j).data();
            if (alpha == 0.0) {
                for (int i = 0; i < m; ++i) x[i] = mul(e[i], x[i]);
                continue;
            }
            cplx s1 = 0.0;
            for (int i = 0; i < m; ++i) s1 += rt(i) * x[i];
            const cplx as1 = mul(alpha, s1);
            cplx s2 = 0.0;
            for (int i = 0; i < m; ++i) {
                x[i] = mul(e[i], x[i]) + mul(dc[i], as1);
                s2 += rt(i) * x[i];
            }
            const cplx k = s2 / denom;
            for (int i = 0; i < m; ++i) x[i] -= mul(du[i], k);
        }
    };
    const double cr = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - cr), w0 = -cr / (2.0 - cr);
    auto step = [&](double t, double h) {
        cayley(t + 0.5 * w1 * h, w1 * h);
        cayley(t + w1 * h + 0.5 * w0 * h, w0 * h);
        cayley(t + (w1 + w0) * h + 0.5 * w1 * h, w1 * h);
    };

    const double period = 2.0 * std::numbers::pi / p.Omega;
    const double hmax = period / opt.steps_per_period;
    Propagation out;
    out.t_end = t_end;
    std::vector<double> targets;
    for (double s : sample_times)
        if (s > 0.0 && s <= t_end) targets.push_back(s);
    std::sort(targets.begin(), targets.end());
    const std::size_t n_samples = targets.size();
    if (targets.empty() || targets.back() < t_end) targets.push_back(t_end);

    auto check = [&](double t) {
        const double drift = drift_of(X);
        const double rel = drift / std::max(1.0, inf_norm(X) * inf_norm(X));
        if (rel > opt.drift_abort)
            throw DriftError("symplectic drift " + std::to_string(rel) + " at t=" + std::to_string(t) +
                             "; increase steps_per_period (now " + std::to_string(opt.steps_per_period) + ")");
        out.drift = drift;
        out.relative_drift = rel;
    };

    double t = 0.0;
    if (!sample_times.empty() && sample_times.front() <= 0.0) {
        out.t.push_back(0.0);
        out.cavity.push_back(1.0);
    }
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double target = targets[i];
        const int k = std::max(1, static_cast<int>(std::ceil((target - t) / hmax - 1e-9)));
        const double h = (target - t) / k;
        for (int s = 0; s < k; ++s) {
            step(t + s * h, h);
            if (++out.steps % opt.drift_check_every == 0) check(t + (s + 1) * h);
        }
        t = target;
        if (i < n_samples) {
            out.t.push_back(t);
            out.cavity.push_back(t0.dot(X * t0));  // t0 is real
        }
    }
    check(t_end);

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    T.topLeftCorner(n, n) = Q;
    T.bottomRightCorner(n, n) = Q;
    out.S = T.cast<cplx>() * X * T.transpose().cast<cplx>();
    return out;
}

FloquetExponentSet monodromy_exponents(const ModelParams& p, const DiscretizedBand& band,
                                       const PropagatorOptions& opt)
{
    FloquetExponentSet r;
    r.period = 2.0 * std::numbers::pi / p.Omega;
    const Propagation prop = propagate_fundamental(p, band, r.period, opt);
    r.drift = prop.drift;
    Eigen::ComplexEigenSolver<MatrixXc> es(prop.S, true);
    if (es.info() != Eigen::Success) throw EigensolverError("monodromy eigensolver did not converge");
    const auto& mu = es.eigenvalues();
    r.multipliers.assign(mu.data(), mu.data() + mu.size());
    std::sort(r.multipliers.begin(), r.multipliers.end(), by_re_im);
    const cplx I(0.0, 1.0);
    for (cplx m : r.multipliers) r.exponents.push_back(-I * std::log(m) / r.period);
    for (cplx a : r.multipliers) {
        double best = std::numeric_limits<double>::infinity();
        for (cplx b : r.multipliers) best = std::min(best, std::abs(a * b - 1.0));
        r.pairing_error = std::max(r.pairing_error, best);
    }
    r.det_error = std::abs(prop.S.partialPivLu().determinant() - 1.0);
    Eigen::JacobiSVD<MatrixXc> svd(es.eigenvectors());
    const auto& sv = svd.singularValues();
    r.condition = sv(0) / sv(sv.size() - 1);
    r.defective = !(r.condition < 1e8);
    return r;
}

std::vector<cplx> hill_exponents(const ModelParams& p, const DiscretizedBand& band, int K)
{
    if (K < 0) throw std::invalid_argument("hill_exponents: K must be >= 0");
    const LabSystem sys = lab_system(p, band);
    const int n = static_cast<int>(sys.A0.rows()), m = 2 * n, H = 2 * K + 1;
    MatrixXc L0 = MatrixXc::Zero(m, m);
    L0.topLeftCorner(n, n) = sys.A0.cast<cplx>();
    L0.bottomRightCorner(n, n) = -sys.A0.cast<cplx>();
    const MatrixXc V = (sys.c * sys.r.transpose()).cast<cplx>();
    const cplx I(0.0, 1.0);
    // f(t) V = Lp e^{i Omega t} + Lm e^{-i Omega t}
    const MatrixXc Lp = V * (p.f0 * std::exp(I * p.theta) / (2.0 * I));
    const MatrixXc Lm = -V * (p.f0 * std::exp(-I * p.theta) / (2.0 * I));
    MatrixXc M = MatrixXc::Zero(m * H, m * H);
    for (int a = 0; a < H; ++a) {
        const int harm = a - K;
        M.block(a * m, a * m, m, m) = L0 - harm * p.Omega * MatrixXc::Identity(m, m);
        if (a > 0) M.block(a * m, (a - 1) * m, m, m) = Lp;
        if (a + 1 < H) M.block(a * m, (a + 1) * m, m, m) = Lm;
    }
    return diagonalize_restricted(M);
}

cplx reduce_modulo(cplx z, double period, cplx target)
{
    const double k = std::round((z.real() - target.real()) / period);
    return {z.real() - k * period, z.imag()};
}

DecayFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& y)
{
    if (t.size() != y.size() || t.size() < 3) throw std::invalid_argument("fit needs >= 3 samples");
    const double nn = static_cast<double>(t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double slope = (nn * sty - st * sy) / (nn * stt - st * st);
    const double icpt = (sy - slope * st) / nn;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        ss_res += std::pow(y[i] - (icpt + slope * t[i]), 2);
        ss_tot += std::pow(y[i] - sy / nn, 2);
    }
    DecayFit f;
    f.rate = -slope;
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
    f.t0 = t.front();
    f.t1 = t.back();
    f.accepted = f.r2 > 0.99;
    return f;
}

DecayFit fit_cavity_decay(const ModelParams& p, const DiscretizedBand& band, int samples,
                          const PropagatorOptions& opt)
{
    const double trec = band.N / (2.0 * p.B);
    const double t0 = 0.1 * trec, t1 = 0.5 * trec;
    std::vector<double> ts(samples);
    for (int i = 0; i < samples; ++i) ts[i] = t0 + (t1 - t0) * i / (samples - 1);
    const Propagation prop = propagate_fundamental(p, band, t1, opt, ts);
    std::vector<double> y;
    for (cplx a : prop.cavity) y.push_back(std::log(std::max(std::norm(a), 1e-300)));
    return fit_log_linear(prop.t, y);
}

ComparisonReport compare_with_effective(const ReducedParams& rp, const DiscretizedBand& band,
                                        const std::vector<Root>& roots)
{
    ComparisonReport rep;
    rep.N = band.N;
    std::vector<cplx> ev;
    bool need_matrix = false;
    const double tol = SolverOptions{}.stationary_tol;
    // with f0 = 0 the a* sector is the conjugate copy: both +-Im roots decay at the same rate
    auto decay_root = [&](const Root& r) { return rp.f0 == 0.0 && std::abs(r.z.imag()) > tol; };
    for (const Root& r : roots) need_matrix |= !decay_root(r);
    if (need_matrix) ev = diagonalize_restricted(build_restricted_floquet_matrix(rp, band));
    std::optional<DecayFit> fit;
    for (const Root& r : roots) {
        ComparisonEntry e;
        e.root = r;
        if (decay_root(r)) {
            if (!fit) {
                fit = fit_cavity_decay(expand(rp, 2.0 * rp.B), band);
                rep.notes.push_back("finite band spectrum is real; decay roots compared via propagation fit");
            }
            e.method = "propagation-fit";
            const double sgn = r.z.imag() > 0 ? 1.0 : -1.0;
            e.oracle = cplx(r.z.real(), sgn * 0.5 * fit->rate);
            e.distance = std::abs(std::abs(r.z.imag()) - 0.5 * fit->rate);
            e.matched = fit->accepted;
            if (!e.matched) rep.notes.push_back("decay fit rejected (R^2 = " + std::to_string(fit->r2) + ")");
        } else {
            e.method = "restricted-matrix";
            auto best = std::min_element(ev.begin(), ev.end(),
                                         [&](cplx a, cplx b) { return std::abs(a - r.z) < std::abs(b - r.z); });
            e.matched = best != ev.end();
            if (e.matched) {
                e.oracle = *best;
                e.distance = std::abs(*best - r.z);
            } else {
                rep.notes.push_back("unmatched root " + to_string(r.sheets));
            }
        }
        rep.entries.push_back(e);
    }
    return rep;
}

nlohmann::json to_json(const ComparisonReport& r)
{
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries)
        entries.push_back({{"solver", to_json(e.root.z)},
                           {"sheets", to_string(e.root.sheets)},
                           {"oracle", to_json(e.oracle)},
                           {"distance", e.distance},
                           {"method", e.method},
                           {"matched", e.matched}});
    return {{"schema_version", kSchemaVersion}, {"N", r.N}, {"entries", entries}, {"notes", r.notes}};
}

}  // namespace fdce
