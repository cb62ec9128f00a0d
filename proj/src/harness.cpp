#include "pertlab/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "pertlab/dense.hpp"
#include "pertlab/eigensolve.hpp"
#include "pertlab/errors.hpp"
#include "pertlab/parallel.hpp"
#include "pertlab/spectral_stats.hpp"
#include "pertlab/theory.hpp"

namespace pertlab {

using nlohmann::json;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    // least-squares slope of log y against log x
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Spectrum perturbed_spectrum(const LimitModel& model, const SampleConfig& cfg) {
    PerturbationSample s = sample_perturbation(model, cfg);
    if (s.complex_entries) return eig_hermitian(perturbed_matrix_complex(s));
    return eig_sym(perturbed_matrix(std::move(s)));
}

}  // namespace

Regime regime_parse(const std::string& name) {
    if (name == "perturbative") return Regime::Perturbative;
    if (name == "critical") return Regime::Critical;
    if (name == "semi") return Regime::Semi;
    if (name == "semi-fine") return Regime::SemiFine;
    throw ConfigError("unknown regime '" + name + "'");
}

std::string regime_str(Regime r) {
    switch (r) {
        case Regime::Perturbative: return "perturbative";
        case Regime::Critical: return "critical";
        case Regime::Semi: return "semi";
        case Regime::SemiFine: return "semi-fine";
    }
    return "?";
}

TestFunction PhiSpec::build() const {
    if (kind == Kind::Cauchy) return TestFunction::cauchy(z);
    return TestFunction::bump(center, halfwidth);
}

std::string PhiSpec::str() const {
    std::ostringstream os;
    if (kind == Kind::Cauchy)
        os << "cauchy(z=" << z.real() << (z.imag() >= 0 ? "+" : "") << z.imag() << "i)";
    else
        os << "bump(c=" << center << ",h=" << halfwidth << ")";
    return os.str();
}

void RegimeSpec::validate() const {
    if (trials < 0) throw ConfigError("trials must be >= 0");
    if (n_list.empty()) throw ConfigError("empty n list");
    for (int n : n_list)
        if (n < 1) throw ConfigError("n must be >= 1");
    if (!(c > 0.0)) throw ConfigError("c must be > 0");
    switch (regime) {
        case Regime::Perturbative:
            if (!(alpha > 1.0)) throw ConfigError("perturbative regime requires alpha > 1");
            break;
        case Regime::Critical:
            if (alpha != 1.0) throw ConfigError("critical regime requires alpha = 1");
            break;
        case Regime::Semi:
            if (!(alpha > 0.0 && alpha < 1.0))
                throw ConfigError("semi regime requires alpha in (0,1)");
            break;
        case Regime::SemiFine:
            if (!(alpha > 1.0 / 3.0 && alpha < 1.0))
                throw ConfigError("semi-fine regime requires alpha in (1/3,1)");
            break;
    }
    if (phis.empty()) throw ConfigError("no test functions given");
}

RegimeSpec RegimeSpec::from_json(const std::string& text) {
    RegimeSpec spec;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("bad JSON: ") + e.what());
    }
    try {
        spec.regime = regime_parse(j.at("regime").get<std::string>());
        spec.model = ExampleId::parse(j.at("model").get<std::string>());
        if (j.at("n").is_array())
            spec.n_list = j.at("n").get<std::vector<int>>();
        else
            spec.n_list = {j.at("n").get<int>()};
        spec.c = j.value("c", 1.0);
        spec.alpha = j.at("alpha").get<double>();
        spec.trials = j.value("trials", 100);
        spec.seed = j.value("seed", std::uint64_t{1});
        spec.stderr_cap = j.value("stderr_cap", 0.0);
        if (j.contains("law")) spec.law = entry_law_parse(j["law"].get<std::string>());
        spec.phis.clear();
        if (j.contains("z"))
            for (const auto& zz : j["z"]) {
                PhiSpec p;
                p.kind = PhiSpec::Kind::Cauchy;
                p.z = Complex(zz.at(0).get<double>(), zz.at(1).get<double>());
                spec.phis.push_back(p);
            }
        if (j.contains("bumps"))
            for (const auto& b : j["bumps"]) {
                PhiSpec p;
                p.kind = PhiSpec::Kind::Bump;
                p.center = b.at("center").get<double>();
                p.halfwidth = b.at("halfwidth").get<double>();
                spec.phis.push_back(p);
            }
        if (spec.phis.empty()) spec.phis.push_back(PhiSpec{});
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad regime config: ") + e.what());
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    spec.validate();
    return spec;
}

ExperimentReport run_regime(const RegimeSpec& spec, const QuadratureConfig& q) {
    spec.validate();
    const double t_start = now_ms();
    ExperimentReport report;
    report.spec = spec;
    if (spec.trials == 0) return report;  // empty report, not an error

    const LimitModel model = make_model(spec.model);
    const SampledCurve Fcurve = sample_F(model, q);
    const FieldCovariance cov{model, q};

    std::vector<TestFunction> phis;
    std::vector<Complex> int_phi_prime_F;  // int phi'(s) F(s) ds per phi
    for (const auto& ps : spec.phis) {
        phis.push_back(ps.build());
        Complex acc{};
        for (std::size_t k = 0; k < Fcurve.nodes.size(); ++k)
            acc += Fcurve.weights[k] * phis.back().deriv(1, Fcurve.nodes[k]) * Fcurve.values[k];
        int_phi_prime_F.push_back(acc);
    }

    for (std::size_t ni = 0; ni < spec.n_list.size(); ++ni) {
        const int n = spec.n_list[ni];
        SampleConfig cfg;
        cfg.n = n;
        cfg.c = spec.c;
        cfg.alpha = spec.alpha;
        cfg.law = spec.law;
        const double eps = cfg.eps();
        const double t_cell = now_ms();

        const Spectrum base = spectrum_from_diagonal(build_diagonal(model, n));
        std::vector<std::vector<Complex>> stats(phis.size(),
                                                std::vector<Complex>(spec.trials));
        std::string cell_error;
        std::mutex err_mtx;

        parallel_for(0, spec.trials, default_threads(), [&](int trial) {
            SampleConfig tc = cfg;
            tc.seed = spec.seed + ni * static_cast<std::uint64_t>(spec.trials) + trial;
            try {
                const Spectrum pert = perturbed_spectrum(model, tc);
                const SignedSpectralDiff diff = make_diff(base, pert, eps);
                for (std::size_t pi = 0; pi < phis.size(); ++pi) {
                    const Complex pair = pair_test_function(diff, phis[pi]);
                    Complex stat;
                    switch (spec.regime) {
                        case Regime::Perturbative:
                        case Regime::Critical: stat = (n / eps) * pair; break;
                        case Regime::Semi: stat = pair / (eps * eps); break;
                        case Regime::SemiFine:
                            stat = (n / eps) * (pair + eps * eps * int_phi_prime_F[pi]);
                            break;
                    }
                    stats[pi][trial] = stat;
                }
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lock(err_mtx);
                cell_error = e.what();
            }
        });

        for (std::size_t pi = 0; pi < phis.size(); ++pi) {
            ReportCell cell;
            cell.n = n;
            cell.eps = eps;
            cell.phi = spec.phis[pi].str();
            cell.error = cell_error;
            std::vector<double> re(spec.trials), im(spec.trials);
            for (int t = 0; t < spec.trials; ++t) {
                re[t] = stats[pi][t].real();
                im[t] = stats[pi][t].imag();
            }
            cell.re = sample_moments(re);
            cell.im = sample_moments(im);
            if (spec.trials >= 3) {
                cell.ks_re = ks_distance_normal(re);
                cell.ks_im = ks_distance_normal(im);
            }
            Complex mean_theory{};
            switch (spec.regime) {
                case Regime::Perturbative: break;
                case Regime::Critical: mean_theory = -spec.c * int_phi_prime_F[pi]; break;
                case Regime::Semi: mean_theory = -int_phi_prime_F[pi]; break;
                case Regime::SemiFine: break;
            }
            cell.theory_mean_re = mean_theory.real();
            cell.theory_mean_im = mean_theory.imag();
            if (spec.regime != Regime::Semi) {
                const auto [vr, vi] = cov.component_variances(phis[pi]);
                cell.theory_var_re = vr;
                cell.theory_var_im = vi;
                cell.theory_var_total = cov.sesquilinear(phis[pi], phis[pi]).real();
            }
            if (spec.stderr_cap > 0.0)
                cell.stderr_exceeds_cap = cell.re.stderr_mean() > spec.stderr_cap ||
                                          cell.im.stderr_mean() > spec.stderr_cap;
            cell.runtime_ms = now_ms() - t_cell;
            report.cells.push_back(std::move(cell));
        }
    }
    report.runtime_ms = now_ms() - t_start;
    return report;
}

std::string ExperimentReport::to_json() const {
    json j;
    j["regime"] = regime_str(spec.regime);
    j["model"] = spec.model.str();
    j["c"] = spec.c;
    j["alpha"] = spec.alpha;
    j["trials"] = spec.trials;
    j["seed"] = spec.seed;
    j["law"] = entry_law_str(spec.law);
    j["runtime_ms"] = runtime_ms;
    j["cells"] = json::array();
    for (const auto& c : cells) {
        json jc;
        jc["n"] = c.n;
        jc["eps"] = c.eps;
        jc["phi"] = c.phi;
        jc["trials"] = c.re.n;
        jc["mean_re"] = c.re.mean;
        jc["mean_im"] = c.im.mean;
        jc["stderr_mean_re"] = c.re.stderr_mean();
        jc["stderr_mean_im"] = c.im.stderr_mean();
        jc["var_re"] = c.re.var;
        jc["var_im"] = c.im.var;
        jc["stderr_var_re"] = c.re.stderr_var();
        jc["stderr_var_im"] = c.im.stderr_var();
        jc["ks_re"] = c.ks_re;
        jc["ks_im"] = c.ks_im;
        jc["theory_mean_re"] = c.theory_mean_re;
        jc["theory_mean_im"] = c.theory_mean_im;
        jc["theory_var_re"] = c.theory_var_re;
        jc["theory_var_im"] = c.theory_var_im;
        jc["theory_var_total"] = c.theory_var_total;
        jc["runtime_ms"] = c.runtime_ms;
        jc["stderr_exceeds_cap"] = c.stderr_exceeds_cap;
        if (!c.error.empty()) jc["error"] = c.error;
        j["cells"].push_back(jc);
    }
    return j.dump(2);
}

// ---------------------------------------------------------------------------

Figure figure_parse(const std::string& name) {
    if (name == "fig1") return Figure::Fig1;
    if (name == "fig2") return Figure::Fig2;
    if (name == "fig3") return Figure::Fig3;
    if (name == "fig4") return Figure::Fig4;
    throw ConfigError("unknown figure '" + name + "' (want fig1..fig4)");
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << std::setprecision(12);
    for (std::size_t i = 0; i < ds.columns.size(); ++i)
        out << (i ? "," : "") << ds.columns[i];
    out << "\n";
    for (const auto& row : ds.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

namespace {

ExampleId figure_model(Figure fig, double ell) {
    ExampleId id;
    switch (fig) {
        case Figure::Fig1:
            id.kind = ExampleId::Kind::UniformBand;
            id.ell = ell;
            id.m = 1.0;
            break;
        case Figure::Fig2:
            id.kind = ExampleId::Kind::TriangularWigner;
            id.m = 1.0;
            break;
        case Figure::Fig3:
            // diagonal-free: the Stieltjes comparison isolates the
            // deterministic term B, and the A_n noise scales with m
            id.kind = ExampleId::Kind::TriangularWigner;
            id.m = 0.0;
            break;
        case Figure::Fig4:
            id.kind = ExampleId::Kind::ParabolicWigner;
            id.m = 1.0;
            break;
    }
    return id;
}

}  // namespace

Dataset figure_dataset(Figure fig, int n, double alpha, std::uint64_t seed, double ell,
                       const QuadratureConfig& q) {
    const ExampleId id = figure_model(fig, ell);
    const LimitModel model = make_model(id);
    SampleConfig cfg;
    cfg.n = n;
    cfg.alpha = alpha;
    cfg.seed = seed;
    const double eps = cfg.eps();

    const Spectrum base = spectrum_from_diagonal(build_diagonal(model, n));
    const Spectrum pert = perturbed_spectrum(model, cfg);
    const SignedSpectralDiff diff = make_diff(base, pert, eps);

    Dataset ds;
    if (fig == Figure::Fig3) {
        ds.name = "fig3";
        ds.columns = {"E", "empirical_re", "empirical_im", "theory_re", "theory_im"};
        const SampledCurve F = sample_F(model, q);
        const int npts = 81;
        const double lo = model.support.lo - 1.0, hi = model.support.hi + 1.0;
        for (int k = 0; k < npts; ++k) {
            const double E = lo + (hi - lo) * k / (npts - 1);
            const Complex z(E, 1.0);
            const Complex emp = delta_G(diff, z) / (eps * eps);
            const Complex th = B_via_F(F, z);
            ds.rows.push_back({E, emp.real(), emp.imag(), th.real(), th.imag()});
        }
        return ds;
    }

    ds.name = fig == Figure::Fig1 ? "fig1" : (fig == Figure::Fig2 ? "fig2" : "fig4");
    ds.columns = {"s", "empirical", "theory"};
    const double W = model.support.width();
    const double lo = model.support.lo + 0.05 * W, hi = model.support.hi - 0.05 * W;
    const int npts = 361;
    for (int k = 0; k < npts; ++k) {
        const double s = lo + (hi - lo) * k / (npts - 1);
        ds.rows.push_back({s, signed_cdf_diff(diff, s), closed_form_F(id, s)});
    }
    return ds;
}

Dataset figure_histogram(Figure fig, int n, double alpha, std::uint64_t seed, int bins) {
    if (fig != Figure::Fig2 && fig != Figure::Fig4)
        throw ConfigError("figure_histogram: only fig2/fig4 have density panels");
    const ExampleId id = figure_model(fig, 0.2);
    const LimitModel model = make_model(id);
    SampleConfig cfg;
    cfg.n = n;
    cfg.alpha = alpha;
    cfg.seed = seed;
    const double eps = cfg.eps();
    const Spectrum pert = perturbed_spectrum(model, cfg);

    const double lo = model.support.lo, hi = model.support.hi;
    const double w = (hi - lo) / bins;
    std::vector<int> count(bins, 0);
    for (double v : pert.values) {
        const int b = static_cast<int>(std::floor((v - lo) / w));
        if (b >= 0 && b < bins) ++count[b];
    }
    Dataset ds;
    ds.name = "hist";
    ds.columns = {"s", "empirical_density", "theory_density"};
    const double h = 1e-5;
    for (int b = 0; b < bins; ++b) {
        const double s = lo + (b + 0.5) * w;
        const double fprime = (closed_form_F(id, s + h) - closed_form_F(id, s - h)) / (2 * h);
        ds.rows.push_back({s, count[b] / (n * w), model.rho(s) + eps * eps * fprime});
    }
    return ds;
}

// ---------------------------------------------------------------------------

LocalLawReport local_law_probe(const ExampleId& model_id, const std::vector<int>& n_list,
                               double alpha, double beta, int trials, std::uint64_t seed,
                               double e0, const QuadratureConfig& q) {
    if (n_list.empty()) throw ConfigError("local_law_probe: empty n list");
    const LimitModel model = make_model(model_id);
    LocalLawReport rep;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.constraint_ok = beta < std::fmin((1.0 - alpha) / 2.0, 2.0 * alpha / 5.0);

    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const int n = n_list[ni];
        SampleConfig cfg;
        cfg.n = n;
        cfg.alpha = alpha;
        const double eps = cfg.eps();
        const Complex z(e0, std::pow(static_cast<double>(n), -beta));
        const Complex B = B_quadrature(model, z, q);
        const Spectrum base = spectrum_from_diagonal(build_diagonal(model, n));

        std::vector<double> devs(trials);
        parallel_for(0, trials, default_threads(), [&](int t) {
            SampleConfig tc = cfg;
            tc.seed = seed + ni * static_cast<std::uint64_t>(trials) + t;
            const Spectrum pert = perturbed_spectrum(model, tc);
            const SignedSpectralDiff diff = make_diff(base, pert, eps);
            devs[t] = std::abs(delta_G(diff, z) / (eps * eps) - B);
        });
        const SampleMoments m = sample_moments(devs);
        rep.cells.push_back({n, z.imag(), m.mean, m.stderr_mean()});
    }
    if (rep.cells.size() >= 2) {
        std::vector<double> ns, ds;
        for (const auto& c : rep.cells) {
            ns.push_back(c.n);
            ds.push_back(std::fmax(c.deviation, 1e-300));
        }
        rep.loglog_slope = loglog_slope(ns, ds);
        rep.decays = rep.loglog_slope < -0.1;
    }
    return rep;
}

std::string LocalLawReport::to_json() const {
    json j;
    j["alpha"] = alpha;
    j["beta"] = beta;
    j["constraint_ok"] = constraint_ok;
    j["loglog_slope"] = loglog_slope;
    j["decays"] = decays;
    j["cells"] = json::array();
    for (const auto& c : cells)
        j["cells"].push_back({{"n", c.n},
                              {"im_z", c.im_z},
                              {"deviation", c.deviation},
                              {"stderr", c.stderr_}});
    return j.dump(2);
}

// ---------------------------------------------------------------------------

SubregimeReport subregime_probe(const ExampleId& model_id, const std::vector<int>& n_list,
                                double alpha, int trials, std::uint64_t seed) {
    if (!(alpha > 0.2 && alpha < 1.0))
        throw ConfigError("subregime_probe: alpha must be in (1/5, 1)");
    const LimitModel model = make_model(model_id);
    const Complex z(0.0, 1.0);
    SubregimeReport rep;
    rep.alpha = alpha;

    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const int n = n_list[ni];
        SampleConfig cfg;
        cfg.n = n;
        cfg.alpha = alpha;
        const double eps = cfg.eps();
        const std::vector<double> diag = build_diagonal(model, n);

        std::vector<double> absA(trials), absD4(trials);
        parallel_for(0, trials, default_threads(), [&](int t) {
            SampleConfig tc = cfg;
            tc.seed = seed + ni * static_cast<std::uint64_t>(trials) + t;
            PerturbationSample s = sample_perturbation(model, tc);
            // only A and D4 are needed; skip the remainder solve
            const int nn = s.X.n;
            std::vector<Complex> u(nn);
            for (int i = 0; i < nn; ++i) u[i] = 1.0 / (z - diag[i]);
            Complex A{};
            for (int i = 0; i < nn; ++i) A += s.X(i, i) * u[i] * u[i];
            A *= eps / static_cast<double>(nn);
            Mat P, Q, Zr, Zi;
            rowscale_split(u, s.X, P, Q);
            complex_square(P, Q, Zr, Zi);
            Complex D4{};
            for (int i = 0; i < nn; ++i) {
                Complex sd{};
                for (int j = 0; j < nn; ++j)
                    sd += Complex(Zr(i, j), Zi(i, j)) * Complex(Zr(j, i), Zi(j, i));
                D4 += u[i] * sd;
            }
            D4 *= std::pow(eps, 4) / nn;
            absA[t] = std::abs(A);
            absD4[t] = std::abs(D4);
        });
        SubregimeCell cell;
        cell.n = n;
        cell.eps = eps;
        cell.mean_abs_A = sample_moments(absA).mean;
        cell.mean_abs_D4 = sample_moments(absD4).mean;
        rep.cells.push_back(cell);
    }
    if (rep.cells.size() >= 2) {
        std::vector<double> epss, epsn, d4s, as;
        for (const auto& c : rep.cells) {
            epss.push_back(c.eps);
            epsn.push_back(c.eps / c.n);
            d4s.push_back(c.mean_abs_D4);
            as.push_back(c.mean_abs_A);
        }
        rep.slope_D4_vs_eps = loglog_slope(epss, d4s);
        rep.slope_A_vs_epsn = loglog_slope(epsn, as);
    }
    return rep;
}

std::string SubregimeReport::to_json() const {
    json j;
    j["alpha"] = alpha;
    j["slope_D4_vs_eps"] = slope_D4_vs_eps;
    j["slope_A_vs_epsn"] = slope_A_vs_epsn;
    j["cells"] = json::array();
    for (const auto& c : cells)
        j["cells"].push_back({{"n", c.n},
                              {"eps", c.eps},
                              {"mean_abs_A", c.mean_abs_A},
                              {"mean_abs_D4", c.mean_abs_D4},
                              {"ratio", c.ratio()}});
    return j.dump(2);
}

// ---------------------------------------------------------------------------

NormalityReport clt_normality_check(const std::vector<Complex>& samples) {
    if (samples.size() < 200)
        throw SizeError("clt_normality_check: need at least 200 samples, got " +
                        std::to_string(samples.size()));
    std::vector<double> re(samples.size()), im(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        re[i] = samples[i].real();
        im[i] = samples[i].imag();
    }
    NormalityReport rep;
    rep.n = samples.size();
    for (auto [vec, comp] : {std::pair{&re, &rep.re}, std::pair{&im, &rep.im}}) {
        const SampleMoments m = sample_moments(*vec);
        comp->degenerate = !(m.var > 0.0);
        comp->ks = ks_distance_normal(*vec);
        comp->skewness = m.skewness;
        comp->kurtosis = m.kurtosis;
    }
    return rep;
}

std::string NormalityReport::to_json() const {
    json j;
    j["n"] = n;
    for (auto [name, c] : {std::pair{"re", &re}, std::pair{"im", &im}})
        j[name] = {{"ks", c->ks},
                   {"skewness", c->skewness},
                   {"kurtosis", c->kurtosis},
                   {"degenerate", c->degenerate}};
    return j.dump(2);
}

}  // namespace pertlab
