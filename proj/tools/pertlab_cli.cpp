// pertlab — spectral perturbation laboratory CLI
//
// Subcommands:
//   simulate   one sample, dump both spectra
//   theory     deterministic curves: F, B (two routes), Z variance
//   regime     Monte Carlo regime run from a JSON spec
//   figure     fig1..fig4 single-matrix reproductions
//   locallaw   local-law probe along Im z_n = n^{-beta}
//   subregime  |D4| vs |A| order probe
//
// Exit codes: 0 success, 2 tolerance failure, 3 invalid configuration.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pertlab/eigensolve.hpp"
#include "pertlab/errors.hpp"
#include "pertlab/harness.hpp"
#include "pertlab/spectral_stats.hpp"
#include "pertlab/theory.hpp"

using namespace pertlab;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string model = "band:l=0.2,m=1";
    int n = 1000;
    double alpha = 0.5;
    double c = 1.0;
    int trials = 50;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--model", o.model, "model id, e.g. band:l=0.2,m=1 | triangular:m=1");
    cmd->add_option("--n", o.n, "matrix size");
    cmd->add_option("--alpha", o.alpha, "eps_n = c n^-alpha");
    cmd->add_option("--c", o.c, "eps_n prefactor");
    cmd->add_option("--trials", o.trials, "Monte Carlo trials");
    cmd->add_option("--seed", o.seed, "base RNG seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write '" + path + "'");
    f << text << "\n";
}

// honors --format: csv (default) or a json mirror of the same table
std::string write_dataset(const Dataset& ds, const std::string& dir, const std::string& name,
                          const std::string& format) {
    if (format == "json") {
        std::ostringstream os;
        os << std::setprecision(12) << "{\n  \"columns\": [";
        for (std::size_t i = 0; i < ds.columns.size(); ++i)
            os << (i ? "," : "") << '"' << ds.columns[i] << '"';
        os << "],\n  \"rows\": [";
        for (std::size_t r = 0; r < ds.rows.size(); ++r) {
            os << (r ? "," : "") << "\n    [";
            for (std::size_t i = 0; i < ds.rows[r].size(); ++i)
                os << (i ? "," : "") << ds.rows[r][i];
            os << "]";
        }
        os << "\n  ]\n}";
        const std::string path = dir + "/" + name + ".json";
        write_text(path, os.str());
        return path;
    }
    const std::string path = dir + "/" + name + ".csv";
    write_csv(ds, path);
    return path;
}

int cmd_simulate(const CommonOpts& o) {
    const ExampleId id = ExampleId::parse(o.model);
    const LimitModel model = make_model(id);
    SampleConfig cfg;
    cfg.n = o.n;
    cfg.c = o.c;
    cfg.alpha = o.alpha;
    cfg.seed = o.seed;
    const double eps = cfg.eps();
    const Spectrum base = spectrum_from_diagonal(build_diagonal(model, o.n));
    PerturbationSample s = sample_perturbation(model, cfg);
    const double eta = discrepancy_eta(model, s);
    const Spectrum pert = s.complex_entries ? eig_hermitian(perturbed_matrix_complex(s))
                                            : eig_sym(perturbed_matrix(std::move(s)));
    ensure_dir(o.out);
    Dataset ds;
    ds.name = "spectra";
    ds.columns = {"index", "lambda_base", "lambda_perturbed"};
    for (int i = 0; i < o.n; ++i)
        ds.rows.push_back({static_cast<double>(i + 1), base.values[i], pert.values[i]});
    const std::string path = write_dataset(ds, o.out, "spectra", o.format);
    std::cout << "model=" << id.str() << " n=" << o.n << " eps=" << eps << " eta=" << eta
              << "\nwrote " << path << "\n";
    return 0;
}

int cmd_theory(const CommonOpts& o) {
    const ExampleId id = ExampleId::parse(o.model);
    const LimitModel model = make_model(id);
    QuadratureConfig q;
    ensure_dir(o.out);

    const double lo = model.support.lo, hi = model.support.hi, W = hi - lo;
    Dataset fc;
    fc.name = "F";
    fc.columns = {"s", "F_numeric", "F_closed_form"};
    for (int k = 0; k <= 200; ++k) {
        const double s = lo + 0.02 * W + (W - 0.04 * W) * k / 200.0;
        fc.rows.push_back({s, F_numeric(model, s, q), closed_form_F(id, s)});
    }
    write_csv(fc, o.out + "/F_curve.csv");

    const SampledCurve F = sample_F(model, q);
    Dataset bc;
    bc.name = "B";
    bc.columns = {"E", "B_quad_re", "B_quad_im", "B_via_F_re", "B_via_F_im"};
    for (int k = 0; k < 81; ++k) {
        const double E = lo - 1.0 + (W + 2.0) * k / 80.0;
        const Complex z(E, 1.0);
        const Complex bq = B_quadrature(model, z, q);
        const Complex bf = B_via_F(F, z);
        bc.rows.push_back({E, bq.real(), bq.imag(), bf.real(), bf.imag()});
    }
    write_csv(bc, o.out + "/B_curve.csv");

    const FieldCovariance cov{model, q};
    Dataset zc;
    zc.name = "Zvar";
    zc.columns = {"E", "var_re", "var_im", "var_total"};
    for (int k = 0; k < 81; ++k) {
        const double E = lo - 1.0 + (W + 2.0) * k / 80.0;
        const TestFunction phi = TestFunction::cauchy(Complex(E, 1.0));
        const auto [vr, vi] = cov.component_variances(phi);
        zc.rows.push_back({E, vr, vi, vr + vi});
    }
    write_csv(zc, o.out + "/Z_variance.csv");
    std::cout << "wrote " << o.out << "/{F_curve,B_curve,Z_variance}.csv\n";
    return 0;
}

int cmd_regime(const std::string& config_path, const CommonOpts& o) {
    std::ifstream f(config_path);
    if (!f) throw ConfigError("cannot read regime config '" + config_path + "'");
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    const RegimeSpec spec = RegimeSpec::from_json(text);
    const ExperimentReport rep = run_regime(spec);
    ensure_dir(o.out);
    const std::string path = o.out + "/regime_report.json";
    write_text(path, rep.to_json());
    std::cout << rep.to_json() << "\nwrote " << path << "\n";
    return 0;
}

int cmd_figure(const std::string& fig, const CommonOpts& o, double ell, bool hist) {
    const Figure f = figure_parse(fig);
    ensure_dir(o.out);
    const Dataset ds = figure_dataset(f, o.n, o.alpha, o.seed, ell);
    const std::string path = write_dataset(ds, o.out, fig, o.format);
    std::cout << "wrote " << path << "\n";
    if (hist && (f == Figure::Fig2 || f == Figure::Fig4)) {
        const Dataset h = figure_histogram(f, o.n, o.alpha, o.seed);
        std::cout << "wrote " << write_dataset(h, o.out, fig + "_hist", o.format) << "\n";
    }
    return 0;
}

int cmd_locallaw(const CommonOpts& o, double beta, const std::vector<int>& ns, double e0) {
    const ExampleId id = ExampleId::parse(o.model);
    const LocalLawReport rep =
        local_law_probe(id, ns, o.alpha, beta, o.trials, o.seed, e0);
    ensure_dir(o.out);
    write_text(o.out + "/locallaw_report.json", rep.to_json());
    std::cout << rep.to_json() << "\n";
    return 0;
}

int cmd_subregime(const CommonOpts& o, const std::vector<int>& ns) {
    const ExampleId id = ExampleId::parse(o.model);
    const SubregimeReport rep = subregime_probe(id, ns, o.alpha, o.trials, o.seed);
    ensure_dir(o.out);
    write_text(o.out + "/subregime_report.json", rep.to_json());
    std::cout << rep.to_json() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pertlab — random perturbations of large Hermitian matrices"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string config_path, figname = "fig1";
    double ell = 0.2, beta = 0.15, e0 = 0.5;
    bool hist = false;
    std::vector<int> ns;

    auto* sim = app.add_subcommand("simulate", "one sample + spectra dump");
    add_common(sim, o);
    auto* thy = app.add_subcommand("theory", "F/B/Z theory curves");
    add_common(thy, o);
    auto* reg = app.add_subcommand("regime", "Monte Carlo regime run (JSON spec)");
    add_common(reg, o);
    reg->add_option("config", config_path, "RegimeSpec JSON file")->required();
    auto* fig = app.add_subcommand("figure", "single-matrix figure datasets");
    add_common(fig, o);
    fig->add_option("name", figname, "fig1|fig2|fig3|fig4")->required();
    fig->add_option("--ell", ell, "band half-width (fig1)");
    fig->add_flag("--hist", hist, "also write the density histogram (fig2/fig4)");
    auto* loc = app.add_subcommand("locallaw", "local-law probe");
    add_common(loc, o);
    loc->add_option("--beta", beta, "Im z_n = n^-beta");
    loc->add_option("--e0", e0, "Re z");
    loc->add_option("--ns", ns, "n list");
    auto* sub = app.add_subcommand("subregime", "|D4| vs |A| order probe");
    add_common(sub, o);
    sub->add_option("--ns", ns, "n list");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(o);
        if (thy->parsed()) return cmd_theory(o);
        if (reg->parsed()) return cmd_regime(config_path, o);
        if (fig->parsed()) return cmd_figure(figname, o, ell, hist);
        if (loc->parsed()) {
            if (ns.empty()) ns = {1000, 2000, 4000};
            return cmd_locallaw(o, beta, ns, e0);
        }
        if (sub->parsed()) {
            if (ns.empty()) ns = {500, 1000, 2000};
            return cmd_subregime(o, ns);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const ToleranceError& e) {
        std::cerr << "tolerance failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
