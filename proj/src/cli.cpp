#include "ppp/cli.hpp"

#include "ppp/ensembles.hpp"
#include "ppp/error.hpp"
#include "ppp/io.hpp"
#include "ppp/kernels.hpp"
#include "ppp/occupation.hpp"
#include "ppp/parallel.hpp"
#include "ppp/rigidity.hpp"
#include "ppp/spectral.hpp"
#include "ppp/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace ppp::cli {

namespace {

using Json = nlohmann::ordered_json;

const std::vector<std::string> kKernels{"sine1", "sine4", "bessel1", "bessel4"};
const std::vector<std::string> kProcesses{"sine1", "sine4"};

struct Params {
    std::string config, output, format;
    std::string kernel = "sine1";
    std::optional<double> s;
    double x = 0, y = 0;
    std::vector<double> points, xs, Ts{10, 100, 1000}, lambdas;
    double R = 1, M = 0, lmax = 1, C = 2.1, lambda = 1, a = 0, X = 2;
    bool average = false, quick = false;
    std::string source = "numeric", weight = "hermite", rescale = "identity", which = "sine1-variance";
    std::string table, plot, counts;
    int n = 1, nmax = 512, N = 100, beta = 1;
    std::vector<int> Ns{50, 100, 200, 400};
    std::size_t count = 10, samples = 10000;
    std::uint64_t seed = 20240611;
};

MatrixKernel make_kernel(const Params& p) {
    auto name = parse_kernel_name(p.kernel);
    if (name == KernelName::sine1 || name == KernelName::sine4) return matrix_kernel(name);
    return matrix_kernel(name, p.s.value_or(1.0));
}

Json kernel_label(const MatrixKernel& k, Json j) {
    Json o;
    o["kernel"] = to_string(k.name());
    o["s"] = k.s() ? Json(*k.s()) : Json(nullptr);
    for (auto& [key, v] : j.items()) o[key] = v;
    return o;
}

void write_to(const std::string& path, const std::string& body, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ResourceError("cannot open output file " + path);
    f << body;
}

void write_side(const std::string& path, const std::string& body) {
    if (!path.empty()) write_to(path, body, std::cout);
}

// Flat key = value config; values fill options of the selected subcommand not given on the command line.
void apply_config(CLI::App& leaf, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::FileError::Missing(path);
    CLI::ConfigTOML reader;
    for (const auto& item : reader.from_config(in)) {
        if (!item.parents.empty() && item.parents != std::vector<std::string>{"default"}) continue;
        CLI::Option* opt = nullptr;
        try {
            opt = leaf.get_option("--" + item.name);
        } catch (const CLI::OptionNotFound&) {
            continue;
        }
        if (opt->count() > 0) continue;
        for (const auto& v : item.inputs) opt->add_result(v);
        opt->run_callback();
    }
}

int kernel_eval(const Params& p, std::string& body) {
    auto k = make_kernel(p);
    auto e = k(p.x, p.y);
    Json j;
    j["x"] = p.x;
    j["y"] = p.y;
    j["matrix"] = Json::array({Json::array({e.k11, e.k12}), Json::array({e.k21, e.k22})});
    j["det"] = e.det();
    body = kernel_label(k, j).dump() + "\n";
    return 0;
}

int corr(const Params& p, std::string& body) {
    auto k = make_kernel(p);
    auto r = correlation_checked(k, p.points);
    Json j;
    j["points"] = p.points;
    j["correlation"] = r.value;
    j["degenerate"] = r.degenerate;
    body = kernel_label(k, j).dump(2) + "\n";
    return 0;
}

int sweep(const Params& p, std::string& body) {
    auto k = make_kernel(p);
    auto rows = variance_sweep(k, p.R, p.Ts);
    std::ostringstream os;
    if (p.format == "svg") {
        io::Series s{k.label(), {}, {}, "#1f77b4"};
        for (const auto& r : rows) {
            s.x.push_back(std::log10(r.T));
            s.y.push_back(r.variance);
        }
        io::write_svg(os, "variance of the tapered statistic", "log10 T", {s});
    } else {
        write_sweep_csv(os, k, p.R, rows);
    }
    body = os.str();
    return 0;
}

int screening(const Params& p, std::string& body) {
    auto k = make_kernel(p);
    std::string s = k.s() ? io::num(*k.s()) : "";
    std::ostringstream os;
    if (p.average) {
        os << "kernel,s,X,average\n";
        for (double X : p.xs) os << io::csv_row({to_string(k.name()), s, io::num(X), io::num(screening_average(k, X))});
    } else {
        os << "kernel,s,x,numeric,closed_form\n";
        for (double x : p.xs) {
            double num, cf;
            if (k.stationary()) {
                double M = p.M > 0 ? p.M : (k.name() == KernelName::sine1 ? 100 : 200);
                num = screening_integral_symmetric(k, x, M);
                cf = -rho1(k, x);
            } else {
                num = screening_residual(k, x);
                cf = screening_residual_closed_form(k, x);
            }
            os << io::csv_row({to_string(k.name()), s, io::num(x), io::num(num), io::num(cf)});
        }
    }
    body = os.str();
    return 0;
}

int defect_cmd(const Params& p, std::string& body) {
    auto k = make_kernel(p);
    std::string s = k.s() ? io::num(*k.s()) : "";
    std::ostringstream os;
    os << "kernel,s,x,numeric,closed_form\n";
    for (double x : p.xs)
        os << io::csv_row({to_string(k.name()), s, io::num(x), io::num(defect(k, x)), io::num(defect_closed_form(k, x))});
    body = os.str();
    return 0;
}

int spectral_check(const Params& p, std::string& body) {
    StationaryProfile prof(matrix_kernel(p.kernel));
    auto src = p.source == "closed" ? FhatSource::ClosedForm : FhatSource::Numeric;
    auto r = check_linear_bound(prof, p.lmax, p.C, src);
    Json j;
    j["process"] = to_string(prof.process());
    j["lambda_max"] = p.lmax;
    j["C"] = p.C;
    j["source"] = p.source;
    j["pass"] = r.pass;
    j["points"] = r.points;
    j["max_ratio"] = r.max_ratio;
    j["argmax"] = r.argmax;
    j["min_value"] = r.min_value;
    j["violations"] = r.violations;
    body = j.dump(2) + "\n";
    std::vector<double> ls = p.lambdas;
    if (ls.empty())
        for (int i = 1; i <= 40; ++i) ls.push_back(0.05 * i);
    if (!p.table.empty()) {
        std::ostringstream os;
        write_fhat_csv(os, prof, ls);
        write_side(p.table, os.str());
    }
    if (!p.plot.empty()) {
        std::ostringstream os;
        write_fhat_svg(os, prof, ls);
        write_side(p.plot, os.str());
    }
    return r.pass ? 0 : 1;
}

int mollifier(const Params& p, std::string& body) {
    StationaryProfile prof(matrix_kernel(p.kernel));
    auto m = build_mollifier(prof, p.n, p.R);
    bool ok = m.variance <= 1.0 / m.n && m.sup_deviation <= 1.0 / m.n;
    Json j;
    j["process"] = to_string(prof.process());
    j["n"] = m.n;
    j["R"] = m.R;
    j["k"] = m.k;
    j["eps"] = m.eps;
    j["C"] = m.C;
    j["variance"] = m.variance;
    j["sup_deviation"] = m.sup_deviation;
    j["pass"] = ok;
    body = j.dump(2) + "\n";
    return ok ? 0 : 1;
}

int occupation_cov_cmd(const Params& p, std::string& body) {
    auto s = covariance_series(matrix_kernel(p.kernel), p.lambda, p.nmax);
    if (p.format == "json") {
        body = covariance_summary_json(s) + "\n";
    } else {
        std::ostringstream os;
        write_covariance_csv(os, s);
        body = os.str();
    }
    return 0;
}

int occupation_diverge(const Params& p, std::string& body) {
    auto S = divergence_probe_sine4_lambda1(p.Ns);
    std::ostringstream os;
    os << "N,abs_sum\n";
    for (std::size_t i = 0; i < S.size(); ++i) os << io::csv_row({std::to_string(p.Ns[i]), io::num(S[i])});
    body = os.str();
    return 0;
}

EnsembleSpec ensemble_spec(const Params& p) {
    EnsembleSpec e{p.beta, p.weight == "laguerre" ? Weight::Laguerre : Weight::Hermite, p.a, p.N, p.seed};
    e.validate();
    return e;
}

int ensemble_sample(const Params& p, std::string& body) {
    auto spec = ensemble_spec(p);
    RescaleMode mode = RescaleMode::identity();
    if (p.rescale == "bulk") mode = RescaleMode::bulk(0, hermite_bulk_density(spec.beta, spec.N));
    if (p.rescale == "hard-edge") mode = RescaleMode::hard_edge(spec.N);
    if (p.rescale == "bulk" && spec.weight != Weight::Hermite) throw ContractViolation("bulk rescaling needs --weight hermite");
    if (p.rescale == "hard-edge" && spec.weight != Weight::Laguerre) throw ContractViolation("hard-edge rescaling needs --weight laguerre");
    auto batch = sample_batch(spec, p.count);
    std::ostringstream os;
    os << "sample,index,x\n";
    for (std::size_t i = 0; i < batch.size(); ++i) {
        auto c = rescale(batch[i], mode);
        for (std::size_t j = 0; j < c.size(); ++j)
            os << io::csv_row({std::to_string(i), std::to_string(j), io::num(c[j])});
    }
    body = os.str();
    return 0;
}

int ensemble_validate(const Params& p, std::string& body) {
    ValidationResult r;
    std::vector<int> counts;
    if (p.which == "sine1-variance") {
        r = validate_sine1_variance(p.N, p.samples, p.seed);
        if (!p.counts.empty()) {
            EnsembleSpec spec{1, Weight::Hermite, 0, p.N, p.seed};
            counts = sample_counts(spec, p.samples, RescaleMode::bulk(0, hermite_bulk_density(1, p.N)), -0.5, 0.5);
        }
    } else {
        r = validate_bessel4_mean(p.s.value_or(1.0), p.N, p.samples, p.seed, p.X);
        if (!p.counts.empty()) {
            EnsembleSpec spec{4, Weight::Laguerre, laguerre_exponent_for_bessel(KernelName::bessel4, p.s.value_or(1.0)),
                              p.N, p.seed};
            counts = sample_counts(spec, p.samples, RescaleMode::hard_edge(p.N), 0, p.X);
        }
    }
    body = validation_json(r) + "\n";
    if (!p.counts.empty()) {
        std::ostringstream os;
        write_counts_csv(os, counts);
        write_side(p.counts, os.str());
    }
    return r.pass ? 0 : 1;
}

int verify_all(const Params& p, std::string& body, std::ostream& err) {
    verify::Options o;
    o.quick = p.quick;
    o.seed = p.seed;
    std::ostringstream os;
    bool ok = verify::run_all(o, os, &err);
    body = os.str();
    return ok ? 0 : 1;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Params p;
    CLI::App app{"Pfaffian point process rigidity toolkit", "ppp"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", p.config, "flat key = value file; flags override it");
    app.add_option("-o,--output", p.output, "output file (default stdout)");

    // Checked after the config file is merged, so config values count.
    std::vector<std::pair<CLI::App*, CLI::Option*>> required;
    auto need = [&](CLI::App* c, CLI::Option* o) { required.emplace_back(c, o->description(o->get_description() + " (required)")); };
    auto kernel_opts = [&](CLI::App* c, const std::vector<std::string>& names) {
        c->add_option("--kernel,--process", p.kernel, "kernel name")->check(CLI::IsMember(names));
        if (names.size() > 2) c->add_option("--s", p.s, "Bessel parameter (default 1)")->check(CLI::PositiveNumber);
    };

    auto* kernel = app.add_subcommand("kernel", "matrix kernel evaluation")->require_subcommand(1);
    auto* keval = kernel->add_subcommand("eval", "print the 2x2 matrix kernel at (x, y)");
    kernel_opts(keval, kKernels);
    need(keval, keval->add_option("--x", p.x));
    need(keval, keval->add_option("--y", p.y));

    auto* corr_cmd = app.add_subcommand("corr", "n-point correlation as a Pfaffian");
    kernel_opts(corr_cmd, kKernels);
    need(corr_cmd, corr_cmd->add_option("--points", p.points, "comma-separated points")->delimiter(','));

    auto* variance = app.add_subcommand("variance", "additive statistic variance")->require_subcommand(1);
    auto* vsweep = variance->add_subcommand("sweep", "variance of the tapered statistic over T");
    kernel_opts(vsweep, kKernels);
    vsweep->add_option("--R", p.R, "taper plateau")->capture_default_str();
    vsweep->add_option("--T", p.Ts, "comma-separated increasing T values")->delimiter(',')->capture_default_str();
    vsweep->add_option("--format", p.format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));

    auto* scr = app.add_subcommand("screening", "screening integrals and Bessel residuals");
    kernel_opts(scr, kKernels);
    need(scr,
         scr->add_option("--x", p.xs, "comma-separated points (or X values with --average)")->delimiter(','));
    scr->add_option("--M", p.M, "symmetric truncation for sine kernels");
    scr->add_flag("--average", p.average, "integral of the closed-form residual over [0, X]");

    auto* def = app.add_subcommand("defect", "defect of the scalar kernel");
    kernel_opts(def, kKernels);
    need(def, def->add_option("--x", p.xs, "comma-separated points")->delimiter(','));

    auto* spectral = app.add_subcommand("spectral", "Fourier side of the two-point function")->require_subcommand(1);
    auto* scheck = spectral->add_subcommand("check", "linear bound Fhat + rho <= C |lambda|");
    kernel_opts(scheck, kProcesses);
    scheck->add_option("--lmax", p.lmax)->check(CLI::PositiveNumber);
    scheck->add_option("--C", p.C)->check(CLI::PositiveNumber);
    scheck->add_option("--source", p.source)->check(CLI::IsMember({"numeric", "closed"}));
    scheck->add_option("--lambdas", p.lambdas, "lambda grid for --table/--plot")->delimiter(',');
    scheck->add_option("--table", p.table, "CSV of numeric vs closed-form Fhat");
    scheck->add_option("--plot", p.plot, "SVG of the same");

    auto* moll = app.add_subcommand("mollifier", "build the smoothed rigidity test function");
    kernel_opts(moll, kProcesses);
    moll->add_option("--n", p.n)->check(CLI::PositiveNumber);
    moll->add_option("--R", p.R)->check(CLI::PositiveNumber);

    auto* occ = app.add_subcommand("occupation", "interval occupation numbers")->require_subcommand(1);
    auto* ocov = occ->add_subcommand("cov", "covariance series Cov(X_0, X_n)");
    kernel_opts(ocov, kProcesses);
    ocov->add_option("--lambda", p.lambda)->check(CLI::PositiveNumber);
    ocov->add_option("--nmax", p.nmax)->check(CLI::Range(8, 100000));
    ocov->add_option("--format", p.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto* odiv = occ->add_subcommand("diverge", "partial absolute sums for sine4, lambda = 1");
    odiv->add_option("--N", p.Ns, "comma-separated N values")->delimiter(',');

    auto* ens = app.add_subcommand("ensemble", "tridiagonal beta ensembles")->require_subcommand(1);
    auto* esample = ens->add_subcommand("sample", "draw configurations");
    esample->add_option("--beta", p.beta)->check(CLI::IsMember({1, 2, 4}));
    esample->add_option("--weight", p.weight)->check(CLI::IsMember({"hermite", "laguerre"}));
    esample->add_option("--a", p.a, "Laguerre exponent");
    esample->add_option("--N", p.N)->check(CLI::PositiveNumber);
    esample->add_option("--count", p.count);
    esample->add_option("--seed", p.seed);
    esample->add_option("--rescale", p.rescale)->check(CLI::IsMember({"identity", "bulk", "hard-edge"}));
    auto* evalid = ens->add_subcommand("validate", "Monte Carlo against the limiting kernels");
    evalid->add_option("--which", p.which)->check(CLI::IsMember({"sine1-variance", "bessel4-mean"}));
    evalid->add_option("--N", p.N)->check(CLI::PositiveNumber);
    evalid->add_option("--samples", p.samples);
    evalid->add_option("--seed", p.seed);
    evalid->add_option("--s", p.s)->check(CLI::PositiveNumber);
    evalid->add_option("--X", p.X)->check(CLI::PositiveNumber);
    evalid->add_option("--counts", p.counts, "CSV of per-sample counts");

    auto* ver = app.add_subcommand("verify", "acceptance suite")->require_subcommand(1);
    auto* vall = ver->add_subcommand("all", "run every criterion, one line each");
    vall->add_flag("--quick", p.quick, "smaller Monte Carlo budgets");
    vall->add_option("--seed", p.seed);

    std::vector<const char*> args(argv, argv + argc);
    try {
        app.parse(argc, args.data());
        CLI::App* leaf = &app;
        while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
        if (!p.config.empty()) apply_config(*leaf, p.config);
        for (auto [c, o] : required)
            if (c == leaf && o->count() == 0) throw CLI::RequiredError(o->get_name());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        err << app.help();
        return 2;
    }

    configure_threads_from_env();
    std::string body;
    int code = 0;
    try {
        if (keval->parsed()) code = kernel_eval(p, body);
        else if (corr_cmd->parsed()) code = corr(p, body);
        else if (vsweep->parsed()) code = sweep(p, body);
        else if (scr->parsed()) code = screening(p, body);
        else if (def->parsed()) code = defect_cmd(p, body);
        else if (scheck->parsed()) code = spectral_check(p, body);
        else if (moll->parsed()) code = mollifier(p, body);
        else if (ocov->parsed()) code = occupation_cov_cmd(p, body);
        else if (odiv->parsed()) code = occupation_diverge(p, body);
        else if (esample->parsed()) code = ensemble_sample(p, body);
        else if (evalid->parsed()) code = ensemble_validate(p, body);
        else if (vall->parsed()) code = verify_all(p, body, err);
        write_to(p.output, body, out);
    } catch (const ContractViolation& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return code;
}

}  // namespace ppp::cli
