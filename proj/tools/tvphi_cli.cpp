// Command-line driver for the nonconvex TV toolkit: denoise an image,
// sweep the cut-off M at fixed asymptotic weight, fit gradient-histogram
// models, and run the numerical demos. PGM in/out, CSV tables out.
// Exit codes: 0 success, 1 usage error, 2 runtime/convergence error.

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tvphi/tvphi.hpp"

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_cutoff(const std::string& s) {
    std::string t;
    for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t == "inf" || t == "infinity")
        return std::numeric_limits<double>::infinity();
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size() && v >= 0.0) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("cut-off '" + s + "': expected a nonnegative real or 'inf'");
}

std::string noisy_path_for(const std::string& output) {
    const std::size_t dot = output.rfind('.');
    if (dot == std::string::npos) return output + ".noisy";
    return output.substr(0, dot) + ".noisy" + output.substr(dot);
}

// unreadable/unparsable input files are usage errors (exit 1)
struct InputFileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

tvphi::Image load_pgm(const std::string& path) {
    try {
        return tvphi::read_pgm(path);
    } catch (const std::exception& e) {
        throw InputFileError(e.what());
    }
}

std::string report_csv(const tvphi::SolverReport& rep) {
    std::string out = "iter,objective\n";
    char buf[64];
    for (std::size_t i = 0; i < rep.objective_trace.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", i, rep.objective_trace[i]);
        out += buf;
    }
    return out;
}

struct DenoiseArgs {
    std::string input, output, M_str = "10", ref;
    double q = 0.5, alpha_inf = 0.0253, eta0 = 0.0, eps1 = 1.0, sigma = 0.0;
    int levels = 3;
    std::uint64_t seed = 0;
};

tvphi::SolverConfig make_config(const DenoiseArgs& a) {
    tvphi::SolverConfig cfg;
    cfg.q = a.q;
    cfg.M = parse_cutoff(a.M_str);
    cfg.alpha_infty = a.alpha_inf;
    cfg.noise_sigma = a.sigma;
    cfg.family = tvphi::MollifierFamily::make(a.eps1, std::max(a.levels, 1), a.eta0);
    cfg.K = a.eta0 > 0.0 ? a.levels : 0;
    cfg.seed = a.seed;
    return cfg;
}

void add_denoise_flags(CLI::App* cmd, DenoiseArgs& a, bool need_ref) {
    cmd->add_option("--input", a.input, "input PGM image (P5 or P2)")->required();
    cmd->add_option("--q", a.q, "gradient-penalty exponent in (0,2)")->capture_default_str();
    cmd->add_option("--M", a.M_str,
                    "cut-off gradient magnitude in gray levels per pixel; 0 = plain TV, "
                    "'inf' = pure power model")
        ->capture_default_str();
    cmd->add_option("--alpha-inf", a.alpha_inf,
                    "asymptotic regularization weight (per-unit edge cost)")
        ->capture_default_str();
    cmd->add_option("--eta0", a.eta0, "multiscale term weight; 0 disables it")
        ->capture_default_str();
    cmd->add_option("--eps1", a.eps1, "largest mollifier scale in pixels")
        ->capture_default_str();
    cmd->add_option("--levels", a.levels, "number of dyadic mollifier levels")
        ->capture_default_str();
    cmd->add_option("--sigma", a.sigma,
                    "Gaussian noise std in gray levels; if > 0, noise is added first and "
                    "the noisy image is written alongside the output")
        ->capture_default_str();
    cmd->add_option("--seed", a.seed, "noise generator seed")->capture_default_str();
    auto* ref =
        cmd->add_option("--ref", a.ref, "ground-truth PGM for PSNR/SSIM reporting");
    if (need_ref) ref->required();
}

int run_denoise(const DenoiseArgs& a) {
    tvphi::Image in = load_pgm(a.input);
    tvphi::Image z = in;
    if (a.sigma > 0.0) {
        z = tvphi::add_gaussian_noise(in, a.sigma, a.seed);
        tvphi::write_pgm(z, noisy_path_for(a.output));
    }
    const tvphi::SolverConfig cfg = make_config(a);
    auto [u, rep] = tvphi::denoise(z, cfg);
    tvphi::write_pgm(u, a.output);
    tvphi::atomic_write_text(a.output + ".report.csv", report_csv(rep));
    if (!a.ref.empty()) {
        const tvphi::Image ref = load_pgm(a.ref);
        std::printf("PSNR=%s SSIM=%s\n", tvphi::format_metric(tvphi::psnr(u, ref)).c_str(),
                    tvphi::format_metric(tvphi::ssim(u, ref)).c_str());
    }
    return 0;
}

int run_sweep(const DenoiseArgs& a, const std::string& Ms_str, const std::string& out_csv) {
    std::vector<double> Ms;
    std::size_t start = 0;
    while (start <= Ms_str.size()) {
        const std::size_t comma = Ms_str.find(',', start);
        const std::string tok = Ms_str.substr(start, comma - start);
        if (!tok.empty()) Ms.push_back(parse_cutoff(tok));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (Ms.empty()) throw UsageError("--Ms: expected a comma-separated cut-off list");

    const tvphi::Image truth = load_pgm(a.ref);
    tvphi::Image z = load_pgm(a.input);
    if (a.sigma > 0.0) z = tvphi::add_gaussian_noise(z, a.sigma, a.seed);
    const tvphi::SolverConfig base = make_config(a);
    const std::vector<tvphi::SweepRow> rows = tvphi::sweep_M(z, truth, base, Ms);

    // mark the per-metric optimum, smallest M on ties
    std::size_t best_psnr = 0, best_ssim = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].psnr > rows[best_psnr].psnr) best_psnr = i;
        if (rows[i].ssim > rows[best_ssim].ssim) best_ssim = i;
    }
    std::string csv = "M,PSNR,SSIM,objective,iters,best\n";
    char buf[160];
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::string mark;
        if (i == best_psnr) mark += "PSNR*";
        if (i == best_ssim) mark += mark.empty() ? "SSIM*" : " SSIM*";
        std::snprintf(buf, sizeof(buf), ",%.10g,%d,", rows[i].objective, rows[i].iters);
        csv += tvphi::format_cutoff(rows[i].M) + "," + tvphi::format_metric(rows[i].psnr) + "," +
               tvphi::format_metric(rows[i].ssim) + buf + mark + "\n";
    }
    tvphi::atomic_write_text(out_csv, csv);
    std::printf("%s", csv.c_str());
    return 0;
}

int run_fit(const std::string& input, int bins, double edge_threshold, const std::string& mode,
            const std::string& model, const std::string& M_str, const std::string& prefix) {
    const tvphi::Image u = load_pgm(input);
    tvphi::Histogram hst;
    if (mode == "full") {
        hst = tvphi::gradient_histogram(u, bins);
    } else {
        const tvphi::EdgeSplit split = tvphi::split_edges(u, edge_threshold);
        const auto& mask = (mode == "edge") ? split.edge : split.smooth;
        hst = tvphi::gradient_histogram(u, bins, &mask);
    }

    std::string hist_csv = "t_center,count,log_density\n";
    char buf[128];
    for (int i = 0; i < hst.bins(); ++i) {
        const double ld = hst.log_density[static_cast<std::size_t>(i)];
        if (std::isnan(ld))
            std::snprintf(buf, sizeof(buf), "%.10g,%llu,\n", hst.center(i),
                          static_cast<unsigned long long>(hst.counts[static_cast<std::size_t>(i)]));
        else
            std::snprintf(buf, sizeof(buf), "%.10g,%llu,%.10g\n", hst.center(i),
                          static_cast<unsigned long long>(hst.counts[static_cast<std::size_t>(i)]),
                          ld);
        hist_csv += buf;
    }
    tvphi::atomic_write_text(prefix + "-hist.csv", hist_csv);

    tvphi::FitResult fit;
    if (model == "power") {
        fit = tvphi::fit_power(hst);
    } else {
        if (M_str == "free")
            fit = tvphi::fit_linearized(hst);
        else
            fit = tvphi::fit_linearized(hst, parse_cutoff(M_str));
    }
    std::string fit_csv = "C,alpha,q,M,alpha_infty,residual\n";
    std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g,", fit.C, fit.alpha, fit.q);
    fit_csv += buf;
    fit_csv += tvphi::format_cutoff(fit.M);
    std::snprintf(buf, sizeof(buf), ",%.10g,%.10g\n", fit.alpha_infty, fit.residual);
    fit_csv += buf;
    tvphi::atomic_write_text(prefix + "-fit.csv", fit_csv);
    std::printf("C=%.6g alpha=%.6g q=%.4f M=%s alpha_infty=%.6g residual=%.6g\n", fit.C,
                fit.alpha, fit.q, tvphi::format_cutoff(fit.M).c_str(), fit.alpha_infty,
                fit.residual);
    return 0;
}

int run_demo(const std::string& name, const std::string& out_dir) {
    using namespace tvphi;
    std::vector<DemoTrace> traces;
    const bool all = name == "all";
    if (all || name == "ramp")
        traces.push_back(demo_ramp_blowup(0.5, {1, 2, 4, 8, 16, 64, 256, 1024}));
    if (all || name == "step")
        traces.push_back(demo_step_vanishing(0.5, {2, 8, 32, 128}, 1.0 / 512.0));
    if (all || name == "linlimit")
        traces.push_back(demo_linearized_limit(0.5, 4.0, {1.0 / 8, 1.0 / 32, 1.0 / 128, 1.0 / 512}));
    if (all || name == "annihilation")
        traces.push_back(demo_annihilation({64, 16, 8, 4, 2, 1}, MollifierFamily::make(8.0, 3, 1.0)));
    if (all || name == "compact")
        traces.push_back(
            demo_compact_convergence(smooth_blob_image(), {2.0, 1.0, 0.5, 0.25}, PhiSpec::power(0.5)));
    if (traces.empty()) throw UsageError("unknown demo '" + name + "'");

    bool ok = true;
    for (const DemoTrace& tr : traces) {
        atomic_write_text(out_dir + "/" + tr.name + ".csv", tr.to_csv());
        std::printf("%-12s %s\n", tr.name.c_str(), tr.passed ? "PASS" : "FAIL");
        ok = ok && tr.passed;
    }
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonconvex total-variation toolkit: denoising, cut-off sweeps, "
                 "gradient-histogram fits and limit demos"};
    app.require_subcommand(1);

    DenoiseArgs dn;
    auto* denoise_cmd = app.add_subcommand("denoise", "denoise a PGM image");
    add_denoise_flags(denoise_cmd, dn, false);
    denoise_cmd->add_option("--output", dn.output, "output PGM path")->required();

    DenoiseArgs sw;
    std::string Ms_str = "0,10,20,40,inf";
    std::string sweep_csv = "sweep.csv";
    auto* sweep_cmd =
        app.add_subcommand("sweep", "denoise across cut-offs at fixed asymptotic weight");
    add_denoise_flags(sweep_cmd, sw, true);
    sweep_cmd->add_option("--Ms", Ms_str, "comma-separated cut-offs, 'inf' allowed")
        ->capture_default_str();
    sweep_cmd->add_option("--out", sweep_csv, "output CSV path")->capture_default_str();

    std::string fit_input, fit_mode = "full", fit_model = "power", fit_M = "free",
                fit_prefix = "fit";
    int fit_bins = 64;
    double fit_threshold = 30.0;
    auto* fit_cmd = app.add_subcommand("fit", "fit gradient-histogram models");
    fit_cmd->add_option("--input", fit_input, "input PGM image")->required();
    fit_cmd->add_option("--bins", fit_bins, "histogram bins (>= 8)")
        ->check(CLI::Range(8, 65536))
        ->capture_default_str();
    fit_cmd->add_option("--edge-threshold", fit_threshold,
                        "gradient magnitude separating edge from smooth pixels (gray levels)")
        ->capture_default_str();
    fit_cmd->add_option("--mode", fit_mode, "pixel set: full, edge or smooth")
        ->check(CLI::IsMember({"full", "edge", "smooth"}))
        ->capture_default_str();
    fit_cmd->add_option("--model", fit_model, "power or linearized")
        ->check(CLI::IsMember({"power", "linearized"}))
        ->capture_default_str();
    fit_cmd->add_option("--M", fit_M, "cut-off for the linearized model: a real, or 'free'")
        ->capture_default_str();
    fit_cmd->add_option("--out-prefix", fit_prefix, "prefix for <prefix>-hist.csv and <prefix>-fit.csv")
        ->capture_default_str();

    std::string demo_name = "all", demo_dir = ".";
    auto* demo_cmd = app.add_subcommand("demo", "run the numerical limit demos");
    demo_cmd->add_option("--name", demo_name, "ramp, step, linlimit, annihilation, compact or all")
        ->check(CLI::IsMember({"ramp", "step", "linlimit", "annihilation", "compact", "all"}))
        ->capture_default_str();
    demo_cmd->add_option("--out-dir", demo_dir, "directory for the demo CSV files")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*denoise_cmd) return run_denoise(dn);
        if (*sweep_cmd) return run_sweep(sw, Ms_str, sweep_csv);
        if (*fit_cmd)
            return run_fit(fit_input, fit_bins, fit_threshold, fit_mode, fit_model, fit_M,
                           fit_prefix);
        if (*demo_cmd) return run_demo(demo_name, demo_dir);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const InputFileError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}
