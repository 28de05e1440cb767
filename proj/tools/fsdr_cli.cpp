// fsdr: command-line front end.
//
// Exit status: 0 success, 1 usage, 2 data/validation, 3 numerical.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsdr/fsdr.hpp"

namespace fs = std::filesystem;
using namespace fsdr;

namespace {

struct Common {
    std::uint64_t seed = 1;
    std::string out;
    bool dump_diagnostics = false;
    unsigned threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    sub->add_option("--out", c.out, "Output path");
    sub->add_flag("--dump-diagnostics", c.dump_diagnostics, "Write intermediate matrices next to the output");
    sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

struct ResponseArgs {
    std::string dist;
    std::string y;
    std::string metric = "euclidean";
    int k = 10;
    int m = 5;
    double reg = 1e-3;
};

const std::map<std::string, MetricKind> metric_names{
    {"euclidean", MetricKind::euclidean}, {"geodesic", MetricKind::geodesic_sphere},
    {"wasserstein", MetricKind::wasserstein}, {"isomap", MetricKind::isomap}, {"lle", MetricKind::lle}};

void add_metric_options(CLI::App* sub, ResponseArgs& r) {
    sub->add_option("--metric", r.metric, "euclidean | geodesic | wasserstein | isomap | lle")
        ->check(CLI::IsMember({"euclidean", "geodesic", "wasserstein", "isomap", "lle"}))
        ->capture_default_str();
    sub->add_option("--k", r.k, "Neighbors for isomap/lle")->capture_default_str();
    sub->add_option("--m", r.m, "LLE embedding dimension")->capture_default_str();
    sub->add_option("--reg", r.reg, "LLE regularizer")->capture_default_str();
}

void add_response_options(CLI::App* sub, ResponseArgs& r) {
    auto* dist = sub->add_option("--dist", r.dist, "Precomputed n x n distance CSV");
    auto* y = sub->add_option("--y", r.y, "Response CSV (one row per observation)");
    dist->excludes(y);
    add_metric_options(sub, r);
}

MetricSpec metric_spec(const ResponseArgs& r) {
    MetricSpec spec;
    spec.kind = metric_names.at(r.metric);
    spec.k = r.k;
    spec.m = r.m;
    spec.reg = r.reg;
    spec.validate();
    return spec;
}

// Wasserstein responses are two columns (mu, sigma); geodesic responses are
// unit-norm rows; everything else is read as plain vectors.
ResponseSet read_responses(const std::string& path, MetricKind kind) {
    const Matrix y = read_csv_matrix(path);
    if (kind == MetricKind::wasserstein) {
        if (y.cols() != 2) throw DimensionError("wasserstein responses need two columns (mu, sigma)");
        return QuantileDistributions(y.col(0), y.col(1));
    }
    if (kind == MetricKind::geodesic_sphere) return SpherePoints(y);
    return EuclideanVectors{y};
}

DistanceMatrix response_distances(const ResponseArgs& r) {
    if (!r.dist.empty()) return read_distance_csv(r.dist);
    if (r.y.empty()) throw ConfigError("either --dist or --y is required");
    const auto spec = metric_spec(r);
    return pairwise_distance_matrix(read_responses(r.y, spec.kind), spec);
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

void write_matrix(const std::string& path, const Matrix& m) {
    if (path.empty() || path == "-")
        write_csv_matrix(std::cout, m);
    else
        write_csv_matrix(fs::path(path), m);
}

// Sibling path: "dir/basis.csv" + "M_hat" -> "dir/basis.M_hat.csv".
fs::path sibling(const std::string& out, const std::string& tag) {
    fs::path p = out.empty() ? fs::path("fsdr") : fs::path(out);
    return p.parent_path() / (p.stem().string() + "." + tag + ".csv");
}

std::vector<int> parse_classes(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(tok, &used);
            if (used != tok.size() || v < 0 || v > 9) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw ParameterError("--classes expects comma-separated digits, got '" + text + "'");
        }
    }
    if (out.empty()) throw ParameterError("--classes is empty");
    return out;
}

double median_pairwise_distance(const Matrix& x) {
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(x.rows() * (x.rows() - 1) / 2));
    for (Index i = 0; i < x.rows(); ++i)
        for (Index j = i + 1; j < x.rows(); ++j) d.push_back((x.row(i) - x.row(j)).norm());
    if (d.empty()) throw ValidationError("need at least two observations");
    const auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    if (!(*mid > 0.0)) throw ValidationError("median pairwise distance is zero; pass --sigma explicitly");
    return *mid;
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::usage: return 1;
        case ErrorKind::data: return 2;
        case ErrorKind::numerical: return 3;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frechet sufficient dimension reduction"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "fsdr 1.0");

    // fit-linear
    Common c_fl;
    ResponseArgs r_fl;
    std::string x_fl, pred_fl;
    int d_fl = 1;
    auto* fit_linear = app.add_subcommand("fit-linear", "Linear subspace estimate from distance-weighted inverse regression");
    fit_linear->add_option("--x", x_fl, "Predictor CSV")->required();
    fit_linear->add_option("--d", d_fl, "Subspace dimension")->capture_default_str();
    fit_linear->add_option("--predictors", pred_fl, "Also write X * basis here");
    add_response_options(fit_linear, r_fl);
    add_common(fit_linear, c_fl);

    // fit-nonlinear
    Common c_fn;
    ResponseArgs r_fn;
    std::string x_fn;
    int d_fn = 1;
    double eps_fn = 1e-3, sigma_fn = 0.1;
    auto* fit_nonlinear = app.add_subcommand("fit-nonlinear", "Kernel fit; --out names a directory");
    fit_nonlinear->add_option("--x", x_fn, "Predictor CSV")->required();
    fit_nonlinear->add_option("--d", d_fn, "Number of predictors")->capture_default_str();
    fit_nonlinear->add_option("--epsilon", eps_fn, "Ridge parameter")->capture_default_str();
    fit_nonlinear->add_option("--sigma", sigma_fn, "Gaussian kernel bandwidth")->capture_default_str();
    add_response_options(fit_nonlinear, r_fn);
    add_common(fit_nonlinear, c_fn);

    // predict
    Common c_pr;
    std::string fit_dir, x_pr;
    auto* predict = app.add_subcommand("predict", "Evaluate a saved kernel fit at new predictors");
    predict->add_option("--fit", fit_dir, "Directory written by fit-nonlinear")->required();
    predict->add_option("--x", x_pr, "Predictor CSV")->required();
    add_common(predict, c_pr);

    // order
    Common c_or;
    ResponseArgs r_or;
    std::string x_or;
    int boot = 0;
    double log_base = std::numbers::e;
    auto* order = app.add_subcommand("order", "Ladle estimate of the structural dimension");
    order->add_option("--x", x_or, "Predictor CSV")->required();
    order->add_option("--boot", boot, "Bootstrap replicates (0 = n)")->capture_default_str();
    order->add_option("--log-base", log_base, "Logarithm base in the search bound p/log p");
    add_response_options(order, r_or);
    add_common(order, c_or);

    // simulate
    Common c_si;
    std::string model_s = "I", case_s = "i", method_s = "wire", scenario_s = "default", cuberoot_s = "angle";
    int n_s = 100, p_s = 10, reps_s = 100, boot_s = 0;
    double noise_s = 0.1, eps_s = 1e-3, sigma_s = 0.1, log_base_s = std::numbers::e;
    auto* simulate = app.add_subcommand("simulate", "Run a simulation design and summarize");
    simulate->add_option("--model", model_s)->check(CLI::IsMember({"I", "II", "III", "IV"}))->capture_default_str();
    simulate->add_option("--case", case_s)->check(CLI::IsMember({"i", "ii"}))->capture_default_str();
    simulate->add_option("--n", n_s)->capture_default_str();
    simulate->add_option("--p", p_s)->capture_default_str();
    simulate->add_option("--reps", reps_s)->capture_default_str();
    simulate->add_option("--method", method_s)->check(CLI::IsMember({"wire", "kwire", "ladle"}))->capture_default_str();
    simulate->add_option("--scenario", scenario_s)
        ->check(CLI::IsMember({"default", "S1", "S2", "S3", "S4"}))
        ->capture_default_str();
    simulate->add_option("--noise-sd", noise_s)->capture_default_str();
    simulate->add_option("--cuberoot", cuberoot_s, "Model III case ii: angle | component")
        ->check(CLI::IsMember({"angle", "component"}))
        ->capture_default_str();
    simulate->add_option("--epsilon", eps_s)->capture_default_str();
    simulate->add_option("--sigma", sigma_s)->capture_default_str();
    simulate->add_option("--boot", boot_s, "Ladle bootstrap replicates (0 = n)")->capture_default_str();
    simulate->add_option("--log-base", log_base_s);
    add_common(simulate, c_si);

    // digits
    Common c_dg;
    ResponseArgs r_dg;
    r_dg.metric = "isomap";
    std::string train_path, test_path, classes_s = "0,8,9", half_s = "upper-as-x", method_dg = "kwire", svg_path;
    int d_dg = 2;
    double eps_dg = 1e-3;
    std::optional<double> sigma_dg;
    auto* digits = app.add_subcommand("digits", "Half-image reduction on optdigits; --out names a directory");
    digits->add_option("--train", train_path, "Training file (optdigits format)")->required();
    digits->add_option("--test", test_path, "Test file (optdigits format)")->required();
    digits->add_option("--classes", classes_s)->capture_default_str();
    digits->add_option("--half", half_s)->check(CLI::IsMember({"upper-as-x", "lower-as-x"}))->capture_default_str();
    digits->add_option("--method", method_dg)->check(CLI::IsMember({"wire", "kwire"}))->capture_default_str();
    digits->add_option("--d", d_dg)->capture_default_str();
    digits->add_option("--epsilon", eps_dg)->capture_default_str();
    digits->add_option("--sigma", sigma_dg, "Kernel bandwidth (default: median pairwise distance of training X)");
    digits->add_option("--svg", svg_path, "Scatter plot path; -train/-test are appended to the stem");
    add_metric_options(digits, r_dg);
    add_common(digits, c_dg);

    // distances
    Common c_di;
    ResponseArgs r_di;
    auto* distances = app.add_subcommand("distances", "Pairwise response distance matrix");
    distances->add_option("--y", r_di.y, "Response CSV")->required();
    add_metric_options(distances, r_di);
    add_common(distances, c_di);

    // eval
    Common c_ev;
    std::string a_path, b_path, stat = "dcor";
    auto* eval = app.add_subcommand("eval", "Compare two matrices");
    eval->add_option("--a", a_path)->required();
    eval->add_option("--b", b_path)->required();
    eval->add_option("--stat", stat, "trace | dcor")->check(CLI::IsMember({"trace", "dcor"}))->capture_default_str();
    add_common(eval, c_ev);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "fsdr: " << e.what() << "\n";
        const CLI::App* failing = &app;
        for (const auto* sub : app.get_subcommands()) failing = sub;
        std::cerr << failing->help();
        return 1;
    }

    try {
        if (fit_linear->parsed()) {
            const Matrix x = read_csv_matrix(x_fl);
            const auto d = response_distances(r_fl);
            const auto fit = wire_fit(x, d, d_fl);
            for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
            write_matrix(c_fl.out, fit.basis);
            if (!pred_fl.empty()) write_matrix(pred_fl, sufficient_predictors(x, fit));
            if (c_fl.dump_diagnostics) {
                write_csv_matrix(sibling(c_fl.out, "M_hat"), fit.M_hat);
                write_csv_matrix(sibling(c_fl.out, "singular_values"), fit.singular_values);
                write_csv_matrix(sibling(c_fl.out, "Sigma_hat"), fit.Sigma_hat);
                write_csv_matrix(sibling(c_fl.out, "Lambda_hat"), fit.Lambda_hat);
            }
        } else if (fit_nonlinear->parsed()) {
            if (c_fn.out.empty()) throw ConfigError("fit-nonlinear needs --out DIR");
            const Matrix x = read_csv_matrix(x_fn);
            const auto d = response_distances(r_fn);
            const auto fit = kwire_fit(x, d, d_fn, eps_fn, KernelSpec{sigma_fn});
            save_kwire_fit(fit, c_fn.out);
            write_csv_matrix(fs::path(c_fn.out) / "predictors.csv", kwire_insample(fit));
            if (c_fn.dump_diagnostics) {
                Matrix w(1, 3);
                w << fit.w_asymmetry, fit.w_min_eigenvalue, fit.w_trace;
                write_csv_matrix(fs::path(c_fn.out) / "w_checks.csv", w);
                write_csv_matrix(fs::path(c_fn.out) / "centered_gram.csv", fit.centered_gram);
            }
        } else if (predict->parsed()) {
            const auto fit = load_kwire_fit(fit_dir);
            write_matrix(c_pr.out, kwire_predict(fit, read_csv_matrix(x_pr)));
        } else if (order->parsed()) {
            const Matrix x = read_csv_matrix(x_or);
            const auto d = response_distances(r_or);
            LadleOptions opt;
            opt.n_boot = boot;
            opt.seed = c_or.seed;
            opt.log_base = log_base;
            opt.threads = c_or.threads;
            const auto res = ladle_estimate(x, d, opt);
            if (res.skipped > 0) std::cerr << "warning: " << res.skipped << " bootstrap replicates skipped\n";
            std::cout << "d_hat=" << res.d_hat << "\n";
            if (!c_or.out.empty()) {
                std::ofstream out(c_or.out, std::ios::binary);
                if (!out) throw IoError("cannot write " + c_or.out);
                out << "k,f_n,g_n,objective\n";
                char buf[128];
                for (std::size_t k = 0; k < res.f_n.size(); ++k) {
                    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", k, res.f_n[k], res.g_n[k],
                                  res.objective[k]);
                    out << buf;
                }
            }
        } else if (simulate->parsed()) {
            SimDesign design;
            const std::map<std::string, Model> models{{"I", Model::I}, {"II", Model::II}, {"III", Model::III},
                                                      {"IV", Model::IV}};
            const std::map<std::string, Scenario> scenarios{{"default", Scenario::standard},
                                                            {"S1", Scenario::S1}, {"S2", Scenario::S2},
                                                            {"S3", Scenario::S3}, {"S4", Scenario::S4}};
            const std::map<std::string, Method> methods{{"wire", Method::wire}, {"kwire", Method::kwire},
                                                        {"ladle", Method::ladle}};
            design.model = models.at(model_s);
            design.kase = case_s == "i" ? Case::i : Case::ii;
            design.n = n_s;
            design.p = p_s;
            design.scenario = scenarios.at(scenario_s);
            design.seed = c_si.seed;
            design.noise_sd = noise_s;
            design.model3_cuberoot = cuberoot_s == "angle" ? CubeRoot::angle : CubeRoot::component;
            MethodParams params;
            params.epsilon_n = eps_s;
            params.sigma_kappa = sigma_s;
            params.n_boot = boot_s;
            params.log_base = log_base_s;
            params.threads = c_si.threads;
            const auto summary = run_experiment(design, methods.at(method_s), reps_s, params);

            std::ostringstream csv;
            char buf[160];
            csv << "replicate,r2,rho2,d_hat,correct\n";
            for (const auto& r : summary.replicates) {
                std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%d,%d\n", r.replicate, r.r2, r.rho2, r.d_hat,
                              r.correct ? 1 : 0);
                csv << buf;
            }
            std::snprintf(buf, sizeof buf, "mean,%.17g,%.17g,,%d\n", summary.mean_r2, summary.mean_rho2,
                          summary.correct_count);
            csv << buf;
            if (c_si.out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(c_si.out, std::ios::binary);
                if (!out) throw IoError("cannot write " + c_si.out);
                out << csv.str();
                std::cout << "model=" << model_s << " case=" << case_s << " n=" << n_s << " p=" << p_s
                          << " method=" << method_s << " reps=" << reps_s << " mean_r2=" << format_value(summary.mean_r2)
                          << " mean_rho2=" << format_value(summary.mean_rho2)
                          << " correct=" << summary.correct_count << "\n";
            }
        } else if (digits->parsed()) {
            if (c_dg.out.empty()) throw ConfigError("digits needs --out DIR");
            const auto cls = parse_classes(classes_s);
            const std::set<int> class_set(cls.begin(), cls.end());
            const auto orient = half_s == "upper-as-x" ? HalfOrientation::upper_as_x : HalfOrientation::lower_as_x;
            const auto train = load_optdigits(train_path, class_set);
            const auto test = load_optdigits(test_path, class_set);
            if (train.size() < 2) throw ValidationError("training set has fewer than two images for the classes");
            const auto [x_train, y_train] = halves_matrices(train, orient);
            const auto [x_test, y_test] = halves_matrices(test, orient);
            (void)y_test;
            const auto spec = metric_spec(r_dg);
            const auto dist = pairwise_distance_matrix(EuclideanVectors{y_train}, spec);

            const fs::path dir(c_dg.out);
            fs::create_directories(dir);
            Matrix z_train, z_test;
            std::string detail_line;
            if (method_dg == "kwire") {
                const double sigma = sigma_dg ? *sigma_dg : median_pairwise_distance(x_train);
                const auto fit = kwire_fit(x_train, dist, d_dg, eps_dg, KernelSpec{sigma});
                z_train = kwire_predict(fit, x_train);
                z_test = test.empty() ? Matrix(0, d_dg) : kwire_predict(fit, x_test);
                detail_line = " sigma=" + format_value(sigma);
                save_kwire_fit(fit, dir / "fit");
            } else {
                const auto fit = wire_fit(x_train, dist, d_dg);
                for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
                z_train = sufficient_predictors(x_train, fit);
                z_test = test.empty() ? Matrix(0, fit.d) : sufficient_predictors(x_test, fit);
                write_csv_matrix(dir / "basis.csv", fit.basis);
            }

            auto labels_of = [](const std::vector<DigitImage>& imgs) {
                std::vector<int> l;
                l.reserve(imgs.size());
                for (const auto& im : imgs) l.push_back(im.label);
                return l;
            };
            const auto l_train = labels_of(train);
            const auto l_test = labels_of(test);
            auto label_matrix = [](const std::vector<int>& l) {
                Matrix m(static_cast<Index>(l.size()), 1);
                for (std::size_t i = 0; i < l.size(); ++i) m(static_cast<Index>(i), 0) = l[i];
                return m;
            };
            write_csv_matrix(dir / "train_predictors.csv", z_train);
            write_csv_matrix(dir / "test_predictors.csv", z_test);
            write_csv_matrix(dir / "train_labels.csv", label_matrix(l_train));
            write_csv_matrix(dir / "test_labels.csv", label_matrix(l_test));
            if (!svg_path.empty() && z_train.cols() >= 2) {
                const fs::path svg(svg_path);
                const fs::path stem = svg.parent_path() / svg.stem();
                emit_scatter_svg(z_train, l_train, stem.string() + "-train.svg");
                if (!test.empty()) emit_scatter_svg(z_test, l_test, stem.string() + "-test.svg");
            } else if (!svg_path.empty()) {
                std::cerr << "warning: scatter plots need --d >= 2; skipped\n";
            }
            std::cout << "train=" << train.size() << " test=" << test.size() << " method=" << method_dg
                      << " metric=" << r_dg.metric << detail_line << "\n";
        } else if (distances->parsed()) {
            const auto spec = metric_spec(r_di);
            write_matrix(c_di.out, pairwise_distance_matrix(read_responses(r_di.y, spec.kind), spec).values());
        } else if (eval->parsed()) {
            const Matrix a = read_csv_matrix(a_path);
            const Matrix b = read_csv_matrix(b_path);
            const double v = stat == "trace" ? trace_correlation(a, b) : distance_correlation_sq(a, b);
            std::cout << format_value(v) << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "fsdr: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "fsdr: io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fsdr: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
