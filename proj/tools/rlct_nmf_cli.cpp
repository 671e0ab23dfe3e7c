#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rlct_nmf/bayes_nmf.hpp"
#include "rlct_nmf/error.hpp"
#include "rlct_nmf/matrix_io.hpp"
#include "rlct_nmf/model_select.hpp"
#include "rlct_nmf/parallel.hpp"
#include "rlct_nmf/random.hpp"
#include "rlct_nmf/rlct_core.hpp"
#include "rlct_nmf/version.hpp"
#include "rlct_nmf/volume_probe.hpp"

namespace fs = std::filesystem;
using namespace rlct_nmf;
using nlohmann::json;

namespace {

struct Globals {
    std::string seed_text;
    int workers = default_workers();
    bool header = false;
    bool truncate_gaussian = false;
    std::string out;
    std::string csv;
};

struct DimArgs {
    int M = 0;
    int N = 0;
    int H = 0;
    int H0 = 0;
};

struct TruthArgs {
    std::string a_path;
    std::string b_path;
    double value = 1.0;
};

struct ChainArgs {
    ChainConfig config;
    std::optional<double> prior_lower;
    std::optional<double> prior_upper;
};

// Data-driven commands can take their shape from --data instead.
void add_dims(CLI::App* cmd, DimArgs& d, bool required = true) {
    cmd->add_option("--m", d.M, "rows M")->required(required);
    cmd->add_option("--n", d.N, "columns N")->required(required);
    cmd->add_option("--h", d.H, "inner dimension H of the model")
        ->required(required);
    cmd->add_option("--h0", d.H0, "nonnegative rank of the truth")
        ->required(required);
}

void add_truth(CLI::App* cmd, TruthArgs& t) {
    cmd->add_option("--a", t.a_path, "CSV file with the true A (M x H0)");
    cmd->add_option("--b", t.b_path, "CSV file with the true B (H0 x N)");
    cmd->add_option("--truth-value", t.value,
                    "fill value for A and B when no files are given")
        ->capture_default_str();
}

void add_chain(CLI::App* cmd, ChainArgs& c) {
    auto& cfg = c.config;
    cmd->add_option("--burn-in", cfg.burn_in)->capture_default_str();
    cmd->add_option("--samples", cfg.samples, "retained samples per chain")
        ->capture_default_str();
    cmd->add_option("--thin", cfg.thinning)->capture_default_str();
    cmd->add_option("--chains", cfg.chains)->capture_default_str();
    cmd->add_option("--step", cfg.initial_step, "initial proposal scale")
        ->capture_default_str();
    cmd->add_option("--prior-lower", c.prior_lower);
    cmd->add_option("--prior-upper", c.prior_upper);
}

Family family_arg(const std::string& name) { return parse_family(name); }

std::uint64_t resolve_seed(const Globals& g, bool& was_auto) {
    was_auto = false;
    if (g.seed_text.empty())
        throw ValidationError("this command needs --seed <uint64> "
                              "(or --seed auto)");
    if (g.seed_text == "auto") {
        was_auto = true;
        return random_device_seed();
    }
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(g.seed_text, &used, 0);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != g.seed_text.size() || g.seed_text.front() == '-')
        throw ValidationError("invalid --seed '" + g.seed_text + "'");
    return v;
}

ModelDims model_dims(const DimArgs& d) {
    ModelDims dims{d.M, d.N, d.H};
    dims.validate();
    return dims;
}

TrueStructure truth_from(const DimArgs& d, const TruthArgs& t,
                         const Globals& g) {
    TrueStructure truth = TrueStructure::of_rank(d.H0);
    if (d.H0 > 0) {
        CsvOptions opts;
        opts.header = g.header;
        if (!t.a_path.empty() || !t.b_path.empty()) {
            if (t.a_path.empty() || t.b_path.empty())
                throw ValidationError("--a and --b must be given together");
            truth.A = load_matrix_csv(t.a_path, opts);
            truth.B = load_matrix_csv(t.b_path, opts);
        } else {
            if (!(t.value > 0.0))
                throw ValidationError("--truth-value must be positive");
            truth.A = NonnegMatrix::Constant(d.M, d.H0, t.value);
            truth.B = NonnegMatrix::Constant(d.H0, d.N, t.value);
        }
    }
    truth.validate(ModelDims{d.M, d.N, d.H});
    return truth;
}

json truth_json(const TrueStructure& t) {
    json j{{"H0", t.H0}};
    if (t.A)
        j["A"] = matrix_to_json(*t.A);
    if (t.B)
        j["B"] = matrix_to_json(*t.B);
    return j;
}

json dims_json(const DimArgs& d) {
    return {{"M", d.M}, {"N", d.N}, {"H", d.H}, {"H0", d.H0}};
}

PriorBox prior_from(const ChainArgs& c, Family family, const NonnegMatrix& ab) {
    PriorBox box = default_prior_box(family, ab);
    if (c.prior_lower)
        box.lower = *c.prior_lower;
    if (c.prior_upper)
        box.upper = *c.prior_upper;
    box.validate(family);
    return box;
}

json envelope(const std::string& command, json config, std::uint64_t seed,
              bool seed_auto, int workers) {
    config["workers"] = workers;
    return {{"toolkit", "rlct-nmf"},
            {"version", std::string(kVersion)},
            {"command", command},
            {"master_seed", seed},
            {"seed_auto", seed_auto},
            {"config", std::move(config)}};
}

void emit_json(const Globals& g, const json& report) {
    if (g.out.empty())
        std::cout << report.dump(2) << '\n';
    else
        write_report_json(g.out, report);
}

void emit_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path);
    if (!os)
        throw ValidationError("cannot write " + path);
    os << text;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size())
                throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError("invalid integer list '" + text + "'");
        }
    }
    if (out.empty())
        throw ValidationError("empty integer list");
    return out;
}

std::string rlct_line(const RlctValue& v) {
    return v.value.str() + " (" +
           (v.kind == RlctKind::Exact ? "exact" : "upper bound") + ")";
}

Dataset load_or_generate(const std::string& data_path, Family family,
                         const DimArgs& d, const TruthArgs& t, std::size_t n,
                         const Globals& g, std::uint64_t seed) {
    if (!data_path.empty())
        return read_dataset(data_path);
    GenerateOptions opts;
    opts.truncate_gaussian = g.truncate_gaussian;
    return generate_dataset(family, ModelDims{d.M, d.N, d.H}, truth_from(d, t, g),
                            n, seed, opts);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Learning coefficients of nonnegative matrix factorization: "
                 "closed forms and Monte Carlo checks"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    // --h is the model's inner dimension, so help is long-form only.
    app.set_help_flag("--help", "print help and exit");
    app.fallthrough();

    Globals g;
    app.add_option("--seed", g.seed_text,
                   "64-bit master seed, or 'auto' to draw and record one");
    app.add_option("--workers", g.workers,
                   "worker threads (default: RLCT_NMF_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--header", g.header, "matrix CSV inputs have a header line");
    app.add_flag("--truncate-gaussian", g.truncate_gaussian,
                 "redraw negative Gaussian observations");
    app.add_option("--out", g.out, "JSON report path (default: stdout)");
    app.add_option("--csv", g.csv, "CSV summary path");

    // rlct
    DimArgs rd;
    std::optional<int> rr;
    bool r_json = false;
    auto* rlct = app.add_subcommand("rlct", "closed-form learning coefficients");
    add_dims(rlct, rd);
    rlct->add_option("--r", rr, "rank for reduced rank regression (default H0)");
    rlct->add_flag("--json", r_json);

    // table
    std::vector<int> sizes{2, 3, 4, 5};
    int max_h = 5;
    std::string table_format = "csv";
    auto* table = app.add_subcommand("table", "NMF vs RRR comparison table");
    table->add_option("--sizes", sizes, "square sizes M = N")->delimiter(',')
        ->capture_default_str();
    table->add_option("--max-h", max_h)->capture_default_str();
    table->add_option("--format", table_format)
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    // volume
    DimArgs vd;
    TruthArgs vt;
    VolumeOptions vopts;
    double t_hi = 1.0;
    int decades = 6;
    int per_decade = 12;
    auto* volume = app.add_subcommand("volume", "level-set volume scan and slope");
    add_dims(volume, vd);
    add_truth(volume, vt);
    volume->add_option("--samples", vopts.samples)->capture_default_str();
    volume->add_option("--box", vopts.box_upper, "box edge c");
    volume->add_option("--t-max", t_hi)->capture_default_str();
    volume->add_option("--decades", decades)->capture_default_str();
    volume->add_option("--per-decade", per_decade)->capture_default_str();

    // generr
    DimArgs gd;
    TruthArgs gt;
    ChainArgs gc;
    std::string g_family = "gaussian";
    GeneralizationConfig gcfg;
    auto* generr = app.add_subcommand("generr", "Bayes generalization error");
    add_dims(generr, gd);
    add_truth(generr, gt);
    add_chain(generr, gc);
    generr->add_option("--family", g_family)->capture_default_str();
    generr->add_option("--samples-n", gcfg.n, "training sample size n")
        ->capture_default_str();
    generr->add_option("--reps", gcfg.replications)->capture_default_str();
    generr->add_option("--test-draws", gcfg.mc_test_draws)->capture_default_str();
    generr->add_flag("!--no-antithetic", gcfg.antithetic);

    // free-energy
    DimArgs fd;
    TruthArgs ft;
    ChainArgs fc;
    std::string f_family = "gaussian";
    std::string f_data;
    std::string f_ladder = "default";
    std::string f_nlist;
    std::size_t f_n = 200;
    std::size_t f_reps = 1;
    auto* fe = app.add_subcommand("free-energy",
                                  "free energy by thermodynamic integration");
    add_dims(fe, fd, false);
    add_truth(fe, ft);
    add_chain(fe, fc);
    fe->add_option("--family", f_family)->capture_default_str();
    fe->add_option("--data", f_data, "dataset manifest (instead of generating)");
    fe->add_option("--samples-n", f_n)->capture_default_str();
    fe->add_option("--ladder", f_ladder)
        ->check(CLI::IsMember({"default", "quadratic"}))
        ->capture_default_str();
    fe->add_option("--n-list", f_nlist,
                   "comma-separated n values: fit the slope on nested prefixes");
    fe->add_option("--reps", f_reps, "replications for --n-list")
        ->capture_default_str();

    // sbic
    DimArgs sd;
    TruthArgs st;
    ChainArgs sc;
    std::string s_family = "gaussian";
    std::string s_data;
    std::string s_candidates = "1,2,3";
    std::size_t s_n = 500;
    auto* sbic = app.add_subcommand("sbic", "rank selection by penalised fit");
    add_dims(sbic, sd, false);
    add_truth(sbic, st);
    add_chain(sbic, sc);
    sbic->add_option("--family", s_family)->capture_default_str();
    sbic->add_option("--data", s_data, "dataset manifest (instead of generating)");
    sbic->add_option("--samples-n", s_n)->capture_default_str();
    sbic->add_option("--candidates", s_candidates)->capture_default_str();

    // gen-data
    DimArgs dd;
    TruthArgs dt;
    std::string d_family = "gaussian";
    std::size_t d_n = 100;
    std::string d_dir;
    auto* gen = app.add_subcommand("gen-data", "write a synthetic dataset");
    add_dims(gen, dd);
    add_truth(gen, dt);
    gen->add_option("--family", d_family)->capture_default_str();
    gen->add_option("--samples-n", d_n)->capture_default_str();
    gen->add_option("--dir", d_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        bool seed_auto = false;

        if (rlct->parsed()) {
            const ModelDims dims = model_dims(rd);
            const auto bound = nmf_rlct_bound(dims, TrueStructure::of_rank(rd.H0));
            const auto rrr = rrr_rlct(dims, RrrTruth{rr.value_or(rd.H0)});
            const auto regular = regular_half_dim(dims);
            if (r_json) {
                auto value_json = [](const RlctValue& v) {
                    return json{{"value", v.value.str()},
                                {"value_float", v.value.to_double()},
                                {"kind", to_string(v.kind)},
                                {"source", to_string(v.source)}};
                };
                json j{{"nmf", value_json(bound)},
                       {"rrr", value_json(rrr)},
                       {"rrr_r", rr.value_or(rd.H0)},
                       {"regular_half_dim", regular.value.str()},
                       {"degenerate", bound.degenerate},
                       {"version", std::string(kVersion)},
                       {"config", dims_json(rd)}};
                emit_json(g, j);
            } else {
                std::cout << rlct_line(bound) << '\n'
                          << "nmf: " << rlct_line(bound) << " ["
                          << to_string(bound.source) << "]\n"
                          << "rrr(r=" << rr.value_or(rd.H0)
                          << "): " << rlct_line(rrr) << " ["
                          << to_string(rrr.source) << "]\n"
                          << "regular d/2: " << regular.value.str() << '\n';
                if (bound.degenerate)
                    std::cout << "note: H = 0, the model is a single point\n";
            }
            return 0;
        }

        if (table->parsed()) {
            const auto t = comparison_table(sizes, max_h);
            if (table_format == "json") {
                json j = table_to_json(t);
                j["version"] = std::string(kVersion);
                emit_json(g, j);
            } else {
                emit_text(g.out, table_to_csv(t));
            }
            if (!g.csv.empty())
                emit_text(g.csv, table_to_csv(t));
            return 0;
        }

        if (volume->parsed()) {
            const std::uint64_t seed = resolve_seed(g, seed_auto);
            const ModelDims dims = model_dims(vd);
            const auto truth = truth_from(vd, vt, g);
            vopts.seed = seed;
            vopts.workers = g.workers;
            vopts.thresholds = log_thresholds(t_hi, decades, per_decade);
            const auto scan = estimate_volume(dims, truth, vopts);
            json config{{"dims", dims_json(vd)},
                        {"truth", truth_json(truth)},
                        {"samples", vopts.samples},
                        {"box_upper", scan.box_upper},
                        {"t_max", t_hi},
                        {"decades", decades},
                        {"per_decade", per_decade}};
            json report = envelope("volume", std::move(config), seed, seed_auto,
                                   g.workers);
            report["scan"] = to_json(scan);
            try {
                const auto fit = fit_lambda(scan);
                report["fit"] = to_json(fit);
                report["bound_check"] = to_json(check_bound(dims, truth, fit));
            } catch (const EstimationError& e) {
                report["fit_error"] = e.what();
            }
            emit_json(g, report);
            if (!g.csv.empty()) {
                std::ofstream os(g.csv);
                write_scan_csv(os, scan);
            }
            return report.contains("fit") ? 0 : 3;
        }

        if (generr->parsed()) {
            const std::uint64_t seed = resolve_seed(g, seed_auto);
            gcfg.family = family_arg(g_family);
            gcfg.dims = model_dims(gd);
            gcfg.truth = truth_from(gd, gt, g);
            gcfg.chain = gc.config;
            gcfg.prior = prior_from(gc, gcfg.family,
                                    gcfg.truth.product(gd.M, gd.N));
            gcfg.seed = seed;
            gcfg.workers = g.workers;
            gcfg.generate.truncate_gaussian = g.truncate_gaussian;
            const auto est = estimate_generalization_error(gcfg);
            json config{{"family", to_string(gcfg.family)},
                        {"dims", dims_json(gd)},
                        {"truth", truth_json(gcfg.truth)},
                        {"n", gcfg.n},
                        {"replications", gcfg.replications},
                        {"mc_test_draws", gcfg.mc_test_draws},
                        {"antithetic", gcfg.antithetic},
                        {"truncate_gaussian", g.truncate_gaussian},
                        {"prior", to_json(*gcfg.prior)},
                        {"chain", to_json(gcfg.chain)}};
            json report = envelope("generr", std::move(config), seed, seed_auto,
                                   g.workers);
            report["estimate"] = to_json(est);
            const auto bound =
                nmf_rlct_bound(gcfg.dims, TrueStructure::of_rank(gd.H0));
            report["rlct"] = {{"value", bound.value.str()},
                              {"value_float", bound.value.to_double()},
                              {"kind", to_string(bound.kind)}};
            emit_json(g, report);
            return 0;
        }

        if (fe->parsed()) {
            const std::uint64_t seed = resolve_seed(g, seed_auto);
            const Family family = family_arg(f_family);
            const auto ladder =
                f_ladder == "quadratic" ? quadratic_ladder() : default_ladder();
            json config{{"family", to_string(family)},
                        {"ladder", f_ladder},
                        {"chain", to_json(fc.config)}};
            if (f_nlist.empty()) {
                const Dataset data = load_or_generate(
                    f_data, family, fd, ft, f_n, g, derive_seed(seed, {0}));
                const int H = fd.H;
                if (H < 1)
                    throw ValidationError("free-energy needs --h >= 1");
                const PriorBox prior = prior_from(
                    fc, data.family,
                    data.truth ? data.truth->product(data.M, data.N)
                               : NonnegMatrix::Zero(data.M, data.N));
                const auto est = estimate_free_energy(
                    data, prior, H, ladder, fc.config, derive_seed(seed, {1}),
                    g.workers);
                config["data"] = f_data.empty() ? json("generated") : json(f_data);
                config["n"] = data.size();
                config["H"] = H;
                config["prior"] = to_json(prior);
                if (data.truth)
                    config["truth"] = truth_json(*data.truth);
                json report = envelope("free-energy", std::move(config), seed,
                                       seed_auto, g.workers);
                report["estimate"] = to_json(est);
                if (data.truth)
                    report["truth_log_likelihood"] = truth_log_likelihood(data);
                emit_json(g, report);
                return 0;
            }

            if (!f_data.empty())
                throw ValidationError("--n-list generates its own data; "
                                      "drop --data");
            std::vector<std::size_t> ns;
            for (int v : parse_int_list(f_nlist)) {
                if (v < 1)
                    throw ValidationError("--n-list values must be positive");
                ns.push_back(static_cast<std::size_t>(v));
            }
            const std::size_t n_max = *std::max_element(ns.begin(), ns.end());
            const ModelDims dims = model_dims(fd);
            const auto truth = truth_from(fd, ft, g);
            const PriorBox prior =
                prior_from(fc, family, truth.product(fd.M, fd.N));
            GenerateOptions gen_opts;
            gen_opts.truncate_gaussian = g.truncate_gaussian;
            std::vector<FreeEnergyPoint> pts(f_reps * ns.size());
            json per_point = json::array();
            for (std::size_t r = 0; r < f_reps; ++r) {
                const auto data = generate_dataset(
                    family, dims, truth, n_max, derive_seed(seed, {r, 0}),
                    gen_opts);
                for (std::size_t k = 0; k < ns.size(); ++k) {
                    const auto sub = data.prefix(ns[k]);
                    const auto est = estimate_free_energy(
                        sub, prior, fd.H, ladder, fc.config,
                        derive_seed(seed, {r, 1, k}), g.workers);
                    pts[r * ns.size() + k] =
                        FreeEnergyPoint{ns[k], est.f_value,
                                        truth_log_likelihood(sub)};
                    per_point.push_back({{"replication", r},
                                         {"n", ns[k]},
                                         {"f_value", est.f_value},
                                         {"stderr", est.std_error},
                                         {"truth_log_likelihood",
                                          pts[r * ns.size() + k]
                                              .truth_log_likelihood}});
                }
            }
            config["dims"] = dims_json(fd);
            config["truth"] = truth_json(truth);
            config["n_list"] = ns;
            config["replications"] = f_reps;
            config["prior"] = to_json(prior);
            config["truncate_gaussian"] = g.truncate_gaussian;
            json report = envelope("free-energy", std::move(config), seed,
                                   seed_auto, g.workers);
            report["points"] = std::move(per_point);
            report["slope"] = to_json(fit_lambda_from_free_energy(pts));
            emit_json(g, report);
            if (!g.csv.empty()) {
                std::ostringstream os;
                os.precision(17);
                os << "n,f_value,truth_log_likelihood\n";
                for (const auto& p : pts)
                    os << p.n << ',' << p.f_value << ','
                       << p.truth_log_likelihood << '\n';
                emit_text(g.csv, os.str());
            }
            return 0;
        }

        if (sbic->parsed()) {
            const std::uint64_t seed = resolve_seed(g, seed_auto);
            const Family family = family_arg(s_family);
            const Dataset data = load_or_generate(s_data, family, sd, st, s_n, g,
                                                  derive_seed(seed, {0}));
            const PriorBox prior = prior_from(
                sc, data.family,
                data.truth ? data.truth->product(data.M, data.N)
                           : NonnegMatrix::Zero(data.M, data.N));
            const auto report_data =
                sbic_select(data, parse_int_list(s_candidates), prior,
                            sc.config, derive_seed(seed, {1}), g.workers);
            json config{{"family", to_string(data.family)},
                        {"data", s_data.empty() ? json("generated") : json(s_data)},
                        {"shape", {data.M, data.N}},
                        {"n", data.size()},
                        {"candidates", s_candidates},
                        {"prior", to_json(prior)},
                        {"chain", to_json(sc.config)}};
            if (data.truth)
                config["truth"] = truth_json(*data.truth);
            json report = envelope("sbic", std::move(config), seed, seed_auto,
                                   g.workers);
            report["result"] = to_json(report_data);
            emit_json(g, report);
            if (!g.csv.empty())
                emit_text(g.csv, sbic_summary_csv(report_data));
            return 0;
        }

        if (gen->parsed()) {
            const std::uint64_t seed = resolve_seed(g, seed_auto);
            GenerateOptions opts;
            opts.truncate_gaussian = g.truncate_gaussian;
            const auto data =
                generate_dataset(family_arg(d_family), model_dims(dd),
                                 truth_from(dd, dt, g), d_n, seed, opts);
            write_dataset(d_dir, data);
            std::cout << "wrote " << data.size() << " observations to "
                      << (fs::path(d_dir) / "manifest.json").string()
                      << " (seed " << seed << ")\n";
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const EstimationError& e) {
        std::cerr << "estimation failed: " << e.what() << '\n'
                  << e.diagnostics() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
