#include "commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sagnacsr/config.hpp"
#include "sagnacsr/correlator.hpp"
#include "sagnacsr/errors.hpp"
#include "sagnacsr/io.hpp"
#include "sagnacsr/pipeline.hpp"

namespace sagnacsr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Ends a command early with an exit code; the message is already printed.
struct Exit {
    int code;
};

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
};

struct Io {
    std::ostream& out;
    std::ostream& err;
};

std::string timestamp()
{
    std::time_t t = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = std::time_t(std::strtoll(epoch, nullptr, 10));
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path resolve(const Globals& g, const std::string& path)
{
    const fs::path p(path);
    return p.is_absolute() ? p : fs::path(g.out_dir) / p;
}

void print_diags(const Io& io, const std::string& origin, const std::vector<ParseDiagnostic>& diags)
{
    for (const auto& d : diags) io.err << origin << ':' << d.to_string() << '\n';
}

RunConfig load_config(const std::string& path, const Globals& g, const Io& io)
{
    std::string text;
    try {
        text = read_text(path);
    } catch (const Error& e) {
        io.err << "error: " << e.what() << '\n';
        throw Exit{kExitConfig};
    }

    auto parsed = parse(text);
    if (auto* diags = std::get_if<std::vector<ParseDiagnostic>>(&parsed)) {
        print_diags(io, path, *diags);
        throw Exit{kExitConfig};
    }
    RunConfig cfg = std::get<RunConfig>(std::move(parsed));

    for (const auto& o : g.overrides) {
        if (auto diags = apply_override(cfg, o); !diags.empty()) {
            print_diags(io, "--override '" + o + "'", diags);
            throw Exit{kExitConfig};
        }
    }
    if (g.seed) cfg.noise.seed = cfg.detection.seed = *g.seed;

    const auto diags = validate(cfg);
    print_diags(io, path, diags);
    if (has_errors(diags)) throw Exit{kExitConfig};
    return cfg;
}

json metrics_json(const CorrelationResult& r)
{
    return {{"order", r.order},
            {"visibility", r.visibility},
            {"fringe_count", r.fringe_count ? json(*r.fringe_count) : json(nullptr)},
            {"enhancement", r.enhancement ? json(*r.enhancement) : json(nullptr)},
            {"effective_wavelength_ratio", r.effective_wavelength_ratio}};
}

void print_metrics(const Io& io, const CorrelationResult& r)
{
    io.out << "N = " << r.order << '\n'
           << "visibility = " << format_real(r.visibility) << '\n'
           << "fringe_count = " << (r.fringe_count ? std::to_string(*r.fringe_count) : "n/a") << '\n'
           << "enhancement = " << (r.enhancement ? format_real(*r.enhancement) : "n/a") << '\n'
           << "effective_wavelength_ratio = " << format_real(r.effective_wavelength_ratio) << '\n';
}

std::string_view format_name(OutputFormat f)
{
    switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::svg: return "svg";
    }
    return "?";
}

std::vector<double> normalized(std::vector<double> v, double scale)
{
    for (double& x : v) x /= scale;
    return v;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& path, const Globals& g, const Io& io)
{
    const RunConfig cfg = load_config(path, g, io);
    const auto grid = cfg.zeta_grid();
    const int order = cfg.bank.total_order();

    BankRun run;
    CorrelationResult metrics;
    std::optional<FringeTrace> detected;
    try {
        run = run_bank(grid, cfg.bank, cfg.sagnac.input_intensity, cfg.noise);
        metrics = run.product;
        if (cfg.detection.kind == DetectionKind::poisson) {
            detected = detect(run.product.trace, cfg.detection_model());
            metrics = summarize(*detected, order);
        }
    } catch (const Error& e) {
        io.err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }

    std::vector<Column> columns{{"zeta", grid}, {"product", run.product.trace.values}};
    if (detected) columns.push_back({"detected", detected->values});
    for (std::size_t k = 0; k < run.detector1.size(); ++k) {
        columns.push_back({"I1_k" + std::to_string(k), run.detector1[k]});
        columns.push_back({"I2_k" + std::to_string(k), run.detector2[k]});
    }

    std::vector<OutputSpec> outputs = cfg.outputs;
    if (outputs.empty())
        outputs = {{OutputFormat::csv, "trace.csv"}, {OutputFormat::json, "manifest.json"},
                   {OutputFormat::svg, "trace.svg"}};

    json manifest{{"tool_version", kToolVersion},
                  {"command", "simulate"},
                  {"seed", cfg.noise.seed},
                  {"timestamp", timestamp()},
                  {"config", serialize(cfg)},
                  {"sagnac_phase", sagnac_phase(cfg.sagnac)},
                  {"metrics", metrics_json(metrics)},
                  {"metrics_column", detected ? "detected" : "product"},
                  {"outputs", json::array()}};
    for (const auto& o : outputs) manifest["outputs"].push_back({{"format", format_name(o.format)}, {"path", o.path}});

    try {
        for (const auto& o : outputs) {
            const fs::path target = resolve(g, o.path);
            switch (o.format) {
            case OutputFormat::csv: write_text(target, csv_text(columns)); break;
            case OutputFormat::json: write_text(target, manifest.dump(2) + "\n"); break;
            case OutputFormat::svg: {
                std::vector<SvgSeries> series{{"R(" + std::to_string(order) + ")", grid, run.product.trace.values}};
                if (detected) series.push_back({"detected", grid, detected->values});
                write_text(target, svg_chart("N = " + std::to_string(order) + " intensity product", series));
                break;
            }
            }
        }
    } catch (const Error& e) {
        io.err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    io.out << "sagnac_phase = " << format_real(sagnac_phase(cfg.sagnac)) << '\n';
    print_metrics(io, metrics);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// reproduce

struct Check {
    std::string what;
    bool ok;
};

int report_checks(const Io& io, const std::vector<Check>& checks)
{
    bool all = true;
    for (const auto& c : checks) {
        io.out << (c.ok ? "[ok]   " : "[FAIL] ") << c.what << '\n';
        all = all && c.ok;
    }
    if (!all) io.err << "self-check failed\n";
    return all ? kExitOk : kExitNumeric;
}

int reproduce_fig2(const Globals& g, const Io& io)
{
    constexpr int kBlocks = 256;  // N = 512
    constexpr std::size_t kPoints = 1024;
    constexpr std::size_t kSvgStride = 32;
    const auto grid = period_grid(kPoints);
    const auto bank = EraserBankSpec::make(kBlocks);
    const BankRun run = run_bank(grid, bank, 1.0, {});
    const double full_scale = 2.0 * physical_block_norm(1.0, kBlocks);

    std::vector<Column> a{{"zeta", grid}}, b{{"zeta", grid}}, c{{"zeta", grid}};
    std::vector<SvgSeries> sa, sb, sc;
    for (std::size_t k = 0; k < std::size_t(kBlocks); ++k) {
        const std::string tag = "k" + std::to_string(k);
        auto i1 = normalized(run.detector1[k], full_scale);
        auto i2 = normalized(run.detector2[k], full_scale);
        std::vector<double> r2(kPoints);
        for (std::size_t i = 0; i < kPoints; ++i) r2[i] = i1[i] * i2[i] * 4.0;
        if (k % kSvgStride == 0) {
            sa.push_back({tag, grid, i1});
            sb.push_back({tag, grid, i2});
            sc.push_back({tag, grid, r2});
        }
        a.push_back({"I1_" + tag, std::move(i1)});
        b.push_back({"I2_" + tag, std::move(i2)});
        c.push_back({"R2_" + tag, std::move(r2)});
    }

    // (d): blocks whose xi_k is 0, pi/4, pi/2, 3pi/4.
    const std::array<std::pair<std::size_t, const char*>, 4> picks{
        {{0, "xi_0"}, {64, "xi_pi_4"}, {128, "xi_pi_2"}, {192, "xi_3pi_4"}}};
    std::vector<Column> d{{"zeta", grid}};
    std::vector<SvgSeries> sd;
    for (const auto& [k, name] : picks) {
        d.push_back(c[k + 1]);
        d.back().label = std::string("R2_") + name;
        sd.push_back({name, grid, d.back().values});
    }

    const auto r4 = nth_order(grid, phase_schedule(2));
    const auto r8 = nth_order(grid, phase_schedule(4));
    const auto r16 = nth_order(grid, phase_schedule(8));
    const std::vector<Column> e{{"zeta", grid}, {"R4", r4.trace.values}, {"R8", r8.trace.values}};
    const std::vector<Column> f{{"zeta", grid}, {"R16", r16.trace.values}};

    const fs::path dir(g.out_dir);
    write_text(dir / "fig2a.csv", csv_text(a));
    write_text(dir / "fig2b.csv", csv_text(b));
    write_text(dir / "fig2c.csv", csv_text(c));
    write_text(dir / "fig2d.csv", csv_text(d));
    write_text(dir / "fig2e.csv", csv_text(e));
    write_text(dir / "fig2f.csv", csv_text(f));
    write_text(dir / "fig2a.svg", svg_chart("(a) I1, every 32nd of 256 blocks", sa));
    write_text(dir / "fig2b.svg", svg_chart("(b) I2, every 32nd of 256 blocks", sb));
    write_text(dir / "fig2c.svg", svg_chart("(c) second-order product R2", sc));
    write_text(dir / "fig2d.svg", svg_chart("(d) xi-shifted second-order products", sd));
    write_text(dir / "fig2e.svg", svg_chart("(e) N = 4 and N = 8 products",
                                            std::vector<SvgSeries>{{"N=4", grid, r4.trace.values},
                                                                   {"N=8", grid, r8.trace.values}}));
    write_text(dir / "fig2f.svg",
               svg_chart("(f) N = 16 product", std::vector<SvgSeries>{{"N=16", grid, r16.trace.values}}));

    // Self-checks against the figure's stated structure.
    auto trace_of = [&](const std::vector<double>& v) { return FringeTrace{grid, v, ""}; };
    bool out_of_phase = true;
    for (std::size_t k = 0; k < std::size_t(kBlocks); ++k)
        for (std::size_t i = 0; i < kPoints; ++i)
            out_of_phase = out_of_phase &&
                           std::abs(a[k + 1].values[i] - b[k + 1].values[(i + kPoints / 2) % kPoints]) <= 1e-12;
    const int first = count_fringes(trace_of(a[1].values));
    const int second = count_fringes(trace_of(c[1].values));

    return report_checks(io, {{"(a)/(b) I1(zeta) = I2(zeta + pi) for all 256 blocks", out_of_phase},
                              {"(a) one fringe per 2pi per detector", first == 1},
                              {"(c) second-order fringes doubled: " + std::to_string(second), second == 2 * first},
                              {"(e) N=4 fringe count 4", r4.fringe_count == 4},
                              {"(e) N=8 fringe count 8", r8.fringe_count == 8},
                              {"(f) N=16 fringe count 16", r16.fringe_count == 16},
                              {"(e)/(f) visibility 1", std::abs(r16.visibility - 1.0) <= 1e-12}});
}

int reproduce_fig3(const Globals& g, const Io& io)
{
    constexpr std::size_t kPoints = 10000;
    const auto grid = period_grid(kPoints);
    std::vector<Column> cols{{"zeta", grid}};
    std::vector<SvgSeries> series;
    std::vector<Check> checks;
    for (int order : {10, 100}) {
        const auto closed = pbw_closed_form(grid, order);
        const auto product = nth_order(grid, phase_schedule(order / 2));
        double dev = 0.0;
        for (std::size_t i = 0; i < kPoints; ++i)
            dev = std::max(dev, std::abs(closed.values[i] - product.trace.values[i]));
        const std::string n = std::to_string(order);
        cols.push_back({"PBW" + n, closed.values});
        cols.push_back({"R" + n, product.trace.values});
        series.push_back({"closed form N=" + n, grid, closed.values});
        series.push_back({"product N=" + n, grid, product.trace.values});
        checks.push_back({"N=" + n + " product vs closed form max deviation " + format_real(dev), dev <= 1e-9});
        checks.push_back({"N=" + n + " fringe count", product.fringe_count == order});
    }
    const fs::path dir(g.out_dir);
    write_text(dir / "fig3.csv", csv_text(cols));
    write_text(dir / "fig3.svg", svg_chart("Normalized N-th order products, N = 10 and 100", series));
    return report_checks(io, checks);
}

int cmd_reproduce(const std::string& figure, const Globals& g, const Io& io)
{
    try {
        return figure == "fig2" ? reproduce_fig2(g, io) : reproduce_fig3(g, io);
    } catch (const Error& e) {
        io.err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
}

// ---------------------------------------------------------------------------
// noise-demo

int cmd_noise_demo(double sigma, std::uint64_t samples, int order, const Globals& g, const Io& io)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        io.err << "error: --sigma must be non-negative\n";
        return kExitConfig;
    }
    if (samples < 1) {
        io.err << "error: --samples must be at least 1\n";
        return kExitConfig;
    }
    if (order < 2 || order % 2 != 0) {
        io.err << "error: --order must be an even number >= 2\n";
        return kExitConfig;
    }
    const std::uint64_t seed = g.seed.value_or(0);
    const auto grid = period_grid(kPointsPerFringe * std::size_t(order));
    const auto bank = EraserBankSpec::make(order / 2);

    const NoiseSpec common{NoiseKind::common_path, sigma, seed};
    const NoiseSpec differential{NoiseKind::differential_arm, sigma, seed};
    EnsembleRun sag, mzi;
    try {
        sag = run_ensemble(grid, bank, common, samples, Interferometer::sagnac);
        mzi = run_ensemble(grid, bank, differential, samples, Interferometer::mzi);
    } catch (const Error& e) {
        io.err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }

    const json report{
        {"tool_version", kToolVersion},
        {"command", "noise-demo"},
        {"seed", seed},
        {"timestamp", timestamp()},
        {"sigma", sigma},
        {"samples", samples},
        {"order", order},
        {"expected_mzi_visibility", std::exp(-sigma * sigma / 2.0)},
        {"sagnac",
         {{"first_order_visibility", sag.first_order_visibility}, {"product_visibility", sag.product_visibility}}},
        {"mzi",
         {{"first_order_visibility", mzi.first_order_visibility},
          {"first_order_visibility_stderr", mzi.first_order_visibility_stderr},
          {"product_visibility", mzi.product_visibility}}}};

    const std::vector<Column> cols{{"zeta", grid},
                                   {"sagnac_I1", sag.first_order.values},
                                   {"sagnac_R", sag.product.values},
                                   {"mzi_I1", mzi.first_order.values},
                                   {"mzi_R", mzi.product.values}};
    const std::string n = std::to_string(order);
    const std::vector<SvgSeries> series{{"Sagnac R" + n, grid, sag.product.values},
                                        {"MZI R" + n, grid, mzi.product.values},
                                        {"Sagnac I1", grid, sag.first_order.values},
                                        {"MZI I1", grid, mzi.first_order.values}};
    try {
        const fs::path dir(g.out_dir);
        write_text(dir / "noise_demo.json", report.dump(2) + "\n");
        write_text(dir / "noise_demo.csv", csv_text(cols));
        write_text(dir / "noise_demo.svg",
                   svg_chart("Ensemble average, sigma = " + format_real(sigma) + " rad", series));
    } catch (const Error& e) {
        io.err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    io.out << "sagnac visibility (product) = " << format_real(sag.product_visibility) << '\n'
           << "sagnac visibility (first order) = " << format_real(sag.first_order_visibility) << '\n'
           << "mzi visibility (product) = " << format_real(mzi.product_visibility) << '\n'
           << "mzi visibility (first order) = " << format_real(mzi.first_order_visibility) << " +- "
           << format_real(mzi.first_order_visibility_stderr) << '\n'
           << "expected mzi first-order visibility exp(-sigma^2/2) = " << format_real(std::exp(-sigma * sigma / 2.0))
           << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------------------
// sensitivity

int cmd_sensitivity(const std::string& path, std::vector<int> orders, const Globals& g, const Io& io)
{
    const RunConfig cfg = load_config(path, g, io);
    if (cfg.detection.kind != DetectionKind::poisson) {
        io.err << "error: sensitivity: poisson model required ([detection] kind = poisson)\n";
        return kExitConfig;
    }
    for (int n : orders) {
        if (n != 1 && (n < 2 || n % 2 != 0)) {
            io.err << "error: order " << n << " is neither 1 nor an even number >= 2\n";
            return kExitConfig;
        }
    }
    if (std::find(orders.begin(), orders.end(), 1) == orders.end()) orders.insert(orders.begin(), 1);

    const int max_order = *std::max_element(orders.begin(), orders.end());
    const auto grid = period_grid(std::max(cfg.sweep.points, kPointsPerFringe * std::size_t(max_order)));
    const DetectionModel model = cfg.detection_model();
    const double root_p = std::sqrt(model.photons_per_channel);

    std::vector<double> col_n, col_dz, col_scaled;
    try {
        for (int n : orders) {
            FringeTrace trace;
            if (n == 1) {
                trace = {grid, std::vector<double>(grid.size()), "I1"};
                for (std::size_t i = 0; i < grid.size(); ++i)
                    trace.values[i] = block_intensities(grid[i], 0, 0.0, 0.5).first;
            } else {
                trace = nth_order(grid, phase_schedule(n / 2)).trace;
            }
            const double dz = phase_sensitivity(trace, model);
            col_n.push_back(n);
            col_dz.push_back(dz);
            col_scaled.push_back(dz * root_p);
        }
    } catch (const Error& e) {
        io.err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }

    const std::vector<Column> cols{{"order", col_n}, {"delta_zeta", col_dz}, {"delta_zeta_sqrt_photons", col_scaled}};
    try {
        write_text(fs::path(g.out_dir) / "sensitivity.csv", csv_text(cols));
    } catch (const Error& e) {
        io.err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    io.out << "photons_per_channel = " << format_real(model.photons_per_channel) << '\n';
    io.out << csv_text(cols);
    return kExitOk;
}

int cmd_config_show(const std::string& path, const Globals& g, const Io& io)
{
    io.out << serialize(load_config(path, g, io));
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    const Io io{out, err};
    Globals g;

    CLI::App app{"Sagnac quantum-eraser superresolution simulator", "sagnacsr"};
    app.require_subcommand(1);
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Seed for every random draw (overrides config seeds)");
    app.add_option("--out-dir", g.out_dir, "Directory for relative output paths")->capture_default_str();
    app.add_option("--override", g.overrides, "section.key=value applied after the config file")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

    std::string config_path;
    auto* sim = app.add_subcommand("simulate", "Run the configured pipeline and write traces + manifest");
    sim->add_option("config", config_path, "Config file")->required();

    std::string figure;
    auto* rep = app.add_subcommand("reproduce", "Regenerate the fig2 / fig3 panels with self-checks");
    rep->add_option("figure", figure)->required()->check(CLI::IsMember({"fig2", "fig3"}));

    double sigma = 1.0;
    std::uint64_t samples = 1000;
    int order = 8;
    auto* nd = app.add_subcommand("noise-demo", "Sagnac vs Mach-Zehnder under phase noise");
    nd->add_option("--sigma", sigma, "Phase noise std-dev (rad)")->capture_default_str();
    nd->add_option("--samples", samples, "Noise realizations")->capture_default_str();
    nd->add_option("--order", order, "Product order N (even)")->capture_default_str();

    std::vector<int> orders{1, 2, 4, 8, 16};
    auto* sens = app.add_subcommand("sensitivity", "Phase sensitivity vs product order");
    sens->add_option("config", config_path, "Config file with poisson detection")->required();
    sens->add_option("--orders", orders, "Comma-separated orders")->delimiter(',')->capture_default_str();

    auto* cfg = app.add_subcommand("config", "Config utilities");
    cfg->require_subcommand(1);
    auto* show = cfg->add_subcommand("show", "Print the canonical form of a config");
    show->add_option("config", config_path, "Config file")->required();

    for (auto* sub : {sim, rep, nd, sens, cfg, show}) sub->fallthrough();

    std::vector<std::string> storage{"sagnacsr"};
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    if (seed_opt->count() > 0) g.seed = seed;

    try {
        if (*sim) return cmd_simulate(config_path, g, io);
        if (*rep) return cmd_reproduce(figure, g, io);
        if (*nd) return cmd_noise_demo(sigma, samples, order, g, io);
        if (*sens) return cmd_sensitivity(config_path, orders, g, io);
        if (*show) return cmd_config_show(config_path, g, io);
    } catch (const Exit& e) {
        return e.code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitConfig;
}

}  // namespace sagnacsr::cli
