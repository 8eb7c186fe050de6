#include "sagnacsr/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace sagnacsr {

namespace {

struct ValueError {
    std::size_t offset = 0;  // byte offset inside the value text
    std::string message;
};

using SetResult = std::optional<ValueError>;
using Setter = std::function<SetResult(RunConfig&, std::string_view)>;

bool is_space(char c) { return c == ' ' || c == '\t'; }
bool is_ident(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

std::size_t skip_spaces(std::string_view s, std::size_t i)
{
    while (i < s.size() && is_space(s[i])) ++i;
    return i;
}

std::string_view trim_right(std::string_view s)
{
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

ValueError trailing(std::string_view text, std::size_t at, std::string_view after)
{
    return {at, "unexpected character '" + std::string(1, text[at]) + "' after " + std::string(after)};
}

template <class Int>
std::variant<Int, ValueError> parse_integer(std::string_view text, std::string_view what)
{
    Int value{};
    std::size_t start = (!text.empty() && text[0] == '+') ? 1 : 0;
    auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + text.size(), value);
    if (ec == std::errc::result_out_of_range) return ValueError{0, "integer out of range"};
    if (ec != std::errc()) return ValueError{0, "expected " + std::string(what)};
    const auto used = std::size_t(ptr - text.data());
    if (used != text.size()) return trailing(text, skip_spaces(text, used), "integer");
    return value;
}

struct Unit {
    std::string_view suffix;
    double scale;
};

constexpr std::array<Unit, 2> kAngleUnits{{{"rad", 1.0}, {"deg", kPi / 180.0}}};
constexpr std::array<Unit, 3> kSiUnits{{{"n", 1e-9}, {"u", 1e-6}, {"m", 1e-3}}};

template <std::size_t M>
std::variant<double, ValueError> parse_real(std::string_view text, const std::array<Unit, M>* units,
                                            std::string_view unit_help)
{
    double value = 0.0;
    std::size_t start = (!text.empty() && text[0] == '+') ? 1 : 0;
    auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + text.size(), value);
    if (ec == std::errc::result_out_of_range) return ValueError{0, "real out of range"};
    if (ec != std::errc() || !std::isfinite(value)) return ValueError{0, "expected real number"};

    const std::size_t used = std::size_t(ptr - text.data());
    const std::size_t unit_at = skip_spaces(text, used);
    if (unit_at == text.size()) return value;
    if (units) {
        const std::string_view rest = text.substr(unit_at);
        for (const auto& u : *units)
            if (rest == u.suffix) return value * u.scale;
        return ValueError{unit_at, "unknown unit suffix '" + std::string(rest) + "' (expected " +
                                       std::string(unit_help) + ")"};
    }
    return trailing(text, unit_at, "number");
}

std::variant<double, ValueError> parse_plain(std::string_view t)
{
    return parse_real<0>(t, nullptr, "");
}
std::variant<double, ValueError> parse_angle(std::string_view t)
{
    return parse_real(t, &kAngleUnits, "deg or rad");
}
std::variant<double, ValueError> parse_si(std::string_view t) { return parse_real(t, &kSiUnits, "n, u or m"); }

template <class E, std::size_t M>
std::variant<E, ValueError> parse_enum(std::string_view text, const std::array<std::pair<std::string_view, E>, M>& names)
{
    for (const auto& [name, e] : names)
        if (text == name) return e;
    std::string help;
    for (const auto& [name, e] : names) help += (help.empty() ? "" : "|") + std::string(name);
    return ValueError{0, "expected one of " + help};
}

constexpr std::array<std::pair<std::string_view, BankMode>, 2> kModes{
    {{"qwp_blocks", BankMode::qwp_blocks}, {"slm_pixels", BankMode::slm_pixels}}};
constexpr std::array<std::pair<std::string_view, NoiseKind>, 3> kNoiseKinds{
    {{"none", NoiseKind::none}, {"common_path", NoiseKind::common_path},
     {"differential_arm", NoiseKind::differential_arm}}};
constexpr std::array<std::pair<std::string_view, DetectionKind>, 2> kDetectionKinds{
    {{"ideal", DetectionKind::ideal}, {"poisson", DetectionKind::poisson}}};
constexpr std::array<std::pair<std::string_view, OutputFormat>, 3> kFormats{
    {{"csv", OutputFormat::csv}, {"json", OutputFormat::json}, {"svg", OutputFormat::svg}}};
constexpr std::array<std::pair<std::string_view, bool>, 2> kBools{{{"true", true}, {"false", false}}};

template <class E, std::size_t M>
std::string_view enum_name(E e, const std::array<std::pair<std::string_view, E>, M>& names)
{
    for (const auto& [name, v] : names)
        if (v == e) return name;
    return "?";
}

// Binds a parser result to a config field.
template <class T, class Parse, class Assign>
Setter bind(Parse parse, Assign assign)
{
    return [parse, assign](RunConfig& cfg, std::string_view text) -> SetResult {
        auto r = parse(text);
        if (auto* err = std::get_if<ValueError>(&r)) return *err;
        return assign(cfg, std::get<T>(r));
    };
}

SetResult ok() { return std::nullopt; }

const std::map<std::string, Setter, std::less<>>& setters()
{
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto positive_int = [](std::string_view s) -> std::variant<long long, ValueError> {
            auto r = parse_integer<long long>(s, "integer");
            if (auto* v = std::get_if<long long>(&r); v && *v < 1) return ValueError{0, "expected positive integer"};
            return r;
        };
        auto u64 = [](std::string_view s) { return parse_integer<std::uint64_t>(s, "unsigned integer"); };

        t["bank.block_count"] = bind<long long>(positive_int, [](RunConfig& c, long long v) -> SetResult {
            if (v > 1'000'000) return ValueError{0, "block_count too large"};
            c.bank.block_count = int(v);
            return ok();
        });
        t["bank.mode"] = bind<BankMode>([](auto s) { return parse_enum(s, kModes); },
                                        [](RunConfig& c, BankMode v) { c.bank.mode = v; return ok(); });
        t["bank.strict_qwp"] = bind<bool>([](auto s) { return parse_enum(s, kBools); },
                                          [](RunConfig& c, bool v) { c.bank.strict_qwp = v; return ok(); });
        t["bank.polarizer_angle"] = bind<double>(parse_angle, [](RunConfig& c, double v) {
            c.bank.polarizer_angle = v;
            return ok();
        });

        t["sagnac.wavelength"] = bind<double>(parse_si, [](RunConfig& c, double v) { c.sagnac.wavelength = v; return ok(); });
        t["sagnac.enclosed_area"] = bind<double>(parse_plain, [](RunConfig& c, double v) { c.sagnac.enclosed_area = v; return ok(); });
        t["sagnac.angular_velocity"] = bind<double>(parse_si, [](RunConfig& c, double v) { c.sagnac.angular_velocity = v; return ok(); });
        t["sagnac.input_intensity"] = bind<double>(parse_plain, [](RunConfig& c, double v) { c.sagnac.input_intensity = v; return ok(); });
        t["sagnac.photon_rate"] = bind<double>(parse_si, [](RunConfig& c, double v) { c.sagnac.photon_rate = v; return ok(); });

        t["noise.kind"] = bind<NoiseKind>([](auto s) { return parse_enum(s, kNoiseKinds); },
                                          [](RunConfig& c, NoiseKind v) { c.noise.kind = v; return ok(); });
        t["noise.sigma"] = bind<double>(parse_angle, [](RunConfig& c, double v) { c.noise.sigma = v; return ok(); });
        t["noise.seed"] = bind<std::uint64_t>(u64, [](RunConfig& c, std::uint64_t v) { c.noise.seed = v; return ok(); });

        t["detection.kind"] = bind<DetectionKind>([](auto s) { return parse_enum(s, kDetectionKinds); },
                                                  [](RunConfig& c, DetectionKind v) { c.detection.kind = v; return ok(); });
        t["detection.photons_per_channel"] = bind<double>(parse_si, [](RunConfig& c, double v) {
            c.detection.photons_per_channel = v;
            return ok();
        });
        t["detection.seed"] = bind<std::uint64_t>(u64, [](RunConfig& c, std::uint64_t v) { c.detection.seed = v; return ok(); });

        t["sweep.zeta_start"] = bind<double>(parse_angle, [](RunConfig& c, double v) { c.sweep.zeta_start = v; return ok(); });
        t["sweep.zeta_end"] = bind<double>(parse_angle, [](RunConfig& c, double v) { c.sweep.zeta_end = v; return ok(); });
        t["sweep.points"] = bind<long long>(positive_int, [](RunConfig& c, long long v) -> SetResult {
            if (v > 100'000'000) return ValueError{0, "points too large"};
            c.sweep.points = std::size_t(v);
            return ok();
        });

        t["output.format"] = bind<OutputFormat>([](auto s) { return parse_enum(s, kFormats); },
                                                [](RunConfig& c, OutputFormat v) { c.outputs.back().format = v; return ok(); });
        t["output.path"] = [](RunConfig& c, std::string_view s) -> SetResult {
            c.outputs.back().path = std::string(s);
            return ok();
        };
        return t;
    }();
    return table;
}

const std::set<std::string, std::less<>> kSections{"bank", "sagnac", "noise", "detection", "sweep", "output"};

void finish_derived(RunConfig& cfg) { cfg.bank.schedule = phase_schedule(cfg.bank.block_count); }

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ParseResult run()
    {
        std::size_t pos = 0;
        int lineno = 0;
        while (pos <= src_.size()) {
            const std::size_t nl = src_.find('\n', pos);
            std::string_view line = src_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            handle_line(line, lineno);
            if (nl == std::string_view::npos) break;
            pos = nl + 1;
        }
        finish_output();
        if (!diags_.empty()) return diags_;
        finish_derived(cfg_);
        return cfg_;
    }

private:
    enum class State { none, active, skip };

    void error(int line, std::size_t index, std::string msg)
    {
        diags_.push_back({line, int(index) + 1, Severity::error, std::move(msg)});
    }

    void handle_line(std::string_view line, int lineno)
    {
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::size_t i = skip_spaces(line, 0);
        if (i == line.size()) return;
        if (line[i] == '[')
            header(line, i, lineno);
        else
            assignment(line, i, lineno);
    }

    void header(std::string_view line, std::size_t i, int lineno)
    {
        const std::size_t name_at = skip_spaces(line, i + 1);
        std::size_t j = name_at;
        while (j < line.size() && is_ident(line[j])) ++j;
        const std::string_view name = line.substr(name_at, j - name_at);
        const std::size_t close = skip_spaces(line, j);

        state_ = State::skip;
        if (name.empty()) return error(lineno, name_at, "expected section name");
        if (close >= line.size() || line[close] != ']') return error(lineno, close, "expected ']' to close section header");
        if (const std::size_t extra = skip_spaces(line, close + 1); extra < line.size())
            return error(lineno, extra, "unexpected characters after section header");
        if (!kSections.contains(name)) return error(lineno, name_at, "unknown section [" + std::string(name) + "]");

        finish_output();
        section_ = std::string(name);
        seen_keys_.clear();
        if (section_ == "output") {
            cfg_.outputs.emplace_back();
            output_line_ = lineno;
        } else if (!seen_sections_.insert(section_).second) {
            return error(lineno, name_at, "duplicate section [" + section_ + "]");
        }
        state_ = State::active;
    }

    void assignment(std::string_view line, std::size_t i, int lineno)
    {
        std::size_t j = i;
        while (j < line.size() && is_ident(line[j])) ++j;
        if (j == i) return error(lineno, i, "expected key");
        const std::string_view key = line.substr(i, j - i);
        const std::size_t eq = skip_spaces(line, j);
        if (eq >= line.size() || line[eq] != '=') return error(lineno, eq, "expected '=' after key");
        const std::size_t value_at = skip_spaces(line, eq + 1);
        const std::string_view value = trim_right(line.substr(value_at));

        if (state_ == State::none) return error(lineno, i, "key outside of any section");
        if (state_ == State::skip) return;

        const std::string full = section_ + "." + std::string(key);
        const auto it = setters().find(full);
        if (it == setters().end())
            return error(lineno, i, "unknown key '" + std::string(key) + "' in section [" + section_ + "]");
        if (const auto [prev, fresh] = seen_keys_.emplace(std::string(key), lineno); !fresh)
            return error(lineno, i, "duplicate key '" + std::string(key) + "' (first set on line " +
                                        std::to_string(prev->second) + ")");
        if (value.empty()) return error(lineno, value_at, "missing value");
        if (auto err = it->second(cfg_, value)) return error(lineno, value_at + err->offset, err->message);

        if (section_ == "output") {
            if (key == "format") out_format_ = true;
            if (key == "path") out_path_ = true;
        } else {
            cfg_.positions[full] = {lineno, int(i) + 1};
        }
    }

    void finish_output()
    {
        if (section_ == "output" && state_ != State::none) {
            if (!out_format_ || !out_path_)
                diags_.push_back({output_line_, 1, Severity::error, "[output] needs both 'format' and 'path'"});
        }
        out_format_ = out_path_ = false;
        section_.clear();
    }

    std::string_view src_;
    RunConfig cfg_;
    std::vector<ParseDiagnostic> diags_;
    State state_ = State::none;
    std::string section_;
    std::set<std::string, std::less<>> seen_sections_;
    std::map<std::string, int, std::less<>> seen_keys_;
    int output_line_ = 0;
    bool out_format_ = false;
    bool out_path_ = false;
};

}  // namespace

DetectionModel RunConfig::detection_model() const
{
    DetectionModel m;
    m.kind = detection.kind;
    m.seed = detection.seed;
    m.photons_per_channel = detection.photons_per_channel.value_or(sagnac.photon_rate / bank.total_order());
    return m;
}

std::vector<double> RunConfig::zeta_grid() const
{
    return uniform_grid(sweep.zeta_start, sweep.zeta_end, sweep.points);
}

bool RunConfig::operator==(const RunConfig& o) const
{
    return bank == o.bank && sagnac == o.sagnac && noise == o.noise && detection == o.detection &&
           sweep == o.sweep && outputs == o.outputs;
}

std::string ParseDiagnostic::to_string() const
{
    return std::to_string(line) + ":" + std::to_string(column) + ": " +
           (severity == Severity::error ? "error" : "warning") + ": " + message;
}

ParseResult parse(std::string_view source) { return Parser(source).run(); }

bool has_errors(const std::vector<ParseDiagnostic>& diags)
{
    for (const auto& d : diags)
        if (d.severity == Severity::error) return true;
    return false;
}

std::vector<ParseDiagnostic> validate(const RunConfig& cfg)
{
    std::vector<ParseDiagnostic> out;
    auto at = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys)
            if (auto it = cfg.positions.find(k); it != cfg.positions.end()) return it->second;
        return SourcePos{};
    };
    auto report = [&](Severity sev, SourcePos p, std::string msg) {
        out.push_back({p.line, p.column, sev, std::move(msg)});
    };
    auto err = [&](std::initializer_list<const char*> keys, std::string msg) {
        report(Severity::error, at(keys), std::move(msg));
    };

    const int order = cfg.bank.total_order();
    const std::size_t need = kPointsPerFringe * std::size_t(order);
    if (cfg.sweep.points < need)
        err({"sweep.points", "bank.block_count"}, "sweep.points below 64·N (N=" + std::to_string(order) +
                                                      " needs at least " + std::to_string(need) + ")");

    if (!(cfg.sweep.zeta_end > cfg.sweep.zeta_start)) {
        err({"sweep.zeta_end", "sweep.zeta_start"}, "sweep.zeta_end must exceed sweep.zeta_start");
    } else if (std::abs((cfg.sweep.zeta_end - cfg.sweep.zeta_start) - 2.0 * kPi) > 1e-9) {
        report(Severity::warning, at({"sweep.zeta_end", "sweep.zeta_start"}),
               "sweep does not span one 2pi period; fringe counts will not be reported");
    }

    if (cfg.bank.strict_qwp && cfg.bank.mode == BankMode::qwp_blocks) {
        for (std::size_t k = 0; k < cfg.bank.schedule.size(); ++k) {
            if (!qwp_realizable(cfg.bank.schedule[k])) {
                err({"bank.strict_qwp", "bank.block_count"},
                    "strict QWP mode: schedule entry xi_" + std::to_string(k) + " = " +
                        format_real(cfg.bank.schedule[k]) + " rad is not one of {0, pi/2, pi}");
                break;
            }
        }
    }

    if (!(cfg.sagnac.wavelength > 0.0)) err({"sagnac.wavelength"}, "sagnac.wavelength must be positive");
    if (!(cfg.sagnac.enclosed_area > 0.0)) err({"sagnac.enclosed_area"}, "sagnac.enclosed_area must be positive");
    if (!(cfg.sagnac.photon_rate > 0.0)) err({"sagnac.photon_rate"}, "sagnac.photon_rate must be positive");
    if (!(cfg.sagnac.input_intensity >= 0.0))
        err({"sagnac.input_intensity"}, "sagnac.input_intensity must be non-negative");

    if (!(cfg.noise.sigma >= 0.0)) err({"noise.sigma"}, "noise.sigma must be non-negative");
    if (cfg.noise.kind == NoiseKind::differential_arm)
        err({"noise.kind"}, "differential_arm noise cannot be represented in the shared-path Sagnac loop");

    if (cfg.detection.kind == DetectionKind::poisson && !(cfg.detection_model().photons_per_channel > 0.0))
        err({"detection.photons_per_channel", "sagnac.photon_rate"}, "poisson photon budget must be positive");
    return out;
}

std::string format_real(double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

std::string serialize(const RunConfig& cfg)
{
    std::ostringstream os;
    auto rad = [](double v) { return format_real(v) + " rad"; };
    os << "[bank]\n"
       << "block_count = " << cfg.bank.block_count << "\n"
       << "mode = " << enum_name(cfg.bank.mode, kModes) << "\n"
       << "strict_qwp = " << enum_name(cfg.bank.strict_qwp, kBools) << "\n"
       << "polarizer_angle = " << rad(cfg.bank.polarizer_angle) << "\n\n";
    os << "[sagnac]\n"
       << "wavelength = " << format_real(cfg.sagnac.wavelength) << "\n"
       << "enclosed_area = " << format_real(cfg.sagnac.enclosed_area) << "\n"
       << "angular_velocity = " << format_real(cfg.sagnac.angular_velocity) << "\n"
       << "input_intensity = " << format_real(cfg.sagnac.input_intensity) << "\n"
       << "photon_rate = " << format_real(cfg.sagnac.photon_rate) << "\n\n";
    os << "[noise]\n"
       << "kind = " << enum_name(cfg.noise.kind, kNoiseKinds) << "\n"
       << "sigma = " << rad(cfg.noise.sigma) << "\n"
       << "seed = " << cfg.noise.seed << "\n\n";
    os << "[detection]\n"
       << "kind = " << enum_name(cfg.detection.kind, kDetectionKinds) << "\n";
    if (cfg.detection.photons_per_channel)
        os << "photons_per_channel = " << format_real(*cfg.detection.photons_per_channel) << "\n";
    os << "seed = " << cfg.detection.seed << "\n\n";
    os << "[sweep]\n"
       << "zeta_start = " << rad(cfg.sweep.zeta_start) << "\n"
       << "zeta_end = " << rad(cfg.sweep.zeta_end) << "\n"
       << "points = " << cfg.sweep.points << "\n";
    for (const auto& o : cfg.outputs) {
        os << "\n[output]\n"
           << "format = " << enum_name(o.format, kFormats) << "\n"
           << "path = " << o.path << "\n";
    }
    return os.str();
}

std::vector<ParseDiagnostic> apply_override(RunConfig& cfg, std::string_view assignment)
{
    auto fail = [](std::size_t index, std::string msg) {
        return std::vector<ParseDiagnostic>{{1, int(index) + 1, Severity::error, std::move(msg)}};
    };
    const std::size_t eq = assignment.find('=');
    if (eq == std::string_view::npos) return fail(assignment.size(), "override must have the form section.key=value");

    const std::size_t key_at = skip_spaces(assignment, 0);
    const std::string_view key = trim_right(assignment.substr(key_at, eq - key_at));
    if (key.starts_with("output."))
        return fail(key_at, "outputs cannot be overridden; use --out-dir or the config file");
    const auto it = setters().find(key);
    if (it == setters().end()) return fail(key_at, "unknown key '" + std::string(key) + "'");

    const std::size_t value_at = skip_spaces(assignment, eq + 1);
    const std::string_view value = trim_right(assignment.substr(value_at));
    if (value.empty()) return fail(value_at, "missing value");

    RunConfig next = cfg;
    if (auto err = it->second(next, value)) return fail(value_at + err->offset, err->message);
    next.positions.erase(std::string(key));
    finish_derived(next);
    cfg = std::move(next);
    return {};
}

}  // namespace sagnacsr
