#include <doctest.h>

#include <random>
#include <sstream>

#include "sagnacsr/config.hpp"

using namespace sagnacsr;

namespace {

RunConfig parse_ok(std::string_view src)
{
    auto r = parse(src);
    if (auto* d = std::get_if<std::vector<ParseDiagnostic>>(&r)) {
        for (const auto& x : *d) MESSAGE(x.to_string());
        FAIL("unexpected diagnostics");
    }
    return std::get<RunConfig>(r);
}

std::vector<ParseDiagnostic> parse_err(std::string_view src)
{
    auto r = parse(src);
    REQUIRE(std::holds_alternative<std::vector<ParseDiagnostic>>(r));
    return std::get<std::vector<ParseDiagnostic>>(r);
}

bool mentions(const std::vector<ParseDiagnostic>& d, std::string_view text)
{
    for (const auto& x : d)
        if (x.message.find(text) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("empty source gives defaults")
{
    const RunConfig cfg = parse_ok("");
    CHECK(cfg == RunConfig{});
    CHECK(cfg.bank.block_count == 4);
    CHECK(cfg.sagnac.wavelength == 632.8e-9);
    CHECK(cfg.detection.kind == DetectionKind::ideal);
    CHECK(cfg.sweep.zeta_start == 0.0);
    CHECK(cfg.sweep.zeta_end == doctest::Approx(2 * kPi));
    CHECK(cfg.sweep.points == 4096);
    CHECK(validate(cfg).empty());
    CHECK(parse_ok("# only a comment\n\n   \n") == RunConfig{});
}

TEST_CASE("block_count sets the schedule")
{
    const RunConfig cfg = parse_ok("[bank]\nblock_count = 8");
    CHECK(cfg.bank.block_count == 8);
    CHECK(cfg.bank.total_order() == 16);
    REQUIRE(cfg.bank.schedule.size() == 8);
    for (int k = 0; k < 8; ++k) CHECK(cfg.bank.schedule[k] == doctest::Approx(kPi * k / 8));
}

TEST_CASE("non-integer block_count is reported at the value")
{
    const auto d = parse_err("[bank]\nblock_count = zero");
    REQUIRE(d.size() == 1);
    CHECK(d[0].line == 2);
    CHECK(d[0].column == 15);
    CHECK(d[0].message == "expected integer");
    CHECK(d[0].to_string() == "2:15: error: expected integer");
}

TEST_CASE("units")
{
    const RunConfig cfg = parse_ok(
        "[sagnac]\nwavelength = 1550 n\nangular_velocity = 5u\nphoton_rate = 3 m\n"
        "[sweep]\nzeta_start = -90 deg\nzeta_end = 270deg\n[bank]\npolarizer_angle = 0.5 rad\n");
    CHECK(cfg.sagnac.wavelength == doctest::Approx(1550e-9));
    CHECK(cfg.sagnac.angular_velocity == doctest::Approx(5e-6));
    CHECK(cfg.sagnac.photon_rate == doctest::Approx(3e-3));
    CHECK(cfg.sweep.zeta_start == doctest::Approx(-kPi / 2));
    CHECK(cfg.sweep.zeta_end == doctest::Approx(1.5 * kPi));
    CHECK(cfg.bank.polarizer_angle == 0.5);

    const auto d = parse_err("[sagnac]\nwavelength = 632.8 nm\n");
    REQUIRE(d.size() == 1);
    CHECK(d[0].column == 20);
    CHECK(mentions(d, "unknown unit suffix 'nm'"));
    // Plain reals take no suffix at all.
    CHECK(parse_err("[sagnac]\nenclosed_area = 2 m\n")[0].column == 19);
}

TEST_CASE("all errors in one pass")
{
    const auto d = parse_err(
        "[bank]\n"
        "block_count = 0\n"
        "colour = red\n"
        "[sagnac]\n"
        "wavelength 5\n"
        "[nonsense]\n"
        "x = 1\n"
        "[noise]\n"
        "kind = loud\n"
        "seed =\n"
        "[bank]\n");
    REQUIRE(d.size() == 7);
    CHECK(d[0].line == 2);
    CHECK(d[0].column == 15);
    CHECK(d[0].message == "expected positive integer");
    CHECK((d[1].line == 3 && d[1].column == 1));
    CHECK(mentions({d[1]}, "unknown key 'colour'"));
    CHECK((d[2].line == 5 && d[2].column == 12));
    CHECK((d[3].line == 6 && d[3].column == 2));
    CHECK((d[4].line == 9 && d[4].column == 8));
    CHECK(mentions({d[4]}, "none|common_path|differential_arm"));
    CHECK((d[5].line == 10 && d[5].column == 7));
    CHECK(d[5].message == "missing value");
    CHECK((d[6].line == 11 && d[6].column == 2));
    CHECK(mentions({d[6]}, "duplicate section"));
}

TEST_CASE("structural diagnostics")
{
    CHECK(parse_err("block_count = 4\n")[0].message == "key outside of any section");
    CHECK(mentions(parse_err("[bank]\nblock_count = 4\nblock_count = 5\n"), "first set on line 2"));
    CHECK(parse_err("[bank\n")[0].column == 6);
    CHECK(parse_err("[bank] x\n")[0].column == 8);
    CHECK(parse_err("[ ]\n")[0].column == 3);
    CHECK(parse_err("[bank]\nblock_count = 4 4\n")[0].column == 17);
    CHECK(parse_err("[bank]\n= 4\n")[0].message == "expected key");

    const auto d = parse_err("[output]\nformat = csv\n[bank]\n");
    REQUIRE(d.size() == 1);
    CHECK(d[0].line == 1);
    CHECK(mentions(d, "needs both"));

    const RunConfig cfg = parse_ok("[output]\nformat = svg\npath = out/plot.svg\n[output]\nformat=csv\npath=a.csv\n");
    REQUIRE(cfg.outputs.size() == 2);
    CHECK(cfg.outputs[0].format == OutputFormat::svg);
    CHECK(cfg.outputs[1].path == "a.csv");

    // CRLF line endings and trailing comments.
    CHECK(parse_ok("[bank]\r\nblock_count = 3 # three\r\n").bank.block_count == 3);
}

TEST_CASE("validate")
{
    RunConfig cfg = parse_ok("[bank]\nblock_count = 16\n[sweep]\npoints = 512\n");
    auto d = validate(cfg);
    REQUIRE(has_errors(d));
    CHECK(mentions(d, "sweep.points below 64·N"));
    CHECK(d[0].line == 4);

    cfg = parse_ok("[bank]\nblock_count = 4\nstrict_qwp = true\n");
    d = validate(cfg);
    CHECK(has_errors(d));
    CHECK(mentions(d, "strict QWP"));
    CHECK(d[0].line == 3);
    CHECK(validate(parse_ok("[bank]\nblock_count = 2\nstrict_qwp = true\n")).empty());

    CHECK(validate(RunConfig{}).empty());

    cfg = parse_ok("[sweep]\nzeta_end = 90 deg\n[bank]\nblock_count=1\n");
    d = validate(cfg);
    CHECK_FALSE(has_errors(d));
    REQUIRE(d.size() == 1);
    CHECK(d[0].severity == Severity::warning);

    cfg = parse_ok("[detection]\nkind = poisson\nphotons_per_channel = 0\n");
    CHECK(mentions(validate(cfg), "photon budget"));
    cfg = parse_ok("[noise]\nkind = differential_arm\n");
    CHECK(mentions(validate(cfg), "differential_arm"));
    cfg = parse_ok("[sagnac]\nwavelength = -1\n");
    CHECK(mentions(validate(cfg), "wavelength must be positive"));
    cfg = parse_ok("[sweep]\nzeta_start = 1\nzeta_end = 1\n");
    CHECK(mentions(validate(cfg), "must exceed"));
}

TEST_CASE("overrides")
{
    RunConfig cfg;
    CHECK(apply_override(cfg, "bank.block_count=8").empty());
    CHECK(cfg.bank.schedule.size() == 8);
    CHECK(apply_override(cfg, "sweep.zeta_end = 180 deg").empty());
    CHECK(cfg.sweep.zeta_end == doctest::Approx(kPi));

    auto d = apply_override(cfg, "bank.block_count=two");
    REQUIRE(d.size() == 1);
    CHECK(d[0].column == 18);
    CHECK(cfg.bank.block_count == 8);
    CHECK(apply_override(cfg, "bank.colour=1")[0].column == 1);
    CHECK(apply_override(cfg, "bank.block_count")[0].message.find("form") != std::string::npos);
    CHECK(apply_override(cfg, "output.path=x")[0].message.find("cannot") != std::string::npos);
}

// ---------------------------------------------------------------------------
// Fuzz corpus: valid documents with one planted error at a known position.

namespace {

struct Line {
    std::string key;
    std::string value;
};

struct Section {
    std::string name;
    std::vector<Line> lines;
};

const std::vector<Section>& valid_sections()
{
    static const std::vector<Section> s{
        {"bank", {{"block_count", "6"}, {"mode", "slm_pixels"}, {"strict_qwp", "false"}, {"polarizer_angle", "45 deg"}}},
        {"sagnac",
         {{"wavelength", "780 n"}, {"enclosed_area", "0.5"}, {"angular_velocity", "1e-4"}, {"photon_rate", "2e14"}}},
        {"noise", {{"kind", "common_path"}, {"sigma", "0.2"}, {"seed", "17"}}},
        {"detection", {{"kind", "poisson"}, {"photons_per_channel", "1e9"}, {"seed", "4"}}},
        {"sweep", {{"zeta_start", "0"}, {"zeta_end", "6.283185307179586"}, {"points", "2048"}}},
    };
    return s;
}

struct Planted {
    std::string text;
    int line;
    int column;
};

Planted plant(std::mt19937_64& rng)
{
    auto pick = [&](int n) { return int(std::uniform_int_distribution<int>(0, n - 1)(rng)); };
    auto pad = [&] { return std::string(std::size_t(pick(4)), ' '); };

    std::vector<Section> sections = valid_sections();
    std::shuffle(sections.begin(), sections.end(), rng);
    sections.resize(std::size_t(1 + pick(int(sections.size()))));

    // Choose the victim line among all key lines.
    std::size_t total = 0;
    for (const auto& s : sections) total += s.lines.size();
    const std::size_t victim = std::size_t(pick(int(total)));
    const int kind = pick(7);

    std::ostringstream os;
    int lineno = 0, want_line = 0, want_col = 0;
    std::size_t seen = 0;
    for (const auto& s : sections) {
        if (pick(3) == 0) {
            os << "# " << s.name << " settings\n";
            ++lineno;
        }
        os << "[" << s.name << "]\n";
        ++lineno;
        for (const auto& l : s.lines) {
            ++lineno;
            const std::string indent = pad(), before = pad(), after = pad();
            std::string key = l.key, value = l.value, eq = "=";
            const bool hit = seen++ == victim;
            if (hit) {
                want_line = lineno;
                const int key_col = int(indent.size()) + 1;
                const int value_col = key_col + int(key.size() + before.size() + 1 + after.size());
                switch (kind) {
                case 0:  // unknown key
                    key = "bogus_" + key;
                    want_col = key_col;
                    break;
                case 1:  // missing '='
                    eq = ":";
                    want_col = key_col + int(key.size() + before.size());
                    break;
                case 2:  // missing value
                    value.clear();
                    want_col = value_col;
                    break;
                case 3:  // garbage value
                    value = "@" + value;
                    want_col = value_col;
                    break;
                case 4: {  // bad unit, trailing junk after a number, or a misspelt enum
                    const auto space = value.find(' ');
                    if (space != std::string::npos) {
                        value = value.substr(0, space) + " q";
                        want_col = value_col + int(space) + 1;
                    } else if (value.find_first_of("0123456789") == 0) {
                        value += " !";
                        want_col = value_col + int(value.size()) - 1;
                    } else {
                        value += "x";
                        want_col = value_col;
                    }
                    break;
                }
                case 5:  // duplicate key: plant the repeat on the next line
                    os << indent << key << before << eq << after << value << "\n";
                    ++lineno;
                    want_line = lineno;
                    want_col = key_col;
                    break;
                case 6:  // malformed section header replaces the key line
                    os << indent << "[" << s.name << "\n";
                    want_col = key_col + 1 + int(s.name.size());
                    continue;
                }
            }
            os << indent << key << before << eq << after << value;
            if (pick(4) == 0 && !(hit && kind == 2)) os << " # note";
            os << "\n";
        }
    }
    return {os.str(), want_line, want_col};
}

}  // namespace

TEST_CASE("fuzz: planted errors are reported at the exact position")
{
    std::mt19937_64 rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const Planted p = plant(rng);
        const auto r = parse(p.text);
        INFO(p.text);
        REQUIRE(std::holds_alternative<std::vector<ParseDiagnostic>>(r));
        const auto& d = std::get<std::vector<ParseDiagnostic>>(r);
        REQUIRE(!d.empty());
        CHECK(d[0].line == p.line);
        CHECK(d[0].column == p.column);
        ++checked;
    }
    CHECK(checked >= 100);
}

TEST_CASE("fuzz: arbitrary bytes never crash and always yield one outcome")
{
    std::mt19937_64 rng(99);
    const std::string alphabet = "[]=#_ \t\n\rabcdeknopstz0123456789.-+e";
    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        const int n = int(rng() % 200);
        for (int i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
        const auto r = parse(s);
        if (auto* d = std::get_if<std::vector<ParseDiagnostic>>(&r)) {
            REQUIRE(!d->empty());
            for (const auto& x : *d) REQUIRE((x.line >= 1 && x.column >= 1));
        }
    }
}

TEST_CASE("round trip: parse(serialize(cfg)) == cfg")
{
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    auto pos = [&] { return std::exp(u(rng)); };
    for (int trial = 0; trial < 60; ++trial) {
        RunConfig cfg;
        cfg.bank = EraserBankSpec::make(1 + int(rng() % 40), rng() % 2 ? BankMode::qwp_blocks : BankMode::slm_pixels);
        cfg.bank.strict_qwp = rng() % 2;
        cfg.bank.polarizer_angle = u(rng);
        cfg.sagnac = {pos(), pos(), u(rng), pos(), pos()};
        cfg.noise = {NoiseKind(rng() % 3), pos(), rng()};
        cfg.detection.kind = rng() % 2 ? DetectionKind::ideal : DetectionKind::poisson;
        if (rng() % 2) cfg.detection.photons_per_channel = pos();
        cfg.detection.seed = rng();
        cfg.sweep = {u(rng), u(rng), std::size_t(1 + rng() % 100000)};
        for (int o = int(rng() % 3); o > 0; --o)
            cfg.outputs.push_back({OutputFormat(rng() % 3), "dir/file_" + std::to_string(rng() % 1000) + ".out"});
        const std::string text = serialize(cfg);
        INFO(text);
        const RunConfig back = parse_ok(text);
        CHECK(back == cfg);
        CHECK(serialize(back) == text);
    }
}

TEST_CASE("format_real is shortest round-trip")
{
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(632.8e-9) == "6.328e-07");
    CHECK(std::stod(format_real(kPi)) == kPi);
}
