#pragma once

// Line-oriented experiment description:
//
//   # comment
//   [bank]
//   block_count = 8
//   [sagnac]
//   wavelength = 632.8n
//   [sweep]
//   zeta_end = 360 deg
//
// See docs/GRAMMAR.md for the full grammar, keys and defaults.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sagnacsr/correlator.hpp"
#include "sagnacsr/eraser_bank.hpp"
#include "sagnacsr/sagnac.hpp"

namespace sagnacsr {

enum class OutputFormat { csv, json, svg };

struct OutputSpec {
    OutputFormat format = OutputFormat::csv;
    std::string path;

    bool operator==(const OutputSpec&) const = default;
};

struct SweepSpec {
    double zeta_start = 0.0;
    double zeta_end = 2.0 * kPi;
    std::size_t points = 4096;

    bool operator==(const SweepSpec&) const = default;
};

struct DetectionSettings {
    DetectionKind kind = DetectionKind::ideal;
    /// Unset means photon_rate / N.
    std::optional<double> photons_per_channel;
    std::uint64_t seed = 0;

    bool operator==(const DetectionSettings&) const = default;
};

struct SourcePos {
    int line = 1;
    int column = 1;
};

struct RunConfig {
    EraserBankSpec bank = EraserBankSpec::make(4);
    SagnacConfig sagnac;
    NoiseSpec noise;
    DetectionSettings detection;
    SweepSpec sweep;
    std::vector<OutputSpec> outputs;

    /// "section.key" -> where it was set. Not part of equality.
    std::map<std::string, SourcePos> positions;

    DetectionModel detection_model() const;
    std::vector<double> zeta_grid() const;

    bool operator==(const RunConfig& o) const;
};

enum class Severity { error, warning };

struct ParseDiagnostic {
    int line = 1;
    int column = 1;
    Severity severity = Severity::error;
    std::string message;

    /// "line:column: error: message"
    std::string to_string() const;
};

using ParseResult = std::variant<RunConfig, std::vector<ParseDiagnostic>>;

/// Structural and per-value parse. Returns a config, or every diagnostic
/// found in one pass (never both, never neither).
ParseResult parse(std::string_view source);

/// Cross-field checks on a parsed config. Empty means valid; warnings may
/// appear without errors.
std::vector<ParseDiagnostic> validate(const RunConfig& cfg);

bool has_errors(const std::vector<ParseDiagnostic>& diags);

/// Canonical text form; parse(serialize(cfg)) == cfg.
std::string serialize(const RunConfig& cfg);

/// Applies "section.key=value" on top of a parsed config. Diagnostics report
/// line 1 and the column within the assignment text.
std::vector<ParseDiagnostic> apply_override(RunConfig& cfg, std::string_view assignment);

/// Shortest decimal text that reads back to exactly `v`.
std::string format_real(double v);

}  // namespace sagnacsr
