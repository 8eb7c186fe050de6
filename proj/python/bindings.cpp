#include <algorithm>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sagnacsr/config.hpp"
#include "sagnacsr/correlator.hpp"
#include "sagnacsr/eraser_bank.hpp"
#include "sagnacsr/errors.hpp"
#include "sagnacsr/jones.hpp"
#include "sagnacsr/pipeline.hpp"
#include "sagnacsr/sagnac.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace sagnacsr;

namespace {

py::array_t<double> to_numpy(const std::vector<double>& v)
{
    py::array_t<double> a(py::ssize_t(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

std::vector<double> from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a)
{
    return std::vector<double>(a.data(), a.data() + a.size());
}

py::tuple diag_tuple(const ParseDiagnostic& d)
{
    return py::make_tuple(d.line, d.column, d.severity == Severity::error ? "error" : "warning", d.message);
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "sagnacsr: Sagnac quantum-eraser superresolution simulator";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
    py::register_exception<DegenerateTraceError>(m, "DegenerateTraceError", base.ptr());

    // jones_core
    py::class_<JonesVector>(m, "JonesVector")
        .def(py::init<>())
        .def(py::init([](ComplexAmp h, ComplexAmp v) { return JonesVector{h, v}; }), "h"_a, "v"_a)
        .def_readwrite("h", &JonesVector::h)
        .def_readwrite("v", &JonesVector::v)
        .def("intensity", &JonesVector::intensity)
        .def("__repr__", [](const JonesVector& j) {
            return "JonesVector(" + py::repr(py::cast(j.h)).cast<std::string>() + ", " +
                   py::repr(py::cast(j.v)).cast<std::string>() + ")";
        });

    py::class_<JonesMatrix>(m, "JonesMatrix")
        .def(py::init<>())
        .def(py::init([](ComplexAmp hh, ComplexAmp hv, ComplexAmp vh, ComplexAmp vv) {
                 return JonesMatrix{hh, hv, vh, vv};
             }),
             "hh"_a, "hv"_a, "vh"_a, "vv"_a)
        .def_readwrite("hh", &JonesMatrix::hh)
        .def_readwrite("hv", &JonesMatrix::hv)
        .def_readwrite("vh", &JonesMatrix::vh)
        .def_readwrite("vv", &JonesMatrix::vv)
        .def("adjoint", &JonesMatrix::adjoint)
        .def("__matmul__", &JonesMatrix::operator*);

    py::enum_<QwpRotation>(m, "QwpRotation")
        .value("absent", QwpRotation::absent)
        .value("fast_axis_vertical", QwpRotation::fast_axis_vertical)
        .value("fast_axis_horizontal", QwpRotation::fast_axis_horizontal);

    m.def("apply", &apply, "m"_a, "j"_a);
    m.def("hwp_matrix", &hwp_matrix, "theta"_a);
    m.def("retarder_matrix", &retarder_matrix, "xi"_a);
    m.def("qwp_phase_for_rotation", &qwp_phase_for_rotation, "rotation"_a);
    m.def("polarizer_matrix", &polarizer_matrix, "theta"_a);
    m.def("bs_split", [](const JonesVector& j) {
        const auto r = bs_split(j);
        return py::make_tuple(r.transmitted, r.reflected);
    }, "j"_a, "bs_split(j) -> (transmitted, reflected)");
    m.def("pbs_route", [](const JonesVector& j) {
        const auto r = pbs_route(j);
        return py::make_tuple(r.h_port, r.v_port);
    }, "j"_a, "pbs_route(j) -> (h_port, v_port)");

    // sagnac_engine
    py::class_<SagnacConfig>(m, "SagnacConfig")
        .def(py::init<>())
        .def_readwrite("wavelength", &SagnacConfig::wavelength)
        .def_readwrite("enclosed_area", &SagnacConfig::enclosed_area)
        .def_readwrite("angular_velocity", &SagnacConfig::angular_velocity)
        .def_readwrite("input_intensity", &SagnacConfig::input_intensity)
        .def_readwrite("photon_rate", &SagnacConfig::photon_rate);

    py::enum_<NoiseKind>(m, "NoiseKind")
        .value("none", NoiseKind::none)
        .value("common_path", NoiseKind::common_path)
        .value("differential_arm", NoiseKind::differential_arm);

    py::class_<NoiseSpec>(m, "NoiseSpec")
        .def(py::init([](NoiseKind kind, double sigma, std::uint64_t seed) { return NoiseSpec{kind, sigma, seed}; }),
             "kind"_a = NoiseKind::none, "sigma"_a = 0.0, "seed"_a = 0)
        .def_readwrite("kind", &NoiseSpec::kind)
        .def_readwrite("sigma", &NoiseSpec::sigma)
        .def_readwrite("seed", &NoiseSpec::seed);

    m.def("sagnac_phase", &sagnac_phase, "cfg"_a);
    m.def("sagnac_output", &sagnac_output, "zeta"_a, "noise"_a = NoiseSpec{}, "sample"_a = 0,
          "input_intensity"_a = 1.0);
    m.def("mzi_output", &mzi_output, "zeta"_a, "noise"_a = NoiseSpec{}, "sample"_a = 0,
          "input_intensity"_a = 1.0);

    // eraser_bank
    py::enum_<BankMode>(m, "BankMode")
        .value("qwp_blocks", BankMode::qwp_blocks)
        .value("slm_pixels", BankMode::slm_pixels);

    py::class_<EraserBankSpec>(m, "EraserBankSpec")
        .def_static("make", &EraserBankSpec::make, "block_count"_a, "mode"_a = BankMode::qwp_blocks)
        .def_readwrite("block_count", &EraserBankSpec::block_count)
        .def_readwrite("mode", &EraserBankSpec::mode)
        .def_readwrite("schedule", &EraserBankSpec::schedule)
        .def_readwrite("strict_qwp", &EraserBankSpec::strict_qwp)
        .def_readwrite("polarizer_angle", &EraserBankSpec::polarizer_angle)
        .def("total_order", &EraserBankSpec::total_order)
        .def("validate", &EraserBankSpec::validate);

    py::class_<BlockFields>(m, "BlockFields")
        .def_readonly("k", &BlockFields::k)
        .def_readonly("e1", &BlockFields::e1)
        .def_readonly("e2", &BlockFields::e2)
        .def_readonly("global_phase", &BlockFields::global_phase);

    m.def("phase_schedule", &phase_schedule, "block_count"_a);
    m.def("block_fields", &block_fields, "e_a"_a, "k"_a, "xi_k"_a, "block_count"_a,
          "pol_angle"_a = kDefaultPolarizerAngle, "global_phase"_a = 0.0);
    m.def("slm_pixel_fields", &slm_pixel_fields, "e_a"_a, "k"_a, "xi_k"_a, "block_count"_a,
          "pol_angle"_a = kDefaultPolarizerAngle, "global_phase"_a = 0.0);
    m.def("block_intensities", &block_intensities, "zeta"_a, "k"_a, "xi_k"_a, "norm"_a);
    m.def("physical_block_norm", &physical_block_norm, "input_intensity"_a, "block_count"_a);

    // correlator
    py::class_<FringeTrace>(m, "FringeTrace")
        .def(py::init([](py::array_t<double> grid, py::array_t<double> values, std::string label) {
                 return FringeTrace{from_numpy(grid), from_numpy(values), std::move(label)};
             }),
             "zeta_grid"_a, "values"_a, "label"_a = "")
        .def_property_readonly("zeta_grid", [](const FringeTrace& t) { return to_numpy(t.zeta_grid); })
        .def_property_readonly("values", [](const FringeTrace& t) { return to_numpy(t.values); })
        .def_readwrite("label", &FringeTrace::label)
        .def("__len__", &FringeTrace::size);

    py::class_<CorrelationResult>(m, "CorrelationResult")
        .def_readonly("order", &CorrelationResult::order)
        .def_readonly("trace", &CorrelationResult::trace)
        .def_readonly("visibility", &CorrelationResult::visibility)
        .def_readonly("fringe_count", &CorrelationResult::fringe_count)
        .def_readonly("enhancement", &CorrelationResult::enhancement)
        .def_readonly("effective_wavelength_ratio", &CorrelationResult::effective_wavelength_ratio);

    py::enum_<DetectionKind>(m, "DetectionKind")
        .value("ideal", DetectionKind::ideal)
        .value("poisson", DetectionKind::poisson);

    py::class_<DetectionModel>(m, "DetectionModel")
        .def(py::init([](DetectionKind kind, double photons, std::uint64_t seed) {
                 return DetectionModel{kind, photons, seed};
             }),
             "kind"_a = DetectionKind::ideal, "photons_per_channel"_a = 1e15 / 8.0, "seed"_a = 0)
        .def_readwrite("kind", &DetectionModel::kind)
        .def_readwrite("photons_per_channel", &DetectionModel::photons_per_channel)
        .def_readwrite("seed", &DetectionModel::seed);

    m.def("period_grid", [](std::size_t n) { return to_numpy(period_grid(n)); }, "points"_a);
    m.def("uniform_grid", [](double a, double b, std::size_t n) { return to_numpy(uniform_grid(a, b, n)); },
          "start"_a, "end"_a, "points"_a);
    m.def("second_order", &second_order, "zeta"_a, "k"_a, "xi_k"_a);
    m.def("nth_order", [](py::array_t<double> grid, std::vector<double> schedule) {
        return nth_order(from_numpy(grid), schedule);
    }, "zeta_grid"_a, "schedule"_a);
    m.def("pbw_closed_form", [](py::array_t<double> grid, int order) {
        return pbw_closed_form(from_numpy(grid), order);
    }, "zeta_grid"_a, "order"_a);
    m.def("visibility", &visibility, "trace"_a);
    m.def("fitted_visibility", &fitted_visibility, "trace"_a, "order"_a);
    m.def("count_fringes", &count_fringes, "trace"_a, "expected_order"_a = std::optional<int>{});
    m.def("detect", &detect, "trace"_a, "model"_a);
    m.def("phase_sensitivity", &phase_sensitivity, "trace"_a, "model"_a);

    // config_dsl
    m.def("parse_config", [](const std::string& text) -> py::object {
        auto r = parse(text);
        if (auto* diags = std::get_if<std::vector<ParseDiagnostic>>(&r)) {
            py::list out;
            for (const auto& d : *diags) out.append(diag_tuple(d));
            return std::move(out);
        }
        return py::cast(std::get<RunConfig>(std::move(r)));
    }, "text"_a, "Returns a RunConfig, or a list of (line, column, severity, message) diagnostics.");

    py::class_<RunConfig>(m, "RunConfig")
        .def_readonly("bank", &RunConfig::bank)
        .def_readonly("sagnac", &RunConfig::sagnac)
        .def_readonly("noise", &RunConfig::noise)
        .def("serialize", &serialize)
        .def("validate", [](const RunConfig& c) {
            py::list out;
            for (const auto& d : validate(c)) out.append(diag_tuple(d));
            return out;
        })
        .def("__eq__", &RunConfig::operator==);
}
