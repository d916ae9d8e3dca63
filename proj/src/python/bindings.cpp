// SPDX-License-Identifier: Apache-2.0
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ramec/harness.hpp"
#include "ramec/version.hpp"

namespace py = pybind11;
using namespace ramec;

PYBIND11_MODULE(_ramec, m) {
    m.doc() = "Rotatable-antenna MEC joint optimization core";
    m.attr("__version__") = kVersion;

    // geometry
    py::class_<ArrayGeometry>(m, "ArrayGeometry")
        .def_readonly("kx", &ArrayGeometry::kx)
        .def_readonly("ky", &ArrayGeometry::ky)
        .def_readonly("spacing", &ArrayGeometry::spacing)
        .def_readonly("theta_max", &ArrayGeometry::theta_max)
        .def_readonly("positions", &ArrayGeometry::positions)
        .def("size", &ArrayGeometry::size);
    py::class_<UserGeometry>(m, "UserGeometry")
        .def_readonly("position", &UserGeometry::position)
        .def_readonly("distance_from_origin", &UserGeometry::distance_from_origin)
        .def_readonly("zenith", &UserGeometry::zenith)
        .def_readonly("azimuth", &UserGeometry::azimuth);
    m.def("build_array", &build_array, py::arg("kx"), py::arg("ky"), py::arg("spacing"),
          py::arg("theta_max"));
    m.def("user_position", &user_position, py::arg("r"), py::arg("zenith"), py::arg("azimuth"));
    m.def("antenna_gain", &antenna_gain, py::arg("boresight"), py::arg("direction"), py::arg("g0"),
          py::arg("directivity"));
    m.def("path_loss", &path_loss, py::arg("distance"), py::arg("ref_gain"),
          py::arg("pathloss_exp"));
    m.def("normalized_peak_gain", &normalized_peak_gain, py::arg("directivity"));

    // pointing
    py::class_<RotationAngles>(m, "RotationAngles")
        .def_readonly("zenith", &RotationAngles::zenith)
        .def_readonly("azimuth", &RotationAngles::azimuth);
    py::class_<PointingMatrix>(m, "PointingMatrix")
        .def_readonly("num_antennas", &PointingMatrix::num_antennas)
        .def_readonly("num_slots", &PointingMatrix::num_slots)
        .def("col", [](const PointingMatrix& p, int k, int slot) { return p.col(k, slot); },
             py::arg("antenna"), py::arg("slot") = 0);
    m.def("rotation_angles", &rotation_angles, py::arg("direction"), py::arg("theta_max"));
    m.def("optimal_pointing", &optimal_pointing, py::arg("direction"), py::arg("theta_max"));
    m.def("solve_linear_ball_slab", &solve_linear_ball_slab, py::arg("c"), py::arg("theta_max"));

    // resource allocation
    py::class_<UserTaskParams>(m, "UserTaskParams")
        .def(py::init<>())
        .def_readwrite("bandwidth", &UserTaskParams::bandwidth)
        .def_readwrite("overhead", &UserTaskParams::overhead)
        .def_readwrite("cycles_per_bit", &UserTaskParams::cycles_per_bit)
        .def_readwrite("frame", &UserTaskParams::frame)
        .def_readwrite("e_max", &UserTaskParams::e_max)
        .def_readwrite("circuit_power", &UserTaskParams::circuit_power)
        .def_readwrite("capacitance", &UserTaskParams::capacitance)
        .def_readwrite("r_min", &UserTaskParams::r_min)
        .def_readwrite("weight", &UserTaskParams::weight);
    py::class_<Allocation>(m, "Allocation")
        .def_readonly("offload_energy", &Allocation::offload_energy)
        .def_readonly("slot", &Allocation::slot)
        .def_readonly("cpu_freq", &Allocation::cpu_freq)
        .def_readonly("transmit_power", &Allocation::transmit_power)
        .def_readonly("r_loc", &Allocation::r_loc)
        .def_readonly("r_off", &Allocation::r_off)
        .def_readonly("e_loc", &Allocation::e_loc)
        .def_readonly("e_off", &Allocation::e_off);
    py::class_<ResidualReport>(m, "ResidualReport")
        .def_readonly("energy", &ResidualReport::energy)
        .def_readonly("time", &ResidualReport::time)
        .def_readonly("slot_range", &ResidualReport::slot_range)
        .def_readonly("rate_min", &ResidualReport::rate_min)
        .def_readonly("nonneg", &ResidualReport::nonneg)
        .def_readonly("objective", &ResidualReport::objective)
        .def("max_violation", &ResidualReport::max_violation);
    py::class_<ResourceReport>(m, "ResourceReport")
        .def_readonly("converged", &ResourceReport::converged)
        .def_readonly("feasible", &ResourceReport::feasible)
        .def_readonly("kkt_stationarity", &ResourceReport::kkt_stationarity)
        .def_readonly("kkt_complementarity", &ResourceReport::kkt_complementarity)
        .def_readonly("residuals", &ResourceReport::residuals)
        .def_readonly("infeasible_user", &ResourceReport::infeasible_user)
        .def_readonly("message", &ResourceReport::message);
    m.def("local_rate_energy", &local_rate_energy, py::arg("cpu_freq"), py::arg("params"));
    m.def("offload_rate", &offload_rate, py::arg("offload_energy"), py::arg("slot"),
          py::arg("gain"), py::arg("bandwidth"), py::arg("overhead"));
    m.def("solve_resource_allocation", &solve_resource_allocation, py::arg("gains"),
          py::arg("params"), py::arg("settings") = SolverSettings{});
    m.def("validate_allocation", &validate_allocation, py::arg("allocation"), py::arg("gains"),
          py::arg("params"));
    py::class_<SolverSettings>(m, "SolverSettings")
        .def(py::init<>())
        .def_readwrite("kkt_tol", &SolverSettings::kkt_tol)
        .def_readwrite("barrier_mu", &SolverSettings::barrier_mu)
        .def_readwrite("max_newton_iters", &SolverSettings::max_newton_iters)
        .def_readwrite("max_outer_iters", &SolverSettings::max_outer_iters);

    // end-to-end solves
    py::enum_<SolveMode>(m, "SolveMode")
        .value("dynamic", SolveMode::Dynamic)
        .value("static", SolveMode::Static)
        .value("fixed", SolveMode::Fixed);
    py::class_<SolveReport>(m, "SolveReport")
        .def_readonly("outer_iterations", &SolveReport::outer_iterations)
        .def_readonly("objective_trace", &SolveReport::objective_trace)
        .def_readonly("converged", &SolveReport::converged)
        .def_readonly("max_constraint_residual", &SolveReport::max_constraint_residual)
        .def_readonly("wall_time", &SolveReport::wall_time);
    py::class_<Solution>(m, "Solution")
        .def_readonly("pointing", &Solution::pointing)
        .def_readonly("allocation", &Solution::allocation)
        .def_readonly("objective", &Solution::objective)
        .def_readonly("report", &Solution::report);
    py::class_<Scenario>(m, "Scenario")
        .def_readonly("users", &Scenario::users)
        .def_readonly("seed", &Scenario::seed);

    py::class_<ExperimentConfig>(m, "ExperimentConfig");
    m.def("config_from_json", &config_from_json_text, py::arg("text"));
    m.def("config_to_json", &config_to_json_text, py::arg("config"));
    m.def("generate_scenario", &generate_scenario, py::arg("config"), py::arg("seed"));
    m.def(
        "solve",
        [](const Scenario& scenario, const std::string& mode) {
            return solve_with_mode(scenario, solve_mode_from_string(mode), AoSettings{});
        },
        py::arg("scenario"), py::arg("mode"));
}
