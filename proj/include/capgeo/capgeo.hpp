// Umbrella header.
#pragma once

#include "capgeo/body.hpp"
#include "capgeo/capacity_formulas.hpp"
#include "capgeo/capacity_solver.hpp"
#include "capgeo/common.hpp"
#include "capgeo/descriptor.hpp"
#include "capgeo/diagnostics.hpp"
#include "capgeo/field_io.hpp"
#include "capgeo/functionals.hpp"
#include "capgeo/imcf_flow.hpp"
#include "capgeo/inequality_harness.hpp"
#include "capgeo/limit_probe.hpp"
#include "capgeo/mesh.hpp"
#include "capgeo/radial_function.hpp"
#include "capgeo/report_io.hpp"
#include "capgeo/riesz.hpp"
#include "capgeo/version.hpp"
