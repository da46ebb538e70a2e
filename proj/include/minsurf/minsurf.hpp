#ifndef MINSURF_MINSURF_HPP
#define MINSURF_MINSURF_HPP

#include "minsurf/errors.hpp"
#include "minsurf/numeric.hpp"
#include "minsurf/expr.hpp"
#include "minsurf/surface_models.hpp"
#include "minsurf/scenario_io.hpp"
#include "minsurf/ball_geometry.hpp"
#include "minsurf/test_functions.hpp"
#include "minsurf/stability_analysis.hpp"
#include "minsurf/spectrum.hpp"
#include "minsurf/greens_function.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/geodesic.hpp"
#include "minsurf/report.hpp"

#endif  // MINSURF_MINSURF_HPP
