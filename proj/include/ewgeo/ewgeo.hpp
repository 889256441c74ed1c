#pragma once

// Geometry of the tripartite Werner family: closed-form SD/Bures metric
// tensors, an explicit density-matrix oracle, separability-region predicates,
// Monte Carlo probability estimation and deterministic quadrature.

#include "ewgeo/core.hpp"
#include "ewgeo/curvature.hpp"
#include "ewgeo/errors.hpp"
#include "ewgeo/metric.hpp"
#include "ewgeo/montecarlo.hpp"
#include "ewgeo/oracle.hpp"
#include "ewgeo/quadrature.hpp"
#include "ewgeo/regions.hpp"
#include "ewgeo/report.hpp"
#include "ewgeo/rng.hpp"
