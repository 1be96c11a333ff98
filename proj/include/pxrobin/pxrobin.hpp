#pragma once
// Umbrella header.

#include "pxrobin/cli.hpp"
#include "pxrobin/config.hpp"
#include "pxrobin/critical_point.hpp"
#include "pxrobin/descent.hpp"
#include "pxrobin/discretization.hpp"
#include "pxrobin/energy.hpp"
#include "pxrobin/error.hpp"
#include "pxrobin/expr.hpp"
#include "pxrobin/fem.hpp"
#include "pxrobin/fountain.hpp"
#include "pxrobin/geometry.hpp"
#include "pxrobin/io.hpp"
#include "pxrobin/modular.hpp"
#include "pxrobin/mountain_pass.hpp"
#include "pxrobin/problem.hpp"
#include "pxrobin/properties.hpp"
#include "pxrobin/robin_eigs.hpp"
#include "pxrobin/sphere.hpp"
#include "pxrobin/sublinear.hpp"
#include "pxrobin/two_solutions.hpp"
