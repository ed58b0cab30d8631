#pragma once

#include "dgdamage/adjoint.hpp"
#include "dgdamage/benchmark.hpp"
#include "dgdamage/cases.hpp"
#include "dgdamage/control.hpp"
#include "dgdamage/core.hpp"
#include "dgdamage/csv.hpp"
#include "dgdamage/fem.hpp"
#include "dgdamage/field.hpp"
#include "dgdamage/forward.hpp"
#include "dgdamage/mesh.hpp"
#include "dgdamage/nonsmooth.hpp"
#include "dgdamage/norms.hpp"
#include "dgdamage/problem.hpp"
#include "dgdamage/quadrature.hpp"
#include "dgdamage/tridiag.hpp"
