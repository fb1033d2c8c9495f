#pragma once

#include "tailbound/bounds.hpp"
#include "tailbound/bounds_catalog.hpp"
#include "tailbound/chernoff_engine.hpp"
#include "tailbound/dependent_models.hpp"
#include "tailbound/errors.hpp"
#include "tailbound/exact_oracles.hpp"
#include "tailbound/feller_expansion.hpp"
#include "tailbound/numeric.hpp"
#include "tailbound/pgf_decomposition.hpp"
#include "tailbound/polynomial.hpp"
#include "tailbound/spec.hpp"
