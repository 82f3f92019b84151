#pragma once

// Umbrella header: complexity measures on finite function classes, the balanced
// sign-vector coupling, transductive risk bounds, and the verification harness.

#include "prclab/bounds.hpp"
#include "prclab/complexity.hpp"
#include "prclab/core.hpp"
#include "prclab/coupling.hpp"
#include "prclab/enumeration.hpp"
#include "prclab/errors.hpp"
#include "prclab/function_class.hpp"
#include "prclab/io.hpp"
#include "prclab/numeric.hpp"
#include "prclab/rng.hpp"
