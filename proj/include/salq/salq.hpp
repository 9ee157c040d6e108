#pragma once

// Umbrella header.

#include "salq/coeffs.hpp"
#include "salq/errors.hpp"
#include "salq/io.hpp"
#include "salq/linear_theory.hpp"
#include "salq/numerics.hpp"
#include "salq/oracle.hpp"
#include "salq/params.hpp"
#include "salq/qsolution.hpp"
#include "salq/validation.hpp"
