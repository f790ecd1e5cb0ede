#pragma once

#include "opint/core.hpp"
#include "opint/spectral.hpp"
#include "opint/function.hpp"
#include "opint/besov.hpp"
#include "opint/operator_integrals.hpp"
#include "opint/perturbation.hpp"
#include "opint/io.hpp"
