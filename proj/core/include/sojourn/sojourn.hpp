#pragma once

// Convenience header pulling in the whole public API.

#include "sojourn/ac_stark.hpp"
#include "sojourn/errors.hpp"
#include "sojourn/floquet.hpp"
#include "sojourn/linalg.hpp"
#include "sojourn/models.hpp"
#include "sojourn/multistate.hpp"
#include "sojourn/perturbation.hpp"
#include "sojourn/propagator.hpp"
#include "sojourn/sojourn_time.hpp"
#include "sojourn/spectral_core.hpp"
#include "sojourn/width.hpp"
