#pragma once

// Umbrella header: the full public surface.

#include "twistlab/constants.hpp"
#include "twistlab/dual_bruteforce.hpp"
#include "twistlab/dual_norm.hpp"
#include "twistlab/errors.hpp"
#include "twistlab/experiments.hpp"
#include "twistlab/finite_vector.hpp"
#include "twistlab/interpolation.hpp"
#include "twistlab/invariants.hpp"
#include "twistlab/json_io.hpp"
#include "twistlab/norm_oracle.hpp"
#include "twistlab/random.hpp"
#include "twistlab/run_log.hpp"
#include "twistlab/tsirelson.hpp"
#include "twistlab/tsirelson_bruteforce.hpp"
#include "twistlab/twisted.hpp"
#include "twistlab/version.hpp"
