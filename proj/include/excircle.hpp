#pragma once

#include "excircle/errors.hpp"
#include "excircle/quadrature.hpp"
#include "excircle/potentials.hpp"
#include "excircle/radial_dn.hpp"
#include "excircle/faddeev_kernel.hpp"
#include "excircle/bie.hpp"
#include "excircle/hk_cache.hpp"
#include "excircle/analysis.hpp"
#include "excircle/oracles.hpp"
#include "excircle/config.hpp"
#include "excircle/sweep.hpp"
