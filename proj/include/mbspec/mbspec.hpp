#pragma once

// Umbrella header: band-gap structure of the bounded multibarrier potential
// from closed-form transfer matrices, with a finite-chain matrix-product
// oracle and multi-channel reflection limits.

#include "mbspec/chain.hpp"
#include "mbspec/commands.hpp"
#include "mbspec/csv.hpp"
#include "mbspec/dispersion.hpp"
#include "mbspec/errors.hpp"
#include "mbspec/model.hpp"
#include "mbspec/multichannel.hpp"
#include "mbspec/run_config.hpp"
#include "mbspec/scan.hpp"
