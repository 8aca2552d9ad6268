#pragma once

// Many-to-many matching with contracts: markets, substitutable-preference
// verification, quasi-stability and stability, the Blair lattice of
// quasi-stable allocations, generalized deferred acceptance, market
// disruption scenarios, and exhaustive oracles for all of it.

#include "qstab/base.hpp"
#include "qstab/choice.hpp"
#include "qstab/da.hpp"
#include "qstab/gen.hpp"
#include "qstab/io.hpp"
#include "qstab/lattice.hpp"
#include "qstab/model.hpp"
#include "qstab/oracle.hpp"
#include "qstab/scenario.hpp"
#include "qstab/stability.hpp"
#include "qstab/verify.hpp"
