// dicke.hpp: Umbrella header.

#pragma once

#include "dicke/algebra.hpp"
#include "dicke/dynamics.hpp"
#include "dicke/errors.hpp"
#include "dicke/hamiltonian.hpp"
#include "dicke/io.hpp"
#include "dicke/ionsim.hpp"
#include "dicke/mapping.hpp"
#include "dicke/models.hpp"
#include "dicke/observables.hpp"
#include "dicke/scenario.hpp"
#include "dicke/version.hpp"
